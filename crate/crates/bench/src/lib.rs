//! Instances shared by the benchmarks.

use std::collections::BTreeMap;

use troplog_core::{
    Chamber, Constraint, ContactMatrix, CurveBuilder, Divisor, MonoidForm, Relation, TargetModel,
    TropicalCurve, TropicalMap, VertexId,
};

/// Triangle core with four trees and seven legs.
pub fn triangle_with_trees() -> TropicalCurve {
    let x = MonoidForm::var;
    CurveBuilder::new()
        .vertex(0, 0)
        .vertex(1, 0)
        .vertex(2, 0)
        .vertex(3, 0)
        .vertex(4, 0)
        .vertex(5, 0)
        .vertex(6, 0)
        .edge(0, 1, x(4))
        .edge(1, 2, x(5))
        .edge(2, 0, x(6))
        .edge(0, 3, x(0))
        .edge(1, 4, x(1))
        .edge(3, 5, x(2))
        .edge(2, 6, x(3))
        .legs(3, 1)
        .legs(5, 2)
        .legs(4, 2)
        .legs(6, 2)
        .build()
        .expect("valid curve")
}

/// `e1 = e2, e1 + e3 < e4` over the seven parameters of [`triangle_with_trees`].
pub fn triangle_chamber() -> Chamber {
    let x = MonoidForm::var;
    Chamber::new(
        7,
        vec![
            Constraint::new(x(0), Relation::Equal, x(1)),
            Constraint::new(MonoidForm::sum_of(&[0, 2]), Relation::Less, x(3)),
        ],
    )
}

/// Elliptic vertex with `k` pendant paths of two edges each; `2k` parameters.
pub fn elliptic_star(k: usize) -> TropicalCurve {
    let mut b = CurveBuilder::new().vertex(0, 1);
    for i in 0..k as u32 {
        let (w, u) = (2 * i + 1, 2 * i + 2);
        b = b
            .vertex(w, 0)
            .vertex(u, 0)
            .edge(0, w, MonoidForm::var(2 * i as usize))
            .edge(w, u, MonoidForm::var(2 * i as usize + 1))
            .legs(w, 1)
            .legs(u, 2);
    }
    b.build().expect("valid curve")
}

/// Smooth elliptic vertex of degree `d` in the plane with `d` contact-one
/// legs on one coordinate line.
pub fn plane_curve(d: usize) -> TropicalMap {
    let curve = CurveBuilder::new()
        .vertex(0, 1)
        .legs(0, d)
        .build()
        .expect("valid curve");
    let target = TargetModel::new(
        vec![2],
        vec![Divisor {
            factor: 0,
            coord: 0,
        }],
    )
    .expect("valid target");
    let degree = BTreeMap::from([(VertexId(0), vec![d as u32])]);
    let mut m = TropicalMap::at_origin(curve, target, degree).expect("valid map");
    m.contact = ContactMatrix::new(1, vec![vec![1]; d]).expect("valid contact");
    m.with_leg_slopes_from_contact()
}
