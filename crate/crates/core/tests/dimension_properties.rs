use proptest::prelude::*;

use troplog_core::{
    expected_dim, expected_dim_relative, fictitious_forgetful, stratum_dim, ContactMatrix,
    Contribution, StratumGraph, StratumVertex, TargetModel,
};

fn permutation_count(m: usize) -> u64 {
    fn go(left: &mut Vec<usize>) -> u64 {
        if left.is_empty() {
            return 1;
        }
        let mut total = 0;
        for i in 0..left.len() {
            let x = left.remove(i);
            total += go(left);
            left.insert(i, x);
        }
        total
    }
    go(&mut (0..m).collect())
}

fn explicit(value: i64) -> StratumVertex {
    StratumVertex {
        genus: 0,
        contribution: Contribution::Explicit {
            value,
            provenance: "test".into(),
        },
        extra: 0,
    }
}

proptest! {
    #[test]
    fn zero_contact_is_absolute(g in 0u32..=1, n in 0usize..5, dims in prop::collection::vec(1u32..=3, 1..3), d in 0u32..5) {
        let target = TargetModel::new(dims.clone(), vec![]).unwrap();
        let degree = vec![d; dims.len()];
        let z = ContactMatrix::zeros(n, 0);
        prop_assert_eq!(
            expected_dim_relative(g, n, &target, &degree, &z).unwrap(),
            expected_dim(g, n, &target, &degree).unwrap()
        );
    }

    #[test]
    fn genus_one_dimension_adds_over_factors(a in 1u32..=3, b in 1u32..=3, da in 0u32..5, db in 0u32..5) {
        let joint = TargetModel::new(vec![a, b], vec![]).unwrap();
        let left = TargetModel::new(vec![a], vec![]).unwrap();
        let right = TargetModel::new(vec![b], vec![]).unwrap();
        prop_assert_eq!(
            expected_dim(1, 0, &joint, &[da, db]).unwrap(),
            expected_dim(1, 0, &left, &[da]).unwrap() + expected_dim(1, 0, &right, &[db]).unwrap()
        );
    }

    #[test]
    fn one_gluing_edge_subtracts_the_ambient_dimension(a in -5i64..20, b in -5i64..20, amb in 0u32..6) {
        let s = StratumGraph { vertices: vec![explicit(a), explicit(b)], edges: vec![(0, 1)], ambient_dim: amb };
        prop_assert_eq!(stratum_dim(&s).unwrap(), a + b - i64::from(amb));
    }

    #[test]
    fn forgetful_degree_counts_relabelings(m in 0usize..=6, others in 0usize..3) {
        let mut rows = vec![vec![1, 0]; m];
        rows.extend(vec![vec![0, 1]; others]);
        let g = ContactMatrix::new(2, rows).unwrap();
        let marks: Vec<usize> = (0..m).collect();
        let (mult, rest) = fictitious_forgetful(&g, 0, &marks).unwrap();
        prop_assert_eq!(mult, permutation_count(m));
        prop_assert_eq!(rest.num_markings(), others);
        prop_assert_eq!(rest.num_divisors(), 1);
    }
}
