use std::fmt;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::elim::{self, IntRow};
use super::{FormError, FormOrdering, LinearForm, MonoidForm, ParamNames};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Less,
    Equal,
    LessEq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::Equal => "=",
            Relation::LessEq => "<=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "<" => Some(Relation::Less),
            "=" => Some(Relation::Equal),
            "<=" | "≤" => Some(Relation::LessEq),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub lhs: MonoidForm,
    pub rel: Relation,
    pub rhs: MonoidForm,
}

impl Constraint {
    pub fn new(lhs: MonoidForm, rel: Relation, rhs: MonoidForm) -> Self {
        Self { lhs, rel, rhs }
    }

    /// `lhs rel rhs` from a signed difference `diff rel' 0`, with monoid sides.
    pub fn from_difference(diff: &LinearForm, rel: Relation) -> Self {
        // diff = pos - neg, and `diff < 0` reads `pos < neg`.
        let (pos, neg) = diff.split();
        Self {
            lhs: pos,
            rel,
            rhs: neg,
        }
    }

    fn difference(&self) -> LinearForm {
        self.rhs.as_linear() - self.lhs.as_linear()
    }

    pub fn holds_at(&self, point: &[BigRational]) -> bool {
        let d = self.difference().evaluate(point);
        match self.rel {
            Relation::Less => d.is_positive(),
            Relation::Equal => d.is_zero(),
            Relation::LessEq => !d.is_negative(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a ParamNames) -> impl fmt::Display + 'a {
        ConstraintDisplay { c: self, names }
    }
}

struct ConstraintDisplay<'a> {
    c: &'a Constraint,
    names: &'a ParamNames,
}

impl fmt::Display for ConstraintDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.c.lhs.display(self.names),
            self.c.rel.symbol(),
            self.c.rhs.display(self.names)
        )
    }
}

/// The relative interior of a chamber in reduced coordinates: equalities
/// solved for pivot parameters, every remaining inequality strict.
#[derive(Clone, Debug)]
struct Prepared {
    nvars: usize,
    /// `x_p = Σ expr[j] x_j` over free parameters only.
    pivots: Vec<(usize, Vec<BigRational>)>,
    rows: Vec<IntRow>,
    feasible: bool,
}

impl Prepared {
    fn build(ch: &Chamber) -> Result<Self, FormError> {
        let n = ch.num_params;
        let mut eqs: Vec<Vec<BigRational>> = Vec::new();
        let mut strict: Vec<Vec<BigRational>> = Vec::new();
        let mut weak: Vec<Vec<BigRational>> = Vec::new();
        for c in &ch.constraints {
            let d = c.difference().dense(n);
            match c.rel {
                Relation::Equal => eqs.push(d),
                Relation::Less => strict.push(d),
                Relation::LessEq => weak.push(d),
            }
        }
        for i in 0..n {
            strict.push(LinearForm::var(i).dense(n));
        }

        let mut prep = Self::from_parts(n, &eqs, &strict, &weak)?;
        if !prep.feasible || weak.is_empty() {
            return Ok(prep);
        }
        // A weak inequality either holds with equality on the whole chamber
        // or can be made strict in the relative interior.
        let mut implied = Vec::new();
        let mut open = Vec::new();
        for w in &weak {
            if prep.feasible_with(&[(w.clone(), true)])? {
                open.push(w.clone());
            } else {
                implied.push(w.clone());
            }
        }
        eqs.extend(implied);
        strict.extend(open);
        prep = Self::from_parts(n, &eqs, &strict, &[])?;
        Ok(prep)
    }

    fn from_parts(
        n: usize,
        eqs: &[Vec<BigRational>],
        strict: &[Vec<BigRational>],
        weak: &[Vec<BigRational>],
    ) -> Result<Self, FormError> {
        let pivots = rref(n, eqs);
        let mut prep = Self {
            nvars: n,
            pivots,
            rows: Vec::new(),
            feasible: true,
        };
        let mut rows = Vec::with_capacity(strict.len() + weak.len());
        for s in strict {
            rows.push(elim::to_int_row(&prep.reduce(s), true)?);
        }
        for w in weak {
            rows.push(elim::to_int_row(&prep.reduce(w), false)?);
        }
        prep.feasible = elim::feasible(n, rows.clone())?;
        prep.rows = rows;
        Ok(prep)
    }

    fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut out = v.to_vec();
        for (p, expr) in &self.pivots {
            let c = out[*p].clone();
            if c.is_zero() {
                continue;
            }
            out[*p] = BigRational::zero();
            for (j, e) in expr.iter().enumerate() {
                if !e.is_zero() {
                    out[j] += &c * e;
                }
            }
        }
        out
    }

    /// Feasibility after adding rows `v·x > 0` (strict) or `v·x ≥ 0`.
    fn feasible_with(&self, extra: &[(Vec<BigRational>, bool)]) -> Result<bool, FormError> {
        if !self.feasible {
            return Ok(false);
        }
        let mut rows = self.rows.clone();
        for (v, strict) in extra {
            rows.push(elim::to_int_row(&self.reduce(v), *strict)?);
        }
        elim::feasible(self.nvars, rows)
    }

    fn witness(&self) -> Result<Option<Vec<BigRational>>, FormError> {
        if !self.feasible {
            return Ok(None);
        }
        let Some(mut x) = elim::witness(self.nvars, self.rows.clone())? else {
            return Ok(None);
        };
        for (p, expr) in &self.pivots {
            x[*p] = expr.iter().zip(&x).map(|(e, xi)| e * xi).sum();
        }
        Ok(Some(x))
    }
}

/// Reduced row echelon form of a homogeneous system, returned as pivot
/// expressions `x_p = Σ c_j x_j` in the free parameters.
fn rref(n: usize, eqs: &[Vec<BigRational>]) -> Vec<(usize, Vec<BigRational>)> {
    let mut rows: Vec<Vec<BigRational>> = eqs.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let lead = rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v = &*v / &lead;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                let pivot_row = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(&pivot_row) {
                    *a -= &factor * b;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
        .into_iter()
        .map(|(row, col)| {
            let expr = rows[row]
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    if j == col {
                        BigRational::zero()
                    } else {
                        -c.clone()
                    }
                })
                .collect();
            (col, expr)
        })
        .collect()
}

/// A rational polyhedral cone of strictly positive parameter values cut out
/// by order constraints between nonnegative forms.
#[derive(Clone, Debug)]
pub struct Chamber {
    num_params: usize,
    constraints: Vec<Constraint>,
    prepared: OnceLock<Result<Prepared, FormError>>,
}

impl PartialEq for Chamber {
    fn eq(&self, other: &Self) -> bool {
        self.num_params == other.num_params && self.constraints == other.constraints
    }
}

impl Eq for Chamber {}

impl Chamber {
    /// The whole positive orthant on `num_params` parameters.
    pub fn top(num_params: usize) -> Self {
        Self::new(num_params, Vec::new())
    }

    pub fn new(num_params: usize, constraints: Vec<Constraint>) -> Self {
        let bound = constraints
            .iter()
            .map(|c| c.lhs.param_bound().max(c.rhs.param_bound()))
            .max()
            .unwrap_or(0);
        Self {
            num_params: num_params.max(bound),
            constraints,
            prepared: OnceLock::new(),
        }
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn with_constraint(&self, c: Constraint) -> Self {
        let mut cs = self.constraints.clone();
        cs.push(c);
        Self::new(self.num_params, cs)
    }

    pub fn with_constraints<I: IntoIterator<Item = Constraint>>(&self, extra: I) -> Self {
        let mut cs = self.constraints.clone();
        cs.extend(extra);
        Self::new(self.num_params, cs)
    }

    /// Same constraints over a larger parameter space.
    pub fn with_num_params(&self, n: usize) -> Self {
        Self::new(n.max(self.num_params), self.constraints.clone())
    }

    fn prepared(&self) -> Result<&Prepared, FormError> {
        self.prepared
            .get_or_init(|| Prepared::build(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn check_range(&self, f: &LinearForm) -> Result<(), FormError> {
        if f.param_bound() > self.num_params {
            return Err(FormError::ParamOutOfRange {
                index: f.param_bound() - 1,
                num_params: self.num_params,
            });
        }
        Ok(())
    }

    /// True iff some strictly positive rational point satisfies every constraint.
    pub fn is_feasible(&self) -> Result<bool, FormError> {
        Ok(self.prepared()?.feasible)
    }

    /// Sign of `a - b` over the relative interior of the chamber.
    pub fn compare(&self, a: &LinearForm, b: &LinearForm) -> Result<FormOrdering, FormError> {
        self.check_range(a)?;
        self.check_range(b)?;
        let prep = self.prepared()?;
        if !prep.feasible {
            return Err(FormError::EmptyChamber);
        }
        let d = prep.reduce(&(a - b).dense(self.num_params));
        if d.iter().all(|c| c.is_zero()) {
            return Ok(FormOrdering::Equal);
        }
        // Free parameters are positive on the relative interior.
        if d.iter().all(|c| !c.is_negative()) {
            return Ok(FormOrdering::Greater);
        }
        if d.iter().all(|c| !c.is_positive()) {
            return Ok(FormOrdering::Less);
        }
        let neg: Vec<BigRational> = d.iter().map(|c| -c.clone()).collect();
        let can_pos = prep.feasible_with(&[(d, true)])?;
        let can_neg = prep.feasible_with(&[(neg, true)])?;
        Ok(match (can_pos, can_neg) {
            (true, true) => FormOrdering::Incomparable,
            (true, false) => FormOrdering::Greater,
            (false, true) => FormOrdering::Less,
            // Linear on an open set and never nonzero: identically zero.
            (false, false) => FormOrdering::Equal,
        })
    }

    pub fn compare_monoid(
        &self,
        a: &MonoidForm,
        b: &MonoidForm,
    ) -> Result<FormOrdering, FormError> {
        self.compare(a.as_linear(), b.as_linear())
    }

    /// A rational point of the relative interior.
    pub fn interior_point(&self) -> Result<Option<Vec<BigRational>>, FormError> {
        self.prepared()?.witness()
    }

    /// Exact membership of a point (strict constraints strict, parameters positive).
    pub fn contains_point(&self, point: &[BigRational]) -> bool {
        point.len() >= self.num_params
            && point.iter().take(self.num_params).all(|x| x.is_positive())
            && self.constraints.iter().all(|c| c.holds_at(point))
    }

    /// Membership in the closure: strict constraints relaxed, parameters nonnegative.
    pub fn closure_contains_point(&self, point: &[BigRational]) -> bool {
        point.len() >= self.num_params
            && point.iter().take(self.num_params).all(|x| !x.is_negative())
            && self.constraints.iter().all(|c| {
                let relaxed = Constraint {
                    rel: if c.rel == Relation::Less {
                        Relation::LessEq
                    } else {
                        c.rel
                    },
                    ..c.clone()
                };
                relaxed.holds_at(point)
            })
    }

    /// True iff every point of `other` lies in the closure of `self`.
    pub fn closure_contains(&self, other: &Chamber) -> Result<bool, FormError> {
        let n = self.num_params.max(other.num_params);
        let other = other.with_num_params(n);
        if !other.is_feasible()? {
            return Ok(true);
        }
        for c in &self.constraints {
            let d = c.difference();
            let violated = match c.rel {
                Relation::Equal => other.compare(&d, &LinearForm::zero())? != FormOrdering::Equal,
                Relation::Less | Relation::LessEq => {
                    matches!(
                        other.compare(&d, &LinearForm::zero())?,
                        FormOrdering::Less | FormOrdering::Incomparable
                    )
                }
            };
            if violated {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Expresses a positive form as a monoid element, introducing a fresh
    /// parameter `t = form` when the form has negative coefficients.
    pub fn realize(&self, form: &LinearForm) -> Result<(MonoidForm, Chamber), FormError> {
        if form.is_nonnegative() {
            return Ok((MonoidForm::new(form.clone())?, self.clone()));
        }
        if self.compare(form, &LinearForm::zero())? != FormOrdering::Greater {
            return Err(FormError::NotPositive {
                form: form.to_string(),
            });
        }
        let fresh = self.num_params;
        let (pos, neg) = form.split();
        let t = MonoidForm::var(fresh);
        let ch = Self::new(fresh + 1, self.constraints.clone()).with_constraint(Constraint::new(
            &t + &neg,
            Relation::Equal,
            pos,
        ));
        Ok((t, ch))
    }

    /// Every feasible chamber refining `self` on which `forms` are totally
    /// preordered. Output order is deterministic.
    pub fn refinements(&self, forms: &[LinearForm]) -> Result<Vec<Chamber>, FormError> {
        for f in forms {
            self.check_range(f)?;
        }
        if !self.is_feasible()? {
            return Err(FormError::EmptyChamber);
        }
        // A preorder is a list of classes, each a list of indices into `forms`.
        let mut frontier: Vec<(Vec<Vec<usize>>, Chamber)> = vec![(Vec::new(), self.clone())];
        for (i, f) in forms.iter().enumerate() {
            let mut next = Vec::new();
            for (classes, ch) in frontier {
                let ords = classes
                    .iter()
                    .map(|cls| ch.compare(f, &forms[cls[0]]))
                    .collect::<Result<Vec<_>, _>>()?;
                // slot 2k: strictly before class k; slot 2k+1: inside class k
                for slot in 0..=2 * classes.len() {
                    let k = slot / 2;
                    let allowed = if slot % 2 == 1 {
                        matches!(ords[k], FormOrdering::Equal | FormOrdering::Incomparable)
                    } else {
                        let after_prev = k == 0
                            || matches!(
                                ords[k - 1],
                                FormOrdering::Greater | FormOrdering::Incomparable
                            );
                        let before_next = k == classes.len()
                            || matches!(ords[k], FormOrdering::Less | FormOrdering::Incomparable);
                        after_prev && before_next
                    };
                    if !allowed {
                        continue;
                    }
                    let mut cls = classes.clone();
                    if slot % 2 == 1 {
                        cls[k].push(i);
                    } else {
                        cls.insert(k, vec![i]);
                    }
                    let decided = if slot % 2 == 1 {
                        ords[k] == FormOrdering::Equal
                    } else {
                        (k == 0 || ords[k - 1] == FormOrdering::Greater)
                            && (k == classes.len() || ords[k] == FormOrdering::Less)
                    };
                    let candidate = chain_chamber(self, forms, &cls);
                    if decided || candidate.is_feasible()? {
                        next.push((cls, candidate));
                    }
                }
            }
            frontier = next;
        }
        Ok(frontier.into_iter().map(|(_, ch)| ch).collect())
    }

    /// True iff every pair of the given forms is comparable on this chamber.
    pub fn totally_orders(&self, forms: &[LinearForm]) -> Result<bool, FormError> {
        for (i, a) in forms.iter().enumerate() {
            for b in &forms[i + 1..] {
                if !self.compare(a, b)?.is_comparable() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn display<'a>(&'a self, names: &'a ParamNames) -> impl fmt::Display + 'a {
        ChamberDisplay { ch: self, names }
    }
}

fn chain_chamber(base: &Chamber, forms: &[LinearForm], classes: &[Vec<usize>]) -> Chamber {
    let mut extra = Vec::new();
    for (k, cls) in classes.iter().enumerate() {
        let rep = &forms[cls[0]];
        for &j in &cls[1..] {
            extra.push(Constraint::from_difference(
                &(&forms[j] - rep),
                Relation::Equal,
            ));
        }
        if k + 1 < classes.len() {
            let next = &forms[classes[k + 1][0]];
            extra.push(Constraint::from_difference(&(rep - next), Relation::Less));
        }
    }
    base.with_constraints(extra)
}

struct ChamberDisplay<'a> {
    ch: &'a Chamber,
    names: &'a ParamNames,
}

impl fmt::Display for ChamberDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ch.constraints.is_empty() {
            return f.write_str("{}");
        }
        f.write_str("{")?;
        for (i, c) in self.ch.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", c.display(self.names))?;
        }
        f.write_str("}")
    }
}

/// Sign of `a - b` decided uniformly over the relative interior of `ch`.
pub fn form_sub_sign(
    a: &MonoidForm,
    b: &MonoidForm,
    ch: &Chamber,
) -> Result<FormOrdering, FormError> {
    ch.compare_monoid(a, b)
}

pub fn chamber_feasible(ch: &Chamber) -> bool {
    ch.is_feasible().unwrap_or(false)
}

pub fn chamber_refinements(forms: &[MonoidForm], ch: &Chamber) -> Result<Vec<Chamber>, FormError> {
    let linear: Vec<LinearForm> = forms.iter().map(|f| f.as_linear().clone()).collect();
    ch.refinements(&linear)
}
