//! Generalized lengths and the chambers that order them.
//!
//! A [`MonoidForm`] is a finitely supported, nonnegative rational combination
//! of base length parameters `x_0, x_1, ...`. Differences of such forms are
//! [`LinearForm`]s, whose sign is only meaningful relative to a [`Chamber`]:
//! a rational polyhedral cone of strictly positive parameter values cut out
//! by order constraints.

mod chamber;
mod elim;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use chamber::{
    chamber_feasible, chamber_refinements, form_sub_sign, Chamber, Constraint, Relation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("empty chamber")]
    EmptyChamber,
    #[error("negative coefficient {coeff} on parameter {param}")]
    NegativeCoefficient { param: usize, coeff: String },
    #[error("form {form} is not positive on the chamber")]
    NotPositive { form: String },
    #[error("parameter index {index} out of range for a chamber with {num_params} parameters")]
    ParamOutOfRange { index: usize, num_params: usize },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("cannot parse form `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("integer overflow during elimination")]
    Overflow,
}

/// Outcome of comparing two forms uniformly over a chamber's relative interior.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormOrdering {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl FormOrdering {
    pub fn reverse(self) -> Self {
        match self {
            FormOrdering::Less => FormOrdering::Greater,
            FormOrdering::Greater => FormOrdering::Less,
            other => other,
        }
    }

    pub fn is_comparable(self) -> bool {
        self != FormOrdering::Incomparable
    }
}

/// A rational linear form with arbitrary signs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: BTreeMap<usize, BigRational>,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(index: usize) -> Self {
        Self::term(index, BigRational::one())
    }

    pub fn term(index: usize, coeff: BigRational) -> Self {
        let mut f = Self::zero();
        f.add_term(index, coeff);
        f
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, BigRational)>>(terms: I) -> Self {
        let mut f = Self::zero();
        for (i, c) in terms {
            f.add_term(i, c);
        }
        f
    }

    pub fn add_term(&mut self, index: usize, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(index).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn coeff(&self, index: usize) -> BigRational {
        self.coeffs
            .get(&index)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// One past the largest parameter index in the support.
    pub fn param_bound(&self) -> usize {
        self.coeffs.keys().next_back().map_or(0, |i| i + 1)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| c.is_positive())
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * factor)).collect(),
        }
    }

    pub fn scale_int(&self, factor: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(factor)))
    }

    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .map(|(i, c)| c * point.get(*i).cloned().unwrap_or_else(BigRational::zero))
            .sum()
    }

    /// Splits `self = pos - neg` with both parts nonnegative.
    pub fn split(&self) -> (MonoidForm, MonoidForm) {
        let mut pos = LinearForm::zero();
        let mut neg = LinearForm::zero();
        for (i, c) in &self.coeffs {
            if c.is_positive() {
                pos.add_term(*i, c.clone());
            } else {
                neg.add_term(*i, -c.clone());
            }
        }
        (MonoidForm(pos), MonoidForm(neg))
    }

    /// Renames parameters; `map[i]` is the new index of parameter `i`.
    pub fn reindex(&self, map: &dyn Fn(usize) -> usize) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(i, c)| (map(*i), c.clone())))
    }

    pub fn display<'a>(&'a self, names: &'a ParamNames) -> FormDisplay<'a> {
        FormDisplay { form: self, names }
    }

    pub(crate) fn dense(&self, n: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); n];
        for (i, c) in &self.coeffs {
            v[*i] = c.clone();
        }
        v
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        for (i, c) in &rhs.coeffs {
            out.add_term(*i, c.clone());
        }
        out
    }
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: LinearForm) -> LinearForm {
        &self + &rhs
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        for (i, c) in &rhs.coeffs {
            out.add_term(*i, -c.clone());
        }
        out
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        &self - &rhs
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, -c.clone())).collect(),
        }
    }
}

impl Mul<i64> for &LinearForm {
    type Output = LinearForm;
    fn mul(self, rhs: i64) -> LinearForm {
        self.scale_int(rhs)
    }
}

/// A nonnegative form: an element of the free commutative monoid of lengths
/// (tensored with the nonnegative rationals).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoidForm(LinearForm);

impl MonoidForm {
    pub fn zero() -> Self {
        Self(LinearForm::zero())
    }

    pub fn var(index: usize) -> Self {
        Self(LinearForm::var(index))
    }

    pub fn new(form: LinearForm) -> Result<Self, FormError> {
        if let Some((i, c)) = form.terms().find(|(_, c)| c.is_negative()) {
            return Err(FormError::NegativeCoefficient {
                param: i,
                coeff: c.to_string(),
            });
        }
        Ok(Self(form))
    }

    /// Sum of the given parameters, each with coefficient one.
    pub fn sum_of(indices: &[usize]) -> Self {
        Self(LinearForm::from_terms(
            indices.iter().map(|i| (*i, BigRational::one())),
        ))
    }

    pub fn from_int_terms(terms: &[(usize, i64)]) -> Result<Self, FormError> {
        Self::new(LinearForm::from_terms(
            terms
                .iter()
                .map(|(i, c)| (*i, BigRational::from_integer(BigInt::from(*c)))),
        ))
    }

    pub fn as_linear(&self) -> &LinearForm {
        &self.0
    }

    pub fn into_linear(self) -> LinearForm {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn param_bound(&self) -> usize {
        self.0.param_bound()
    }

    pub fn scale(&self, factor: &BigRational) -> Result<Self, FormError> {
        Self::new(self.0.scale(factor))
    }

    pub fn display<'a>(&'a self, names: &'a ParamNames) -> FormDisplay<'a> {
        self.0.display(names)
    }
}

impl TryFrom<LinearForm> for MonoidForm {
    type Error = FormError;
    fn try_from(form: LinearForm) -> Result<Self, FormError> {
        Self::new(form)
    }
}

impl From<MonoidForm> for LinearForm {
    fn from(f: MonoidForm) -> LinearForm {
        f.0
    }
}

impl Add for &MonoidForm {
    type Output = MonoidForm;
    fn add(self, rhs: &MonoidForm) -> MonoidForm {
        MonoidForm(&self.0 + &rhs.0)
    }
}

impl Add for MonoidForm {
    type Output = MonoidForm;
    fn add(self, rhs: MonoidForm) -> MonoidForm {
        &self + &rhs
    }
}

impl Sub for &MonoidForm {
    type Output = LinearForm;
    fn sub(self, rhs: &MonoidForm) -> LinearForm {
        &self.0 - &rhs.0
    }
}

/// Display names for length parameters. Indices without a name print as `x{i+1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamNames {
    names: Vec<String>,
}

impl ParamNames {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Self {
        Self {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    /// `x1, ..., xn`.
    pub fn generic(n: usize) -> Self {
        Self::new((1..=n).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> String {
        self.names
            .get(index)
            .cloned()
            .unwrap_or_else(|| format!("x{}", index + 1))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Appends fresh names (`t1`, `t2`, ...) until `n` parameters are named.
    pub fn extended_to(&self, n: usize) -> Self {
        let mut names = self.names.clone();
        let mut k = 1;
        while names.len() < n {
            let candidate = format!("t{k}");
            k += 1;
            if !names.contains(&candidate) {
                names.push(candidate);
            }
        }
        Self { names }
    }

    /// Parses forms such as `e1+e3`, `2*e1 + 1/3*e2`, `-e1+e4` or `0`.
    pub fn parse(&self, input: &str) -> Result<LinearForm, FormError> {
        parse_form(input, |name| self.index_of(name))
    }

    pub fn parse_monoid(&self, input: &str) -> Result<MonoidForm, FormError> {
        MonoidForm::new(self.parse(input)?)
    }
}

fn parse_form(
    input: &str,
    lookup: impl Fn(&str) -> Option<usize>,
) -> Result<LinearForm, FormError> {
    let err = |reason: &str| FormError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty input"));
    }
    if compact == "0" {
        return Ok(LinearForm::zero());
    }
    let mut form = LinearForm::zero();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let mut sign = BigRational::one();
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
        }
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (term, tail) = rest.split_at(end);
        rest = tail;
        if term.is_empty() {
            return Err(err("dangling sign"));
        }
        let (coeff, name) = match term.split_once('*') {
            Some((c, n)) => (parse_rational(c).ok_or_else(|| err("bad coefficient"))?, n),
            None => (BigRational::one(), term),
        };
        let index = lookup(name).ok_or_else(|| FormError::UnknownParameter(name.to_string()))?;
        form.add_term(index, sign * coeff);
    }
    Ok(form)
}

/// Parses `"3"`, `"-2"` or `"1/3"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

pub struct FormDisplay<'a> {
    form: &'a LinearForm,
    names: &'a ParamNames,
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return f.write_str("0");
        }
        for (k, (i, c)) in self.form.terms().enumerate() {
            let name = self.names.name(i);
            let magnitude = c.abs();
            if c.is_negative() {
                f.write_str("-")?;
            } else if k > 0 {
                f.write_str("+")?;
            }
            if magnitude.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{magnitude}*{name}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(&ParamNames::default()).fmt(f)
    }
}

impl fmt::Display for MonoidForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
