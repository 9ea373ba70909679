use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An integer basis of `{x : row . x = 0 for every row}` in dimension `dim`.
pub fn integer_kernel(rows: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = BigRational::one() / &m[row][col];
        for x in &mut m[row] {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone();
                for (x, p) in r.iter_mut().zip(&pivot_row).take(dim) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); dim];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            primitive(&v)
        })
        .collect()
}

fn primitive(v: &[BigRational]) -> Vec<i64> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| (x / &g).to_i64().expect("covector entries fit in i64"))
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Primitive, with first nonzero entry positive.
fn normalize(mut v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, x| acc.gcd(x));
    if g > 1 {
        for x in &mut v {
            *x /= g;
        }
    }
    if v.iter().find(|x| **x != 0).is_some_and(|x| x.is_negative()) {
        for x in &mut v {
            *x = -*x;
        }
    }
    v
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Test covectors on `R^r` deciding the toric condition for the given flag
/// slopes: the coordinate covectors and, for every subset of at most
/// `r - 1` slopes, a covector vanishing exactly on the span of the subset.
/// Two covectors vanishing on the same slopes give the same verdict, and
/// every achievable vanishing set arises this way.
pub fn test_covectors(slopes: &[Vec<i64>], r: usize) -> Vec<Vec<i64>> {
    if r == 0 {
        return Vec::new();
    }
    let distinct: Vec<Vec<i64>> = slopes
        .iter()
        .filter(|s| s.iter().any(|x| *x != 0))
        .map(|s| normalize(s.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out: BTreeSet<Vec<i64>> = (0..r)
        .map(|k| {
            let mut e = vec![0; r];
            e[k] = 1;
            e
        })
        .collect();
    for k in 0..r.min(distinct.len() + 1) {
        for subset in subsets(distinct.len(), k) {
            let rows: Vec<Vec<i64>> = subset.iter().map(|&i| distinct[i].clone()).collect();
            let basis = integer_kernel(&rows, r);
            if basis.is_empty() {
                continue;
            }
            let avoid: Vec<&Vec<i64>> = distinct
                .iter()
                .filter(|s| basis.iter().any(|b| dot(b, s) != 0))
                .collect();
            let chi = generic_combination(&basis, &avoid);
            out.insert(normalize(chi));
        }
    }
    out.into_iter().collect()
}

/// An integer combination of `basis` not orthogonal to any vector in `avoid`.
fn generic_combination(basis: &[Vec<i64>], avoid: &[&Vec<i64>]) -> Vec<i64> {
    for base in 2i64.. {
        let mut chi = vec![0i64; basis[0].len()];
        let mut c = 1i64;
        for b in basis {
            for (x, y) in chi.iter_mut().zip(b) {
                *x += c * y;
            }
            c *= base;
        }
        if avoid.iter().all(|s| dot(&chi, s) != 0) {
            return chi;
        }
    }
    unreachable!("some base avoids finitely many hyperplanes")
}
