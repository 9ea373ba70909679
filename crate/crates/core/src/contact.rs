//! Contact-order matrices: one row per marking, one column per divisor.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("contact row {row} has {len} entries, expected {expected}")]
pub struct ContactShapeError {
    pub row: usize,
    pub len: usize,
    pub expected: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ContactMatrix {
    num_divisors: usize,
    rows: Vec<Vec<u32>>,
}

impl ContactMatrix {
    pub fn new(num_divisors: usize, rows: Vec<Vec<u32>>) -> Result<Self, ContactShapeError> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != num_divisors {
                return Err(ContactShapeError {
                    row: i,
                    len: r.len(),
                    expected: num_divisors,
                });
            }
        }
        Ok(Self { num_divisors, rows })
    }

    pub fn zeros(num_markings: usize, num_divisors: usize) -> Self {
        Self {
            num_divisors,
            rows: vec![vec![0; num_divisors]; num_markings],
        }
    }

    pub fn num_markings(&self) -> usize {
        self.rows.len()
    }

    pub fn num_divisors(&self) -> usize {
        self.num_divisors
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn column_sum(&self, j: usize) -> u64 {
        self.rows.iter().map(|r| u64::from(r[j])).sum()
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().flatten().map(|&x| u64::from(x)).sum()
    }

    /// Appends a zero column and returns its index.
    pub fn push_zero_column(&mut self) -> usize {
        for r in &mut self.rows {
            r.push(0);
        }
        self.num_divisors += 1;
        self.num_divisors - 1
    }

    pub fn push_row(&mut self, row: Vec<u32>) -> Result<(), ContactShapeError> {
        if row.len() != self.num_divisors {
            return Err(ContactShapeError {
                row: self.rows.len(),
                len: row.len(),
                expected: self.num_divisors,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn without_column(&self, j: usize) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        Self {
            num_divisors: self.num_divisors - 1,
            rows,
        }
    }

    pub fn without_rows(&self, drop: &[usize]) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, r)| r.clone())
            .collect();
        Self {
            num_divisors: self.num_divisors,
            rows,
        }
    }
}

impl fmt::Display for ContactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = r.iter().map(u32::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}
