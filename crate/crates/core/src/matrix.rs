//! 3×3 integer matrices. Entries are arbitrary precision: step matrices
//! are small, but products over long periods are not.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::AlgebraicReal;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix3 {
    rows: [[BigInt; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed matrix {0:?}: expected three ';'-separated rows of three ','-separated integers")]
pub struct ParseMatrixError(pub String);

impl IntMatrix3 {
    pub fn new(rows: [[BigInt; 3]; 3]) -> Self {
        IntMatrix3 { rows }
    }

    pub fn from_rows(rows: [[i64; 3]; 3]) -> Self {
        IntMatrix3 {
            rows: rows.map(|r| r.map(BigInt::from)),
        }
    }

    pub fn identity() -> Self {
        Self::from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    /// Matrix whose column `j` is `e_{order[j]}`: as a basis change it moves
    /// old basis vector `order[j]` to position `j`.
    pub fn permutation(order: [usize; 3]) -> Self {
        let mut m = Self::from_rows([[0; 3]; 3]);
        for (j, &i) in order.iter().enumerate() {
            m.rows[i][j] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> &[[BigInt; 3]; 3] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.rows[i][j] = value;
    }

    pub fn to_i64_rows(&self) -> Option<[[i64; 3]; 3]> {
        let mut out = [[0i64; 3]; 3];
        for (dst, src) in out.iter_mut().zip(&self.rows) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = s.to_i64()?;
            }
        }
        Some(out)
    }

    pub fn transpose(&self) -> Self {
        let r = &self.rows;
        IntMatrix3 {
            rows: [0, 1, 2].map(|i| [0, 1, 2].map(|j| r[j][i].clone())),
        }
    }

    fn minor(&self, i: usize, j: usize) -> BigInt {
        let r = &self.rows;
        let (i0, i1) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (j0, j1) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        &r[i0][j0] * &r[i1][j1] - &r[i0][j1] * &r[i1][j0]
    }

    pub fn det(&self) -> BigInt {
        (0..3)
            .map(|j| {
                let c = &self.rows[0][j] * self.minor(0, j);
                if j == 1 {
                    -c
                } else {
                    c
                }
            })
            .sum()
    }

    pub fn adjugate(&self) -> Self {
        IntMatrix3 {
            rows: [0, 1, 2].map(|i| {
                [0, 1, 2].map(|j| {
                    let m = self.minor(j, i);
                    if (i + j) % 2 == 1 {
                        -m
                    } else {
                        m
                    }
                })
            }),
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Exact inverse when `det = ±1`.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        let d = self.det();
        if !d.abs().is_one() {
            return None;
        }
        let adj = self.adjugate();
        Some(if d.is_negative() { adj.scale(&d) } else { adj })
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix3 {
            rows: self.rows.clone().map(|r| r.map(|x| x * k)),
        }
    }

    pub fn trace(&self) -> BigInt {
        &self.rows[0][0] + &self.rows[1][1] + &self.rows[2][2]
    }

    /// `det(tI − M) = t³ + a₂t² + a₁t + a₀` as `[1, a₂, a₁, a₀]`.
    pub fn char_poly(&self) -> [BigInt; 4] {
        let principal: BigInt = (0..3).map(|i| self.minor(i, i)).sum();
        [BigInt::one(), -self.trace(), principal, -self.det()]
    }

    pub fn is_scalar(&self) -> bool {
        let r = &self.rows;
        (0..3).all(|i| (0..3).all(|j| i == j || r[i][j].is_zero()))
            && r[0][0] == r[1][1]
            && r[1][1] == r[2][2]
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.rows.iter().flatten().map(|x| x.abs()).max().unwrap()
    }

    /// `M·v` for a vector over a number field.
    pub fn apply(&self, v: &[AlgebraicReal; 3]) -> [AlgebraicReal; 3] {
        [0, 1, 2].map(|i| {
            let terms = (0..3).map(|j| v[j].scale(&BigRational::from_integer(self.rows[i][j].clone())));
            terms.reduce(|a, b| a + b).unwrap()
        })
    }

    /// `M·v` over ℚ.
    pub fn apply_rational(&self, v: &[BigRational; 3]) -> [BigRational; 3] {
        [0, 1, 2].map(|i| {
            (0..3)
                .map(|j| &v[j] * BigRational::from_integer(self.rows[i][j].clone()))
                .fold(BigRational::zero(), |a, b| a + b)
        })
    }

    /// Greatest common divisor of all entries.
    pub fn content(&self) -> BigInt {
        self.rows.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x))
    }
}

impl<'a> Mul<&'a IntMatrix3> for &'a IntMatrix3 {
    type Output = IntMatrix3;
    fn mul(self, rhs: &'a IntMatrix3) -> IntMatrix3 {
        let (a, b) = (&self.rows, &rhs.rows);
        IntMatrix3 {
            rows: [0, 1, 2].map(|i| {
                [0, 1, 2].map(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j] + &a[i][2] * &b[2][j])
            }),
        }
    }
}

impl Mul for IntMatrix3 {
    type Output = IntMatrix3;
    fn mul(self, rhs: IntMatrix3) -> IntMatrix3 {
        &self * &rhs
    }
}

impl fmt::Display for IntMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{},{},{}", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for IntMatrix3 {
    type Err = ParseMatrixError;

    /// Rows separated by `;`, entries by `,`: `"0,0,1;1,-15,-9;-9,136,66"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMatrixError(s.to_string());
        let rows: Vec<&str> = s.trim().split(';').collect();
        if rows.len() != 3 {
            return Err(err());
        }
        let mut out = Self::from_rows([[0; 3]; 3]);
        for (i, row) in rows.iter().enumerate() {
            let entries: Vec<&str> = row.split(',').map(str::trim).collect();
            if entries.len() != 3 {
                return Err(err());
            }
            for (j, e) in entries.iter().enumerate() {
                out.rows[i][j] = e.parse().map_err(|_| err())?;
            }
        }
        Ok(out)
    }
}
