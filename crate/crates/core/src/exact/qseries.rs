//! Power series in `q` truncated at a fixed cutoff.

use std::fmt;
use std::ops::{Add, Mul};

use num_traits::Zero;

use super::{format_rational, ExactError, Rational};

/// `Σ_{d=0}^{cutoff} a_d q^d`; nothing beyond the cutoff is ever stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    cutoff: usize,
    coeffs: Vec<Rational>,
}

impl QSeries {
    pub fn zero(cutoff: usize) -> Self {
        QSeries { cutoff, coeffs: vec![Rational::zero(); cutoff + 1] }
    }

    pub fn one(cutoff: usize) -> Self {
        Self::monomial(cutoff, 0, Rational::from_integer(1.into()))
    }

    /// `c·q^d`, which is zero when `d` exceeds the cutoff.
    pub fn monomial(cutoff: usize, d: usize, c: Rational) -> Self {
        let mut s = Self::zero(cutoff);
        if d <= cutoff {
            s.coeffs[d] = c;
        }
        s
    }

    /// Takes coefficients `q^0, q^1, …`; entries past the cutoff are dropped.
    pub fn from_coeffs(cutoff: usize, coeffs: impl IntoIterator<Item = Rational>) -> Self {
        let mut s = Self::zero(cutoff);
        for (d, c) in coeffs.into_iter().enumerate().take(cutoff + 1) {
            s.coeffs[d] = c;
        }
        s
    }

    pub fn from_ints(cutoff: usize, coeffs: &[i64]) -> Self {
        Self::from_coeffs(cutoff, coeffs.iter().map(|&c| Rational::from_integer(c.into())))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeff(&self, d: usize) -> Rational {
        self.coeffs.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.same_cutoff(other)?;
        Ok(QSeries {
            cutoff: self.cutoff,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    /// Cauchy product truncated at the common cutoff.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.same_cutoff(other)?;
        let mut out = Self::zero(self.cutoff);
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.coeffs.iter().enumerate().take(self.cutoff + 1 - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QSeries { cutoff: self.cutoff, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiplication by `q`, truncating the top coefficient.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(self.coeffs[..self.cutoff].iter().cloned());
        QSeries { cutoff: self.cutoff, coeffs }
    }

    fn same_cutoff(&self, other: &Self) -> Result<(), ExactError> {
        if self.cutoff != other.cutoff {
            return Err(ExactError::CutoffMismatch { left: self.cutoff, right: other.cutoff });
        }
        Ok(())
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.checked_add(rhs).expect("q-series cutoffs differ")
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.checked_mul(rhs).expect("q-series cutoffs differ")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, c)| match d {
                0 => format_rational(c),
                1 => format!("{}q", format_rational(c)),
                _ => format!("{}q^{}", format_rational(c), d),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", terms.join(" + "))?;
        }
        write!(f, " + O(q^{})", self.cutoff + 1)
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
