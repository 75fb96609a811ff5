//! Truncated Laurent data: finitely many known coefficients below a tail order.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{ExactError, Rational};

/// `Σ_{e < tail} c_e s^e + O(s^tail)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentJet {
    variable: String,
    terms: BTreeMap<i64, Rational>,
    tail_order: i64,
}

impl LaurentJet {
    pub fn new(variable: impl Into<String>, tail_order: i64) -> Self {
        LaurentJet { variable: variable.into(), terms: BTreeMap::new(), tail_order }
    }

    /// Builds a jet from `(exponent, coefficient)` pairs; exponents at or past
    /// the tail order are rejected.
    pub fn from_terms(
        variable: impl Into<String>,
        terms: impl IntoIterator<Item = (i64, Rational)>,
        tail_order: i64,
    ) -> Result<Self, ExactError> {
        let mut jet = Self::new(variable, tail_order);
        for (e, c) in terms {
            jet.add_term(e, c)?;
        }
        Ok(jet)
    }

    pub fn add_term(&mut self, exponent: i64, c: Rational) -> Result<(), ExactError> {
        if exponent >= self.tail_order {
            return Err(ExactError::BeyondTail { exponent, tail: self.tail_order });
        }
        let entry = self.terms.entry(exponent).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
        Ok(())
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn tail_order(&self) -> i64 {
        self.tail_order
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of `s^e`, or `None` when `e` lies in the unknown tail.
    pub fn coeff(&self, e: i64) -> Option<Rational> {
        (e < self.tail_order).then(|| self.terms.get(&e).cloned().unwrap_or_else(Rational::zero))
    }

    /// Lower bound for the order: the lowest stored exponent, or the tail order if none.
    pub fn order(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.tail_order)
    }

    /// Whether the two jets agree modulo `s^n`; requires both tails to reach `n`.
    pub fn congruent_mod(&self, other: &Self, n: i64) -> Result<bool, ExactError> {
        let tail = self.tail_order.min(other.tail_order);
        if tail < n {
            return Err(ExactError::BeyondTail { exponent: n - 1, tail });
        }
        let lo = self.order().min(other.order());
        Ok((lo..n).all(|e| self.coeff(e) == other.coeff(e)))
    }

    /// Truncates to a smaller tail order.
    pub fn truncate(&self, tail: i64) -> Self {
        let tail = tail.min(self.tail_order);
        LaurentJet {
            variable: self.variable.clone(),
            terms: self.terms.range(..tail).map(|(e, c)| (*e, c.clone())).collect(),
            tail_order: tail,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::new(self.variable.clone(), self.tail_order);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(e, v)| (*e, v * c)).collect();
        }
        out
    }

    /// Sum, with the tail order of the less precise operand.
    pub fn add(&self, other: &Self) -> Self {
        let tail = self.tail_order.min(other.tail_order);
        let mut out = self.truncate(tail);
        for (e, c) in other.terms.range(..tail) {
            out.add_term(*e, c.clone()).expect("exponent below tail");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn tail_is_enforced_and_congruences_work() {
        let mut j = LaurentJet::new("s", 2);
        j.add_term(-1, int(1)).unwrap();
        assert!(j.add_term(2, int(1)).is_err());
        assert_eq!(j.order(), -1);
        assert_eq!(j.coeff(0), Some(int(0)));
        assert_eq!(j.coeff(2), None);
        let mut k = j.clone();
        k.add_term(1, int(3)).unwrap();
        assert!(j.congruent_mod(&k, 1).unwrap());
        assert!(!j.congruent_mod(&k, 2).unwrap());
        assert!(j.congruent_mod(&k, 3).is_err());
    }
}
