//! Finite-dimensional graded spaces with labeled homogeneous bases.

use std::collections::BTreeMap;

use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace<K> {
    components: BTreeMap<Rational, Vec<K>>,
}

impl<K> Default for GradedSpace<K> {
    fn default() -> Self {
        GradedSpace { components: BTreeMap::new() }
    }
}

impl<K: Clone> GradedSpace<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_component(&mut self, degree: Rational, basis: Vec<K>) {
        if !basis.is_empty() {
            self.components.entry(degree).or_default().extend(basis);
        }
    }

    pub fn degrees(&self) -> impl Iterator<Item = &Rational> {
        self.components.keys()
    }

    pub fn basis(&self, degree: &Rational) -> &[K] {
        self.components.get(degree).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dim(&self, degree: &Rational) -> usize {
        self.basis(degree).len()
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, &K)> {
        self.components.iter().flat_map(|(d, b)| b.iter().map(move |k| (d, k)))
    }
}
