//! The universal Virasoro vertex algebra `M_c` on its PBW basis
//! `L_{-n_1} ⋯ L_{-n_r} 𝟙` with `n_1 ≥ ⋯ ≥ n_r ≥ 2`.

use std::collections::HashMap;

use num_traits::One;
use parking_lot::Mutex;

use crate::exact::{binomial, int, sign, LinComb, Rational};
use crate::fock::partitions;
use crate::kernel::VertexAlgebra;

/// A PBW monomial, parts weakly decreasing and at least two.
pub type PbwWord = Vec<u32>;

pub struct VirasoroVoa {
    c: Rational,
    max_degree: i64,
    cache: Mutex<HashMap<(i64, PbwWord), LinComb<PbwWord>>>,
}

impl VirasoroVoa {
    pub fn new(central_charge: Rational, max_degree: i64) -> Self {
        VirasoroVoa { c: central_charge, max_degree, cache: Mutex::new(HashMap::new()) }
    }

    fn level(w: &PbwWord) -> i64 {
        w.iter().map(|&n| n as i64).sum()
    }

    /// `L_m w` on a PBW monomial, rewritten into PBW order.
    pub fn l_mode(&self, m: i64, w: &PbwWord) -> LinComb<PbwWord> {
        if Self::level(w) - m < 0 {
            return LinComb::zero();
        }
        let key = (m, w.clone());
        if let Some(hit) = self.cache.lock().get(&key) {
            return hit.clone();
        }
        let out = self.l_mode_uncached(m, w);
        self.cache.lock().insert(key, out.clone());
        out
    }

    fn l_vec(&self, m: i64, v: &LinComb<PbwWord>) -> LinComb<PbwWord> {
        v.map_linear(|w| self.l_mode(m, w))
    }

    fn l_mode_uncached(&self, m: i64, w: &PbwWord) -> LinComb<PbwWord> {
        let Some(&first) = w.first() else {
            return if m <= -2 { LinComb::basis(vec![(-m) as u32]) } else { LinComb::zero() };
        };
        let n1 = first as i64;
        if -m >= n1 {
            let mut word = vec![(-m) as u32];
            word.extend_from_slice(w);
            return LinComb::basis(word);
        }
        let rest: PbwWord = w[1..].to_vec();
        // L_m L_{-n} = L_{-n} L_m + (m + n) L_{m-n} + (c/12)(m^3 − m) δ_{m,n}
        let mut out = self.l_vec(-n1, &self.l_mode(m, &rest));
        out.add_scaled(&self.l_mode(m - n1, &rest), &int(m + n1));
        if m == n1 {
            out.add_term(rest, &self.c * int(m * m * m - m) / int(12));
        }
        out
    }

    /// `a_{(i)} b` via the iterate formula with `L_{-n} = ω_{(1-n)}`.
    fn state_mode(&self, a: &PbwWord, i: i64, b: &PbwWord) -> LinComb<PbwWord> {
        if Self::level(a) + Self::level(b) - i - 1 < 0 {
            return LinComb::zero();
        }
        let Some(&first) = a.first() else {
            return if i == -1 { LinComb::basis(b.clone()) } else { LinComb::zero() };
        };
        let n = first as i64 - 1;
        let rest: PbwWord = a[1..].to_vec();
        let mut out = LinComb::zero();
        let mut j = 0;
        while Self::level(&rest) + Self::level(b) - i - j - 1 >= 0 {
            let inner = self.state_mode(&rest, i + j, b);
            out.add_scaled(&self.l_vec(-n - j - 1, &inner), &binomial(n + j - 1, j));
            j += 1;
        }
        let minus = -sign(n);
        for j in 0..=Self::level(b) + 1 {
            let lb = self.l_mode(j - 1, b);
            let inner = lb.map_linear(|v| self.state_mode(&rest, i - n - j, v));
            out.add_scaled(&inner, &(binomial(n + j - 1, j) * &minus));
        }
        out
    }
}

impl VertexAlgebra for VirasoroVoa {
    type State = PbwWord;

    fn central_charge(&self) -> Rational {
        self.c.clone()
    }
    fn max_degree(&self) -> i64 {
        self.max_degree
    }
    fn degree(&self, a: &PbwWord) -> i64 {
        Self::level(a)
    }
    fn basis(&self, degree: i64) -> Vec<PbwWord> {
        if degree < 0 {
            return Vec::new();
        }
        partitions(degree as u32).into_iter().filter(|p| p.iter().all(|&n| n >= 2)).collect()
    }
    fn vacuum(&self) -> PbwWord {
        Vec::new()
    }
    fn omega(&self) -> LinComb<PbwWord> {
        LinComb::basis(vec![2])
    }
    fn mode_exact(&self, a: &PbwWord, i: i64, b: &PbwWord) -> LinComb<PbwWord> {
        self.state_mode(a, i, b)
    }
}

impl Default for VirasoroVoa {
    fn default() -> Self {
        Self::new(Rational::one(), 6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::kernel::{mode_vec, virasoro, zhu_product};

    #[test]
    fn omega_modes_are_virasoro() {
        let voa = VirasoroVoa::new(rat(-22, 5), 6);
        for d in 0..=4 {
            for w in voa.basis(d) {
                let v = LinComb::basis(w.clone());
                for m in -2..=3 {
                    assert_eq!(virasoro(&voa, m, &v).unwrap(), voa.l_mode(m, &w), "m={m} w={w:?}");
                }
            }
        }
        let w = voa.omega();
        assert_eq!(mode_vec(&voa, &w, 3, &w).unwrap(), LinComb::term(Vec::new(), rat(-11, 5)));
    }

    #[test]
    fn commutators_hold() {
        let voa = VirasoroVoa::new(rat(1, 2), 6);
        for w in voa.basis(4) {
            let v = LinComb::basis(w.clone());
            for p in -1..=2i64 {
                for q in -1..=2i64 {
                    let lhs = &voa.l_vec(p, &voa.l_vec(q, &v)) - &voa.l_vec(q, &voa.l_vec(p, &v));
                    let mut rhs = voa.l_vec(p + q, &v).scale(&int(p - q));
                    if p + q == 0 {
                        rhs.add_scaled(&v, &(rat(1, 2) * int(p * p * p - p) / int(12)));
                    }
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn zhu_square_of_omega() {
        let voa = VirasoroVoa::new(rat(1, 2), 6);
        let w = voa.omega();
        let mut expected = mode_vec(&voa, &w, -1, &w).unwrap();
        expected.add_scaled(&mode_vec(&voa, &w, 0, &w).unwrap(), &int(2));
        expected += &mode_vec(&voa, &w, 1, &w).unwrap();
        assert_eq!(zhu_product(&voa, &w, &w).unwrap(), expected);
        assert_eq!(mode_vec(&voa, &w, 1, &w).unwrap(), w.scale(&int(2)));
    }
}
