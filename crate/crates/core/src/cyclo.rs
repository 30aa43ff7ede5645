//! Exact sums of m-th roots of unity.
//!
//! A [`CycloSum`] stores one signed integer multiplicity per exponent class
//! `k mod m`, so every character sum is accumulated with integer arithmetic
//! only. Complex values are produced on demand by [`CycloSum::eval`].
//!
//! The representation is not unique: adding the same constant to every
//! class of a prime-order sum leaves its value unchanged (the full orbit of
//! ζ_m sums to zero). [`CycloSum::rational`] and [`CycloSum::exact_eq`] take
//! that into account for prime m.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Orders above this use a sparse map instead of a dense count vector.
pub const DENSE_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Counts {
    Dense(Vec<i64>),
    Sparse(BTreeMap<u64, i64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloSum {
    order: u64,
    counts: Counts,
}

impl CycloSum {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1, "root order must be positive");
        let counts = if order <= DENSE_LIMIT {
            Counts::Dense(vec![0; order as usize])
        } else {
            Counts::Sparse(BTreeMap::new())
        };
        CycloSum { order, counts }
    }

    /// Wraps a dense count vector; `counts.len()` is the root order.
    pub fn from_counts(counts: Vec<i64>) -> Self {
        let order = counts.len() as u64;
        let mut out = CycloSum::zero(order);
        match &mut out.counts {
            Counts::Dense(v) => *v = counts,
            Counts::Sparse(_) => {
                for (k, c) in counts.into_iter().enumerate() {
                    out.add(k as u64, c);
                }
            }
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Adds `mult` copies of ζ_m^k.
    #[inline]
    pub fn add(&mut self, k: u64, mult: i64) {
        let k = k % self.order;
        match &mut self.counts {
            Counts::Dense(v) => v[k as usize] += mult,
            Counts::Sparse(map) => {
                let e = map.entry(k).or_insert(0);
                *e += mult;
                if *e == 0 {
                    map.remove(&k);
                }
            }
        }
    }

    pub fn count(&self, k: u64) -> i64 {
        let k = k % self.order;
        match &self.counts {
            Counts::Dense(v) => v[k as usize],
            Counts::Sparse(map) => map.get(&k).copied().unwrap_or(0),
        }
    }

    /// Non-zero (exponent, multiplicity) pairs in ascending exponent order.
    pub fn terms(&self) -> Vec<(u64, i64)> {
        match &self.counts {
            Counts::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(k, &c)| (k as u64, c))
                .collect(),
            Counts::Sparse(map) => map.iter().map(|(&k, &c)| (k, c)).collect(),
        }
    }

    /// Merges another sum of the same order. Associative and commutative.
    pub fn merge(&mut self, other: &CycloSum) {
        assert_eq!(self.order, other.order, "cannot merge sums of different root order");
        match (&mut self.counts, &other.counts) {
            (Counts::Dense(a), Counts::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            _ => {
                for (k, c) in other.terms() {
                    self.add(k, c);
                }
            }
        }
    }

    /// Σ |counts|, the number of unit-modulus terms accumulated (net of
    /// cancellation within a class).
    pub fn total_weight(&self) -> u64 {
        self.terms().iter().map(|&(_, c)| c.unsigned_abs()).sum()
    }

    pub fn is_zero_vector(&self) -> bool {
        self.terms().is_empty()
    }

    /// Complex conjugate: exponent k becomes -k.
    pub fn conj(&self) -> CycloSum {
        let mut out = CycloSum::zero(self.order);
        for (k, c) in self.terms() {
            out.add(self.order - k, c);
        }
        out
    }

    /// Multiplication by ζ_m^shift.
    pub fn rotate(&self, shift: u64) -> CycloSum {
        let mut out = CycloSum::zero(self.order);
        for (k, c) in self.terms() {
            out.add(k + shift % self.order, c);
        }
        out
    }

    /// Re-expresses the sum over roots of order `order`, a multiple of the
    /// current order.
    pub fn lift(&self, order: u64) -> Result<CycloSum> {
        if order % self.order != 0 {
            return Err(Error::Precondition(format!(
                "cannot lift order {} to {order}",
                self.order
            )));
        }
        let step = order / self.order;
        let mut out = CycloSum::zero(order);
        for (k, c) in self.terms() {
            out.add(k * step, c);
        }
        Ok(out)
    }

    /// Σ counts[k] · exp(2πik/m), accumulated with Neumaier compensation.
    ///
    /// Each root is computed from a reduced angle with error below 2^-50, so
    /// the result is within `total_weight() · 2^-40` of the exact value.
    pub fn eval(&self) -> Complex64 {
        let mut re = Compensated::default();
        let mut im = Compensated::default();
        for (k, c) in self.terms() {
            let z = root_of_unity(k, self.order);
            re.add(c as f64 * z.re);
            im.add(c as f64 * z.im);
        }
        Complex64::new(re.value(), im.value())
    }

    /// For prime m: the integer value when the sum is a rational integer,
    /// otherwise `None`. Composite orders are rejected.
    pub fn rational(&self) -> Result<Option<i64>> {
        if !is_prime(self.order) {
            return Err(Error::Precondition(format!(
                "rationality test needs a prime root order, got {}",
                self.order
            )));
        }
        let c1 = self.count(1);
        if (2..self.order).all(|k| self.count(k) == c1) {
            Ok(Some(self.count(0) - c1))
        } else {
            Ok(None)
        }
    }

    /// Exact equality of values for prime m: the difference vector must be
    /// constant across all classes.
    pub fn exact_eq(&self, other: &CycloSum) -> Result<bool> {
        if self.order != other.order {
            return Err(Error::Precondition("root orders differ".into()));
        }
        if !is_prime(self.order) {
            return Err(Error::Precondition(format!(
                "exact comparison needs a prime root order, got {}",
                self.order
            )));
        }
        let d0 = self.count(0) - other.count(0);
        Ok((1..self.order).all(|k| self.count(k) - other.count(k) == d0))
    }
}

/// exp(2πik/m) with the angle folded into [-π, π] before evaluation.
pub fn root_of_unity(k: u64, m: u64) -> Complex64 {
    let k = k % m;
    let signed = if 2 * k > m { k as f64 - m as f64 } else { k as f64 };
    let (s, c) = (TAU * signed / m as f64).sin_cos();
    Complex64::new(c, s)
}

#[derive(Default)]
struct Compensated {
    sum: f64,
    err: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.err += (self.sum - t) + x;
        } else {
            self.err += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.err
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_evaluations() {
        assert_eq!(CycloSum::zero(5).eval(), Complex64::new(0.0, 0.0));
        let orbit = CycloSum::from_counts(vec![1, 1, 1]).eval();
        assert!(orbit.norm() < 1e-15);
        let two = CycloSum::from_counts(vec![2, 0, 0, 0]).eval();
        assert!((two - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let i = CycloSum::from_counts(vec![0, 1, 0, 0]).eval();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn rationality() {
        assert_eq!(CycloSum::from_counts(vec![5, 2, 2]).rational().unwrap(), Some(3));
        assert_eq!(CycloSum::from_counts(vec![0, 1, 0]).rational().unwrap(), None);
        assert!(CycloSum::from_counts(vec![0; 4]).rational().is_err());
        assert_eq!(CycloSum::from_counts(vec![-1, -3, -3, -3, -3]).rational().unwrap(), Some(2));
    }

    #[test]
    fn exact_equality_modulo_full_orbit() {
        let a = CycloSum::from_counts(vec![3, 1, 0]);
        let b = CycloSum::from_counts(vec![4, 2, 1]);
        assert!(a.exact_eq(&b).unwrap());
        let c = CycloSum::from_counts(vec![4, 2, 2]);
        assert!(!a.exact_eq(&c).unwrap());
    }

    #[test]
    fn conjugate_rotate_lift() {
        let s = CycloSum::from_counts(vec![0, 2, 0, 0, -1, 0]);
        let z = s.eval();
        assert!((s.conj().eval() - z.conj()).norm() < 1e-12);
        assert!((s.rotate(1).eval() - z * root_of_unity(1, 6)).norm() < 1e-12);
        assert!((s.lift(18).unwrap().eval() - z).norm() < 1e-12);
        assert!(s.lift(9).is_err());
    }

    #[test]
    fn sparse_representation_agrees_with_dense() {
        let big = DENSE_LIMIT * 3;
        let mut sparse = CycloSum::zero(big);
        sparse.add(0, 2);
        sparse.add(big / 2, 1);
        sparse.add(big / 2, -1);
        sparse.add(big / 4, 1);
        assert_eq!(sparse.terms(), vec![(0, 2), (big / 4, 1)]);
        let v = sparse.eval();
        assert!((v - Complex64::new(2.0, 1.0)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn merge_is_commutative_and_matches_eval(
            a in proptest::collection::vec(-20i64..20, 7),
            b in proptest::collection::vec(-20i64..20, 7),
        ) {
            let (x, y) = (CycloSum::from_counts(a), CycloSum::from_counts(b));
            let mut xy = x.clone();
            xy.merge(&y);
            let mut yx = y.clone();
            yx.merge(&x);
            prop_assert_eq!(&xy, &yx);
            let bound = (x.total_weight() + y.total_weight()) as f64 * 2f64.powi(-40) + 1e-12;
            prop_assert!((xy.eval() - (x.eval() + y.eval())).norm() <= bound);
        }

        #[test]
        fn eval_error_within_documented_bound(
            counts in proptest::collection::vec(-1000i64..1000, 1..64),
        ) {
            let s = CycloSum::from_counts(counts.clone());
            let m = counts.len() as f64;
            // Reference at higher precision via explicit angle evaluation in f64 pairs.
            let mut re = 0f64;
            let mut im = 0f64;
            for (k, &c) in counts.iter().enumerate() {
                let ang = TAU * k as f64 / m;
                re += c as f64 * ang.cos();
                im += c as f64 * ang.sin();
            }
            let bound = s.total_weight() as f64 * 2f64.powi(-40) + 1e-9;
            prop_assert!((s.eval() - Complex64::new(re, im)).norm() <= bound);
        }
    }
}
