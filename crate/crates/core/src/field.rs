//! Prime-power fields GF(p^n) with discrete-log tables.
//!
//! Elements are stored as the base-p integer of their coefficient vector
//! over F_p in the polynomial basis `1, x, .., x^(n-1)`, constant term in the
//! least significant digit. Value 0 is zero and value 1 is the unit in every
//! field, and the prime subfield F_p is always the values `0..p`.
//!
//! Construction is deterministic: the modulus is the lexicographically
//! smallest monic irreducible polynomial (coefficient tuples compared from
//! the constant term upward) and the generator is the smallest encoding whose
//! powers exhaust the multiplicative group.

use crate::arith::{is_prime, prime_factors};
use crate::error::{Error, Result};

/// Default cap on the number of elements any exhaustive routine may enumerate.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

const UNSET: u32 = u32::MAX;

/// An element of some [`FieldCtx`], in canonical base-p encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: Self = FieldElement(0);
    pub const ONE: Self = FieldElement(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A concrete finite field with log/antilog tables and a cached absolute
/// trace. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    n: u32,
    order: u32,
    modulus: Vec<u32>,
    primitive: FieldElement,
    log: Vec<u32>,
    antilog: Vec<u32>,
    /// Tr_{F/F_p}(x^i) for the basis monomials.
    trace_basis: Vec<u32>,
    /// Tr_{F/F_p}(alpha^i) indexed by exponent.
    trace_by_exp: Vec<u32>,
}

/// Builds GF(p^n) under the default budget.
pub fn build_field(p: u32, n: u32) -> Result<FieldCtx> {
    FieldCtx::build(p, n, DEFAULT_BUDGET)
}

impl FieldCtx {
    pub fn build(p: u32, n: u32, budget: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic(2));
        }
        let order = crate::arith::checked_pow(p as u128, n)
            .filter(|&o| o <= u32::MAX as u128)
            .ok_or_else(|| Error::Overflow(format!("{p}^{n} does not fit in 32 bits")))?;
        if order > budget as u128 {
            return Err(Error::BudgetExceeded {
                what: format!("GF({p}^{n})"),
                needed: order,
                budget: budget as u128,
            });
        }
        let order = order as u32;
        let pp = p as u64;

        let modulus = smallest_irreducible(pp, n as usize);
        let f: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
        let primitive = smallest_generator(pp, n as usize, &f, order);

        let group = (order - 1) as usize;
        let mut log = vec![UNSET; order as usize];
        let mut antilog = vec![0u32; group];
        let gen = digits(primitive, pp, n as usize);
        let mut cur = vec![0u64; n as usize];
        cur[0] = 1;
        let mut scratch = Vec::new();
        for (i, slot) in antilog.iter_mut().enumerate() {
            let v = encode(&cur, pp);
            if log[v as usize] != UNSET {
                return Err(Error::Integrity(format!(
                    "generator {primitive} of GF({p}^{n}) repeats after {i} steps"
                )));
            }
            log[v as usize] = i as u32;
            *slot = v;
            poly::mulmod_in_place(&mut cur, &gen, &f, pp, &mut scratch);
        }
        if encode(&cur, pp) != 1 {
            return Err(Error::Integrity(format!("generator of GF({p}^{n}) has wrong order")));
        }

        let mut ctx = FieldCtx {
            p,
            n,
            order,
            modulus,
            primitive: FieldElement(primitive),
            log,
            antilog,
            trace_basis: Vec::new(),
            trace_by_exp: Vec::new(),
        };
        ctx.trace_basis = (0..n)
            .map(|i| {
                let e = ctx.basis(i);
                let t = ctx.frobenius_orbit_sum(e, n);
                if t.0 >= p {
                    Err(Error::Integrity(format!("trace of x^{i} left the prime field")))
                } else {
                    Ok(t.0)
                }
            })
            .collect::<Result<_>>()?;
        ctx.trace_by_exp = ctx
            .antilog
            .iter()
            .map(|&v| ctx.abs_trace(FieldElement(v)))
            .collect();
        Ok(ctx)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of elements, p^n.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Order of the multiplicative group.
    pub fn group_order(&self) -> u32 {
        self.order - 1
    }

    /// Monic modulus, constant coefficient first (length n + 1).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> FieldElement {
        self.primitive
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        x.0 < self.order
    }

    pub fn check(&self, x: FieldElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                value: x.0,
                order: self.order,
            })
        }
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        let x = FieldElement(value);
        self.check(x)?;
        Ok(x)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.order).map(FieldElement)
    }

    /// The basis monomial x^i (the unit when n = 1).
    pub fn basis(&self, i: u32) -> FieldElement {
        debug_assert!(i < self.n);
        FieldElement(self.p.pow(i))
    }

    /// Discrete log base the chosen generator; `None` at zero.
    #[inline]
    pub fn log(&self, x: FieldElement) -> Option<u32> {
        match self.log[x.0 as usize] {
            UNSET => None,
            l => Some(l),
        }
    }

    /// alpha^e for any exponent.
    #[inline]
    pub fn exp(&self, e: u64) -> FieldElement {
        FieldElement(self.antilog[(e % self.group_order() as u64) as usize])
    }

    pub fn antilog_table(&self) -> &[u32] {
        &self.antilog
    }

    pub fn log_table(&self) -> &[u32] {
        &self.log
    }

    /// Coefficient digits, constant term first.
    pub fn digits(&self, x: FieldElement) -> Vec<u32> {
        digits(x.0, self.p as u64, self.n as usize)
            .into_iter()
            .map(|d| d as u32)
            .collect()
    }

    pub fn from_digits(&self, ds: &[u32]) -> Result<FieldElement> {
        if ds.len() > self.n as usize || ds.iter().any(|&d| d >= self.p) {
            return Err(Error::Format(format!("bad digit vector {ds:?}")));
        }
        let mut v = 0u64;
        for &d in ds.iter().rev() {
            v = v * self.p as u64 + d as u64;
        }
        Ok(FieldElement(v as u32))
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.digitwise(x, y, |a, b, p| (a + b) % p)
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.digitwise(x, y, |a, b, p| (a + p - b) % p)
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, x)
    }

    /// Multiplication by an element of the prime field, given as an integer.
    pub fn scale(&self, c: u64, x: FieldElement) -> FieldElement {
        let p = self.p as u64;
        let c = c % p;
        self.digitwise(x, FieldElement::ZERO, |a, _, p| a * c % p)
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        let m = self.group_order() as u64;
        let e = self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64;
        FieldElement(self.antilog[(e % m) as usize])
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        let l = self.log(x).ok_or(Error::ZeroInverse)?;
        let m = self.group_order();
        Ok(FieldElement(self.antilog[((m - l) % m) as usize]))
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: FieldElement, e: u64) -> FieldElement {
        match self.log(x) {
            None if e == 0 => FieldElement::ONE,
            None => FieldElement::ZERO,
            Some(l) => {
                let m = self.group_order() as u64;
                let k = (l as u128 * (e % m) as u128 % m as u128) as u64;
                FieldElement(self.antilog[k as usize])
            }
        }
    }

    /// x + x^o + x^(o^2) + .. (terms summands), the orbit sum under x -> x^o
    /// where o = p^(n / terms).
    pub(crate) fn frobenius_orbit_sum(&self, x: FieldElement, terms: u32) -> FieldElement {
        let step = self.n / terms;
        let o = (self.p as u64).pow(step);
        let m = self.group_order() as u64;
        let mut e = 1u64;
        let mut acc = FieldElement::ZERO;
        for _ in 0..terms {
            acc = self.add(acc, self.pow(x, e));
            e = (e as u128 * o as u128 % m as u128) as u64;
        }
        acc
    }

    /// Tr_{F/F_p}(x) as an integer in `0..p`.
    #[inline]
    pub fn abs_trace(&self, x: FieldElement) -> u32 {
        let p = self.p as u64;
        let mut v = x.0 as u64;
        let mut acc = 0u64;
        for &t in &self.trace_basis {
            acc += (v % p) * t as u64;
            v /= p;
        }
        (acc % p) as u32
    }

    /// Tr_{F/F_p}(alpha^e) indexed by e in `0..order-1`.
    pub fn trace_by_exp(&self) -> &[u32] {
        &self.trace_by_exp
    }

    /// Gram matrix of the trace form on the polynomial basis:
    /// entry (i, j) is Tr(x^i * x^j).
    pub fn trace_form(&self) -> Vec<Vec<u32>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.abs_trace(self.mul(self.basis(i), self.basis(j))))
                    .collect()
            })
            .collect()
    }

    fn digitwise(
        &self,
        x: FieldElement,
        y: FieldElement,
        op: impl Fn(u64, u64, u64) -> u64,
    ) -> FieldElement {
        let p = self.p as u64;
        let (mut a, mut b) = (x.0 as u64, y.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            out += op(a % p, b % p, p) * place;
            place *= p;
            a /= p;
            b /= p;
        }
        FieldElement(out as u32)
    }
}

fn digits(v: u32, p: u64, n: usize) -> Vec<u64> {
    let mut v = v as u64;
    (0..n)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn encode(ds: &[u64], p: u64) -> u32 {
    ds.iter().rev().fold(0u64, |acc, &d| acc * p + d) as u32
}

/// Monic degree-n irreducible with the smallest coefficient tuple
/// (c_0, c_1, .., c_{n-1}), c_0 compared first.
fn smallest_irreducible(p: u64, n: usize) -> Vec<u32> {
    let total = p.pow(n as u32);
    for k in 0..total {
        // c_0 is the most significant digit of k.
        let mut f = vec![0u64; n + 1];
        let mut rest = k;
        for i in (0..n).rev() {
            f[i] = rest % p;
            rest /= p;
        }
        f[n] = 1;
        if poly::is_irreducible(&f, p) {
            return f.into_iter().map(|c| c as u32).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn smallest_generator(p: u64, n: usize, f: &[u64], order: u32) -> u32 {
    let m = (order - 1) as u64;
    let factors = prime_factors(m);
    let one = vec![1u64];
    (1..order)
        .find(|&v| {
            let g = poly::trimmed(digits(v, p, n));
            factors.iter().all(|&l| poly::powmod(&g, m / l, f, p) != one)
        })
        .expect("the multiplicative group of a finite field is cyclic")
}

/// Dense polynomial arithmetic over F_p, used only while bootstrapping a field.
/// Coefficients are constant-first; "trimmed" means no trailing zeros.
pub(crate) mod poly {
    use crate::arith::{pow_mod, prime_factors};

    pub fn trimmed(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
            }
        }
        trimmed(out)
    }

    /// Remainder modulo a non-zero polynomial (leading coefficient inverted mod p).
    pub fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let f = trimmed(f.to_vec());
        let df = f.len() - 1;
        let lead_inv = pow_mod(f[df], p - 2, p);
        let mut r = trimmed(a.to_vec());
        while r.len() > df {
            let top = r.len() - 1;
            let c = (r[top] as u128 * lead_inv as u128 % p as u128) as u64;
            for (i, &fc) in f.iter().enumerate() {
                let idx = top - df + i;
                let sub = (c as u128 * fc as u128 % p as u128) as u64;
                r[idx] = (r[idx] + p - sub) % p;
            }
            r = trimmed(r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), f, p)
    }

    pub fn powmod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, f, p);
        let mut acc = rem(&[1], f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, f, p);
            }
            base = mulmod(&base, &base, f, p);
            e >>= 1;
        }
        acc
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let len = a.len().max(b.len());
        let out = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trimmed(out)
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trimmed(a.to_vec());
        let mut b = trimmed(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test: f of degree n is irreducible iff x^(p^n) = x mod f and
    /// gcd(x^(p^(n/d)) - x, f) = 1 for every prime d | n.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        if n == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let x = vec![0u64, 1];
        let mut frob = Vec::with_capacity(n + 1);
        frob.push(x.clone());
        for k in 1..=n {
            let next = powmod(&frob[k - 1], p, f, p);
            frob.push(next);
        }
        if frob[n] != x {
            return false;
        }
        prime_factors(n as u64).into_iter().all(|d| {
            let g = sub(&frob[n / d as usize], &x, p);
            gcd(f, &g, p).len() == 1
        })
    }

    /// cur <- cur * g mod f, with `cur` kept at fixed length n = deg f.
    pub fn mulmod_in_place(cur: &mut [u64], g: &[u64], f: &[u64], p: u64, buf: &mut Vec<u64>) {
        let n = cur.len();
        buf.clear();
        buf.resize(n + g.len(), 0);
        for (i, &x) in cur.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in g.iter().enumerate() {
                buf[i + j] = ((buf[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
            }
        }
        // f is monic of degree n.
        for top in (n..buf.len()).rev() {
            let c = buf[top];
            if c == 0 {
                continue;
            }
            for (i, &fc) in f.iter().enumerate() {
                let idx = top - n + i;
                let s = (c as u128 * fc as u128 % p as u128) as u64;
                buf[idx] = (buf[idx] + p - s) % p;
            }
        }
        cur.copy_from_slice(&buf[..n]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_field_three() {
        let f = build_field(3, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.order(), 3);
        assert_eq!(f.primitive(), FieldElement(2));
        assert_eq!(f.mul(FieldElement(2), FieldElement(2)), FieldElement(1));
    }

    #[test]
    fn nine_and_eighty_one() {
        let f9 = build_field(3, 2).unwrap();
        assert_eq!(f9.group_order(), 8);
        // x^2 + 1 has c_0 = 1, the smallest nonzero constant; (1, 0) beats (1, 1), (1, 2), ...
        assert_eq!(f9.modulus(), &[1, 0, 1]);

        let f81 = build_field(3, 4).unwrap();
        assert_eq!(f81.group_order(), 80);
        let mut seen = [false; 81];
        for &v in f81.antilog_table() {
            assert!(!seen[v as usize]);
            seen[v as usize] = true;
        }
        assert!(!seen[0] && seen[1..].iter().all(|&b| b));
        for i in 0..80u32 {
            assert_eq!(f81.log(f81.exp(i as u64)), Some(i));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(build_field(9, 2), Err(Error::NotPrime(9))));
        assert!(matches!(build_field(2, 3), Err(Error::EvenCharacteristic(2))));
        assert!(matches!(build_field(3, 0), Err(Error::ZeroDegree)));
        assert!(matches!(
            FieldCtx::build(3, 5, 100),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(build_field(3, 40), Err(Error::Overflow(_))));
    }

    #[test]
    fn inverse_is_exhaustive_on_f81() {
        let f = build_field(3, 4).unwrap();
        for x in f.nonzero() {
            assert_eq!(f.mul(f.inv(x).unwrap(), x), FieldElement::ONE);
        }
        assert!(matches!(f.inv(FieldElement::ZERO), Err(Error::ZeroInverse)));
        assert_eq!(f.pow(f.primitive(), 80), FieldElement::ONE);
        assert_eq!(f.pow(FieldElement::ZERO, 0), FieldElement::ONE);
    }

    #[test]
    fn moduli_are_irreducible() {
        for (p, n) in [(3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2), (19, 4), (3, 6)] {
            let f = build_field(p, n).unwrap();
            let m: Vec<u64> = f.modulus().iter().map(|&c| c as u64).collect();
            assert!(poly::is_irreducible(&m, p as u64));
            // No root in F_p is necessary for irreducibility in degree > 1.
            for a in 0..p as u64 {
                let val = m.iter().rev().fold(0u64, |acc, &c| (acc * a + c) % p as u64);
                assert_ne!(val, 0, "root {a} of modulus for GF({p}^{n})");
            }
        }
    }

    #[test]
    fn rabin_test_rejects_products() {
        // (x^2 + 1)^2 = x^4 + 2x^2 + 1 over F_3.
        assert!(!poly::is_irreducible(&[1, 0, 2, 0, 1], 3));
        // x^2 + 1 is irreducible over F_3 but x^2 + 2 = (x + 1)(x + 2) is not.
        assert!(poly::is_irreducible(&[1, 0, 1], 3));
        assert!(!poly::is_irreducible(&[2, 0, 1], 3));
    }

    #[test]
    fn rebuild_is_identical() {
        assert_eq!(build_field(5, 3).unwrap(), build_field(5, 3).unwrap());
    }

    #[test]
    fn absolute_trace_matches_orbit_sum() {
        let f = build_field(5, 3).unwrap();
        for x in f.elements() {
            assert_eq!(f.frobenius_orbit_sum(x, 3).0, f.abs_trace(x));
        }
    }

    proptest! {
        #[test]
        fn field_axioms_hold(a in 0u32..625, b in 0u32..625, c in 0u32..625) {
            let f = build_field(5, 4).unwrap();
            let (a, b, c) = (FieldElement(a), FieldElement(b), FieldElement(c));
            prop_assert_eq!(f.mul(a, FieldElement::ONE), a);
            prop_assert_eq!(f.add(a, FieldElement::ZERO), a);
            prop_assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
        }
    }
}
