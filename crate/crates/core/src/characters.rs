//! Additive and multiplicative characters with their Gauss sums, plus exhaustive
//! checks of the classical Gauss-sum identities.
//!
//! Characters are evaluated as exponents: an additive character returns k
//! with χ_a(x) = ζ_p^k, a multiplicative one returns k with φ_j(x) = ζ_(q-1)^k.
//! Sums are accumulated into [`CycloSum`]s and only evaluated at the end.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::cyclo::{root_of_unity, CycloSum};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::report::CheckReport;
use crate::tower::{Embedding, Level, TowerCtx};

/// Absolute tolerance per accumulated unit-modulus term.
pub const TERM_TOLERANCE: f64 = 1e-9;

/// Relative tolerance on magnitudes such as |G| = √q.
pub const MAGNITUDE_TOLERANCE: f64 = 1e-6;

/// χ_a(x) = ζ_p^Tr(a·x).
#[derive(Clone, Copy, Debug)]
pub struct AdditiveChar<'a> {
    field: &'a FieldCtx,
    a: FieldElement,
}

impl<'a> AdditiveChar<'a> {
    pub fn new(field: &'a FieldCtx, a: FieldElement) -> Result<Self> {
        field.check(a)?;
        Ok(AdditiveChar { field, a })
    }

    pub fn index(&self) -> FieldElement {
        self.a
    }

    pub fn is_trivial(&self) -> bool {
        self.a.is_zero()
    }

    /// Exponent of ζ_p.
    #[inline]
    pub fn eval(&self, x: FieldElement) -> u32 {
        self.field.abs_trace(self.field.mul(self.a, x))
    }
}

/// φ_j(α^i) = ζ_(q-1)^(ij).
#[derive(Clone, Copy, Debug)]
pub struct MultiplicativeChar<'a> {
    field: &'a FieldCtx,
    j: u32,
}

impl<'a> MultiplicativeChar<'a> {
    pub fn new(field: &'a FieldCtx, j: u32) -> Result<Self> {
        if j >= field.group_order() {
            return Err(Error::Precondition(format!(
                "character index {j} out of range for a group of order {}",
                field.group_order()
            )));
        }
        Ok(MultiplicativeChar { field, j })
    }

    pub fn index(&self) -> u32 {
        self.j
    }

    pub fn is_trivial(&self) -> bool {
        self.j == 0
    }

    /// The conjugate character φ_(-j).
    pub fn conj(&self) -> Self {
        let m = self.field.group_order();
        MultiplicativeChar {
            field: self.field,
            j: (m - self.j) % m,
        }
    }

    /// Exponent of ζ_(q-1); zero has no value.
    #[inline]
    pub fn eval(&self, x: FieldElement) -> Result<u32> {
        let l = self.field.log(x).ok_or(Error::ZeroArgument)?;
        Ok((l as u64 * self.j as u64 % self.field.group_order() as u64) as u32)
    }
}

/// The quadratic character of a field, with η(0) = 0.
pub fn quadratic_character(field: &FieldCtx, x: FieldElement) -> i8 {
    match field.log(x) {
        None => 0,
        Some(l) if l % 2 == 0 => 1,
        Some(_) => -1,
    }
}

/// η on F_r of a tower.
pub fn eta(tower: &TowerCtx, x: FieldElement) -> Result<i8> {
    let fr = tower.field(Level::R);
    fr.check(x)?;
    Ok(quadratic_character(fr, x))
}

/// A Gauss sum in exact form plus its complex value.
#[derive(Clone, Debug)]
pub struct GaussSum {
    pub sum: CycloSum,
    pub value: Complex64,
}

/// G(φ_j, χ_a) = Σ_{x ≠ 0} φ_j(x) χ_a(x), over roots of order p(q-1).
pub fn gauss_sum(field: &FieldCtx, j: u32, a: FieldElement) -> Result<GaussSum> {
    let phi = MultiplicativeChar::new(field, j)?;
    let chi = AdditiveChar::new(field, a)?;
    let p = field.characteristic() as u64;
    let m = field.group_order() as u64;
    let mut sum = CycloSum::zero(p * m);
    for x in field.nonzero() {
        let e = phi.eval(x)? as u64 * p + chi.eval(x) as u64 * m;
        sum.add(e, 1);
    }
    let value = sum.eval();
    Ok(GaussSum { sum, value })
}

/// All Gauss sums of a field as complex values, `table[j][a]`. This is the
/// oracle side of the property checks, so it does not go through
/// [`gauss_sum`]: for fixed a, j ↦ G(φ_j, χ_a) is the inverse DFT of
/// lx ↦ χ_a(α^lx), computed with one FFT of length q-1.
fn gauss_table(field: &FieldCtx) -> Vec<Vec<Complex64>> {
    let p = field.characteristic() as u64;
    let m = field.group_order() as usize;
    let zeta: Vec<Complex64> = (0..p).map(|k| root_of_unity(k, p)).collect();
    let traces = field.trace_by_exp();
    let fft = FftPlanner::new().plan_fft_inverse(m);
    let mut table = vec![vec![Complex64::new(0.0, 0.0); field.order() as usize]; m];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for a in field.elements() {
        let la = field.log(a).map(|l| l as usize);
        for (lx, v) in buf.iter_mut().enumerate() {
            *v = la.map_or(zeta[0], |la| zeta[traces[(la + lx) % m] as usize]);
        }
        fft.process(&mut buf);
        for (j, &g) in buf.iter().enumerate() {
            table[j][a.0 as usize] = g;
        }
    }
    table
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Exhaustive check of the Gauss-sum case table, |G| = √q, the scaling
/// identity G(φ, χ_ab) = conj(φ(a)) G(φ, χ_b) (through a = α) and the reflection identity
/// G(φ, χ) G(conj φ, χ) = φ(-1) q.
///
/// The reflection identity is checked only where it can hold: both φ and χ
/// nontrivial. With χ trivial both factors vanish; with φ trivial the left
/// side is 1.
pub fn verify_gauss_properties(field: &FieldCtx) -> CheckReport {
    let mut report = CheckReport::new("gauss");
    let q = field.order() as f64;
    let m = field.group_order() as u64;
    let table = gauss_table(field);
    let tol_sum = TERM_TOLERANCE * m as f64;
    let minus_one = field.neg(FieldElement::ONE);

    for (j, row) in table.iter().enumerate() {
        for (a, &g) in row.iter().enumerate() {
            let expect = match (j == 0, a == 0) {
                (true, true) => Some(Complex64::new(q - 1.0, 0.0)),
                (true, false) => Some(Complex64::new(-1.0, 0.0)),
                (false, true) => Some(Complex64::new(0.0, 0.0)),
                (false, false) => None,
            };
            match expect {
                Some(v) => report.check(close(g, v, tol_sum), || {
                    format!("G(phi_{j}, chi_{a}) = {g} expected {v}")
                }),
                None => report.check(
                    (g.norm() - q.sqrt()).abs() <= MAGNITUDE_TOLERANCE * q.sqrt(),
                    || format!("|G(phi_{j}, chi_{a})| = {} expected sqrt(q)", g.norm()),
                ),
            }
        }
    }

    // Scaling identity at a = α for every b. F_q^* is cyclic, so by
    // induction on k this gives G(φ, χ_(α^k b)) = conj(φ(α))^k G(φ, χ_b),
    // i.e. the identity for every a ≠ 0.
    let alpha = field.primitive();
    let times_alpha: Vec<FieldElement> = field.elements().map(|b| field.mul(alpha, b)).collect();
    for (j, row) in table.iter().enumerate() {
        let conj_phi_alpha = root_of_unity(m - j as u64 % m, m);
        for b in field.elements() {
            let lhs = row[times_alpha[b.0 as usize].0 as usize];
            let rhs = conj_phi_alpha * row[b.0 as usize];
            report.check(close(lhs, rhs, 2.0 * tol_sum), || {
                format!("G(phi_{j}, chi_(alpha*b)) != conj(phi(alpha)) G(phi_{j}, chi_b) at b={}", b.0)
            });
        }
    }

    // Reflection identity for nontrivial pairs.
    let l_minus_one = field.log(minus_one).unwrap() as u64;
    for j in 1..m {
        let conj_j = (m - j) % m;
        let phi_minus_one = root_of_unity(j * l_minus_one % m, m);
        for a in 1..field.order() as usize {
            let lhs = table[j as usize][a] * table[conj_j as usize][a];
            let rhs = phi_minus_one * q;
            report.check(close(lhs, rhs, 2.0 * tol_sum * q.sqrt()), || {
                format!("G(phi_{j}, chi_{a}) G(conj phi, chi_{a}) = {lhs} expected {rhs}")
            });
        }
    }
    report
}

/// Checks φ_j(c) = (1/q) Σ_χ G(φ_j, conj χ) χ(c) for one (j, c).
pub fn verify_fourier_expansion(field: &FieldCtx, j: u32, c: FieldElement) -> Result<CheckReport> {
    let mut report = CheckReport::new("fourier");
    if c.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let phi = MultiplicativeChar::new(field, j)?;
    let coeffs = fourier_coefficients(field, j)?;
    check_fourier_at(field, &phi, &coeffs, c, &mut report);
    Ok(report)
}

/// The expansion checked for every character and every nonzero argument.
pub fn verify_fourier_all(field: &FieldCtx) -> Result<CheckReport> {
    let mut report = CheckReport::new("fourier");
    for j in 0..field.group_order() {
        let phi = MultiplicativeChar::new(field, j)?;
        let coeffs = fourier_coefficients(field, j)?;
        for c in field.nonzero() {
            check_fourier_at(field, &phi, &coeffs, c, &mut report);
        }
    }
    Ok(report)
}

/// G(φ_j, conj χ_a) = G(φ_j, χ_(-a)) for every a.
fn fourier_coefficients(field: &FieldCtx, j: u32) -> Result<Vec<Complex64>> {
    field
        .elements()
        .map(|a| Ok(gauss_sum(field, j, field.neg(a))?.value))
        .collect()
}

fn check_fourier_at(
    field: &FieldCtx,
    phi: &MultiplicativeChar,
    coeffs: &[Complex64],
    c: FieldElement,
    report: &mut CheckReport,
) {
    let p = field.characteristic() as u64;
    let m = field.group_order() as u64;
    let q = field.order() as f64;
    let rhs: Complex64 = field
        .elements()
        .map(|a| coeffs[a.0 as usize] * root_of_unity(AdditiveChar { field, a }.eval(c) as u64, p))
        .sum::<Complex64>()
        / q;
    let lhs = root_of_unity(phi.eval(c).expect("c is nonzero") as u64, m);
    report.check(close(lhs, rhs, TERM_TOLERANCE * q * q.sqrt()), || {
        format!("phi_{}({}) = {lhs} but expansion gives {rhs}", phi.index(), c.0)
    });
}

/// Restriction of the canonical additive character of F_q to F_r is ψ_s,
/// the character b ↦ ψ(s·b) of F_r. Checked for every b ∈ F_r, together
/// with "nontrivial iff p ∤ s".
pub fn verify_restriction(f_r: &FieldCtx, f_q: &FieldCtx, r_in_q: &Embedding, s: u32) -> CheckReport {
    let mut report = CheckReport::new("restriction");
    let p = f_r.characteristic();
    let mut nontrivial = false;
    for b in f_r.elements() {
        let restricted = f_q.abs_trace(r_in_q.image(b));
        let psi_s = f_r.abs_trace(f_r.scale(s as u64, b));
        nontrivial |= restricted != 0;
        report.check(restricted == psi_s, || {
            format!("chi(b)={restricted} but psi(s b)={psi_s} at b={}", b.0)
        });
    }
    report.check(nontrivial == (s % p != 0), || {
        format!("restriction nontrivial={nontrivial} with s={s}, p={p}")
    });
    report
}

/// Builds F_r and F_q only and runs [`verify_restriction`].
pub fn verify_restriction_for(p: u32, t: u32, s: u32, budget: u64) -> Result<CheckReport> {
    let f_r = FieldCtx::build(p, t, budget)?;
    let f_q = FieldCtx::build(
        p,
        t.checked_mul(s).ok_or_else(|| Error::Overflow("t*s".into()))?,
        budget,
    )?;
    let emb = Embedding::new(&f_r, &f_q)?;
    Ok(verify_restriction(&f_r, &f_q, &emb, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    #[test]
    fn additive_characters() {
        let f = build_field(3, 2).unwrap();
        let one = AdditiveChar::new(&f, FieldElement::ONE).unwrap();
        for a in f.elements() {
            let chi = AdditiveChar::new(&f, a).unwrap();
            let mut s = CycloSum::zero(3);
            for x in f.elements() {
                assert_eq!(chi.eval(x), one.eval(f.mul(a, x)));
                if a.is_zero() {
                    assert_eq!(chi.eval(x), 0);
                }
                s.add(chi.eval(x) as u64, 1);
            }
            let expect = if a.is_zero() { 9 } else { 0 };
            assert_eq!(s.rational().unwrap(), Some(expect));
        }
    }

    #[test]
    fn orthogonality_up_to_729() {
        for (p, n) in [(3, 1), (3, 2), (5, 2), (7, 2), (3, 4), (3, 6), (11, 2), (5, 4)] {
            let f = build_field(p, n).unwrap();
            let m = f.group_order() as u64;
            // Additive: one character sum per a, compared exactly.
            for a in [0u32, 1, f.order() / 2, f.order() - 1] {
                let chi = AdditiveChar::new(&f, FieldElement(a)).unwrap();
                let mut s = CycloSum::zero(p as u64);
                for x in f.elements() {
                    s.add(chi.eval(x) as u64, 1);
                }
                let expect = if a == 0 { f.order() as i64 } else { 0 };
                assert_eq!(s.rational().unwrap(), Some(expect));
            }
            // Multiplicative: the sum over x of φ_j(x) puts one term in each
            // class of a coset when j ≠ 0.
            for j in 0..f.group_order() {
                let phi = MultiplicativeChar::new(&f, j).unwrap();
                let mut s = CycloSum::zero(m);
                for x in f.nonzero() {
                    s.add(phi.eval(x).unwrap() as u64, 1);
                }
                let expect = if j == 0 { m as f64 } else { 0.0 };
                assert!((s.eval() - Complex64::new(expect, 0.0)).norm() < 1e-9 * m as f64);
            }
        }
    }

    #[test]
    fn multiplicative_characters() {
        let f = build_field(3, 2).unwrap();
        for j in 0..8 {
            let phi = MultiplicativeChar::new(&f, j).unwrap();
            for x in f.nonzero() {
                if j == 0 {
                    assert_eq!(phi.eval(x).unwrap(), 0);
                }
                for y in f.nonzero() {
                    let lhs = phi.eval(f.mul(x, y)).unwrap();
                    let rhs = (phi.eval(x).unwrap() + phi.eval(y).unwrap()) % 8;
                    assert_eq!(lhs, rhs);
                }
            }
            assert!(matches!(phi.eval(FieldElement::ZERO), Err(Error::ZeroArgument)));
        }
        assert!(MultiplicativeChar::new(&f, 8).is_err());
    }

    #[test]
    fn eta_values() {
        let tower = TowerCtx::new(3, 2, 2).unwrap();
        let fr = tower.field(Level::R);
        assert_eq!(eta(&tower, FieldElement::ZERO).unwrap(), 0);
        assert_eq!(eta(&tower, FieldElement::ONE).unwrap(), 1);
        assert_eq!(eta(&tower, fr.primitive()).unwrap(), -1);
        // η agrees with "is a square".
        for x in fr.nonzero() {
            let square = fr.nonzero().any(|y| fr.mul(y, y) == x);
            assert_eq!(eta(&tower, x).unwrap() == 1, square);
        }
    }

    #[test]
    fn gauss_sum_cases() {
        let f = build_field(3, 2).unwrap();
        let g = gauss_sum(&f, 0, FieldElement::ZERO).unwrap();
        assert!((g.value - Complex64::new(8.0, 0.0)).norm() < 1e-12);
        let g = gauss_sum(&f, 0, FieldElement(5)).unwrap();
        assert!((g.value - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        for j in 1..8 {
            for a in f.nonzero() {
                let g = gauss_sum(&f, j, a).unwrap();
                assert!((g.value.norm() - 3.0).abs() < 1e-12);
                assert_eq!(g.sum.total_weight(), 8);
            }
        }
    }

    #[test]
    fn gauss_properties_small_fields() {
        for (p, n) in [(3, 2), (5, 2), (7, 1), (3, 3)] {
            let f = build_field(p, n).unwrap();
            let r = verify_gauss_properties(&f);
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn fourier_expansion_small_fields() {
        let f = build_field(3, 2).unwrap();
        let r = verify_fourier_all(&f).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checked, 64);
        let one = verify_fourier_expansion(&f, 0, FieldElement(4)).unwrap();
        assert!(one.passed());
        assert!(verify_fourier_expansion(&f, 1, FieldElement::ZERO).is_err());
        let f27 = build_field(3, 3).unwrap();
        assert!(verify_fourier_all(&f27).unwrap().passed());
    }

    #[test]
    fn restriction_lemma() {
        for (p, t, s) in [(3, 1, 2), (3, 2, 2), (3, 1, 3), (5, 1, 2), (3, 2, 3), (5, 1, 5)] {
            let r = verify_restriction_for(p, t, s, 1 << 20).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
