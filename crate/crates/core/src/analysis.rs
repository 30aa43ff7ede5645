//! Correlation analysis of the two codebook families and exhaustive checks
//! of the character-sum evaluations their bounds rest on.
//!
//! Both families are group codes: the entrywise product of a row with the
//! conjugate of another is again a row. So every pairwise inner product is a
//! row sum, and the N(N-1) ordered pairs collapse to N-1 shift classes of N
//! pairs each.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{quadratic_character, MAGNITUDE_TOLERANCE};
use crate::constructions::{build_set, Codebook, Construction, DefiningSet};
use crate::cyclo::CycloSum;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::report::CheckReport;
use crate::spectrum::{additive_spectrum, Spectrum};
use crate::tower::{Level, TowerCtx, TowerParams};

/// Slack allowed when comparing an empirical maximum to a bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// √((N-K)/((N-1)K)).
pub fn welch_bound(n: u128, k: u128) -> Result<f64> {
    if n <= 1 || k == 0 {
        return Err(Error::Precondition(format!("Welch bound needs N > 1 and K > 0, got N={n}, K={k}")));
    }
    if k > n {
        return Err(Error::Precondition(format!("Welch bound needs K <= N, got N={n}, K={k}")));
    }
    let (n, k) = (n as f64, k as f64);
    Ok(((n - k) / ((n - 1.0) * k)).sqrt())
}

/// The closed-form upper bound on I_max.
pub fn imax_bound(construction: Construction, params: &TowerParams) -> Result<f64> {
    let (q, r) = (params.q as f64, params.r as f64);
    Ok(match construction {
        Construction::I => r.sqrt() / (q.sqrt() * (r.sqrt() - 1.0)),
        Construction::II => (r + 1.0) * q / (2.0 * r * construction.k(params)? as f64),
    })
}

/// Parameter-only upper bound on bound/I_W, used as a sanity ceiling.
pub fn chain_bound(construction: Construction, params: &TowerParams) -> f64 {
    let (q, r) = (params.q as f64, params.r as f64);
    match construction {
        Construction::I => {
            (1.0 - 2.0 / q).sqrt() / ((1.0 - 1.0 / r.sqrt()) * (1.0 - 2.0 / q + 1.0 / r).sqrt())
        }
        Construction::II => ((r + 1.0) / (r - 1.0)).sqrt(),
    }
}

/// Σ_{x∈D} φ_j(x), K times the inner product of any two rows whose indices
/// differ by j.
pub fn inner_product_i(tower: &TowerCtx, dset: &DefiningSet, j: u32) -> Result<CycloSum> {
    let fq = tower.field(Level::Q);
    let m = fq.group_order();
    if j == 0 || j >= m {
        return Err(Error::Precondition(format!("character index {j} must lie in 1..{m}")));
    }
    let mut s = CycloSum::zero(m as u64);
    for &x in dset.elements() {
        s.add(fq.log(x).ok_or(Error::ZeroArgument)? as u64 * j as u64, 1);
    }
    Ok(s)
}

/// Σ_{x∈D} χ(a·x), K times the inner product of any two rows whose indices
/// differ by a.
pub fn inner_product_ii(tower: &TowerCtx, dset: &DefiningSet, a: FieldElement) -> Result<CycloSum> {
    let f = tower.field(Level::Q2);
    f.check(a)?;
    if a.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let mut s = CycloSum::zero(f.characteristic() as u64);
    for &x in dset.elements() {
        s.add(f.abs_trace(f.mul(a, x)) as u64, 1);
    }
    Ok(s)
}

/// Σ_{x∈D} χ(a·x) for every a at once.
pub fn shift_spectrum_ii(tower: &TowerCtx, dset: &DefiningSet) -> Result<Spectrum> {
    additive_spectrum(tower.field(Level::Q2), dset.elements().iter().map(|&x| (x, 0, 1)))
}

/// Exact I_max of the codebook on `dset`.
pub fn imax(tower: &TowerCtx, dset: &DefiningSet) -> Result<f64> {
    match dset.construction() {
        Construction::I => imax_i(tower, dset),
        Construction::II => Ok(imax_from_spectrum(&shift_spectrum_ii(tower, dset)?, dset.k())),
    }
}

fn imax_i(tower: &TowerCtx, dset: &DefiningSet) -> Result<f64> {
    let m = tower.field(Level::Q).group_order();
    let k = dset.k() as f64;
    let sums: Vec<f64> = (1..m)
        .into_par_iter()
        .map(|j| inner_product_i(tower, dset, j).map(|s| s.eval().norm()))
        .collect::<Result<_>>()?;
    Ok(sums.into_iter().fold(0.0, f64::max) / k)
}

fn imax_from_spectrum(sp: &Spectrum, k: usize) -> f64 {
    (1..sp.len() as u32)
        .map(|a| {
            let a = FieldElement(a);
            match sp.rational(a) {
                Some(v) => v.unsigned_abs() as f64,
                None => sp.cyclo(a).eval().norm(),
            }
        })
        .fold(0.0, f64::max)
        / k as f64
}

/// One value of K·C with its number of ordered pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistributionEntry {
    pub value: i64,
    pub count: u128,
}

/// Histogram of K·C over ordered pairs of distinct rows, ascending by value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Distribution(pub Vec<DistributionEntry>);

impl Distribution {
    fn from_weighted(values: impl IntoIterator<Item = (i64, u128)>) -> Self {
        let mut map = std::collections::BTreeMap::new();
        for (v, c) in values {
            *map.entry(v).or_insert(0u128) += c;
        }
        Distribution(
            map.into_iter()
                .map(|(value, count)| DistributionEntry { value, count })
                .collect(),
        )
    }

    pub fn total(&self) -> u128 {
        self.0.iter().map(|e| e.count).sum()
    }

    pub fn count_of(&self, value: i64) -> u128 {
        self.0.iter().find(|e| e.value == value).map_or(0, |e| e.count)
    }

    /// Pair count for values of the given magnitude, either sign.
    pub fn count_of_magnitude(&self, magnitude: u64) -> u128 {
        self.0
            .iter()
            .filter(|e| e.value.unsigned_abs() == magnitude)
            .map(|e| e.count)
            .sum()
    }
}

/// The enumerated distribution of K·C for Construction II. Every shift sum
/// must be a rational integer.
pub fn distribution_ii(tower: &TowerCtx, dset: &DefiningSet) -> Result<Distribution> {
    distribution_from_spectrum(&shift_spectrum_ii(tower, dset)?)
}

fn distribution_from_spectrum(sp: &Spectrum) -> Result<Distribution> {
    let n = sp.len() as u128;
    let values = (1..sp.len() as u32)
        .map(|a| {
            sp.rational(FieldElement(a))
                .map(|v| (v, n))
                .ok_or_else(|| Error::Integrity(format!("shift sum at a={a} is not a rational integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Distribution::from_weighted(values))
}

/// The two-valued closed form: q(r-1)/(2r) with count
/// ((r+1)q⁴ - (r-1)q³)/(2r) - q², and -q(r+1)/(2r) with count (r-1)(q⁴+q³)/(2r).
pub fn expected_distribution_ii(params: &TowerParams) -> Result<Distribution> {
    let overflow = || Error::Overflow(format!("distribution counts for {params}"));
    let (q, r) = (params.q, params.r);
    let q3 = q.checked_pow(3).ok_or_else(overflow)?;
    let q4 = q3.checked_mul(q).ok_or_else(overflow)?;
    let big = (r + 1).checked_mul(q4).ok_or_else(overflow)?;
    let small = (r - 1).checked_mul(q3).ok_or_else(overflow)?;
    let c1 = (big - small) / (2 * r) - q * q;
    let c2 = (r - 1).checked_mul(q4 + q3).ok_or_else(overflow)? / (2 * r);
    let v1 = i64::try_from(q * (r - 1) / (2 * r)).map_err(|_| overflow())?;
    let v2 = -i64::try_from(q * (r + 1) / (2 * r)).map_err(|_| overflow())?;
    Ok(Distribution::from_weighted([(v1, c1), (v2, c2)]))
}

/// Exhaustive comparison of the enumerated distribution against the closed
/// form. Magnitudes and counts are compared; the sign of each value is
/// whatever enumeration produced and is reported, not assumed.
pub fn verify_distribution_ii(tower: &TowerCtx) -> Result<CheckReport> {
    let mut report = CheckReport::new("distribution");
    let params = tower.params();
    let dset = build_set(tower, Construction::II)?;
    let got = distribution_ii(tower, &dset)?;
    let want = expected_distribution_ii(params)?;
    let n = params.q2;
    report.check(got.total() == n * (n - 1), || {
        format!("pair counts sum to {} instead of N(N-1) = {}", got.total(), n * (n - 1))
    });
    report.check(got.0.len() == 2, || format!("expected two values, found {:?}", got.0));
    for e in &want.0 {
        let mag = e.value.unsigned_abs();
        let c = got.count_of_magnitude(mag);
        report.check(c == e.count, || format!("|K*C| = {mag} occurs {c} times, closed form says {}", e.count));
    }
    Ok(report)
}

/// I_max from the rows of a materialized codebook, using the group-code
/// reduction against row 0 (the all-ones row in both families).
pub fn imax_from_codebook(cb: &Codebook) -> Result<f64> {
    check_identity_row(cb)?;
    let m = cb.root_order();
    let best = (1..cb.n())
        .into_par_iter()
        .map(|i| row_sum(cb, i, m).eval().norm())
        .reduce(|| 0.0, f64::max);
    Ok(best / cb.k() as f64)
}

/// The K·C histogram of a Construction II codebook from its rows.
pub fn distribution_from_codebook(cb: &Codebook) -> Result<Distribution> {
    check_identity_row(cb)?;
    let m = cb.root_order();
    let n = cb.n() as u128;
    let values = (1..cb.n())
        .map(|i| {
            row_sum(cb, i, m)
                .rational()?
                .map(|v| (v, n))
                .ok_or_else(|| Error::Integrity(format!("row {i} sum is not a rational integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Distribution::from_weighted(values))
}

fn row_sum(cb: &Codebook, i: usize, m: u64) -> CycloSum {
    let mut s = CycloSum::zero(m);
    for &e in cb.row(i) {
        s.add(e as u64, 1);
    }
    s
}

fn check_identity_row(cb: &Codebook) -> Result<()> {
    if cb.n() == 0 || cb.row(0).iter().any(|&e| e != 0) {
        return Err(Error::Integrity("row 0 is not the all-ones codeword".into()));
    }
    Ok(())
}

/// Reference I_max over all ordered pairs, O(N²K).
pub fn imax_all_pairs(cb: &Codebook) -> f64 {
    let mut best = 0f64;
    for i in 0..cb.n() {
        for j in 0..cb.n() {
            if i != j {
                best = best.max(cb.scaled_inner_product(i, j).eval().norm());
            }
        }
    }
    best / cb.k() as f64
}

/// Reference histogram of K·C over all ordered pairs, O(N²K).
pub fn distribution_all_pairs(cb: &Codebook) -> Result<Distribution> {
    let mut values = Vec::with_capacity(cb.n() * cb.n());
    for i in 0..cb.n() {
        for j in 0..cb.n() {
            if i != j {
                let v = cb
                    .scaled_inner_product(i, j)
                    .rational()?
                    .ok_or_else(|| Error::Integrity(format!("pair ({i}, {j}) is not rational")))?;
                values.push((v, 1));
            }
        }
    }
    Ok(Distribution::from_weighted(values))
}

/// A(φ_j) = Σ φ_j(x) η(Tr(x+1)) and B(φ_j) = Σ_{Tr(x+1)=0} φ_j(x) over
/// x ∈ F_q^*, for every j.
struct SumsAB {
    a: Vec<CycloSum>,
    b: Vec<CycloSum>,
}

fn sums_ab(tower: &TowerCtx) -> Result<SumsAB> {
    let params = tower.params();
    Construction::I.check_params(params)?;
    let fq = tower.field(Level::Q);
    let fr = tower.field(Level::R);
    let m = fq.group_order() as u64;
    let tr = tower.trace_q_to_r_table()?;
    let terms: Vec<(u64, i64, bool)> = fq
        .nonzero()
        .map(|x| {
            let t = tr[fq.add(x, FieldElement::ONE).0 as usize];
            (fq.log(x).unwrap() as u64, quadratic_character(fr, t) as i64, t.is_zero())
        })
        .collect();
    let (a, b) = (0..m)
        .map(|j| {
            let mut a = CycloSum::zero(m);
            let mut b = CycloSum::zero(m);
            for &(l, w, zero) in &terms {
                if w != 0 {
                    a.add(j * l, w);
                }
                if zero {
                    b.add(j * l, 1);
                }
            }
            (a, b)
        })
        .unzip();
    Ok(SumsAB { a, b })
}

/// For each j, whether φ_j restricted to F_r^* is trivial, and whether it
/// equals η there.
fn restriction_classes(tower: &TowerCtx) -> Vec<(bool, bool)> {
    let fq = tower.field(Level::Q);
    let fr = tower.field(Level::R);
    let m = fq.group_order() as u64;
    let half = m / 2;
    let logs: Vec<(u64, i8)> = fr
        .nonzero()
        .map(|b| (fq.log(tower.r_in_q().image(b)).unwrap() as u64, quadratic_character(fr, b)))
        .collect();
    (0..m)
        .map(|j| {
            let trivial = logs.iter().all(|&(l, _)| j * l % m == 0);
            let is_eta = logs
                .iter()
                .all(|&(l, e)| j * l % m == if e == 1 { 0 } else { half });
            (trivial, is_eta)
        })
        .collect()
}

fn magnitude_ok(z: Complex64, expect: f64) -> bool {
    (z.norm() - expect).abs() <= MAGNITUDE_TOLERANCE * expect.max(1.0)
}

/// |A| = √q when η·conj(φ*) is nontrivial on F_r, else √q/√r, for every
/// nontrivial φ. Also checks that exactly (q-1)/(r-1) characters restrict
/// trivially (and as many restrict to η).
pub fn verify_lemma_a(tower: &TowerCtx) -> Result<CheckReport> {
    let mut report = CheckReport::new("lemmaA");
    let sums = sums_ab(tower)?;
    let classes = restriction_classes(tower);
    let (q, r) = (tower.params().q as f64, tower.params().r as f64);
    check_class_counts(tower, &classes, &mut report);
    for (j, a) in sums.a.iter().enumerate().skip(1) {
        let expect = if classes[j].1 { q.sqrt() / r.sqrt() } else { q.sqrt() };
        let v = a.eval();
        report.check(magnitude_ok(v, expect), || {
            format!("|A(phi_{j})| = {} expected {expect}", v.norm())
        });
    }
    Ok(report)
}

/// |B| = √q/√r when conj(φ*) is nontrivial, else √q/r, for every nontrivial
/// φ. Also checks the decomposition 2·Σ_{x∈D} φ(x) = -η(s)A - B.
pub fn verify_lemma_b(tower: &TowerCtx) -> Result<CheckReport> {
    let mut report = CheckReport::new("lemmaB");
    let sums = sums_ab(tower)?;
    let classes = restriction_classes(tower);
    let params = tower.params();
    let (q, r) = (params.q as f64, params.r as f64);
    check_class_counts(tower, &classes, &mut report);
    let dset = build_set(tower, Construction::I)?;
    let eta_s = quadratic_character(tower.field(Level::R), FieldElement(params.s % params.p)) as f64;
    for (j, b) in sums.b.iter().enumerate().skip(1) {
        let expect = if classes[j].0 { q.sqrt() / r } else { q.sqrt() / r.sqrt() };
        let v = b.eval();
        report.check(magnitude_ok(v, expect), || {
            format!("|B(phi_{j})| = {} expected {expect}", v.norm())
        });
        let ip = inner_product_i(tower, &dset, j as u32)?.eval();
        let rhs = -eta_s * sums.a[j].eval() - v;
        report.check((2.0 * ip - rhs).norm() <= 1e-9 * q, || {
            format!("2*K*C = {} but -eta(s)A - B = {rhs} at j={j}", 2.0 * ip)
        });
    }
    Ok(report)
}

fn check_class_counts(tower: &TowerCtx, classes: &[(bool, bool)], report: &mut CheckReport) {
    let f = |i: usize| classes.iter().filter(|c| if i == 0 { c.0 } else { c.1 }).count() as u128;
    let expect = (tower.params().q - 1) / (tower.params().r - 1);
    let (trivial, eta) = (f(0), f(1));
    report.check(trivial == expect, || {
        format!("{trivial} characters restrict trivially, expected (q-1)/(r-1) = {expect}")
    });
    report.check(eta == expect, || {
        format!("{eta} characters restrict to eta, expected (q-1)/(r-1) = {expect}")
    });
}

/// x^T = x^(q+1) as an element of F_q, for every x ∈ F_{q^2}.
fn norm_table(tower: &TowerCtx) -> Result<Vec<FieldElement>> {
    let f = tower.field(Level::Q2);
    let by_class = tower.norm_by_log_class()?;
    let m = by_class.len() as u32;
    Ok(f.elements()
        .map(|x| f.log(x).map_or(FieldElement::ZERO, |l| by_class[(l % m) as usize]))
        .collect())
}

/// For every b ∈ F_r and a ∈ F_{q^2}: Σ_x ω^(Tr(b·x^T) + Tr(a·x)) equals
/// -q·ω^(-Tr(a^T/b)) when b ≠ 0. For b = 0 it is 0 when a ≠ 0 and q² at a = 0.
pub fn verify_bent(tower: &TowerCtx) -> Result<CheckReport> {
    let mut report = CheckReport::new("bent");
    let fq = tower.field(Level::Q);
    let fq2 = tower.field(Level::Q2);
    let fr = tower.field(Level::R);
    let p = fq.characteristic() as u64;
    let q = tower.params().q as i64;
    let norms = norm_table(tower)?;
    for b in fr.elements() {
        let bq = tower.r_in_q().image(b);
        let sp = additive_spectrum(
            fq2,
            fq2.elements().map(|x| (x, fq.abs_trace(fq.mul(bq, norms[x.0 as usize])), 1)),
        )?;
        for a in fq2.elements() {
            let got = sp.cyclo(a);
            if b.is_zero() {
                let expect = if a.is_zero() { q * q } else { 0 };
                report.check(sp.rational(a) == Some(expect), || {
                    format!("f_0^({}) = {:?} expected {expect}", a.0, sp.rational(a))
                });
                continue;
            }
            let ratio = fq.div(norms[a.0 as usize], bq)?;
            let k = (p - fq.abs_trace(ratio) as u64) % p;
            let mut expect = CycloSum::zero(p);
            expect.add(k, -q);
            report.check(got.exact_eq(&expect)?, || {
                format!("f_{}^({}) has counts {:?}, expected -q*w^{k}", b.0, a.0, sp.counts(a))
            });
            let mag = got.eval().norm();
            report.check((mag - q as f64).abs() <= MAGNITUDE_TOLERANCE * q as f64, || {
                format!("|f_{}^({})| = {mag}, expected q", b.0, a.0)
            });
        }
    }
    Ok(report)
}

/// P(a) = Σ_{Tr(x^T)=0} χ(a·x) and Q(a) = Σ χ(a·x)η(Tr(x^T)) against their
/// case tables for every a ≠ 0, plus the decomposition 2·K·C = -Q - P and
/// the count of a with Tr(a^T) = 0.
pub fn verify_p_q(tower: &TowerCtx) -> Result<CheckReport> {
    let mut report = CheckReport::new("PQ");
    let params = *tower.params();
    let fq2 = tower.field(Level::Q2);
    let fr = tower.field(Level::R);
    let (q, r) = (params.q as i64, params.r as i64);
    let tr = tower.trace_q_to_r_table()?;
    let norms = norm_table(tower)?;
    let tr_norm: Vec<FieldElement> = norms.iter().map(|z| tr[z.0 as usize]).collect();

    let p_spec = additive_spectrum(
        fq2,
        fq2.elements().filter(|x| tr_norm[x.0 as usize].is_zero()).map(|x| (x, 0, 1)),
    )?;
    let q_spec = additive_spectrum(
        fq2,
        fq2.elements()
            .map(|x| (x, 0, quadratic_character(fr, tr_norm[x.0 as usize]) as i32))
            .filter(|&(_, _, w)| w != 0),
    )?;
    let dset = build_set(tower, Construction::II)?;
    let ip = shift_spectrum_ii(tower, &dset)?;

    let mut zero_class = 0u128;
    for a in fq2.nonzero() {
        let t = tr_norm[a.0 as usize];
        if t.is_zero() {
            zero_class += 1;
        }
        let want_p = if t.is_zero() { -q / r * (r - 1) } else { q / r };
        let want_q = if t.is_zero() {
            0
        } else {
            -q * quadratic_character(fr, fr.neg(t)) as i64
        };
        let (got_p, got_q) = (p_spec.rational(a), q_spec.rational(a));
        report.check(got_p == Some(want_p), || format!("P({}) = {got_p:?}, expected {want_p}", a.0));
        report.check(got_q == Some(want_q), || format!("Q({}) = {got_q:?}, expected {want_q}", a.0));
        let kc = ip.rational(a);
        report.check(
            matches!((kc, got_p, got_q), (Some(c), Some(pv), Some(qv)) if 2 * c == -pv - qv),
            || format!("2*K*C({}) = {kc:?}*2 but -Q-P uses P={got_p:?}, Q={got_q:?}", a.0),
        );
    }
    let want = (params.q + 1) * (params.q / params.r - 1);
    report.check(zero_class == want, || {
        format!("{zero_class} nonzero a have Tr(a^T) = 0, expected (q+1)(q/r-1) = {want}")
    });
    Ok(report)
}

/// Which execution tier produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Exhaustive,
    Formula,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub construction: Construction,
    pub p: u32,
    pub t: u32,
    pub s: u32,
    pub r: u128,
    pub q: u128,
    #[serde(rename = "N")]
    pub n: u128,
    #[serde(rename = "K")]
    pub k: u128,
    pub tier: Tier,
    pub imax_empirical: Option<f64>,
    pub imax_bound: f64,
    pub welch: f64,
    pub ratio_bound_over_welch: f64,
    pub ratio_empirical_over_welch: Option<f64>,
    pub chain_bound: f64,
    pub distribution: Option<Distribution>,
    /// Failed consistency assertions; empty on success.
    pub violations: Vec<String>,
}

impl AnalysisReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn formula(construction: Construction, params: &TowerParams) -> Result<Self> {
        construction.check_params(params)?;
        let n = construction.n(params);
        let k = construction.k(params)?;
        let welch = welch_bound(n, k)?;
        let bound = imax_bound(construction, params)?;
        let ratio = bound / welch;
        let chain = chain_bound(construction, params);
        let mut violations = Vec::new();
        if ratio >= chain {
            violations.push(format!("bound/welch = {ratio} is not below the chain bound {chain}"));
        }
        if bound + BOUND_SLACK < welch {
            violations.push(format!("bound {bound} lies below the Welch bound {welch}"));
        }
        Ok(AnalysisReport {
            construction,
            p: params.p,
            t: params.t,
            s: params.s,
            r: params.r,
            q: params.q,
            n,
            k,
            tier: Tier::Formula,
            imax_empirical: None,
            imax_bound: bound,
            welch,
            ratio_bound_over_welch: ratio,
            ratio_empirical_over_welch: None,
            chain_bound: chain,
            distribution: None,
            violations,
        })
    }

    /// Fills the empirical fields and checks them against both bounds.
    fn with_empirical(mut self, imax: f64, distribution: Option<Distribution>) -> Self {
        self.tier = Tier::Exhaustive;
        self.imax_empirical = Some(imax);
        self.ratio_empirical_over_welch = Some(imax / self.welch);
        if imax > self.imax_bound + BOUND_SLACK {
            self.violations
                .push(format!("empirical I_max {imax} exceeds the bound {}", self.imax_bound));
        }
        if self.welch > imax + BOUND_SLACK {
            self.violations
                .push(format!("empirical I_max {imax} lies below the Welch bound {}", self.welch));
        }
        if let Some(d) = &distribution {
            let pairs = self.n * (self.n - 1);
            if d.total() != pairs {
                self.violations
                    .push(format!("distribution covers {} pairs, expected {pairs}", d.total()));
            }
        }
        self.distribution = distribution;
        self
    }
}

/// Closed-form report; never enumerates.
pub fn formula_report(construction: Construction, params: &TowerParams) -> Result<AnalysisReport> {
    AnalysisReport::formula(construction, params)
}

/// Full report: exhaustive when q² is within `budget`, formula-only otherwise.
pub fn ratio_report(construction: Construction, params: &TowerParams, budget: u64) -> Result<AnalysisReport> {
    let report = AnalysisReport::formula(construction, params)?;
    if !params.within_budget(budget) {
        return Ok(report);
    }
    let tower = TowerCtx::build(*params, budget)?;
    let dset = build_set(&tower, construction)?;
    Ok(match construction {
        Construction::I => report.with_empirical(imax_i(&tower, &dset)?, None),
        Construction::II => {
            let sp = shift_spectrum_ii(&tower, &dset)?;
            let dist = distribution_from_spectrum(&sp)?;
            report.with_empirical(imax_from_spectrum(&sp, dset.k()), Some(dist))
        }
    })
}

/// Report for an already materialized codebook.
pub fn codebook_report(cb: &Codebook) -> Result<AnalysisReport> {
    let report = AnalysisReport::formula(cb.construction(), cb.params())?;
    if report.n != cb.n() as u128 || report.k != cb.k() as u128 {
        return Err(Error::Integrity(format!(
            "codebook is {}x{} but the parameters give {}x{}",
            cb.n(),
            cb.k(),
            report.n,
            report.k
        )));
    }
    let imax = imax_from_codebook(cb)?;
    let dist = match cb.construction() {
        Construction::I => None,
        Construction::II => Some(distribution_from_codebook(cb)?),
    };
    Ok(report.with_empirical(imax, dist))
}
