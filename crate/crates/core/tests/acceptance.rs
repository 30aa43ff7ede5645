//! The eight acceptance criteria, one printed pass/fail line each.
//!
//! Run with `cargo test -p codebook-core --test acceptance -- --nocapture`.
//! Expected values that are not printed constants are recomputed here from
//! first principles (integer closed forms, brute-force enumeration) rather
//! than taken from the library.

use std::process::Command;
use std::time::Instant;

use rayon::prelude::*;

use codebook_core::analysis::{
    distribution_all_pairs, distribution_from_codebook, distribution_ii, imax_all_pairs,
    imax_from_codebook, ratio_report, verify_bent, verify_lemma_a, verify_lemma_b, verify_p_q,
    AnalysisReport, Distribution, Tier,
};
use codebook_core::characters::{verify_fourier_all, verify_gauss_properties, verify_restriction_for};
use codebook_core::constructions::{build_set, codebook, Construction, DEFAULT_ENTRY_CAP};
use codebook_core::tower::verify_trace_transitivity;
use codebook_core::{CheckReport, FieldCtx, TowerCtx, TowerParams, DEFAULT_BUDGET};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const TOL: f64 = 1e-4;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn near(label: &str, got: f64, want: f64) -> Result<(), String> {
    ensure((got - want).abs() <= TOL, || format!("{label} = {got:.6}, expected {want} ± {TOL}"))
}

fn odd_primes_to(n: u32) -> Vec<u32> {
    (3..=n).step_by(2).filter(|&p| (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

fn pow(p: u32, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// K from the definitions, independent of the library: construction I takes
/// half of the q/r·(r-1) elements with nonzero trace, construction II takes
/// half of the (q+1)·q/r·(r-1) elements of F_{q²}^* whose norm has nonzero
/// trace.
fn oracle_nk(c: Construction, p: u32, t: u32, s: u32) -> (u128, u128) {
    let (r, q) = (pow(p, t), pow(p, t * s));
    match c {
        Construction::I => (q - 1, q / r * (r - 1) / 2),
        Construction::II => (q * q, (q + 1) * (q / r) * (r - 1) / 2),
    }
}

fn oracle_welch(n: u128, k: u128) -> f64 {
    let (n, k) = (n as f64, k as f64);
    ((n - k) / ((n - 1.0) * k)).sqrt()
}

fn report(c: Construction, p: u32, t: u32, s: u32) -> Result<AnalysisReport, String> {
    let params = TowerParams::new(p, t, s).map_err(|e| e.to_string())?;
    ratio_report(c, &params, DEFAULT_BUDGET).map_err(|e| e.to_string())
}

struct Row {
    c: Construction,
    pts: (u32, u32, u32),
    imax: f64,
    welch: f64,
    ratio: f64,
}

/// Checks N, K exactly and the real columns to ±1e-4. For construction II
/// the empirical I_max must also equal the printed value; for I it must not
/// exceed the bound.
fn check_row(row: &Row) -> Outcome {
    let (p, t, s) = row.pts;
    let rep = report(row.c, p, t, s)?;
    let (n, k) = oracle_nk(row.c, p, t, s);
    ensure(rep.n == n && rep.k == k, || format!("(N, K) = ({}, {}), expected ({n}, {k})", rep.n, rep.k))?;
    ensure(rep.tier == Tier::Exhaustive, || "not enumerated".into())?;
    ensure(rep.passed(), || format!("violations: {:?}", rep.violations))?;
    near("I_W", rep.welch, row.welch)?;
    near("I_W vs oracle", rep.welch, oracle_welch(n, k))?;
    near("I_max bound", rep.imax_bound, row.imax)?;
    near("ratio", rep.ratio_bound_over_welch, row.ratio)?;
    let emp = rep.imax_empirical.ok_or("no empirical I_max")?;
    match row.c {
        Construction::II => near("empirical I_max", emp, row.imax)?,
        Construction::I => ensure(emp <= rep.imax_bound + 1e-12, || {
            format!("empirical I_max {emp} exceeds bound {}", rep.imax_bound)
        })?,
    }
    Ok(format!(
        "{} {:?}: N={n} K={k} I_max={:.4} (empirical {emp:.4}) I_W={:.4} ratio={:.4}",
        row.c, row.pts, rep.imax_bound, rep.welch, rep.ratio_bound_over_welch
    ))
}

fn criterion_1() -> Outcome {
    check_row(&Row { c: Construction::II, pts: (3, 2, 2), imax: 0.0152, welch: 0.0137, ratio: 1.1166 })
}

fn criterion_2() -> Outcome {
    check_row(&Row { c: Construction::II, pts: (19, 1, 2), imax: 0.0031, welch: 0.0029, ratio: 1.0539 })
}

fn criterion_3() -> Outcome {
    let a = check_row(&Row { c: Construction::I, pts: (3, 2, 2), imax: 0.1667, welch: 0.1244, ratio: 1.3399 })?;
    let b = check_row(&Row { c: Construction::I, pts: (19, 1, 2), imax: 0.0683, welch: 0.0555, ratio: 1.2310 })?;
    Ok(format!("{a}; {b}"))
}

/// The two magnitudes and their counts, in exact integer arithmetic with
/// every division checked.
fn oracle_distribution(p: u32, t: u32, s: u32) -> [(u128, u128); 2] {
    let (r, q) = (pow(p, t), pow(p, t * s));
    let exact = |num: u128, den: u128| {
        assert_eq!(num % den, 0, "{num}/{den} is not integral");
        num / den
    };
    let (q3, q4) = (q.pow(3), q.pow(4));
    let small = exact(q * (r - 1), 2 * r);
    let large = exact(q * (r + 1), 2 * r);
    let small_count = exact((r + 1) * q4 - (r - 1) * q3, 2 * r) - q * q;
    let large_count = exact((r - 1) * (q4 + q3), 2 * r);
    [(small, small_count), (large, large_count)]
}

fn magnitudes(d: &Distribution) -> Vec<(u128, u128)> {
    let mut v: Vec<(u128, u128)> = d.0.iter().map(|e| (e.value.unsigned_abs() as u128, e.count)).collect();
    v.sort();
    v
}

fn criterion_4() -> Outcome {
    let mut parts = Vec::new();
    for (p, t, s) in [(3, 1, 1), (3, 1, 2), (5, 1, 1), (3, 2, 1)] {
        let want = oracle_distribution(p, t, s);
        let n = pow(p, 2 * t * s);
        ensure(want[0].1 + want[1].1 == n * (n - 1), || format!("closed-form counts do not sum to N(N-1) for {:?}", (p, t, s)))?;
        let tower = TowerCtx::new(p, t, s).map_err(|e| e.to_string())?;
        let dset = build_set(&tower, Construction::II).map_err(|e| e.to_string())?;
        let cb = codebook(&tower, &dset, DEFAULT_ENTRY_CAP).map_err(|e| e.to_string())?;
        let enumerated = distribution_all_pairs(&cb).map_err(|e| e.to_string())?;
        let fast = distribution_ii(&tower, &dset).map_err(|e| e.to_string())?;
        ensure(fast == enumerated, || format!("fast histogram {fast:?} differs from enumeration {enumerated:?}"))?;
        let got = magnitudes(&enumerated);
        ensure(got == want, || format!("{:?}: |K*C| histogram {got:?}, expected {want:?}", (p, t, s)))?;
        let signed: Vec<String> = enumerated.0.iter().map(|e| format!("{}:{}", e.value, e.count)).collect();
        parts.push(format!("{:?} {{{}}}", (p, t, s), signed.join(", ")));
    }
    Ok(parts.join("; "))
}

fn all_pass(reports: Vec<CheckReport>, what: &str) -> Result<u64, String> {
    let mut checked = 0;
    for r in reports {
        ensure(r.passed(), || format!("{what}: {} failures, first: {:?}", r.failed, r.failures.first()))?;
        checked += r.checked;
    }
    Ok(checked)
}

/// Every field of odd characteristic with order at most `max`.
fn fields_up_to(max: u128) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for p in odd_primes_to(max as u32) {
        let mut n = 1;
        while pow(p, n) <= max {
            out.push((p, n));
            n += 1;
        }
    }
    out
}

/// Every tower (p, t, s) with r ≤ max_r and q ≤ max_q.
fn towers(max_r: u128, max_q: u128) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for (p, t) in fields_up_to(max_r) {
        let mut s = 1;
        while pow(p, t * s) <= max_q {
            out.push((p, t, s));
            s += 1;
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let field = |(p, n): (u32, u32)| FieldCtx::build(p, n, DEFAULT_BUDGET).map_err(|e| e.to_string());
    let tower = |(p, t, s): (u32, u32, u32)| TowerCtx::new(p, t, s).map_err(|e| e.to_string());

    let gauss_fields = fields_up_to(729);
    let gauss = gauss_fields
        .par_iter()
        .map(|&f| Ok(verify_gauss_properties(&field(f)?)))
        .collect::<Result<Vec<_>, String>>()?;
    let gauss = all_pass(gauss, "gauss")?;

    let fourier = fields_up_to(81)
        .par_iter()
        .map(|&f| verify_fourier_all(&field(f)?).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, String>>()?;
    let fourier = all_pass(fourier, "fourier")?;

    let trace_towers = towers(729, 729);
    let trace = trace_towers
        .par_iter()
        .map(|&t| verify_trace_transitivity(&tower(t)?).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, String>>()?;
    let trace = all_pass(trace, "trace")?;

    // q is capped where F_q still has an enumerable log table.
    let restriction_towers = towers(81, 1 << 16);
    let restriction = restriction_towers
        .par_iter()
        .map(|&(p, t, s)| verify_restriction_for(p, t, s, DEFAULT_BUDGET).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, String>>()?;
    let restriction = all_pass(restriction, "restriction")?;

    let mut lemma_ab = Vec::new();
    for pts in [(3, 1, 2), (3, 2, 2), (5, 1, 2)] {
        let tw = tower(pts)?;
        lemma_ab.push(verify_lemma_a(&tw).map_err(|e| e.to_string())?);
        lemma_ab.push(verify_lemma_b(&tw).map_err(|e| e.to_string())?);
    }
    let lemma_ab = all_pass(lemma_ab, "lemma A/B")?;

    let mut bent_pq = Vec::new();
    for pts in [(3, 1, 1), (3, 1, 2), (5, 1, 1)] {
        let tw = tower(pts)?;
        bent_pq.push(verify_bent(&tw).map_err(|e| e.to_string())?);
        bent_pq.push(verify_p_q(&tw).map_err(|e| e.to_string())?);
    }
    let bent_pq = all_pass(bent_pq, "bent/PQ")?;

    Ok(format!(
        "gauss {} fields/{gauss} checks, fourier {fourier}, trace {} towers/{trace}, restriction {} towers/{restriction}, lemma A/B {lemma_ab}, bent+PQ {bent_pq}",
        gauss_fields.len(),
        trace_towers.len(),
        restriction_towers.len()
    ))
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    for (p, t, s) in [(3, 1, 1), (3, 1, 2), (5, 1, 1)] {
        let tower = TowerCtx::new(p, t, s).map_err(|e| e.to_string())?;
        for c in [Construction::I, Construction::II] {
            let dset = build_set(&tower, c).map_err(|e| e.to_string())?;
            let cb = codebook(&tower, &dset, DEFAULT_ENTRY_CAP).map_err(|e| e.to_string())?;
            let reduced = imax_from_codebook(&cb).map_err(|e| e.to_string())?;
            let brute = imax_all_pairs(&cb);
            ensure((reduced - brute).abs() <= 1e-12, || {
                format!("{c} {:?}: reduced I_max {reduced} vs all-pairs {brute}", (p, t, s))
            })?;
            if c == Construction::II {
                let d1 = distribution_from_codebook(&cb).map_err(|e| e.to_string())?;
                let d2 = distribution_all_pairs(&cb).map_err(|e| e.to_string())?;
                ensure(d1 == d2, || format!("{:?}: reduced histogram {d1:?} vs all-pairs {d2:?}", (p, t, s)))?;
                // The exact maximum |K·C| over K gives I_max with no rounding.
                let max = d2.0.iter().map(|e| e.value.unsigned_abs()).max().unwrap_or(0);
                ensure((brute - max as f64 / cb.k() as f64).abs() <= 1e-12, || "I_max disagrees with histogram".into())?;
            }
            parts.push(format!("{c} {:?} I_max={reduced:.6}", (p, t, s)));
        }
    }
    Ok(parts.join(", "))
}

fn cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_codebook")).args(args).output().map_err(|e| e.to_string())
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for name in ["a.cb", "b.cb"] {
        let path = dir.path().join(name);
        let out = cli(&["build", "--construction", "II", "--p", "3", "--t", "2", "--s", "2", "--out", path.to_str().unwrap()])?;
        ensure(out.status.code() == Some(0), || format!("build exited {:?}", out.status.code()))?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(files[0] == files[1], || "the two builds differ".into())?;
    let out = cli(&["verify", "--suite", "all", "--p", "3", "--t", "2", "--s", "2"])?;
    ensure(out.status.code() == Some(0), || {
        format!("verify exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(format!("two builds byte-identical ({} bytes), verify all exit 0", files[0].len()))
}

fn criterion_8() -> Outcome {
    let mut last = f64::INFINITY;
    let mut parts = Vec::new();
    for t in 1..=3 {
        let ii = report(Construction::II, 3, t, 2)?;
        let r = pow(3, t) as f64;
        let ceiling = ((r + 1.0) / (r - 1.0)).sqrt();
        let ratio = ii.ratio_bound_over_welch;
        ensure(ratio < last, || format!("II ratio {ratio} at t={t} does not decrease from {last}"))?;
        ensure(ratio < ceiling, || format!("II ratio {ratio} at t={t} not below {ceiling}"))?;
        ensure(ii.passed(), || format!("II t={t} violations: {:?}", ii.violations))?;
        last = ratio;

        let i = report(Construction::I, 3, t, 2)?;
        let q = pow(3, 2 * t) as f64;
        let chain = (1.0 - 2.0 / q).sqrt() / ((1.0 - 1.0 / r.sqrt()) * (1.0 - 2.0 / q + 1.0 / r).sqrt());
        ensure(i.ratio_bound_over_welch < chain, || {
            format!("I ratio {} at t={t} not below chain bound {chain}", i.ratio_bound_over_welch)
        })?;
        ensure(i.passed(), || format!("I t={t} violations: {:?}", i.violations))?;
        parts.push(format!("t={t}: II {ratio:.4} < {ceiling:.4}, I {:.4} < {chain:.4}", i.ratio_bound_over_welch));
    }
    Ok(parts.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("construction II (3,2,2) table row", criterion_1),
        ("construction II (19,1,2) table row", criterion_2),
        ("construction I table rows", criterion_3),
        ("two-valued distribution", criterion_4),
        ("lemma suites", criterion_5),
        ("reduced vs all-pairs", criterion_6),
        ("determinism and verify exit code", criterion_7),
        ("ratio trend", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("criterion {} PASS [{secs:.2}s] {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {} FAIL [{secs:.2}s] {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
