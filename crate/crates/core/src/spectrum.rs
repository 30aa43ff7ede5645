//! Additive spectra of weighted point sets.
//!
//! Given weighted points (x, phase, w) in a field F of order p^n, the
//! spectrum at a is the sum Σ w·ζ_p^(phase + Tr(a·x)), kept as p integer
//! counts. All q spectra are computed at once by a p-ary transform over the
//! coordinate digits of x, at cost q·p²·n instead of q·|points|.
//!
//! Tr(a·x) is the bilinear form a^T M x with M the trace-form Gram matrix,
//! so the transform is indexed by b = M a and mapped back at the end.

use rayon::prelude::*;

use crate::cyclo::CycloSum;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};

/// Exponent counts of ζ_p for every additive character index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    p: u32,
    /// Row a, column k: the net weight landing on ζ_p^k.
    counts: Vec<i32>,
}

impl Spectrum {
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.counts.len() / self.p as usize
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self, a: FieldElement) -> &[i32] {
        let p = self.p as usize;
        &self.counts[a.0 as usize * p..(a.0 as usize + 1) * p]
    }

    pub fn cyclo(&self, a: FieldElement) -> CycloSum {
        CycloSum::from_counts(self.counts(a).iter().map(|&c| c as i64).collect())
    }

    /// The integer value at a when it is rational, `None` otherwise.
    pub fn rational(&self, a: FieldElement) -> Option<i64> {
        let c = self.counts(a);
        let c1 = *c.get(1)?;
        c[2..]
            .iter()
            .all(|&x| x == c1)
            .then(|| c[0] as i64 - c1 as i64)
    }
}

/// Computes the spectrum of `points` over `field`. Total absolute weight
/// must fit in an i32.
pub fn additive_spectrum(
    field: &FieldCtx,
    points: impl IntoIterator<Item = (FieldElement, u32, i32)>,
) -> Result<Spectrum> {
    let p = field.characteristic() as usize;
    let q = field.order() as usize;
    let n = field.degree() as usize;
    let mut v = vec![0i32; q * p];
    let mut total: i64 = 0;
    for (x, phase, w) in points {
        field.check(x)?;
        total += (w as i64).abs();
        v[x.0 as usize * p + phase as usize % p] += w;
    }
    if total > i32::MAX as i64 {
        return Err(Error::Overflow(format!("spectrum weight {total}")));
    }

    let mut stride = 1usize;
    for _ in 0..n {
        let block = stride * p;
        v.par_chunks_mut(block * p).for_each(|chunk| {
            let mut buf = vec![0i32; p * p];
            for low in 0..stride {
                // Gather rows x_d = 0..p for this low index.
                for xd in 0..p {
                    let at = (xd * stride + low) * p;
                    buf[xd * p..(xd + 1) * p].copy_from_slice(&chunk[at..at + p]);
                }
                for bd in 0..p {
                    let at = (bd * stride + low) * p;
                    let out = &mut chunk[at..at + p];
                    out.iter_mut().for_each(|o| *o = 0);
                    for xd in 0..p {
                        let shift = bd * xd % p;
                        let src = &buf[xd * p..(xd + 1) * p];
                        for (k, &c) in src.iter().enumerate() {
                            out[(k + shift) % p] += c;
                        }
                    }
                }
            }
        });
        stride *= p;
    }

    // Row b of v is indexed by b = M a; reorder to rows indexed by a.
    let gram = field.trace_form();
    let mut counts = vec![0i32; q * p];
    for a in field.elements() {
        let da = field.digits(a);
        let b: u64 = gram
            .iter()
            .rev()
            .fold(0u64, |acc, row| {
                let dot: u64 = row.iter().zip(&da).map(|(&m, &d)| m as u64 * d as u64).sum();
                acc * p as u64 + dot % p as u64
            });
        let (src, dst) = (b as usize * p, a.0 as usize * p);
        counts[dst..dst + p].copy_from_slice(&v[src..src + p]);
    }
    Ok(Spectrum {
        p: p as u32,
        counts,
    })
}
