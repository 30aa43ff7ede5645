//! The two defining sets and the codebooks built on them.
//!
//! Construction I indexes codewords by multiplicative characters of F_q and
//! coordinates by D ⊆ F_q^*. Construction II indexes codewords by additive
//! characters of F_{q^2} and coordinates by D ⊆ F_{q^2}.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::characters::quadratic_character;
use crate::cyclo::{root_of_unity, CycloSum};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::tower::{Level, TowerCtx, TowerParams};

/// Largest N·K a codebook may materialize in exponent form.
pub const DEFAULT_ENTRY_CAP: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construction {
    I,
    II,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::I => "I",
            Construction::II => "II",
        })
    }
}

impl serde::Serialize for Construction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "i" | "1" => Ok(Construction::I),
            "II" | "ii" | "2" => Ok(Construction::II),
            other => Err(Error::Format(format!("unknown construction {other:?}"))),
        }
    }
}

impl Construction {
    /// N as a function of the tower parameters.
    pub fn n(self, params: &TowerParams) -> u128 {
        match self {
            Construction::I => params.q - 1,
            Construction::II => params.q2,
        }
    }

    /// K = q(r-1)/(2r) or q(q+1)(r-1)/(2r).
    pub fn k(self, params: &TowerParams) -> Result<u128> {
        let overflow = || Error::Overflow(format!("K for {params}"));
        let (q, r) = (params.q, params.r);
        let base = match self {
            Construction::I => q,
            Construction::II => q.checked_mul(q + 1).ok_or_else(overflow)?,
        };
        Ok(base.checked_mul(r - 1).ok_or_else(overflow)? / (2 * r))
    }

    /// Parameter restrictions beyond those of the tower itself.
    pub fn check_params(self, params: &TowerParams) -> Result<()> {
        if self == Construction::I && params.s % params.p == 0 {
            return Err(Error::Precondition(format!(
                "construction I needs p not dividing s, got p={}, s={}",
                params.p, params.s
            )));
        }
        Ok(())
    }
}

/// The set D in ascending encoding order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefiningSet {
    construction: Construction,
    params: TowerParams,
    elements: Vec<FieldElement>,
}

impl DefiningSet {
    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn params(&self) -> &TowerParams {
        &self.params
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    fn checked(construction: Construction, params: TowerParams, elements: Vec<FieldElement>) -> Result<Self> {
        let expect = construction.k(&params)?;
        if elements.len() as u128 != expect {
            return Err(Error::Integrity(format!(
                "construction {construction} {params}: |D| = {} but K = {expect}",
                elements.len()
            )));
        }
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Ok(DefiningSet {
            construction,
            params,
            elements,
        })
    }
}

/// D = {x ∈ F_q^* : η(Tr_{q/r}(x+1)) = -η(s)}, with s read in F_p ⊆ F_r.
pub fn build_set_i(tower: &TowerCtx) -> Result<DefiningSet> {
    let params = *tower.params();
    Construction::I.check_params(&params)?;
    let fr = tower.field(Level::R);
    let fq = tower.field(Level::Q);
    let eta_s = quadratic_character(fr, FieldElement(params.s % params.p));
    let tr = tower.trace_q_to_r_table()?;
    let elements = fq
        .nonzero()
        .filter(|&x| {
            let y = fq.add(x, FieldElement::ONE);
            quadratic_character(fr, tr[y.0 as usize]) == -eta_s
        })
        .collect();
    DefiningSet::checked(Construction::I, params, elements)
}

/// D = {x ∈ F_{q^2} : η(Tr_{q/r}(x^(q+1))) = -1}.
pub fn build_set_ii(tower: &TowerCtx) -> Result<DefiningSet> {
    let params = *tower.params();
    let fr = tower.field(Level::R);
    let fq2 = tower.field(Level::Q2);
    let tr = tower.trace_q_to_r_table()?;
    let norm = tower.norm_by_log_class()?;
    let qm1 = norm.len() as u32;
    // x = 0 has x^T = 0 and η(0) = 0, so it never belongs to D.
    let member: Vec<bool> = norm
        .iter()
        .map(|z| quadratic_character(fr, tr[z.0 as usize]) == -1)
        .collect();
    let elements = fq2
        .nonzero()
        .filter(|&x| member[(fq2.log(x).unwrap() % qm1) as usize])
        .collect();
    DefiningSet::checked(Construction::II, params, elements)
}

pub fn build_set(tower: &TowerCtx, construction: Construction) -> Result<DefiningSet> {
    match construction {
        Construction::I => build_set_i(tower),
        Construction::II => build_set_ii(tower),
    }
}

/// A codebook in exponent form: entry (i, x) is ζ_m^e / √K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    construction: Construction,
    params: TowerParams,
    n: usize,
    k: usize,
    root_order: u64,
    exponents: Vec<u32>,
}

impl Codebook {
    /// Wraps an exponent matrix; checks the shape and exponent range.
    pub fn from_exponents(
        construction: Construction,
        params: TowerParams,
        n: usize,
        k: usize,
        root_order: u64,
        exponents: Vec<u32>,
    ) -> Result<Self> {
        if exponents.len() != n * k {
            return Err(Error::Format(format!(
                "expected {n}x{k} exponents, found {}",
                exponents.len()
            )));
        }
        if let Some(e) = exponents.iter().find(|&&e| e as u64 >= root_order) {
            return Err(Error::Format(format!("exponent {e} out of range for root order {root_order}")));
        }
        Ok(Codebook {
            construction,
            params,
            n,
            k,
            root_order,
            exponents,
        })
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn params(&self) -> &TowerParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root_order(&self) -> u64 {
        self.root_order
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.exponents[i * self.k..(i + 1) * self.k]
    }

    /// Row i as complex numbers, scaled to unit norm.
    pub fn complex_row(&self, i: usize) -> Vec<Complex64> {
        let scale = 1.0 / (self.k as f64).sqrt();
        self.row(i)
            .iter()
            .map(|&e| root_of_unity(e as u64, self.root_order) * scale)
            .collect()
    }

    /// K times the inner product of rows i and j, exactly.
    pub fn scaled_inner_product(&self, i: usize, j: usize) -> CycloSum {
        let m = self.root_order;
        let mut s = CycloSum::zero(m);
        for (&a, &b) in self.row(i).iter().zip(self.row(j)) {
            s.add(a as u64 + m - b as u64, 1);
        }
        s
    }
}

fn check_entries(n: usize, k: usize, cap: u64) -> Result<()> {
    let entries = n as u128 * k as u128;
    if entries > cap as u128 {
        return Err(Error::BudgetExceeded {
            what: format!("{n}x{k} codebook entries"),
            needed: entries,
            budget: cap as u128,
        });
    }
    Ok(())
}

/// Row j holds φ_j(x) for x ∈ D: exponents j·log(x) mod (q-1).
pub fn codebook_i(tower: &TowerCtx, dset: &DefiningSet, cap: u64) -> Result<Codebook> {
    expect_construction(dset, Construction::I)?;
    let fq = tower.field(Level::Q);
    let m = fq.group_order() as u64;
    let (n, k) = (m as usize, dset.k());
    check_entries(n, k, cap)?;
    let logs: Vec<u64> = dset.elements().iter().map(|&x| fq.log(x).unwrap() as u64).collect();
    let mut exponents = Vec::with_capacity(n * k);
    for j in 0..m {
        exponents.extend(logs.iter().map(|&l| (j * l % m) as u32));
    }
    Codebook::from_exponents(Construction::I, *dset.params(), n, k, m, exponents)
}

/// Row a holds χ_a(x) for x ∈ D: exponents Tr_{q^2/p}(a·x).
pub fn codebook_ii(tower: &TowerCtx, dset: &DefiningSet, cap: u64) -> Result<Codebook> {
    expect_construction(dset, Construction::II)?;
    let f = tower.field(Level::Q2);
    let (n, k) = (f.order() as usize, dset.k());
    check_entries(n, k, cap)?;
    let mut exponents = Vec::with_capacity(n * k);
    for a in f.elements() {
        exponents.extend(dset.elements().iter().map(|&x| f.abs_trace(f.mul(a, x))));
    }
    Codebook::from_exponents(
        Construction::II,
        *dset.params(),
        n,
        k,
        f.characteristic() as u64,
        exponents,
    )
}

pub fn codebook(tower: &TowerCtx, dset: &DefiningSet, cap: u64) -> Result<Codebook> {
    match dset.construction() {
        Construction::I => codebook_i(tower, dset, cap),
        Construction::II => codebook_ii(tower, dset, cap),
    }
}

fn expect_construction(dset: &DefiningSet, c: Construction) -> Result<()> {
    if dset.construction() != c {
        return Err(Error::Precondition(format!(
            "expected a construction {c} set, got {}",
            dset.construction()
        )));
    }
    Ok(())
}
