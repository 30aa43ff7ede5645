//! The field chain F_p ⊆ F_r ⊆ F_q ⊆ F_{q^2} with r = p^t and q = r^s.

use std::collections::HashMap;
use std::fmt;

use crate::arith::{checked_pow, gcd, is_prime};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::report::CheckReport;

/// Integer parameters of a tower. `r`, `q` and `q2` are derived with checked
/// arithmetic so formula-only reports work far beyond what can be enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TowerParams {
    pub p: u32,
    pub t: u32,
    pub s: u32,
    pub r: u128,
    pub q: u128,
    pub q2: u128,
}

impl TowerParams {
    pub fn new(p: u32, t: u32, s: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic(2));
        }
        if t == 0 || s == 0 {
            return Err(Error::ZeroDegree);
        }
        let overflow = || Error::Overflow(format!("tower ({p}, {t}, {s}) exceeds 128-bit arithmetic"));
        let r = checked_pow(p as u128, t).ok_or_else(overflow)?;
        let q = checked_pow(r, s).ok_or_else(overflow)?;
        let q2 = q.checked_mul(q).ok_or_else(overflow)?;
        Ok(TowerParams { p, t, s, r, q, q2 })
    }

    /// Degree of F_q over F_p.
    pub fn degree_q(&self) -> u32 {
        self.t * self.s
    }

    pub fn within_budget(&self, budget: u64) -> bool {
        self.q2 <= budget as u128
    }

    pub fn check_budget(&self, budget: u64) -> Result<()> {
        if self.within_budget(budget) {
            Ok(())
        } else {
            Err(Error::BudgetExceeded {
                what: format!("tower {self} (q^2 elements)"),
                needed: self.q2,
                budget: budget as u128,
            })
        }
    }
}

impl fmt::Display for TowerParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, t={}, s={})", self.p, self.t, self.s)
    }
}

/// A level of the tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    P,
    R,
    Q,
    Q2,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Level::P => "F_p",
            Level::R => "F_r",
            Level::Q => "F_q",
            Level::Q2 => "F_q2",
        };
        f.write_str(s)
    }
}

/// An injective field homomorphism from a subfield, tabulated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    table: Vec<u32>,
    inverse: HashMap<u32, u32>,
}

impl Embedding {
    /// Embeds `sub` into `sup`. The generator β of `sub` goes to γ^k where
    /// γ = α^((|sup|-1)/(|sub|-1)) and k ≥ 1 is the smallest exponent for
    /// which the map is a ring homomorphism (k = 1 whenever γ is a root of
    /// the minimal polynomial of β).
    pub fn new(sub: &FieldCtx, sup: &FieldCtx) -> Result<Self> {
        if sub.characteristic() != sup.characteristic() || sup.degree() % sub.degree() != 0 {
            return Err(Error::NotNested(format!(
                "GF({}^{}) is not a subfield of GF({}^{})",
                sub.characteristic(),
                sub.degree(),
                sup.characteristic(),
                sup.degree()
            )));
        }
        let table: Vec<u32> = if sub.degree() == 1 {
            // Prime-field constants are encoded identically in every field.
            (0..sub.order()).collect()
        } else {
            let m_sub = sub.group_order() as u64;
            let cofactor = sup.group_order() as u64 / m_sub;
            let x_log = sub.log(sub.basis(1)).expect("x is nonzero") as u64;
            let beta_digits = sub.digits(sub.primitive());
            // β -> γ^k extends to a ring map iff x goes to a root ρ of the
            // subfield modulus and evaluating β's polynomial at ρ gives γ^k.
            let k = (1..m_sub)
                .filter(|&k| gcd(k, m_sub) == 1)
                .find(|&k| {
                    let rho = sup.exp(cofactor * (k * x_log % m_sub));
                    eval_poly(sup, sub.modulus(), rho).is_zero()
                        && eval_poly(sup, &beta_digits, rho) == sup.exp(cofactor * k)
                })
                .ok_or_else(|| Error::Integrity("no root of the subfield modulus".into()))?;
            let mut table = vec![0u32; sub.order() as usize];
            for (i, &v) in sub.antilog_table().iter().enumerate() {
                table[v as usize] = sup.exp(cofactor * (k * i as u64 % m_sub)).0;
            }
            table
        };
        let inverse = table
            .iter()
            .enumerate()
            .map(|(x, &y)| (y, x as u32))
            .collect::<HashMap<_, _>>();
        if inverse.len() != table.len() {
            return Err(Error::Integrity("subfield embedding is not injective".into()));
        }
        Ok(Embedding { table, inverse })
    }

    fn compose(first: &Embedding, then: &Embedding) -> Embedding {
        let table: Vec<u32> = first.table.iter().map(|&v| then.table[v as usize]).collect();
        let inverse = table
            .iter()
            .enumerate()
            .map(|(x, &y)| (y, x as u32))
            .collect();
        Embedding { table, inverse }
    }

    #[inline]
    pub fn image(&self, x: FieldElement) -> FieldElement {
        FieldElement(self.table[x.0 as usize])
    }

    pub fn preimage(&self, y: FieldElement) -> Option<FieldElement> {
        self.inverse.get(&y.0).map(|&x| FieldElement(x))
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }
}

fn eval_poly(field: &FieldCtx, coeffs: &[u32], at: FieldElement) -> FieldElement {
    coeffs.iter().rev().fold(FieldElement::ZERO, |acc, &c| {
        field.add(field.mul(acc, at), FieldElement(c))
    })
}

/// A fully built tower with embeddings between consecutive levels.
/// Immutable and `Sync`; share by reference across workers.
#[derive(Clone, Debug)]
pub struct TowerCtx {
    params: TowerParams,
    f_p: FieldCtx,
    f_r: FieldCtx,
    f_q: FieldCtx,
    f_q2: FieldCtx,
    r_in_q: Embedding,
    q_in_q2: Embedding,
    r_in_q2: Embedding,
}

impl TowerCtx {
    pub fn build(params: TowerParams, budget: u64) -> Result<Self> {
        params.check_budget(budget)?;
        let f_p = FieldCtx::build(params.p, 1, budget)?;
        let f_r = FieldCtx::build(params.p, params.t, budget)?;
        let f_q = FieldCtx::build(params.p, params.degree_q(), budget)?;
        let f_q2 = FieldCtx::build(params.p, 2 * params.degree_q(), budget)?;
        let r_in_q = Embedding::new(&f_r, &f_q)?;
        let q_in_q2 = Embedding::new(&f_q, &f_q2)?;
        let r_in_q2 = Embedding::compose(&r_in_q, &q_in_q2);
        Ok(TowerCtx {
            params,
            f_p,
            f_r,
            f_q,
            f_q2,
            r_in_q,
            q_in_q2,
            r_in_q2,
        })
    }

    /// Convenience constructor under the default budget.
    pub fn new(p: u32, t: u32, s: u32) -> Result<Self> {
        Self::build(TowerParams::new(p, t, s)?, crate::field::DEFAULT_BUDGET)
    }

    pub fn params(&self) -> &TowerParams {
        &self.params
    }

    pub fn field(&self, level: Level) -> &FieldCtx {
        match level {
            Level::P => &self.f_p,
            Level::R => &self.f_r,
            Level::Q => &self.f_q,
            Level::Q2 => &self.f_q2,
        }
    }

    pub fn r_in_q(&self) -> &Embedding {
        &self.r_in_q
    }

    pub fn q_in_q2(&self) -> &Embedding {
        &self.q_in_q2
    }

    pub fn r_in_q2(&self) -> &Embedding {
        &self.r_in_q2
    }

    fn degree(&self, level: Level) -> u32 {
        self.field(level).degree()
    }

    fn embedding(&self, sub: Level, sup: Level) -> Option<&Embedding> {
        match (sub, sup) {
            (Level::R, Level::Q) => Some(&self.r_in_q),
            (Level::Q, Level::Q2) => Some(&self.q_in_q2),
            (Level::R, Level::Q2) => Some(&self.r_in_q2),
            _ => None,
        }
    }

    /// Image of `x ∈ from` inside the larger field `to`.
    pub fn embed(&self, from: Level, to: Level, x: FieldElement) -> Result<FieldElement> {
        if from > to {
            return Err(Error::NotNested(format!("cannot embed {from} into {to}")));
        }
        self.field(from).check(x)?;
        if from == to || from == Level::P {
            return Ok(x);
        }
        Ok(self.embedding(from, to).expect("nested levels").image(x))
    }

    /// The element of `sub` whose image is `y ∈ sup`, if any.
    pub fn restrict(&self, sup: Level, sub: Level, y: FieldElement) -> Result<Option<FieldElement>> {
        if sub > sup {
            return Err(Error::NotNested(format!("{sub} is not inside {sup}")));
        }
        self.field(sup).check(y)?;
        if sub == sup {
            return Ok(Some(y));
        }
        if sub == Level::P {
            return Ok((y.0 < self.params.p).then_some(y));
        }
        Ok(self.embedding(sub, sup).expect("nested levels").preimage(y))
    }

    /// Relative trace Tr_{from/to}(x) as the Frobenius orbit sum
    /// x + x^|to| + x^(|to|^2) + .., pulled back into `to`.
    pub fn trace(&self, from: Level, to: Level, x: FieldElement) -> Result<FieldElement> {
        if to > from {
            return Err(Error::NotNested(format!("no trace from {from} down to {to}")));
        }
        let f = self.field(from);
        f.check(x)?;
        let terms = self.degree(from) / self.degree(to);
        let sum = f.frobenius_orbit_sum(x, terms);
        self.restrict(from, to, sum)?.ok_or_else(|| {
            Error::Integrity(format!("trace of {} from {from} fell outside {to}", x.0))
        })
    }

    /// x^(q+1) for x ∈ F_{q^2}, returned as an element of F_q.
    pub fn norm_to_q(&self, x: FieldElement) -> Result<FieldElement> {
        let f = &self.f_q2;
        f.check(x)?;
        let q = self.params.q as u64;
        let y = f.pow(x, q + 1);
        self.q_in_q2
            .preimage(y)
            .ok_or_else(|| Error::Integrity(format!("{}^(q+1) is not in F_q", x.0)))
    }

    /// Tabulates Tr_{q/r} over F_q, indexed by element value.
    pub fn trace_q_to_r_table(&self) -> Result<Vec<FieldElement>> {
        self.f_q
            .elements()
            .map(|z| self.trace(Level::Q, Level::R, z))
            .collect()
    }

    /// Tabulates x^(q+1) ∈ F_q as a function of log(x) mod (q-1), which is
    /// all it depends on.
    pub fn norm_by_log_class(&self) -> Result<Vec<FieldElement>> {
        let qm1 = self.f_q.group_order() as u64;
        let t = self.params.q as u64 + 1;
        (0..qm1)
            .map(|k| {
                let y = self.f_q2.exp(k * t);
                self.q_in_q2
                    .preimage(y)
                    .ok_or_else(|| Error::Integrity("norm left F_q".into()))
            })
            .collect()
    }
}

/// Exhaustive check of Tr_{r/p}(Tr_{q/r}(x)) = Tr_{q/p}(x) over F_q.
pub fn verify_trace_transitivity(tower: &TowerCtx) -> Result<CheckReport> {
    let mut report = CheckReport::new("trace");
    for x in tower.field(Level::Q).elements() {
        let inner = tower.trace(Level::Q, Level::R, x)?;
        let lhs = tower.trace(Level::R, Level::P, inner)?;
        let rhs = tower.trace(Level::Q, Level::P, x)?;
        report.check(lhs == rhs, || {
            format!("x={}: Tr_r/p(Tr_q/r x)={} but Tr_q/p x={}", x.0, lhs.0, rhs.0)
        });
    }
    Ok(report)
}
