//! Basis-isolating weight assignments and the hitting sets built on them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ffield::{EchelonBasis, Field, FieldElem};
use crate::zpoly::{ZMonomial, ZPoly};

use super::acircuit::ACircuit;
use super::weights::{WeightAssignment, WeightFamily};

pub const DEFAULT_CANDIDATE_CAP: u128 = 1_000_000;

/// Shape of the circuits a hitting set must cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassParams {
    pub nz: usize,
    pub size: u128,
    pub degree: usize,
    pub depth: usize,
    /// Bound on the exponent of any single variable.
    pub individual: usize,
}

impl ClassParams {
    /// Set-size bound handed to the weight family, `s^2 * depth` (at least 1).
    pub fn separation_k(&self) -> u128 {
        self.size
            .saturating_mul(self.size)
            .saturating_mul(self.depth.max(1) as u128)
    }
}

/// One combined weight `w = sum_i B^(depth-i) w_(i+1)`, with `w_1` the
/// position weight and the rest drawn from the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub weight: WeightAssignment,
    /// Dominance base.
    pub base: u128,
    /// Largest weight of any monomial in the class; the univariate degree bound.
    pub max_degree: u128,
}

/// Lazy enumeration of `W^depth` in lexicographic order.
pub struct Candidates {
    members: Vec<WeightAssignment>,
    params: ClassParams,
    position: WeightAssignment,
    base: u128,
    tuple: Vec<usize>,
    done: bool,
    count: u128,
}

impl Candidates {
    /// Number of candidates, `|W|^depth`.
    pub fn total(&self) -> u128 {
        self.count
    }

    pub fn base(&self) -> u128 {
        self.base
    }

    fn combine(&self) -> Result<Candidate> {
        let p = &self.params;
        let mut comps: Vec<&WeightAssignment> = vec![&self.position];
        comps.extend(self.tuple.iter().map(|&t| &self.members[t]));
        let mut ws = vec![0u128; p.nz];
        for (v, w) in ws.iter_mut().enumerate() {
            let mut acc: u128 = 0;
            for c in &comps {
                acc = acc
                    .checked_mul(self.base)
                    .and_then(|a| a.checked_add(c.0[v]))
                    .ok_or(Error::WeightOverflow)?;
            }
            *w = acc;
        }
        let weight = WeightAssignment(ws);
        let max_degree = weight.max_monomial(p.degree, p.individual);
        if max_degree == u128::MAX {
            return Err(Error::WeightOverflow);
        }
        Ok(Candidate {
            weight,
            base: self.base,
            max_degree,
        })
    }
}

impl Iterator for Candidates {
    type Item = Result<Candidate>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.combine();
        // advance the odometer
        let mut i = self.tuple.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.tuple[i] += 1;
            if self.tuple[i] < self.members.len() {
                break;
            }
            self.tuple[i] = 0;
        }
        Some(item)
    }
}

/// Enumerates the candidate weights for a class, failing up front when
/// `|W|^depth` exceeds `cap`. An injective family yields its one member
/// unchanged: distinct monomials already get distinct weights.
pub fn biwa_candidates(family: &dyn WeightFamily, params: ClassParams, cap: u128) -> Result<Candidates> {
    if family.injective() {
        let members = family.members(params.nz, params.separation_k(), params.individual)?;
        return Ok(Candidates {
            done: members.is_empty(),
            members,
            params,
            position: WeightAssignment(vec![0; params.nz]),
            base: 1,
            tuple: vec![0],
            count: 1,
        });
    }
    let k = params.separation_k();
    let w = family.size(params.nz, k, params.individual);
    let count = (0..params.depth).try_fold(1u128, |acc, _| acc.checked_mul(w)).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::EnumerationCapExceeded { needed: count, budget: cap });
    }
    let members = family.members(params.nz, k, params.individual)?;
    let position = WeightAssignment::position(params.nz);
    let mut base: u128 = position.max_monomial(params.degree, params.individual);
    for m in &members {
        base = base.max(m.max_monomial(params.degree, params.individual));
    }
    let base = base.checked_add(1).ok_or(Error::WeightOverflow)?;
    Ok(Candidates {
        done: members.is_empty() && params.depth > 0,
        members,
        params,
        position,
        base,
        tuple: vec![0; params.depth],
        count,
    })
}

/// Coefficient vectors `v_m` (one coordinate per gate) for every monomial
/// computed anywhere in a circuit, kept so many weights can be tried.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    field: Field,
    dim: usize,
    vectors: BTreeMap<ZMonomial, Vec<FieldElem>>,
    output: ZPoly,
}

impl CoefficientTable {
    pub fn new(c: &ACircuit, max_terms: usize) -> Result<CoefficientTable> {
        let polys = c.expand_all(max_terms)?;
        let dim = polys.len();
        let mut vectors: BTreeMap<ZMonomial, Vec<FieldElem>> = BTreeMap::new();
        for (g, p) in polys.iter().enumerate() {
            for (m, coef) in p.terms() {
                vectors.entry(m.clone()).or_insert_with(|| vec![0; dim])[g] = *coef;
            }
        }
        Ok(CoefficientTable {
            field: *c.field(),
            dim,
            vectors,
            output: polys[c.output()].clone(),
        })
    }

    pub fn vectors(&self) -> &BTreeMap<ZMonomial, Vec<FieldElem>> {
        &self.vectors
    }

    /// True if `w` isolates a minimum-weight basis: scanning monomials by
    /// increasing weight, each weight class contributes at most one vector
    /// outside the span of strictly lighter ones.
    pub fn isolated_by(&self, w: &WeightAssignment) -> Result<bool> {
        let mut by_weight: BTreeMap<u128, Vec<&Vec<FieldElem>>> = BTreeMap::new();
        for (m, v) in &self.vectors {
            by_weight.entry(w.of(m)).or_default().push(v);
        }
        let mut lighter = EchelonBasis::new(self.field, self.dim);
        for group in by_weight.values() {
            let mut fresh: Vec<&Vec<FieldElem>> = Vec::new();
            for v in group {
                if !lighter.contains(v)? {
                    fresh.push(v);
                }
            }
            if fresh.len() > 1 {
                return Ok(false);
            }
            if let Some(v) = fresh.first() {
                lighter.insert(v)?;
            }
        }
        Ok(true)
    }

    /// Output polynomial under `z_i -> t^w(z_i)`, as exponent to coefficient.
    pub fn univariate(&self, w: &WeightAssignment) -> BTreeMap<u128, FieldElem> {
        let mut out: BTreeMap<u128, FieldElem> = BTreeMap::new();
        for (m, coef) in self.output.terms() {
            let e = out.entry(w.of(m)).or_insert(0);
            *e = self.field.add(*e, *coef);
        }
        out.retain(|_, v| *v != 0);
        out
    }
}

pub fn verify_biwa(w: &WeightAssignment, c: &ACircuit, max_terms: usize) -> Result<bool> {
    CoefficientTable::new(c, max_terms)?.isolated_by(w)
}

pub fn substitute_univariate(w: &WeightAssignment, c: &ACircuit, max_terms: usize) -> Result<BTreeMap<u128, FieldElem>> {
    Ok(CoefficientTable::new(c, max_terms)?.univariate(w))
}

/// The point `(t^w(z_1), ..., t^w(z_n))`.
pub fn weight_point(f: &Field, w: &WeightAssignment, t: FieldElem) -> Vec<FieldElem> {
    w.0.iter().map(|&e| f.pow(t, e)).collect()
}

/// Lazily produced hitting set: for each candidate `w` and `t` in
/// `1..=D_w + 1`, the point `t^w`.
pub struct HittingSet {
    field: Field,
    candidates: Vec<Candidate>,
    total: u128,
}

impl HittingSet {
    pub fn len(&self) -> u128 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// Points in order as `(candidate index, t, point)`.
    pub fn points(&self) -> impl Iterator<Item = (usize, u128, Vec<FieldElem>)> + '_ {
        self.candidates.iter().enumerate().flat_map(move |(ci, c)| {
            (1..=c.max_degree + 1).map(move |t| {
                let t_f = (t % self.field.modulus() as u128) as u64;
                (ci, t, weight_point(&self.field, &c.weight, t_f))
            })
        })
    }
}

/// Collects the candidates and checks the field is large enough for every
/// univariate degree bound.
pub fn hitting_set_unambiguous(family: &dyn WeightFamily, params: ClassParams, field: Field, cap: u128) -> Result<HittingSet> {
    let mut candidates = Vec::new();
    let mut total: u128 = 0;
    let mut worst: u128 = 0;
    for cand in biwa_candidates(family, params, cap)? {
        let cand = cand?;
        worst = worst.max(cand.max_degree);
        total = total.saturating_add(cand.max_degree.saturating_add(1));
        candidates.push(cand);
    }
    if field.modulus() as u128 <= worst {
        return Err(Error::FieldTooSmall {
            p: field.modulus(),
            required: worst,
        });
    }
    Ok(HittingSet {
        field,
        candidates,
        total,
    })
}
