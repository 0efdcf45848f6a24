//! Deterministic white-box identity test through spanning sets of per-gate
//! coefficient vectors, one level per degree.

use std::collections::HashSet;
use std::fmt;

use crate::circuit::{Circuit, GateKind, Mode};
use crate::ffield::{greedy_basis, Field, FieldElem};
use crate::monomial::Monomial;

/// Monomials of one degree whose coefficient vectors form a basis of the
/// span of all coefficient vectors of that degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanLevel {
    pub degree: usize,
    /// Empty at degree 0, where the only monomial is the constant.
    pub monomials: Vec<Monomial>,
    /// `vectors[t][g]` is the coefficient of `monomials[t]` at gate `g`.
    pub vectors: Vec<Vec<FieldElem>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WhiteboxOptions {
    /// Uses the two-term product rule for every product, including equal
    /// factors and the noncommutative mode. Wrong on purpose; exists only
    /// to check that the test suite notices.
    pub fault_two_term: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WhiteboxOutcome {
    Zero,
    /// Witness monomial with nonzero coefficient; `None` is the constant term.
    NonZero(Option<Monomial>),
}

impl WhiteboxOutcome {
    pub fn is_zero(&self) -> bool {
        matches!(self, WhiteboxOutcome::Zero)
    }
}

impl fmt::Display for WhiteboxOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WhiteboxOutcome::Zero => write!(f, "ZERO"),
            WhiteboxOutcome::NonZero(None) => write!(f, "NONZERO 1"),
            WhiteboxOutcome::NonZero(Some(m)) => write!(f, "NONZERO {m}"),
        }
    }
}

/// Levels `0..=d` for `d` the syntactic degree of `c`.
pub fn build_levels(c: &Circuit) -> Vec<SpanLevel> {
    build_levels_with(c, WhiteboxOptions::default())
}

pub fn build_levels_with(c: &Circuit, opts: WhiteboxOptions) -> Vec<SpanLevel> {
    let f = *c.field();
    let s = c.size();
    let d = c.degree();
    let v1 = c.eval_field_all(&vec![0; c.nvars()]);

    let mut levels: Vec<SpanLevel> = Vec::with_capacity(d + 1);
    let v0_basis = greedy_basis(&f, std::slice::from_ref(&v1), s).expect("vector length is s");
    levels.push(SpanLevel {
        degree: 0,
        monomials: Vec::new(),
        vectors: v0_basis.into_iter().map(|_| v1.clone()).collect(),
    });
    if d == 0 {
        return levels;
    }

    // vector of a monomial from a gate rule for its root split
    let fill = |leaf: &dyn Fn(usize) -> FieldElem, split: &dyn Fn(usize, usize) -> FieldElem| {
        let mut v = vec![0; s];
        for (id, g) in c.gates().iter().enumerate() {
            v[id] = match g.kind {
                GateKind::Var(i) => leaf(i),
                GateKind::Const(_) => 0,
                GateKind::Add(l, r) => f.add(v[l], v[r]),
                GateKind::MulC(ch, k) => f.mul(v[ch], k),
                GateKind::Mul(l, r) => {
                    let unit = f.add(f.mul(v[l], v1[r]), f.mul(v1[l], v[r]));
                    f.add(unit, split(l, r))
                }
            };
        }
        v
    };

    let mut cand_m = Vec::new();
    let mut cand_v = Vec::new();
    for i in 1..=c.nvars() {
        cand_m.push(Monomial::var(i));
        cand_v.push(fill(&|j| if j == i { 1 } else { 0 }, &|_, _| 0));
    }
    push_level(&f, &mut levels, 1, cand_m, cand_v, s);

    for j in 2..=d {
        let mut cand_m = Vec::new();
        let mut cand_v = Vec::new();
        let mut seen: HashSet<Monomial> = HashSet::new();
        for i in 1..j {
            let k = j - i;
            for a in 0..levels[i].monomials.len() {
                for b in 0..levels[k].monomials.len() {
                    let (m1, m2) = (&levels[i].monomials[a], &levels[k].monomials[b]);
                    let m = Monomial::product_in(c.mode(), m1, m2);
                    if !seen.insert(m.clone()) {
                        continue;
                    }
                    let (va, vb) = (&levels[i].vectors[a], &levels[k].vectors[b]);
                    let single = !opts.fault_two_term && (c.mode() == Mode::NonComm || m1 == m2);
                    let v = fill(&|_| 0, &|l, r| {
                        let t = f.mul(va[l], vb[r]);
                        if single {
                            t
                        } else {
                            f.add(t, f.mul(vb[l], va[r]))
                        }
                    });
                    cand_m.push(m);
                    cand_v.push(v);
                }
            }
        }
        push_level(&f, &mut levels, j, cand_m, cand_v, s);
    }
    levels
}

fn push_level(
    f: &Field,
    levels: &mut Vec<SpanLevel>,
    degree: usize,
    cand_m: Vec<Monomial>,
    cand_v: Vec<Vec<FieldElem>>,
    s: usize,
) {
    let keep = greedy_basis(f, &cand_v, s).expect("vector length is s");
    let mut monomials = Vec::with_capacity(keep.len());
    let mut vectors = Vec::with_capacity(keep.len());
    for t in keep {
        monomials.push(cand_m[t].clone());
        vectors.push(cand_v[t].clone());
    }
    levels.push(SpanLevel {
        degree,
        monomials,
        vectors,
    });
}

/// ZERO iff every basis vector vanishes at the output gate. The witness is
/// the least monomial by (degree, literal) with a nonzero output coefficient.
pub fn whitebox_pit(c: &Circuit) -> WhiteboxOutcome {
    whitebox_pit_with(c, WhiteboxOptions::default())
}

pub fn whitebox_pit_with(c: &Circuit, opts: WhiteboxOptions) -> WhiteboxOutcome {
    let out = c.output();
    for level in build_levels_with(c, opts) {
        if level.degree == 0 {
            if level.vectors.first().is_some_and(|v| v[out] != 0) {
                return WhiteboxOutcome::NonZero(None);
            }
            continue;
        }
        let best = level
            .monomials
            .iter()
            .zip(&level.vectors)
            .filter(|(_, v)| v[out] != 0)
            .map(|(m, _)| m)
            .min();
        if let Some(m) = best {
            return WhiteboxOutcome::NonZero(Some(m.clone()));
        }
    }
    WhiteboxOutcome::Zero
}
