//! Brute-force expansion of circuits into explicit nonassociative polynomials.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::algebra::{Algebra, AlgebraElem};
use crate::circuit::{Circuit, GateKind, Mode};
use crate::error::{Error, Result};
use crate::ffield::{Field, FieldElem};
use crate::monomial::Monomial;

pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// Polynomial with canonical monomial keys and a separate constant term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, FieldElem>,
    constant: FieldElem,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant_poly(c: FieldElem) -> Self {
        Poly {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn monomial(m: Monomial, c: FieldElem) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Poly { terms, constant: 0 }
    }

    pub fn constant(&self) -> FieldElem {
        self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.terms.is_empty()
    }

    /// Number of non-constant terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms sorted by monomial literal.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Largest degree among the terms, 0 for constants.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Restriction to the monomials of one degree (0 keeps the constant).
    pub fn component(&self, deg: usize) -> Poly {
        if deg == 0 {
            return Poly::constant_poly(self.constant);
        }
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == deg)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
            constant: 0,
        }
    }

    pub fn add_term(&mut self, f: &Field, m: Monomial, c: FieldElem) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = f.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, f: &Field, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(f, m.clone(), *c);
        }
        out.constant = f.add(out.constant, other.constant);
        out
    }

    pub fn scale(&self, f: &Field, c: FieldElem) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), f.mul(*v, c))).collect(),
            constant: f.mul(self.constant, c),
        }
    }

    /// Bilinear product over ordered term pairs; in commutative mode each
    /// product tree is canonicalized so `(a, b)` and `(b, a)` merge.
    pub fn mul(&self, f: &Field, mode: Mode, other: &Poly, max_terms: usize) -> Result<Poly> {
        let mut out = Poly::zero();
        out.constant = f.mul(self.constant, other.constant);
        let mut acc: BTreeMap<Monomial, FieldElem> = BTreeMap::new();
        let mut push = |m: Monomial, c: FieldElem| -> Result<()> {
            if c == 0 {
                return Ok(());
            }
            let e = acc.entry(m).or_insert(0);
            *e = f.add(*e, c);
            if acc.len() > max_terms {
                return Err(Error::TermCapExceeded { cap: max_terms });
            }
            Ok(())
        };
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                push(Monomial::product_in(mode, a, b), f.mul(*ca, *cb))?;
            }
            if other.constant != 0 {
                push(a.clone(), f.mul(*ca, other.constant))?;
            }
        }
        if self.constant != 0 {
            for (b, cb) in &other.terms {
                push(b.clone(), f.mul(*cb, self.constant))?;
            }
        }
        acc.retain(|_, v| *v != 0);
        out.terms = acc;
        Ok(out)
    }

    /// `<coeff> <literal>` per term, sorted by literal, then `const <c>`.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            let _ = writeln!(s, "{c} {m}");
        }
        let _ = writeln!(s, "const {}", self.constant);
        s
    }
}

/// Expansion of every gate; `table[g]` is the polynomial computed at `g`.
pub fn coeff_table(c: &Circuit, max_terms: usize) -> Result<Vec<Poly>> {
    let f = c.field();
    let mut table: Vec<Poly> = Vec::with_capacity(c.size());
    for g in c.gates() {
        let p = match g.kind {
            GateKind::Var(i) => Poly::monomial(Monomial::var(i), 1),
            GateKind::Const(k) => Poly::constant_poly(k),
            GateKind::Add(l, r) => table[l].add(f, &table[r]),
            GateKind::Mul(l, r) => table[l].mul(f, c.mode(), &table[r], max_terms)?,
            GateKind::MulC(ch, k) => table[ch].scale(f, k),
        };
        if p.len() > max_terms {
            return Err(Error::TermCapExceeded { cap: max_terms });
        }
        table.push(p);
    }
    Ok(table)
}

/// Expansion of the output gate.
pub fn expand(c: &Circuit, max_terms: usize) -> Result<Poly> {
    let sub = c.subcircuit(c.output());
    let mut t = coeff_table(&sub, max_terms)?;
    Ok(t.pop().expect("circuit has an output gate"))
}

/// Evaluates a monomial leafwise with the algebra's product.
pub fn eval_monomial(alg: &Algebra, m: &Monomial, points: &[AlgebraElem]) -> Result<AlgebraElem> {
    match m.children() {
        None => {
            let i = m.as_var().expect("leaf is a variable");
            points.get(i - 1).cloned().ok_or(Error::DimensionMismatch {
                expected: i,
                found: points.len(),
            })
        }
        Some((l, r)) => {
            let a = eval_monomial(alg, l, points)?;
            let b = eval_monomial(alg, r, points)?;
            alg.mul(&a, &b)
        }
    }
}

/// Sum of coefficient times monomial value, plus the constant times the unit.
pub fn eval_poly_algebra(alg: &Algebra, poly: &Poly, points: &[AlgebraElem]) -> Result<AlgebraElem> {
    let mut acc = AlgebraElem::constant(alg.d, alg.field.reduce(poly.constant()));
    for (m, c) in poly.terms() {
        let v = eval_monomial(alg, m, points)?;
        acc = alg.add(&acc, &alg.scale(&v, *c))?;
    }
    Ok(acc)
}

/// Upper bound on the number of ordered trees of degree `d` over `n`
/// variables, `Catalan(d-1) * n^d`, saturating.
pub fn max_terms_bound(n: usize, d: usize) -> u128 {
    if d == 0 {
        return 1;
    }
    let mut cat: u128 = 1;
    for k in 0..(d - 1) as u128 {
        cat = cat.saturating_mul(2 * (2 * k + 1)) / (k + 2);
    }
    cat.saturating_mul((n as u128).saturating_pow(d as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gen_random, CircuitBuilder};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field() -> Field {
        Field::new(1_000_003).unwrap()
    }

    fn associator(mode: Mode) -> Circuit {
        let mut b = CircuitBuilder::new(mode, field(), 3);
        let (x, y, z) = (b.var(1), b.var(2), b.var(3));
        let xy = b.mul(x, y);
        let l = b.mul(xy, z);
        let yz = b.mul(y, z);
        let r = b.mul(x, yz);
        let out = b.sub(l, r);
        b.finish(out).unwrap()
    }

    #[test]
    fn associator_expansion() {
        let p = expand(&associator(Mode::Comm), 100).unwrap();
        assert_eq!(p.len(), 2);
        let coeffs: Vec<u64> = p.terms().map(|(_, c)| *c).collect();
        assert!(coeffs.contains(&1) && coeffs.contains(&(field().modulus() - 1)));
    }

    #[test]
    fn commutator_is_zero_in_comm_mode() {
        let mut b = CircuitBuilder::new(Mode::Comm, field(), 2);
        let (x, y) = (b.var(1), b.var(2));
        let xy = b.mul(x, y);
        let yx = b.mul(y, x);
        let out = b.sub(xy, yx);
        let c = b.finish(out).unwrap();
        assert!(expand(&c, 100).unwrap().is_zero());
        assert_eq!(expand(&c.with_mode(Mode::NonComm), 100).unwrap().len(), 2);
    }

    #[test]
    fn jordan_expression_has_two_terms() {
        let mut b = CircuitBuilder::new(Mode::Comm, field(), 2);
        let (a, bb) = (b.var(1), b.var(2));
        let aa = b.mul(a, a);
        let ab = b.mul(a, bb);
        let l = b.mul(ab, aa);
        let baa = b.mul(bb, aa);
        let r = b.mul(a, baa);
        let out = b.sub(l, r);
        let p = expand(&b.finish(out).unwrap(), 100).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn duplicate_leaf_product_has_coefficient_one() {
        let mut b = CircuitBuilder::new(Mode::Comm, field(), 1);
        let x = b.var(1);
        let out = b.mul(x, x);
        let t = coeff_table(&b.finish(out).unwrap(), 10).unwrap();
        assert_eq!(t[0].coeff(&Monomial::var(1)), 1);
        assert_eq!(t[1].coeff(&Monomial::parse("(1 1)").unwrap()), 1);
    }

    #[test]
    fn table_output_matches_expand() {
        for seed in 0..30 {
            let c = gen_random(3, 15, 5, Mode::NonComm, seed);
            let t = coeff_table(&c, DEFAULT_MAX_TERMS).unwrap();
            assert_eq!(t[c.output()], expand(&c, DEFAULT_MAX_TERMS).unwrap());
            for d in 0..=c.degree() {
                assert!(t[c.output()].component(d).len() as u128 <= max_terms_bound(3, d));
            }
        }
    }

    #[test]
    fn term_cap_is_enforced() {
        let c = gen_random(4, 25, 6, Mode::NonComm, 3);
        let full = expand(&c, DEFAULT_MAX_TERMS).unwrap();
        if full.len() > 1 {
            assert!(matches!(expand(&c, full.len() - 1), Err(Error::TermCapExceeded { .. })));
        }
    }

    #[test]
    fn homogenize_components_match_expansion() {
        use crate::circuit::homogenize;
        for seed in 0..100 {
            let mode = if seed % 2 == 0 { Mode::Comm } else { Mode::NonComm };
            let c = gen_random(3, 12, 4, mode, seed);
            let d = c.degree().max(1);
            let full = expand(&c, DEFAULT_MAX_TERMS).unwrap();
            let parts = homogenize(&c, d).unwrap();
            let mut sum = Poly::zero();
            for (i, h) in parts.iter().enumerate() {
                let e = expand(h, DEFAULT_MAX_TERMS).unwrap();
                assert_eq!(e, full.component(i), "seed {seed} degree {i}");
                sum = sum.add(c.field(), &e);
            }
            assert_eq!(sum, full);
        }
    }

    #[test]
    fn homogenize_examples() {
        use crate::circuit::homogenize;
        let f = field();
        let mut b = CircuitBuilder::new(Mode::Comm, f, 1);
        let x = b.var(1);
        let one = b.constant(1);
        let s = b.add(x, one);
        let out = b.mul(s, s);
        let parts = homogenize(&b.finish(out).unwrap(), 2).unwrap();
        assert_eq!(expand(&parts[0], 10).unwrap(), Poly::constant_poly(1));
        assert_eq!(expand(&parts[1], 10).unwrap(), Poly::monomial(Monomial::var(1), 2));
        assert_eq!(
            expand(&parts[2], 10).unwrap(),
            Poly::monomial(Monomial::parse("(1 1)").unwrap(), 1)
        );

        let mut b = CircuitBuilder::new(Mode::Comm, f, 2);
        let (x, y) = (b.var(1), b.var(2));
        let xy = b.mul(x, y);
        let three = b.constant(3);
        let out = b.add(xy, three);
        let parts = homogenize(&b.finish(out).unwrap(), 2).unwrap();
        assert_eq!(expand(&parts[0], 10).unwrap(), Poly::constant_poly(3));
        assert!(expand(&parts[1], 10).unwrap().is_zero());
        assert_eq!(expand(&parts[2], 10).unwrap().len(), 1);
    }

    #[test]
    fn reduced_trees_sum_to_expansion() {
        use crate::circuit::reduced_parse_trees;
        for seed in 0..40 {
            let mode = if seed % 2 == 0 { Mode::Comm } else { Mode::NonComm };
            let c = gen_random(2, 10, 4, mode, seed);
            let Ok(terms) = reduced_parse_trees(&c, 100_000) else { continue };
            let mut p = Poly::zero();
            for t in terms {
                match t.tree {
                    Some(m) => p.add_term(c.field(), m, t.coefficient),
                    None => p = p.add(c.field(), &Poly::constant_poly(t.coefficient)),
                }
            }
            assert_eq!(p, expand(&c, DEFAULT_MAX_TERMS).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn comm_expansion_ignores_child_swaps() {
        for seed in 0..50 {
            let c = gen_random(3, 15, 5, Mode::Comm, seed);
            assert_eq!(
                expand(&c, DEFAULT_MAX_TERMS).unwrap(),
                expand(&c.with_swapped_products(), DEFAULT_MAX_TERMS).unwrap()
            );
        }
        let mut b = CircuitBuilder::new(Mode::NonComm, field(), 2);
        let (x, y) = (b.var(1), b.var(2));
        let out = b.mul(x, y);
        let c = b.finish(out).unwrap();
        assert_ne!(expand(&c, 10).unwrap(), expand(&c.with_swapped_products(), 10).unwrap());
    }

    #[test]
    fn evaluator_agrees_with_expansion() {
        let set: Vec<u64> = (0..1000).collect();
        for seed in 0..20 {
            let mode = if seed % 2 == 0 { Mode::Comm } else { Mode::NonComm };
            let c = gen_random(3, 15, 4, mode, seed);
            let alg = Algebra::new(*c.field(), c.degree().max(1), mode).unwrap();
            let p = expand(&c, DEFAULT_MAX_TERMS).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..3 {
                let pts: Vec<AlgebraElem> = (0..3).map(|_| alg.random_elem(&set, &mut rng)).collect();
                assert_eq!(alg.eval_circuit(&c, &pts).unwrap(), eval_poly_algebra(&alg, &p, &pts).unwrap());
            }
        }
    }

    #[test]
    fn catalan_bound() {
        assert_eq!(max_terms_bound(1, 1), 1);
        assert_eq!(max_terms_bound(2, 3), 2 * 8);
        assert_eq!(max_terms_bound(3, 5), 14 * 243);
    }
}
