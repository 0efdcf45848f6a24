//! Commutative, associative polynomials over the auxiliary z-variables.
//!
//! A z-variable is addressed either by a flat index or, for the variables
//! introduced per circuit input, by a triple `(i, j, k)` with `i` the input
//! variable, `j` the position and `k` the level.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::ffield::{Field, FieldElem};

/// Flat index of `z_{i,j,k}` for `i >= 1` and `j, k` in `1..=d`.
/// Triples are ordered lexicographically.
pub fn z_index(d: usize, i: usize, j: usize, k: usize) -> u32 {
    debug_assert!(i >= 1 && (1..=d).contains(&j) && (1..=d).contains(&k));
    (((i - 1) * d + (j - 1)) * d + (k - 1)) as u32
}

/// Inverse of [`z_index`].
pub fn z_triple(d: usize, flat: u32) -> (usize, usize, usize) {
    let f = flat as usize;
    (f / (d * d) + 1, (f / d) % d + 1, f % d + 1)
}

/// Multiset of z-variables, stored as sorted flat indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZMonomial(Vec<u32>);

impl ZMonomial {
    pub fn one() -> Self {
        ZMonomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        ZMonomial(vec![v])
    }

    pub fn from_vars(mut vars: Vec<u32>) -> Self {
        vars.sort_unstable();
        ZMonomial(vars)
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &ZMonomial) -> ZMonomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        ZMonomial(out)
    }

    /// Largest exponent of any single variable.
    pub fn max_exponent(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        for (t, v) in self.0.iter().enumerate() {
            if t > 0 && self.0[t - 1] == *v {
                run += 1;
            } else {
                run = 1;
            }
            best = best.max(run);
        }
        best
    }

    /// Renders with triple indices, e.g. `z(1,1,2)*z(2,2,2)`.
    pub fn display_triples(&self, d: usize) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&v| {
                let (i, j, k) = z_triple(d, v);
                format!("z({i},{j},{k})")
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for ZMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|v| format!("z{v}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZPoly {
    terms: BTreeMap<ZMonomial, FieldElem>,
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly::default()
    }

    pub fn constant(f: &Field, c: FieldElem) -> Self {
        let mut p = ZPoly::zero();
        p.add_term(f, ZMonomial::one(), c);
        p
    }

    pub fn monomial(m: ZMonomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, 1);
        ZPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ZMonomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &ZMonomial) -> FieldElem {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, f: &Field, m: ZMonomial, c: FieldElem) {
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

    pub fn add_assign(&mut self, f: &Field, other: &ZPoly) {
        for (m, c) in &other.terms {
            self.add_term(f, m.clone(), *c);
        }
    }

    pub fn scale(&self, f: &Field, c: FieldElem) -> ZPoly {
        let mut out = ZPoly::zero();
        if c == 0 {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), f.mul(*v, c));
        }
        out
    }

    pub fn mul(&self, f: &Field, other: &ZPoly) -> ZPoly {
        let mut out = ZPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(f, a.mul(b), f.mul(*ca, *cb));
            }
        }
        out
    }

    /// Value at a point given as flat-index-addressed assignment.
    pub fn eval(&self, f: &Field, point: &[FieldElem]) -> FieldElem {
        let mut acc = 0;
        for (m, c) in &self.terms {
            let mut v = *c;
            for &z in m.vars() {
                v = f.mul(v, point[z as usize]);
            }
            acc = f.add(acc, v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_index_roundtrip() {
        for d in 1..5 {
            let mut seen = Vec::new();
            for i in 1..4 {
                for j in 1..=d {
                    for k in 1..=d {
                        let v = z_index(d, i, j, k);
                        assert_eq!(z_triple(d, v), (i, j, k));
                        seen.push(v);
                    }
                }
            }
            let mut sorted = seen.clone();
            sorted.sort();
            assert_eq!(seen, sorted, "lexicographic triples give increasing flat indices");
        }
    }

    #[test]
    fn cancellation_removes_terms() {
        let f = Field::new(7).unwrap();
        let mut p = ZPoly::monomial(ZMonomial::var(3));
        p.add_term(&f, ZMonomial::var(3), 6);
        assert!(p.is_zero());
        let q = ZPoly::monomial(ZMonomial::from_vars(vec![2, 1]));
        assert_eq!(q.terms().next().unwrap().0.vars(), &[1, 2]);
        assert_eq!(ZMonomial::from_vars(vec![4, 4, 1]).max_exponent(), 2);
    }
}
