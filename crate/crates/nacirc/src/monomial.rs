//! Nonassociative monomials as full binary trees with variable-labelled leaves.
//!
//! Equality, hashing and ordering all go through the literal form
//! `((1 2) 3)`, which is cached in every node.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::circuit::Mode;
use crate::error::{Error, Result};
use crate::ffield::Field;
use crate::zpoly::{z_index, ZMonomial, ZPoly};

/// Default bound on the degree for which child designations are enumerated.
pub const ORDER_CAP: usize = 12;

#[derive(Clone)]
pub struct Monomial(Arc<Node>);

struct Node {
    shape: Shape,
    degree: usize,
    depth: usize,
    literal: String,
}

enum Shape {
    Var(usize),
    Prod(Monomial, Monomial),
}

impl Monomial {
    pub fn var(i: usize) -> Monomial {
        assert!(i >= 1, "variables are 1-based");
        Monomial(Arc::new(Node {
            shape: Shape::Var(i),
            degree: 1,
            depth: 1,
            literal: i.to_string(),
        }))
    }

    /// The product with `l` as left child.
    pub fn product(l: &Monomial, r: &Monomial) -> Monomial {
        let literal = format!("({} {})", l.literal(), r.literal());
        Monomial(Arc::new(Node {
            degree: l.degree() + r.degree(),
            depth: 1 + l.depth().max(r.depth()),
            shape: Shape::Prod(l.clone(), r.clone()),
            literal,
        }))
    }

    /// Product of two canonical monomials, canonical again for `mode`.
    pub fn product_in(mode: Mode, l: &Monomial, r: &Monomial) -> Monomial {
        match mode {
            Mode::Comm if l > r => Monomial::product(r, l),
            _ => Monomial::product(l, r),
        }
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    /// Largest leaf level, with the root at level 1.
    pub fn depth(&self) -> usize {
        self.0.depth
    }

    pub fn literal(&self) -> &str {
        &self.0.literal
    }

    pub fn as_var(&self) -> Option<usize> {
        match self.0.shape {
            Shape::Var(i) => Some(i),
            Shape::Prod(..) => None,
        }
    }

    pub fn children(&self) -> Option<(&Monomial, &Monomial)> {
        match &self.0.shape {
            Shape::Var(_) => None,
            Shape::Prod(l, r) => Some((l, r)),
        }
    }

    pub fn max_var(&self) -> usize {
        match self.children() {
            None => self.as_var().unwrap(),
            Some((l, r)) => l.max_var().max(r.max_var()),
        }
    }

    /// Leaf labels from left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        fn walk(m: &Monomial, out: &mut Vec<usize>) {
            match m.children() {
                None => out.push(m.as_var().unwrap()),
                Some((l, r)) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn canon_comm(&self) -> Monomial {
        match self.children() {
            None => self.clone(),
            Some((l, r)) => {
                let (l, r) = (l.canon_comm(), r.canon_comm());
                Monomial::product_in(Mode::Comm, &l, &r)
            }
        }
    }

    pub fn canon(&self, mode: Mode) -> Monomial {
        match mode {
            Mode::Comm => self.canon_comm(),
            Mode::NonComm => self.clone(),
        }
    }

    pub fn is_comm_canonical(&self) -> bool {
        match self.children() {
            None => true,
            Some((l, r)) => l <= r && l.is_comm_canonical() && r.is_comm_canonical(),
        }
    }

    /// Parses a literal such as `((1 2) 3)` or `5`.
    pub fn parse(text: &str) -> Result<Monomial> {
        let bad = || Error::BadLiteral(text.to_string());
        let bytes = text.as_bytes();
        let mut pos = 0;
        fn skip_ws(b: &[u8], pos: &mut usize) {
            while *pos < b.len() && b[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        }
        fn term(b: &[u8], pos: &mut usize) -> Option<Monomial> {
            skip_ws(b, pos);
            if *pos >= b.len() {
                return None;
            }
            if b[*pos] == b'(' {
                *pos += 1;
                let l = term(b, pos)?;
                let r = term(b, pos)?;
                skip_ws(b, pos);
                if *pos < b.len() && b[*pos] == b')' {
                    *pos += 1;
                    Some(Monomial::product(&l, &r))
                } else {
                    None
                }
            } else {
                let start = *pos;
                while *pos < b.len() && b[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                let v: usize = std::str::from_utf8(&b[start..*pos]).ok()?.parse().ok()?;
                (v >= 1).then(|| Monomial::var(v))
            }
        }
        let m = term(bytes, &mut pos).ok_or_else(bad)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(bad());
        }
        Ok(m)
    }
}

impl PartialEq for Monomial {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.literal() == other.literal()
    }
}

impl Eq for Monomial {}

impl Hash for Monomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.literal().hash(state)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.literal().cmp(other.literal())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.literal())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial({})", self.literal())
    }
}

/// Left-to-right leaf order and leaf levels of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialCode {
    pub sigma: Vec<usize>,
    pub levels: Vec<usize>,
}

pub fn encode(m: &Monomial) -> MonomialCode {
    let mut code = MonomialCode {
        sigma: Vec::with_capacity(m.degree()),
        levels: Vec::with_capacity(m.degree()),
    };
    fn walk(m: &Monomial, level: usize, code: &mut MonomialCode) {
        match m.children() {
            None => {
                code.sigma.push(m.as_var().unwrap());
                code.levels.push(level);
            }
            Some((l, r)) => {
                walk(l, level + 1, code);
                walk(r, level + 1, code);
            }
        }
    }
    walk(m, 1, &mut code);
    code
}

/// Rebuilds a monomial from its code, placing each leaf as the right child
/// of the nearest open ancestor and then descending along left edges.
pub fn decode(code: &MonomialCode) -> Result<Monomial> {
    let invalid = |why: &str| Error::InvalidCode(why.to_string());
    if code.sigma.is_empty() || code.sigma.len() != code.levels.len() {
        return Err(invalid("order and levels must be nonempty and of equal length"));
    }
    if code.sigma.iter().any(|&v| v == 0) || code.levels.iter().any(|&l| l == 0) {
        return Err(invalid("indices and levels are 1-based"));
    }

    struct Slot {
        level: usize,
        parent: Option<usize>,
        left: Option<usize>,
        right: Option<usize>,
        var: Option<usize>,
    }
    let mut arena = vec![Slot {
        level: 1,
        parent: None,
        left: None,
        right: None,
        var: None,
    }];
    let descend = |arena: &mut Vec<Slot>, mut at: usize, target: usize| -> usize {
        while arena[at].level < target {
            let child = arena.len();
            arena.push(Slot {
                level: arena[at].level + 1,
                parent: Some(at),
                left: None,
                right: None,
                var: None,
            });
            arena[at].left = Some(child);
            at = child;
        }
        at
    };

    let mut cur = descend(&mut arena, 0, code.levels[0]);
    arena[cur].var = Some(code.sigma[0]);
    for t in 1..code.sigma.len() {
        let mut up = arena[cur].parent;
        while let Some(a) = up {
            if arena[a].right.is_none() {
                break;
            }
            up = arena[a].parent;
        }
        let Some(a) = up else {
            return Err(invalid("no open ancestor for a further leaf"));
        };
        let v = arena.len();
        let level = arena[a].level + 1;
        if level > code.levels[t] {
            return Err(invalid("leaf level too shallow for its position"));
        }
        arena.push(Slot {
            level,
            parent: Some(a),
            left: None,
            right: None,
            var: None,
        });
        arena[a].right = Some(v);
        cur = descend(&mut arena, v, code.levels[t]);
        arena[cur].var = Some(code.sigma[t]);
    }
    if arena.iter().any(|s| s.left.is_some() != s.right.is_some()) {
        return Err(invalid("some internal node is missing a right child"));
    }

    fn build(arena: &[Slot], at: usize) -> Monomial {
        let s = &arena[at];
        match (s.left, s.right) {
            (Some(l), Some(r)) => Monomial::product(&build(arena, l), &build(arena, r)),
            _ => Monomial::var(s.var.expect("leaf without label")),
        }
    }
    Ok(build(&arena, 0))
}

/// Every ordered tree obtained by choosing left/right children at each
/// internal node, with multiplicity: the result has 2^(degree-1) entries.
pub fn designations(m: &Monomial) -> Vec<Monomial> {
    match m.children() {
        None => vec![m.clone()],
        Some((l, r)) => {
            let (ls, rs) = (designations(l), designations(r));
            let mut out = Vec::with_capacity(2 * ls.len() * rs.len());
            for a in &ls {
                for b in &rs {
                    out.push(Monomial::product(a, b));
                    out.push(Monomial::product(b, a));
                }
            }
            out
        }
    }
}

fn check_cap(m: &Monomial, cap: usize) -> Result<()> {
    if m.degree() > cap {
        return Err(Error::CapExceeded {
            cap: 1u128 << (cap.saturating_sub(1)).min(127),
        });
    }
    Ok(())
}

/// The set of left-to-right orders reachable by redesignating children.
pub fn orders(m: &Monomial, cap: usize) -> Result<BTreeSet<Vec<usize>>> {
    check_cap(m, cap)?;
    Ok(designations(m).iter().map(|t| t.leaves()).collect())
}

/// Distinct codes of all designations, i.e. the ordered trees in the
/// commutative class of `m`, each with how many designations produce it.
pub fn designation_codes(m: &Monomial, cap: usize) -> Result<BTreeMap<MonomialCode, usize>> {
    check_cap(m, cap)?;
    let mut out = BTreeMap::new();
    for t in designations(m) {
        *out.entry(encode(&t)).or_insert(0) += 1;
    }
    Ok(out)
}

fn code_monomial(code: &MonomialCode, d: usize, k1: usize, k2: usize) -> ZMonomial {
    ZMonomial::from_vars(
        (0..code.sigma.len())
            .map(|t| z_index(d, code.sigma[t], t + k1, code.levels[t] + k2 - 1))
            .collect(),
    )
}

/// Image of a monomial under the position/level substitution.
///
/// In commutative mode the sum runs over all child designations, counted
/// with multiplicity, which is exactly what the anticommutator product
/// produces entry by entry.
pub fn phi_mono(m: &Monomial, mode: Mode, d: usize, field: &Field) -> Result<ZPoly> {
    phi_mono_shifted(m, mode, d, 1, 1, field)
}

/// [`phi_mono`] with positions shifted by `k1 - 1` and levels by `k2 - 1`.
/// This is the `(k1, k1 + deg, k2)` entry of the image of `m` in the algebra.
pub fn phi_mono_shifted(m: &Monomial, mode: Mode, d: usize, k1: usize, k2: usize, field: &Field) -> Result<ZPoly> {
    if m.degree() + k1 - 1 > d {
        return Err(Error::DegreeExceeded {
            degree: m.degree() + k1 - 1,
            bound: d,
        });
    }
    if m.depth() + k2 - 1 > d {
        return Err(Error::DegreeExceeded {
            degree: m.depth() + k2 - 1,
            bound: d,
        });
    }
    let mut out = ZPoly::zero();
    match mode {
        Mode::NonComm => out.add_term(field, code_monomial(&encode(m), d, k1, k2), 1),
        Mode::Comm => {
            for (code, mult) in designation_codes(m, ORDER_CAP)? {
                out.add_term(field, code_monomial(&code, d, k1, k2), field.reduce(mult as u64));
            }
        }
    }
    Ok(out)
}

/// All monomials of exactly `degree` over variables `1..=n`, as ordered trees.
pub fn all_trees(n: usize, degree: usize) -> Vec<Monomial> {
    let mut table: Vec<Vec<Monomial>> = vec![Vec::new(); degree + 1];
    if degree == 0 {
        return Vec::new();
    }
    table[1] = (1..=n).map(Monomial::var).collect();
    for dd in 2..=degree {
        let mut v = Vec::new();
        for a in 1..dd {
            for l in &table[a] {
                for r in &table[dd - a] {
                    v.push(Monomial::product(l, r));
                }
            }
        }
        table[dd] = v;
    }
    std::mem::take(&mut table[degree])
}

/// Canonical commutative monomials of exactly `degree` over `1..=n`.
pub fn all_comm_trees(n: usize, degree: usize) -> Vec<Monomial> {
    let set: BTreeSet<Monomial> = all_trees(n, degree).iter().map(|m| m.canon_comm()).collect();
    set.into_iter().collect()
}
