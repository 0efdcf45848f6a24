//! Associative, commutative circuits over z-variables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffield::{Field, FieldElem};
use crate::zpoly::{ZMonomial, ZPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AGate {
    /// Flat z-variable index.
    Var(u32),
    Const(FieldElem),
    Add(usize, usize),
    Mul(usize, usize),
    /// Scalar multiple; not a product gate.
    Scale(usize, FieldElem),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ACircuit {
    field: Field,
    nz: usize,
    gates: Vec<AGate>,
    output: usize,
}

impl ACircuit {
    pub fn new(field: Field, nz: usize, gates: Vec<AGate>, output: usize) -> Result<ACircuit> {
        for (id, g) in gates.iter().enumerate() {
            let kids: &[usize] = match g {
                AGate::Add(l, r) | AGate::Mul(l, r) => &[*l, *r],
                AGate::Scale(c, _) => std::slice::from_ref(c),
                AGate::Var(v) => {
                    if *v as usize >= nz {
                        return Err(Error::BadReference { gate: id, child: *v as usize });
                    }
                    &[]
                }
                AGate::Const(_) => &[],
            };
            for &k in kids {
                if k >= id {
                    return Err(Error::BadReference { gate: id, child: k });
                }
            }
        }
        if output >= gates.len() {
            return Err(Error::BadReference {
                gate: gates.len(),
                child: output,
            });
        }
        Ok(ACircuit {
            field,
            nz,
            gates,
            output,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of z-variables.
    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn gates(&self) -> &[AGate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn product_depth(&self) -> usize {
        let mut dp = vec![0usize; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            dp[id] = match *g {
                AGate::Var(_) | AGate::Const(_) => 0,
                AGate::Add(l, r) => dp[l].max(dp[r]),
                AGate::Mul(l, r) => 1 + dp[l].max(dp[r]),
                AGate::Scale(c, _) => dp[c],
            };
        }
        dp[self.output]
    }

    pub fn degree(&self) -> usize {
        let mut dg = vec![0usize; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            dg[id] = match *g {
                AGate::Var(_) => 1,
                AGate::Const(_) => 0,
                AGate::Add(l, r) => dg[l].max(dg[r]),
                AGate::Mul(l, r) => dg[l] + dg[r],
                AGate::Scale(c, _) => dg[c],
            };
        }
        dg[self.output]
    }

    /// Polynomial at every gate.
    pub fn expand_all(&self, max_terms: usize) -> Result<Vec<ZPoly>> {
        let f = &self.field;
        let mut out: Vec<ZPoly> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let p = match *g {
                AGate::Var(v) => ZPoly::monomial(ZMonomial::var(v)),
                AGate::Const(c) => ZPoly::constant(f, c),
                AGate::Add(l, r) => {
                    let mut p = out[l].clone();
                    p.add_assign(f, &out[r]);
                    p
                }
                AGate::Mul(l, r) => {
                    if out[l].len().saturating_mul(out[r].len()) > max_terms.saturating_mul(64) {
                        return Err(Error::TermCapExceeded { cap: max_terms });
                    }
                    out[l].mul(f, &out[r])
                }
                AGate::Scale(c, k) => out[c].scale(f, k),
            };
            if p.len() > max_terms {
                return Err(Error::TermCapExceeded { cap: max_terms });
            }
            out.push(p);
        }
        Ok(out)
    }

    pub fn expand(&self, max_terms: usize) -> Result<ZPoly> {
        let mut all = self.reachable().expand_all(max_terms)?;
        Ok(all.pop().expect("output exists"))
    }

    /// Value at a point given by flat index.
    pub fn eval(&self, point: &[FieldElem]) -> FieldElem {
        let f = &self.field;
        let mut v: Vec<FieldElem> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let x = match *g {
                AGate::Var(i) => point[i as usize],
                AGate::Const(c) => c,
                AGate::Add(l, r) => f.add(v[l], v[r]),
                AGate::Mul(l, r) => f.mul(v[l], v[r]),
                AGate::Scale(c, k) => f.mul(v[c], k),
            };
            v.push(x);
        }
        v[self.output]
    }

    /// Restriction to the gates the output depends on.
    pub fn reachable(&self) -> ACircuit {
        let mut keep = vec![false; self.output + 1];
        keep[self.output] = true;
        for id in (0..=self.output).rev() {
            if !keep[id] {
                continue;
            }
            match self.gates[id] {
                AGate::Add(l, r) | AGate::Mul(l, r) => {
                    keep[l] = true;
                    keep[r] = true;
                }
                AGate::Scale(c, _) => keep[c] = true,
                _ => {}
            }
        }
        let mut remap = vec![usize::MAX; self.output + 1];
        let mut gates = Vec::new();
        for id in 0..=self.output {
            if !keep[id] {
                continue;
            }
            remap[id] = gates.len();
            gates.push(match self.gates[id] {
                AGate::Add(l, r) => AGate::Add(remap[l], remap[r]),
                AGate::Mul(l, r) => AGate::Mul(remap[l], remap[r]),
                AGate::Scale(c, k) => AGate::Scale(remap[c], k),
                g => g,
            });
        }
        let output = gates.len() - 1;
        ACircuit {
            field: self.field,
            nz: self.nz,
            gates,
            output,
        }
    }

    /// Checks that every monomial computed at any gate has exactly one
    /// reduced parse tree, up to isomorphism of variable-labelled trees.
    ///
    /// Trees are enumerated per gate and memoized; `cap` bounds the number
    /// of distinct trees held at any gate.
    pub fn is_unambiguous(&self, cap: usize) -> Result<bool> {
        // reduced trees in canonical text form, with the monomial they compute
        type Trees = Rc<BTreeMap<String, ZMonomial>>;
        let mut per_gate: Vec<Trees> = Vec::with_capacity(self.gates.len());
        let mut owner: HashMap<ZMonomial, String> = HashMap::new();
        let unit = String::new();
        for g in &self.gates {
            let trees: BTreeMap<String, ZMonomial> = match *g {
                AGate::Var(v) => BTreeMap::from([(format!("z{v}"), ZMonomial::var(v))]),
                AGate::Const(_) => BTreeMap::from([(unit.clone(), ZMonomial::one())]),
                AGate::Scale(c, _) => (*per_gate[c]).clone(),
                AGate::Add(l, r) => {
                    let mut t = (*per_gate[l]).clone();
                    t.extend(per_gate[r].iter().map(|(k, v)| (k.clone(), v.clone())));
                    t
                }
                AGate::Mul(l, r) => {
                    let mut t = BTreeMap::new();
                    for (ta, ma) in per_gate[l].iter() {
                        for (tb, mb) in per_gate[r].iter() {
                            let key = if ta.is_empty() {
                                tb.clone()
                            } else if tb.is_empty() {
                                ta.clone()
                            } else if ta <= tb {
                                format!("({ta} {tb})")
                            } else {
                                format!("({tb} {ta})")
                            };
                            t.insert(key, ma.mul(mb));
                            if t.len() > cap {
                                return Err(Error::CapExceeded { cap: cap as u128 });
                            }
                        }
                    }
                    t
                }
            };
            if trees.len() > cap {
                return Err(Error::CapExceeded { cap: cap as u128 });
            }
            for (tree, m) in &trees {
                match owner.get(m) {
                    Some(prev) if prev != tree => return Ok(false),
                    Some(_) => {}
                    None => {
                        owner.insert(m.clone(), tree.clone());
                    }
                }
            }
            per_gate.push(Rc::new(trees));
        }
        Ok(true)
    }

    /// Distinct monomials over all gates, sorted.
    pub fn monomials(&self, max_terms: usize) -> Result<BTreeSet<ZMonomial>> {
        let mut out = BTreeSet::new();
        for p in self.expand_all(max_terms)? {
            out.extend(p.terms().map(|(m, _)| m.clone()));
        }
        Ok(out)
    }
}

/// Seeded random z-circuit with `size` gates whose last gate is the output.
/// The result need not be unambiguous.
pub fn gen_random_acircuit(field: Field, nz: usize, size: usize, degree_cap: usize, depth_cap: usize, seed: u64) -> ACircuit {
    assert!(nz >= 1 && size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = Vec::with_capacity(size);
    let mut deg: Vec<usize> = Vec::with_capacity(size);
    let mut dep: Vec<usize> = Vec::with_capacity(size);
    for id in 0..size {
        let g = if id == 0 || rng.gen_bool(0.3) {
            AGate::Var(rng.gen_range(0..nz as u32))
        } else {
            let (l, r) = (rng.gen_range(0..id), rng.gen_range(0..id));
            let roll: f64 = rng.gen();
            if roll < 0.45 && deg[l] + deg[r] <= degree_cap && 1 + dep[l].max(dep[r]) <= depth_cap {
                AGate::Mul(l, r)
            } else if roll < 0.55 {
                AGate::Scale(id - 1, field.reduce(rng.gen_range(2..20)))
            } else {
                AGate::Add(l, r)
            }
        };
        let (dg, dp) = match g {
            AGate::Var(_) => (1, 0),
            AGate::Const(_) => (0, 0),
            AGate::Add(l, r) => (deg[l].max(deg[r]), dep[l].max(dep[r])),
            AGate::Mul(l, r) => (deg[l] + deg[r], 1 + dep[l].max(dep[r])),
            AGate::Scale(c, _) => (deg[c], dep[c]),
        };
        gates.push(g);
        deg.push(dg);
        dep.push(dp);
    }
    ACircuit::new(field, nz, gates, size - 1).expect("generator emits valid circuits")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> Field {
        Field::new(101).unwrap()
    }

    #[test]
    fn sum_of_products_sharing_a_monomial_is_ambiguous() {
        // z0*z1*z2 reached as (z0*z1)*z2 and as z0*(z1*z2)
        let g = vec![
            AGate::Var(0),
            AGate::Var(1),
            AGate::Var(2),
            AGate::Mul(0, 1),
            AGate::Mul(3, 2),
            AGate::Mul(1, 2),
            AGate::Mul(0, 5),
            AGate::Add(4, 6),
        ];
        let c = ACircuit::new(f(), 3, g, 7).unwrap();
        assert!(!c.is_unambiguous(1000).unwrap());
        assert_eq!(c.expand(100).unwrap().len(), 1);
    }

    #[test]
    fn same_shape_twice_is_unambiguous() {
        let g = vec![AGate::Var(0), AGate::Var(1), AGate::Mul(0, 1), AGate::Mul(1, 0), AGate::Add(2, 3)];
        let c = ACircuit::new(f(), 2, g, 4).unwrap();
        assert!(c.is_unambiguous(10).unwrap());
        let p = c.expand(10).unwrap();
        assert_eq!(p.coeff(&ZMonomial::from_vars(vec![0, 1])), 2);
        assert_eq!(c.product_depth(), 1);
        assert_eq!(c.degree(), 2);
    }

    #[test]
    fn eval_matches_expansion() {
        for seed in 0..50 {
            let c = gen_random_acircuit(f(), 3, 10, 4, 2, seed);
            let p = c.expand(10_000).unwrap();
            let pt = [3, 5, 7];
            assert_eq!(c.eval(&pt), p.eval(c.field(), &pt));
            assert!(c.product_depth() <= 2 && c.degree() <= 4);
        }
    }
}
