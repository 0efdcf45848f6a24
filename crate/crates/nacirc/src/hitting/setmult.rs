//! Translation of a nonassociative circuit into associative z-circuits,
//! one per homogeneous degree, computing the image of that component
//! under the position/level substitution.

use crate::circuit::{homogenize, Circuit, GateKind, Mode};
use crate::error::Result;
use crate::zpoly::z_index;

use super::acircuit::{ACircuit, AGate};

/// Entry table of one gate: `entries[k1 - 1][k2 - 1]` for `k1` in
/// `1..=d - deg + 1` and `k2` in `1..=d`; `None` is a structural zero.
type Entries = Vec<Vec<Option<usize>>>;

/// Returns the circuits for degrees `1..=d` (index 0 holds degree 1).
/// Variables are the `n * d * d` flat z-indices.
pub fn set_multilinearize(c: &Circuit, d: usize) -> Result<Vec<ACircuit>> {
    let parts = homogenize(c, d)?;
    let nz = c.nvars() * d * d;
    let mut out = Vec::with_capacity(d);
    for h in parts.iter().skip(1) {
        out.push(component(h, d, nz)?);
    }
    Ok(out)
}

fn component(h: &Circuit, d: usize, nz: usize) -> Result<ACircuit> {
    let f = *h.field();
    let mut gates: Vec<AGate> = Vec::new();
    let mut push = |g: AGate| {
        gates.push(g);
        gates.len() - 1
    };
    let mut table: Vec<Entries> = Vec::with_capacity(h.size());
    let mut deg: Vec<usize> = Vec::with_capacity(h.size());

    for g in h.gates() {
        let gd = g.degree;
        let rows = (d + 1).saturating_sub(gd);
        let mut e: Entries = vec![vec![None; d]; rows];
        match g.kind {
            GateKind::Const(_) => {}
            GateKind::Var(i) => {
                for k1 in 1..=d {
                    for k2 in 1..=d {
                        e[k1 - 1][k2 - 1] = Some(push(AGate::Var(z_index(d, i, k1, k2))));
                    }
                }
            }
            GateKind::Add(l, r) => {
                for k1 in 0..rows {
                    for k2 in 0..d {
                        e[k1][k2] = match (table[l][k1][k2], table[r][k1][k2]) {
                            (Some(a), Some(b)) => Some(push(AGate::Add(a, b))),
                            (x, None) | (None, x) => x,
                        };
                    }
                }
            }
            GateKind::MulC(ch, k) => {
                for k1 in 0..rows {
                    for k2 in 0..d {
                        e[k1][k2] = table[ch][k1][k2].map(|a| push(AGate::Scale(a, k)));
                    }
                }
            }
            GateKind::Mul(l, r) => {
                let (d1, d2) = (deg[l], deg[r]);
                // slice k2 of a product reads slice k2+1 of both factors
                for k1 in 0..rows {
                    for k2 in 0..d.saturating_sub(1) {
                        let first = match (table[l][k1][k2 + 1], table[r][k1 + d1][k2 + 1]) {
                            (Some(a), Some(b)) => Some(push(AGate::Mul(a, b))),
                            _ => None,
                        };
                        let second = if h.mode() == Mode::Comm {
                            match (table[r][k1][k2 + 1], table[l][k1 + d2][k2 + 1]) {
                                (Some(a), Some(b)) => Some(push(AGate::Mul(a, b))),
                                _ => None,
                            }
                        } else {
                            None
                        };
                        e[k1][k2] = match (first, second) {
                            (Some(a), Some(b)) => Some(push(AGate::Add(a, b))),
                            (x, None) | (None, x) => x,
                        };
                    }
                }
            }
        }
        table.push(e);
        deg.push(gd);
    }

    let root = table[h.output()].first().and_then(|row| row[0]);
    let circuit = match root {
        Some(r) => ACircuit::new(f, nz, gates, r)?.reachable(),
        None => ACircuit::new(f, nz, vec![AGate::Const(0)], 0)?,
    };
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gen_random_with, CircuitBuilder, GenParams};
    use crate::ffield::Field;
    use crate::monomial::phi_mono;
    use crate::oracle::{expand, DEFAULT_MAX_TERMS};
    use crate::zpoly::ZPoly;

    fn field() -> Field {
        Field::new(1_000_003).unwrap()
    }

    #[test]
    fn single_product_matches_phi() {
        let mut b = CircuitBuilder::new(Mode::Comm, field(), 2);
        let (x, y) = (b.var(1), b.var(2));
        let out = b.mul(x, y);
        let c = b.finish(out).unwrap();
        let zs = set_multilinearize(&c, 2).unwrap();
        let p = zs[1].expand(100).unwrap();
        let want = phi_mono(&crate::monomial::Monomial::parse("(1 2)").unwrap(), Mode::Comm, 2, &field()).unwrap();
        assert_eq!(p, want);
        assert_eq!(p.len(), 2);
        assert!(zs[0].expand(100).unwrap().is_zero());
    }

    #[test]
    fn variable_maps_to_first_z() {
        let mut b = CircuitBuilder::new(Mode::NonComm, field(), 1);
        let x = b.var(1);
        let c = b.finish(x).unwrap();
        let zs = set_multilinearize(&c, 1).unwrap();
        assert_eq!(zs[0].expand(10).unwrap(), ZPoly::monomial(crate::zpoly::ZMonomial::var(0)));
    }

    #[test]
    fn random_circuits_match_phi_of_expansion() {
        for seed in 0..30 {
            let mode = if seed % 2 == 0 { Mode::Comm } else { Mode::NonComm };
            let c = gen_random_with(&GenParams {
                nvars: 3,
                size: 10,
                degree_cap: 4,
                mode,
                seed,
                depth_cap: Some(3),
                field: field(),
            });
            let d = c.degree().max(1);
            let full = expand(&c, DEFAULT_MAX_TERMS).unwrap();
            let zs = set_multilinearize(&c, d).unwrap();
            let s = c.size();
            for (idx, z) in zs.iter().enumerate() {
                let dd = idx + 1;
                let mut want = ZPoly::zero();
                for (m, coef) in full.component(dd).terms() {
                    want.add_assign(&field(), &phi_mono(m, mode, d, &field()).unwrap().scale(&field(), *coef));
                }
                assert_eq!(z.expand(DEFAULT_MAX_TERMS).unwrap(), want, "seed {seed} degree {dd}");
                assert!(z.size() <= 3 * d.pow(4) * s);
                assert!(z.product_depth() <= c.product_depth());
                assert!(z.is_unambiguous(100_000).unwrap(), "seed {seed} degree {dd}");
            }
        }
    }
}
