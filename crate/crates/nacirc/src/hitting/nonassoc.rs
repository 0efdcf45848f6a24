//! Hitting sets over the evaluation algebras and deterministic black-box PIT.

use crate::algebra::{Algebra, AlgebraElem};
use crate::circuit::Mode;
use crate::error::{Error, Result};
use crate::ffield::Field;
use crate::randpit::BlackBox;
use crate::zpoly::z_index;

use super::biwa::{hitting_set_unambiguous, ClassParams, HittingSet, DEFAULT_CANDIDATE_CAP};
use super::weights::weight_family;

pub const DEFAULT_POINT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HittingOptions {
    /// Registered weight family name.
    pub family: String,
    pub candidate_cap: u128,
    /// Maximum number of points evaluated before giving up.
    pub point_budget: u128,
}

impl Default for HittingOptions {
    fn default() -> Self {
        HittingOptions {
            family: "exact".to_string(),
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            point_budget: DEFAULT_POINT_BUDGET,
        }
    }
}

impl HittingOptions {
    /// Same cap for candidates and points.
    pub fn with_budget(budget: u128) -> Self {
        HittingOptions {
            candidate_cap: budget,
            point_budget: budget,
            ..Default::default()
        }
    }
}

/// z-side class for nonassociative circuits with `n` inputs, size `s`,
/// degree `d` and product depth `depth`.
pub fn z_params(n: usize, s: usize, d: usize, depth: usize) -> ClassParams {
    let d = d.max(1) as u128;
    ClassParams {
        nz: n * (d * d) as usize,
        size: (3 * d.pow(4)).saturating_mul(s as u128),
        degree: d as usize,
        depth,
        // every image monomial uses each position once
        individual: 1,
    }
}

pub struct NonassocHittingSet {
    algebra: Algebra,
    n: usize,
    inner: HittingSet,
}

impl NonassocHittingSet {
    pub fn len(&self) -> u128 {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn inner(&self) -> &HittingSet {
        &self.inner
    }

    /// Points as `(candidate index, t, x_1..x_n)`.
    pub fn points(&self) -> impl Iterator<Item = (usize, u128, Vec<AlgebraElem>)> + '_ {
        let d = self.algebra.d;
        self.inner.points().map(move |(ci, t, z)| {
            let xs = (1..=self.n)
                .map(|i| self.algebra.make_zi(i, |i, j, k| z[z_index(d, i, j, k) as usize]))
                .collect();
            (ci, t, xs)
        })
    }
}

pub fn hitting_set_nonassoc(
    n: usize,
    s: usize,
    d: usize,
    depth: usize,
    mode: Mode,
    field: Field,
    opts: &HittingOptions,
) -> Result<NonassocHittingSet> {
    let family = weight_family(&opts.family)?;
    let params = z_params(n, s, d, depth);
    let inner = hitting_set_unambiguous(family, params, field, opts.candidate_cap)?;
    Ok(NonassocHittingSet {
        algebra: Algebra::new(field, d.max(1), mode)?,
        n,
        inner,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum DetOutcome {
    Zero { scanned: u128 },
    NonZero { points: Vec<AlgebraElem>, index: u128, t: u128 },
}

impl DetOutcome {
    pub fn is_zero(&self) -> bool {
        matches!(self, DetOutcome::Zero { .. })
    }
}

/// Evaluates `bb` on the hitting set for size `s` and product depth `depth`
/// until a nonzero value appears.
pub fn blackbox_pit_det(bb: &dyn BlackBox, s: usize, depth: usize, opts: &HittingOptions) -> Result<DetOutcome> {
    let h = hitting_set_nonassoc(bb.nvars(), s, bb.degree(), depth, bb.mode(), bb.field(), opts)?;
    let mut scanned: u128 = 0;
    for (_, t, points) in h.points() {
        if scanned >= opts.point_budget {
            return Err(Error::EnumerationCapExceeded {
                needed: h.len(),
                budget: opts.point_budget,
            });
        }
        if !bb.eval(&points)?.is_zero() {
            return Ok(DetOutcome::NonZero {
                points,
                index: scanned,
                t,
            });
        }
        scanned += 1;
    }
    Ok(DetOutcome::Zero { scanned })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, CircuitBuilder};
    use crate::randpit::CircuitBlackBox;

    fn field() -> Field {
        Field::default()
    }

    fn commutator(mode: Mode) -> Circuit {
        let mut b = CircuitBuilder::new(mode, field(), 2);
        let (x, y) = (b.var(1), b.var(2));
        let xy = b.mul(x, y);
        let yx = b.mul(y, x);
        let out = b.sub(xy, yx);
        b.finish(out).unwrap()
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
    fn constant_shows_in_scalar() {
        let h = hitting_set_nonassoc(2, 3, 2, 1, Mode::Comm, field(), &HittingOptions::default()).unwrap();
        let mut b = CircuitBuilder::new(Mode::Comm, field(), 2);
        let k = b.constant(5);
        let c = b.finish(k).unwrap();
        for (_, _, p) in h.points().take(200) {
            let v = h.algebra().eval_circuit(&c, &p).unwrap();
            assert_eq!(v.scalar(), 5);
        }
    }

    #[test]
    fn associator_is_hit() {
        for mode in [Mode::Comm, Mode::NonComm] {
            let c = associator(mode);
            assert_eq!(c.product_depth(), 2);
            let bb = CircuitBlackBox::new(c.clone());
            let out = blackbox_pit_det(&bb, c.size(), 2, &HittingOptions::default()).unwrap();
            assert!(!out.is_zero(), "{mode}");
        }
    }

    #[test]
    fn jordan_is_hit() {
        let mut b = CircuitBuilder::new(Mode::Comm, field(), 2);
        let (a, bb) = (b.var(1), b.var(2));
        let aa = b.mul(a, a);
        let ab = b.mul(a, bb);
        let l = b.mul(ab, aa);
        let baa = b.mul(bb, aa);
        let r = b.mul(a, baa);
        let out = b.sub(l, r);
        let c = b.finish(out).unwrap();
        assert_eq!((c.size(), c.degree(), c.product_depth()), (9, 4, 3));
        let bb = CircuitBlackBox::new(c.clone());
        let out = blackbox_pit_det(&bb, c.size(), 3, &HittingOptions::default()).unwrap();
        assert!(!out.is_zero());
    }

    #[test]
    fn commutator_separates_the_modes() {
        let opts = HittingOptions::default();
        let nc = commutator(Mode::NonComm);
        let bb = CircuitBlackBox::new(nc.clone());
        assert!(!blackbox_pit_det(&bb, nc.size(), 1, &opts).unwrap().is_zero());

        let cm = commutator(Mode::Comm);
        let h = hitting_set_nonassoc(2, cm.size(), 2, 1, Mode::Comm, field(), &opts).unwrap();
        let mut all = 0;
        for (_, _, p) in h.points() {
            assert!(h.algebra().eval_circuit(&cm, &p).unwrap().is_zero());
            all += 1;
        }
        assert_eq!(all as u128, h.len());
        let bb = CircuitBlackBox::new(cm.clone());
        assert!(blackbox_pit_det(&bb, cm.size(), 1, &opts).unwrap().is_zero());
    }

    #[test]
    fn budget_and_field_errors() {
        let c = commutator(Mode::Comm);
        let bb = CircuitBlackBox::new(c.clone());
        assert!(matches!(
            blackbox_pit_det(&bb, c.size(), 1, &HittingOptions::with_budget(10)),
            Err(Error::EnumerationCapExceeded { .. })
        ));
        let small = CircuitBlackBox::new(c.with_field(Field::new(101).unwrap()));
        assert!(matches!(
            blackbox_pit_det(&small, 3, 1, &HittingOptions::default()),
            Err(Error::FieldTooSmall { .. })
        ));
        let primes = HittingOptions {
            family: "primes".into(),
            ..Default::default()
        };
        assert!(matches!(
            blackbox_pit_det(&bb, c.size(), 2, &primes),
            Err(Error::EnumerationCapExceeded { .. })
        ));
    }
}
