//! Randomized black-box identity testing by evaluation at random points of
//! the evaluation algebras.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::algebra::{Algebra, AlgebraElem};
use crate::circuit::{Circuit, Mode};
use crate::error::{Error, Result};
use crate::ffield::{Field, FieldElem};
use crate::whitebox::whitebox_pit;

/// Query access to a polynomial of degree at most `degree()`.
pub trait BlackBox {
    fn nvars(&self) -> usize;
    fn degree(&self) -> usize;
    fn mode(&self) -> Mode;
    fn field(&self) -> Field;
    /// Evaluates at one point per variable, all over the same algebra.
    fn eval(&self, points: &[AlgebraElem]) -> Result<AlgebraElem>;
    fn queries(&self) -> u64;
}

/// A known circuit behind the black-box interface, counting queries.
#[derive(Debug)]
pub struct CircuitBlackBox {
    circuit: Circuit,
    degree: usize,
    queries: AtomicU64,
}

impl CircuitBlackBox {
    pub fn new(circuit: Circuit) -> Self {
        let degree = circuit.degree();
        CircuitBlackBox {
            circuit,
            degree,
            queries: AtomicU64::new(0),
        }
    }

    /// Declares a larger degree bound than the syntactic degree.
    pub fn with_degree(circuit: Circuit, degree: usize) -> Self {
        let degree = degree.max(circuit.degree());
        CircuitBlackBox {
            circuit,
            degree,
            queries: AtomicU64::new(0),
        }
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }
}

impl BlackBox for CircuitBlackBox {
    fn nvars(&self) -> usize {
        self.circuit.nvars()
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn mode(&self) -> Mode {
        self.circuit.mode()
    }

    fn field(&self) -> Field {
        *self.circuit.field()
    }

    fn eval(&self, points: &[AlgebraElem]) -> Result<AlgebraElem> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let d = points.first().map(|p| p.d()).unwrap_or(1);
        let alg = Algebra::new(self.field(), d, self.mode())?;
        alg.eval_circuit(&self.circuit, points)
    }

    fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RandomOutcome {
    /// Every trial evaluated to zero; `bound` is `(d/|S|)^trials`.
    Zero { bound: f64 },
    /// The first tuple with a nonzero value and its 0-based trial index.
    NonZero { points: Vec<AlgebraElem>, trial: usize },
}

impl RandomOutcome {
    pub fn is_zero(&self) -> bool {
        matches!(self, RandomOutcome::Zero { .. })
    }
}

/// `{0, 1, ..., k-1}` as field residues.
pub fn sample_set(field: &Field, k: u64) -> Result<Vec<FieldElem>> {
    if k > field.modulus() {
        return Err(Error::FieldTooSmall {
            p: field.modulus(),
            required: k as u128,
        });
    }
    Ok((0..k).collect())
}

fn checked_set(field: &Field, degree: usize, set: &[FieldElem]) -> Result<Vec<FieldElem>> {
    if field.modulus() <= degree as u64 {
        return Err(Error::FieldTooSmall {
            p: field.modulus(),
            required: degree as u128 + 1,
        });
    }
    let distinct: BTreeSet<FieldElem> = set.iter().map(|&v| field.reduce(v)).collect();
    if distinct.len() <= degree {
        return Err(Error::SetTooSmall {
            size: distinct.len(),
            degree,
        });
    }
    Ok(distinct.into_iter().collect())
}

fn random_tuple<R: Rng + ?Sized>(alg: &Algebra, n: usize, set: &[FieldElem], rng: &mut R) -> Vec<AlgebraElem> {
    (0..n).map(|_| alg.random_elem(set, rng)).collect()
}

/// Runs `trials` independent evaluations at uniformly random points over
/// the algebra with parameter `d = bb.degree()`.
pub fn randomized_pit<R: Rng + ?Sized>(
    bb: &dyn BlackBox,
    set: &[FieldElem],
    trials: usize,
    rng: &mut R,
) -> Result<RandomOutcome> {
    let d = bb.degree();
    let field = bb.field();
    let set = checked_set(&field, d, set)?;
    let alg = Algebra::new(field, d.max(1), bb.mode())?;
    for trial in 0..trials {
        let points = random_tuple(&alg, bb.nvars(), &set, rng);
        if !bb.eval(&points)?.is_zero() {
            return Ok(RandomOutcome::NonZero { points, trial });
        }
    }
    Ok(RandomOutcome::Zero {
        bound: (d as f64 / set.len() as f64).powi(trials as i32),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureRate {
    pub zeros: usize,
    pub trials: usize,
    pub rate: f64,
    /// `d/|S|`.
    pub bound: f64,
}

/// Fraction of single-tuple trials on which a nonzero circuit evaluates to zero.
pub fn empirical_failure_rate<R: Rng + ?Sized>(
    c: &Circuit,
    set: &[FieldElem],
    trials: usize,
    rng: &mut R,
) -> Result<FailureRate> {
    if whitebox_pit(c).is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = c.degree();
    let set = checked_set(c.field(), d, set)?;
    let alg = Algebra::new(*c.field(), d.max(1), c.mode())?;
    let mut zeros = 0;
    for _ in 0..trials {
        let points = random_tuple(&alg, c.nvars(), &set, rng);
        if alg.eval_circuit(c, &points)?.is_zero() {
            zeros += 1;
        }
    }
    Ok(FailureRate {
        zeros,
        trials,
        rate: zeros as f64 / trials.max(1) as f64,
        bound: d as f64 / set.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

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

    fn jordan() -> Circuit {
        let mut b = CircuitBuilder::new(Mode::Comm, field(), 2);
        let (a, bb) = (b.var(1), b.var(2));
        let aa = b.mul(a, a);
        let ab = b.mul(a, bb);
        let l = b.mul(ab, aa);
        let baa = b.mul(bb, aa);
        let r = b.mul(a, baa);
        let out = b.sub(l, r);
        b.finish(out).unwrap()
    }

    #[test]
    fn zero_polynomials_are_never_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let set = sample_set(&field(), 100).unwrap();
        let bb = CircuitBlackBox::new(commutator(Mode::Comm));
        let out = randomized_pit(&bb, &set, 5, &mut rng).unwrap();
        let RandomOutcome::Zero { bound } = out else { panic!("commutator flagged") };
        assert!((bound - 0.02f64.powi(5)).abs() < 1e-15);
        assert_eq!(bb.queries(), 5);

        let mut b = CircuitBuilder::new(Mode::NonComm, field(), 1);
        let z = b.constant(0);
        let bb = CircuitBlackBox::new(b.finish(z).unwrap());
        assert!(randomized_pit(&bb, &set, 3, &mut rng).unwrap().is_zero());
    }

    #[test]
    fn noncomm_commutator_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let set = sample_set(&field(), 100).unwrap();
        let bb = CircuitBlackBox::new(commutator(Mode::NonComm));
        assert!(!randomized_pit(&bb, &set, 3, &mut rng).unwrap().is_zero());
    }

    #[test]
    fn jordan_is_hit_in_one_trial_almost_always() {
        let set = sample_set(&field(), 400).unwrap();
        let c = jordan();
        assert_eq!(c.degree(), 4);
        let mut hits = 0;
        for seed in 0..1000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bb = CircuitBlackBox::new(c.clone());
            if !randomized_pit(&bb, &set, 1, &mut rng).unwrap().is_zero() {
                hits += 1;
            }
        }
        assert!(hits >= 990, "hits {hits}");
    }

    #[test]
    fn degree_one_rate() {
        let mut b = CircuitBuilder::new(Mode::NonComm, field(), 1);
        let x = b.var(1);
        let c = b.finish(x).unwrap();
        let set = sample_set(&field(), 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = empirical_failure_rate(&c, &set, 10_000, &mut rng).unwrap();
        // x1 vanishes only when all 4 body coordinates and the scalar are 0
        let sigma = (r.bound * (1.0 - r.bound) / 10_000.0).sqrt();
        assert!(r.rate <= r.bound + 3.0 * sigma, "{r:?}");
    }

    #[test]
    fn parameter_errors() {
        let bb = CircuitBlackBox::new(jordan());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            randomized_pit(&bb, &[0, 1, 2, 3], 1, &mut rng),
            Err(Error::SetTooSmall { size: 4, degree: 4 })
        ));
        let small = jordan().with_field(Field::new(3).unwrap());
        let bb = CircuitBlackBox::new(small);
        assert!(matches!(
            randomized_pit(&bb, &[0, 1, 2], 1, &mut rng),
            Err(Error::FieldTooSmall { .. })
        ));
        assert!(sample_set(&Field::new(5).unwrap(), 6).is_err());
        let c = commutator(Mode::Comm);
        assert_eq!(
            empirical_failure_rate(&c, &[0, 1, 2, 3], 10, &mut rng),
            Err(Error::ZeroPolynomial)
        );
    }
}
