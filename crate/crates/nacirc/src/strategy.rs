//! Identity-testing strategies behind one interface, registered by name.

use std::collections::BTreeMap;
use std::fmt;

use once_cell::sync::Lazy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::hitting::{blackbox_pit_det, DetOutcome, HittingOptions};
use crate::monomial::Monomial;
use crate::oracle::{expand, DEFAULT_MAX_TERMS};
use crate::randpit::{randomized_pit, sample_set, BlackBox, CircuitBlackBox, RandomOutcome};
use crate::whitebox::{whitebox_pit_with, WhiteboxOptions, WhiteboxOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Answer {
    Zero,
    Nonzero,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Zero => "ZERO",
            Answer::Nonzero => "NONZERO",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    /// A monomial with nonzero coefficient; `"1"` is the constant term.
    Monomial { monomial: String },
    /// One algebra element per input variable, in the element dump format.
    Point { d: usize, elements: Vec<String> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub strategy: String,
    pub size: usize,
    pub degree: usize,
    pub product_depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub result: Answer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Failure probability bound, randomized runs only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub stats: Stats,
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        self.result == Answer::Zero
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.result)?;
        match (&self.witness, self.bound) {
            (Some(Witness::Monomial { monomial }), _) => write!(f, " {monomial}"),
            (Some(Witness::Point { elements, .. }), _) => {
                for (i, e) in elements.iter().enumerate() {
                    write!(f, "\nx{}:\n{}", i + 1, e.trim_end())?;
                }
                Ok(())
            }
            (None, Some(b)) => write!(f, " p_fail<={b:e}"),
            (None, None) => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PitOptions {
    pub seed: u64,
    pub max_terms: usize,
    /// Randomized sample-set size; defaults to `100 * d`.
    pub set_size: Option<u64>,
    pub trials: usize,
    /// Degree bound announced by the black box; defaults to the syntactic degree.
    pub degree: Option<usize>,
    /// Product-depth bound for hitting sets; defaults to the circuit's.
    pub depth: Option<usize>,
    pub hitting: HittingOptions,
    pub whitebox: WhiteboxOptions,
}

impl Default for PitOptions {
    fn default() -> Self {
        PitOptions {
            seed: 0,
            max_terms: DEFAULT_MAX_TERMS,
            set_size: None,
            trials: 10,
            degree: None,
            depth: None,
            hitting: HittingOptions::default(),
            whitebox: WhiteboxOptions::default(),
        }
    }
}

pub trait PitStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn test(&self, c: &Circuit, opts: &PitOptions) -> Result<Verdict>;
}

fn stats(name: &str, c: &Circuit) -> Stats {
    Stats {
        strategy: name.to_string(),
        size: c.size(),
        degree: c.degree(),
        product_depth: c.product_depth(),
        ..Default::default()
    }
}

fn monomial_witness(m: Option<&Monomial>) -> Witness {
    Witness::Monomial {
        monomial: m.map_or_else(|| "1".to_string(), |m| m.to_string()),
    }
}

fn point_witness(points: &[crate::algebra::AlgebraElem]) -> Witness {
    Witness::Point {
        d: points.first().map_or(1, |p| p.d()),
        elements: points.iter().map(|p| p.dump()).collect(),
    }
}

/// Full expansion.
pub struct OracleStrategy;
/// Deterministic white-box test by span levels.
pub struct WhiteboxStrategy;
/// Random evaluation over the algebra.
pub struct RandomStrategy;
/// Deterministic black-box test by hitting set.
pub struct HittingStrategy;

impl PitStrategy for OracleStrategy {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn describe(&self) -> &'static str {
        "expand every monomial and look for a nonzero coefficient"
    }

    fn test(&self, c: &Circuit, opts: &PitOptions) -> Result<Verdict> {
        let p = expand(c, opts.max_terms)?;
        let mut st = stats(self.name(), c);
        st.terms = Some(p.len() as u64);
        let witness = if p.constant() != 0 {
            Some(monomial_witness(None))
        } else {
            p.terms()
                .map(|(m, _)| m)
                .min_by(|a, b| (a.degree(), a.literal()).cmp(&(b.degree(), b.literal())))
                .map(|m| monomial_witness(Some(m)))
        };
        Ok(Verdict {
            result: if witness.is_some() { Answer::Nonzero } else { Answer::Zero },
            witness,
            bound: None,
            stats: st,
        })
    }
}

impl PitStrategy for WhiteboxStrategy {
    fn name(&self) -> &'static str {
        "white"
    }

    fn describe(&self) -> &'static str {
        "span of coefficient vectors level by level"
    }

    fn test(&self, c: &Circuit, opts: &PitOptions) -> Result<Verdict> {
        let out = whitebox_pit_with(c, opts.whitebox);
        let (result, witness) = match out {
            WhiteboxOutcome::Zero => (Answer::Zero, None),
            WhiteboxOutcome::NonZero(m) => (Answer::Nonzero, Some(monomial_witness(m.as_ref()))),
        };
        Ok(Verdict {
            result,
            witness,
            bound: None,
            stats: stats(self.name(), c),
        })
    }
}

impl PitStrategy for RandomStrategy {
    fn name(&self) -> &'static str {
        "random"
    }

    fn describe(&self) -> &'static str {
        "evaluate at random algebra points"
    }

    fn test(&self, c: &Circuit, opts: &PitOptions) -> Result<Verdict> {
        let bb = CircuitBlackBox::with_degree(c.clone(), opts.degree.unwrap_or(0));
        let d = bb.degree().max(1) as u64;
        let set = sample_set(c.field(), opts.set_size.unwrap_or(100 * d))?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let out = randomized_pit(&bb, &set, opts.trials, &mut rng)?;
        let mut st = stats(self.name(), c);
        st.queries = Some(bb.queries());
        Ok(match out {
            RandomOutcome::Zero { bound } => Verdict {
                result: Answer::Zero,
                witness: None,
                bound: Some(bound),
                stats: st,
            },
            RandomOutcome::NonZero { points, .. } => Verdict {
                result: Answer::Nonzero,
                witness: Some(point_witness(&points)),
                bound: None,
                stats: st,
            },
        })
    }
}

impl PitStrategy for HittingStrategy {
    fn name(&self) -> &'static str {
        "hitting"
    }

    fn describe(&self) -> &'static str {
        "evaluate on a deterministic hitting set for bounded product depth"
    }

    fn test(&self, c: &Circuit, opts: &PitOptions) -> Result<Verdict> {
        let bb = CircuitBlackBox::with_degree(c.clone(), opts.degree.unwrap_or(0));
        let depth = opts.depth.unwrap_or_else(|| c.product_depth());
        let out = blackbox_pit_det(&bb, c.size(), depth, &opts.hitting)?;
        let mut st = stats(self.name(), c);
        st.queries = Some(bb.queries());
        Ok(match out {
            DetOutcome::Zero { .. } => Verdict {
                result: Answer::Zero,
                witness: None,
                bound: None,
                stats: st,
            },
            DetOutcome::NonZero { points, .. } => Verdict {
                result: Answer::Nonzero,
                witness: Some(point_witness(&points)),
                bound: None,
                stats: st,
            },
        })
    }
}

static STRATEGIES: Lazy<BTreeMap<&'static str, Box<dyn PitStrategy>>> = Lazy::new(|| {
    let all: [Box<dyn PitStrategy>; 4] = [
        Box::new(OracleStrategy),
        Box::new(WhiteboxStrategy),
        Box::new(RandomStrategy),
        Box::new(HittingStrategy),
    ];
    all.into_iter().map(|s| (s.name(), s)).collect()
});

pub fn strategy(name: &str) -> Result<&'static dyn PitStrategy> {
    STRATEGIES.get(name).map(|b| b.as_ref()).ok_or_else(|| Error::Unknown {
        kind: "strategy",
        name: name.to_string(),
    })
}

pub fn strategy_names() -> Vec<&'static str> {
    STRATEGIES.keys().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, Mode};
    use crate::ffield::Field;

    fn associator() -> Circuit {
        let mut b = CircuitBuilder::new(Mode::NonComm, Field::default(), 3);
        let (x, y, z) = (b.var(1), b.var(2), b.var(3));
        let xy = b.mul(x, y);
        let l = b.mul(xy, z);
        let yz = b.mul(y, z);
        let r = b.mul(x, yz);
        let out = b.sub(l, r);
        b.finish(out).unwrap()
    }

    #[test]
    fn registry_has_all_four() {
        assert_eq!(strategy_names(), vec!["hitting", "oracle", "random", "white"]);
        assert!(matches!(strategy("magic"), Err(Error::Unknown { .. })));
    }

    #[test]
    fn strategies_agree_on_associator() {
        let c = associator();
        let opts = PitOptions::default();
        for name in strategy_names() {
            let v = strategy(name).unwrap().test(&c, &opts).unwrap();
            assert_eq!(v.result, Answer::Nonzero, "{name}");
            assert!(v.witness.is_some());
            assert_eq!(v.stats.strategy, name);
        }
        let w = strategy("white").unwrap().test(&c, &opts).unwrap();
        assert_eq!(w.to_string(), "NONZERO ((1 2) 3)");
        assert_eq!(strategy("oracle").unwrap().test(&c, &opts).unwrap().to_string(), "NONZERO ((1 2) 3)");
    }

    #[test]
    fn zero_verdicts_carry_bound_only_when_random() {
        let mut b = CircuitBuilder::new(Mode::Comm, Field::default(), 1);
        let z = b.constant(0);
        let c = b.finish(z).unwrap();
        let opts = PitOptions::default();
        for name in strategy_names() {
            let v = strategy(name).unwrap().test(&c, &opts).unwrap();
            assert!(v.is_zero());
            assert!(v.witness.is_none());
            assert_eq!(v.bound.is_some(), name == "random");
        }
    }
}
