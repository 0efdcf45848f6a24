//! Cross-algorithm agreement suite: nine checks, each reported as pass or fail.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Algebra;
use crate::circuit::{gen_random_with, Circuit, CircuitBuilder, GenParams, Mode};
use crate::corpus::{self, random_family, random_tree};
use crate::error::Error;
use crate::ffield::{Field, FieldElem};
use crate::hitting::acircuit::gen_random_acircuit;
use crate::hitting::biwa::{biwa_candidates, ClassParams, CoefficientTable};
use crate::hitting::weights::{bounded_monomials, kronecker_family, separates, PrimeResidues};
use crate::hitting::{blackbox_pit_det, set_multilinearize, HittingOptions};
use crate::monomial::{all_comm_trees, all_trees, decode, encode, phi_mono, phi_mono_shifted, Monomial};
use crate::oracle::{eval_monomial, eval_poly_algebra, expand, DEFAULT_MAX_TERMS};
use crate::randpit::{empirical_failure_rate, sample_set, BlackBox, CircuitBlackBox};
use crate::whitebox::{whitebox_pit_with, WhiteboxOptions};
use crate::zpoly::ZPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusSize {
    Small,
    Full,
}

impl CorpusSize {
    pub fn parse(s: &str) -> Option<CorpusSize> {
        match s {
            "small" => Some(CorpusSize::Small),
            "full" => Some(CorpusSize::Full),
            _ => None,
        }
    }

    fn scale(self, small: usize, full: usize) -> usize {
        match self {
            CorpusSize::Small => small,
            CorpusSize::Full => full,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub corpus: CorpusSize,
    pub seed: u64,
    pub field: Field,
    /// Makes the white-box test use a deliberately wrong product rule.
    pub fault: bool,
    pub hitting: HittingOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            corpus: CorpusSize::Small,
            seed: 1,
            field: Field::default(),
            fault: false,
            hitting: HittingOptions::default(),
        }
    }
}

impl SuiteConfig {
    fn whitebox(&self) -> WhiteboxOptions {
        WhiteboxOptions {
            fault_two_term: self.fault,
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} ({})",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

type Outcome = std::result::Result<String, String>;

fn err(e: Error) -> String {
    e.to_string()
}

const NAMES: [&str; 9] = [
    "oracle agreement",
    "entry formulas",
    "random evaluation error rate",
    "monomial code round trip",
    "set-multilinearization",
    "weight separation",
    "basis isolation",
    "end-to-end hitting",
    "evaluator consistency",
];

pub fn criterion(id: u8, cfg: &SuiteConfig) -> CriterionReport {
    let start = Instant::now();
    let out = match id {
        1 => criterion_1(cfg),
        2 => criterion_2(cfg),
        3 => criterion_3(cfg),
        4 => criterion_4(cfg),
        5 => criterion_5(cfg),
        6 => criterion_6(cfg),
        7 => criterion_7(cfg),
        8 => criterion_8(cfg),
        9 => criterion_9(cfg),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionReport {
        id,
        name: NAMES.get(id as usize - 1).copied().unwrap_or("unknown"),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn verify_suite(cfg: &SuiteConfig) -> Vec<CriterionReport> {
    (1..=9).map(|id| criterion(id, cfg)).collect()
}

/// White-box verdict against full expansion on random circuits and fixtures.
pub fn criterion_1(cfg: &SuiteConfig) -> Outcome {
    let per_mode = cfg.corpus.scale(1000, 3000);
    let mut checked = 0;
    let mut zeros = 0;
    let mut cases: Vec<(String, Circuit)> = corpus::fixtures(cfg.field)
        .into_iter()
        .map(|(name, c, _)| (name, c))
        .collect();
    for mode in [Mode::Comm, Mode::NonComm] {
        for (i, c) in random_family(mode, cfg.field, per_mode, cfg.seed).into_iter().enumerate() {
            cases.push((format!("random-{}-{i}", mode.as_str()), c));
        }
    }
    for (name, c) in &cases {
        let truth = expand(c, DEFAULT_MAX_TERMS).map_err(err)?.is_zero();
        let got = whitebox_pit_with(c, cfg.whitebox()).is_zero();
        if truth != got {
            return Err(format!("{name}: expansion says zero={truth}, white-box says zero={got}"));
        }
        checked += 1;
        zeros += truth as usize;
    }
    Ok(format!("{checked} circuits agree, {zeros} zero"))
}

/// Every entry of a monomial evaluated at structured points matches its
/// closed form, and nothing else is nonzero.
pub fn criterion_2(cfg: &SuiteConfig) -> Outcome {
    let f = cfg.field;
    let mut rng = cfg.rng(2);
    let mut checked = 0;
    for mode in [Mode::Comm, Mode::NonComm] {
        for deg in 1..=4 {
            let trees = match mode {
                Mode::Comm => all_comm_trees(3, deg),
                Mode::NonComm => all_trees(3, deg),
            };
            for d in deg..=4 {
                let alg = Algebra::new(f, d, mode).map_err(err)?;
                for m in &trees {
                    for _ in 0..5 {
                        let z: Vec<FieldElem> = (0..3 * d * d).map(|_| rng.gen_range(0..f.modulus())).collect();
                        let pts: Vec<_> = (1..=3)
                            .map(|i| alg.make_zi(i, |i, j, k| z[crate::zpoly::z_index(d, i, j, k) as usize]))
                            .collect();
                        let got = eval_monomial(&alg, m, &pts).map_err(err)?;
                        let mut want = crate::algebra::AlgebraElem::zero(d);
                        for k1 in 1..=d + 1 - deg {
                            for k2 in 1..=d {
                                match phi_mono_shifted(m, mode, d, k1, k2, &f) {
                                    Ok(p) => want.set(k1, k1 + deg, k2, p.eval(&f, &z)),
                                    Err(Error::DegreeExceeded { .. }) => {}
                                    Err(e) => return Err(err(e)),
                                }
                            }
                        }
                        if got != want {
                            return Err(format!("{m} ({}) with d={d}: entries differ", mode.as_str()));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} evaluations match"))
}

fn random_of_degree(mode: Mode, field: Field, degree: usize, count: usize, seed: u64) -> Vec<Circuit> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        s += 1;
        let c = gen_random_with(&GenParams {
            nvars: 1 + (s % 3) as usize,
            size: 8,
            degree_cap: degree,
            mode,
            seed: s,
            depth_cap: None,
            field,
        });
        if c.degree() == degree && !expand(&c, DEFAULT_MAX_TERMS).map(|p| p.is_zero()).unwrap_or(true) {
            out.push(c);
        }
    }
    out
}

/// Single-trial zero rate of nonzero polynomials stays under `d/|S|` up to
/// Monte Carlo error; zero polynomials always vanish.
pub fn criterion_3(cfg: &SuiteConfig) -> Outcome {
    let f = cfg.field;
    let trials = 10_000;
    let per_degree = cfg.corpus.scale(2, 5);
    let mut nonzero: Vec<(String, Circuit)> = Vec::new();
    let mut zero: Vec<(String, Circuit)> = Vec::new();
    for (name, c, is_zero) in corpus::fixtures(f) {
        if is_zero {
            if c.degree() >= 1 {
                zero.push((name, c));
            }
        } else if (2..=4).contains(&c.degree()) {
            nonzero.push((name, c));
        }
    }
    for mode in [Mode::Comm, Mode::NonComm] {
        for d in 2..=4 {
            for (i, c) in random_of_degree(mode, f, d, per_degree, cfg.seed * 1000 + d as u64 * 100).into_iter().enumerate() {
                nonzero.push((format!("random-{}-deg{d}-{i}", mode.as_str()), c));
            }
        }
    }
    let mut rng = cfg.rng(3);
    let mut worst = 0.0f64;
    for (name, c) in &nonzero {
        let d = c.degree();
        let set = sample_set(&f, 100 * d as u64).map_err(err)?;
        let r = empirical_failure_rate(c, &set, trials, &mut rng).map_err(err)?;
        let sigma = (r.bound * (1.0 - r.bound) / trials as f64).sqrt();
        if r.rate > r.bound + 3.0 * sigma {
            return Err(format!("{name}: zero rate {} above {} + 3 sigma", r.rate, r.bound));
        }
        worst = worst.max(r.rate);
    }
    for (name, c) in &zero {
        let d = c.degree().max(1);
        let set = sample_set(&f, 100 * d as u64).map_err(err)?;
        let alg = Algebra::new(f, d, c.mode()).map_err(err)?;
        for _ in 0..trials {
            let pts: Vec<_> = (0..c.nvars()).map(|_| alg.random_elem(&set, &mut rng)).collect();
            if !alg.eval_circuit(c, &pts).map_err(err)?.is_zero() {
                return Err(format!("{name}: zero polynomial evaluated to a nonzero element"));
            }
        }
    }
    Ok(format!(
        "{} nonzero (worst rate {worst:.4}), {} zero polynomials",
        nonzero.len(),
        zero.len()
    ))
}

/// Codes decode back to their trees, exhaustively and on samples.
pub fn criterion_4(cfg: &SuiteConfig) -> Outcome {
    let mut codes = HashSet::new();
    let mut total = 0;
    for deg in 1..=5 {
        for m in all_trees(3, deg) {
            let code = encode(&m);
            let back = decode(&code).map_err(err)?;
            if back != m {
                return Err(format!("{m} decodes to {back}"));
            }
            if !codes.insert(code) {
                return Err(format!("{m} shares its code with another tree"));
            }
            total += 1;
        }
    }
    let mut rng = cfg.rng(4);
    let samples = cfg.corpus.scale(10_000, 50_000);
    for _ in 0..samples {
        let deg = rng.gen_range(1..=8);
        let m: Monomial = random_tree(3, deg, &mut rng);
        let back = decode(&encode(&m)).map_err(err)?;
        if back != m {
            return Err(format!("{m} decodes to {back}"));
        }
    }
    Ok(format!("{total} trees exhaustively, {samples} sampled"))
}

/// Each z-circuit expands to the image of its homogeneous component, within
/// the size and depth bounds, and is unambiguous.
pub fn criterion_5(cfg: &SuiteConfig) -> Outcome {
    let f = cfg.field;
    let count = cfg.corpus.scale(50, 150);
    for i in 0..count as u64 {
        let mode = if i % 2 == 0 { Mode::Comm } else { Mode::NonComm };
        let c = gen_random_with(&GenParams {
            nvars: 1 + (i % 3) as usize,
            size: 4 + (i % 9) as usize,
            degree_cap: 1 + (i % 4) as usize,
            mode,
            seed: cfg.seed.wrapping_mul(7919).wrapping_add(i),
            depth_cap: Some(1 + (i % 3) as usize),
            field: f,
        });
        let d = c.degree().max(1);
        let full = expand(&c, DEFAULT_MAX_TERMS).map_err(err)?;
        let zs = set_multilinearize(&c, d).map_err(err)?;
        for (idx, z) in zs.iter().enumerate() {
            let dd = idx + 1;
            let mut want = ZPoly::zero();
            for (m, coef) in full.component(dd).terms() {
                want.add_assign(&f, &phi_mono(m, mode, d, &f).map_err(err)?.scale(&f, *coef));
            }
            if z.expand(DEFAULT_MAX_TERMS).map_err(err)? != want {
                return Err(format!("circuit {i}, degree {dd}: wrong expansion"));
            }
            if z.size() > 3 * d.pow(4) * c.size() {
                return Err(format!("circuit {i}, degree {dd}: size {} too large", z.size()));
            }
            if z.product_depth() > c.product_depth() {
                return Err(format!("circuit {i}, degree {dd}: product depth grew"));
            }
            if !z.is_unambiguous(1_000_000).map_err(err)? {
                return Err(format!("circuit {i}, degree {dd}: ambiguous"));
            }
        }
    }
    Ok(format!("{count} circuits"))
}

/// Every small set of monomials is separated by some family member.
pub fn criterion_6(cfg: &SuiteConfig) -> Outcome {
    let fam = kronecker_family(3, 3, 2).map_err(err)?;
    let mons = bounded_monomials(3, 2);
    let n = mons.len();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        subsets.push(vec![a]);
        for b in a + 1..n {
            subsets.push(vec![a, b]);
            for c in b + 1..n {
                subsets.push(vec![a, b, c]);
            }
        }
    }
    for idx in &subsets {
        let set: Vec<_> = idx.iter().map(|&i| mons[i].clone()).collect();
        if !fam.iter().any(|w| separates(w, &set)) {
            return Err(format!("set {set:?} not separated"));
        }
    }
    let sets = subsets.len();
    let fam = kronecker_family(6, 4, 3).map_err(err)?;
    let mons = bounded_monomials(6, 3);
    let mut rng = cfg.rng(6);
    let samples = cfg.corpus.scale(100, 1000);
    for _ in 0..samples {
        let set: Vec<_> = mons.choose_multiple(&mut rng, 4).cloned().collect();
        if !fam.iter().any(|w| separates(w, &set)) {
            return Err(format!("sampled set {set:?} not separated"));
        }
    }
    Ok(format!("{sets} sets exhaustively, {samples} sampled"))
}

/// Some candidate isolates a basis for each circuit, and every isolating
/// candidate keeps the circuit nonzero after the `t` substitution.
pub fn criterion_7(cfg: &SuiteConfig) -> Outcome {
    let f = cfg.field;
    let (shallow, deep) = (cfg.corpus.scale(16, 32), cfg.corpus.scale(4, 8));
    let mut circuits = Vec::new();
    let mut seed = cfg.seed.wrapping_mul(104_729);
    for (want, nz_max, size, degree, depth) in [(shallow, 3usize, 4usize, 2usize, 1usize), (deep, 1, 3, 3, 2)] {
        let mut got = 0;
        while got < want {
            seed = seed.wrapping_add(1);
            let nz = 1 + (seed % nz_max as u64) as usize;
            let c = gen_random_acircuit(f, nz, size, degree, depth, seed);
            if c.product_depth() != depth || c.expand(DEFAULT_MAX_TERMS).map_err(err)?.is_zero() {
                continue;
            }
            if !c.is_unambiguous(100_000).map_err(err)? {
                continue;
            }
            circuits.push(c);
            got += 1;
        }
    }
    let mut passing_total = 0u64;
    for (i, c) in circuits.iter().enumerate() {
        let table = CoefficientTable::new(c, DEFAULT_MAX_TERMS).map_err(err)?;
        let params = ClassParams {
            nz: c.nz(),
            size: c.size() as u128,
            degree: c.degree(),
            depth: c.product_depth().max(1),
            individual: c.degree(),
        };
        let mut passing = 0u64;
        for cand in biwa_candidates(&PrimeResidues, params, cfg.hitting.candidate_cap).map_err(err)? {
            let cand = cand.map_err(err)?;
            if table.isolated_by(&cand.weight).map_err(err)? {
                passing += 1;
                if table.univariate(&cand.weight).is_empty() {
                    return Err(format!("circuit {i}: isolating weight maps it to zero"));
                }
            }
        }
        if passing == 0 {
            return Err(format!("circuit {i}: no candidate isolates a basis"));
        }
        passing_total += passing;
    }
    Ok(format!("{} circuits, {passing_total} isolating candidates", circuits.len()))
}

fn distributivity(mode: Mode, field: Field) -> Circuit {
    let mut b = CircuitBuilder::new(mode, field, 2);
    let (x, y) = (b.var(1), b.var(2));
    let s = b.add(x, y);
    let m = b.mul(x, s);
    let xx = b.mul(x, x);
    let xy = b.mul(x, y);
    let t = b.sub(m, xx);
    let out = b.sub(t, xy);
    b.finish(out).unwrap()
}

/// `(x1 k) x2 - x2 (x1 k)` for a constant `k`: zero in the commutative mode,
/// product depth 2.
fn scaled_commutator(mode: Mode, field: Field) -> Circuit {
    let mut b = CircuitBuilder::new(mode, field, 2);
    let (x, y) = (b.var(1), b.var(2));
    let k = b.constant(3);
    let xk = b.mul(x, k);
    let l = b.mul(xk, y);
    let r = b.mul(y, xk);
    let out = b.sub(l, r);
    b.finish(out).unwrap()
}

/// Corpus for the end-to-end hitting check as `(name, circuit, zero)`.
/// Zero instances are kept small enough that their hitting set can be
/// scanned to the end.
pub fn hitting_corpus(cfg: &SuiteConfig) -> Vec<(String, Circuit, bool)> {
    let f = cfg.field;
    let mut out = Vec::new();
    for mode in [Mode::Comm, Mode::NonComm] {
        let m = mode.as_str();
        out.push((format!("associator-{m}"), corpus::associator(mode, f), false));
        out.push((format!("commutator-{m}"), corpus::commutator(mode, f), mode == Mode::Comm));
        out.push((format!("distributivity-{m}"), distributivity(mode, f), true));
        out.push((format!("zero-{m}"), corpus::zero_circuit(mode, f, 2), true));
        out.push((format!("scaled-commutator-{m}"), scaled_commutator(mode, f), mode == Mode::Comm));
    }
    let (nonzero, zero) = (cfg.corpus.scale(16, 60), cfg.corpus.scale(4, 12));
    let mut seed = cfg.seed.wrapping_mul(15_485_863);
    let (mut got_nz, mut got_z) = (0, 0);
    while got_nz < nonzero {
        seed = seed.wrapping_add(1);
        let mode = if seed % 2 == 0 { Mode::Comm } else { Mode::NonComm };
        let c = gen_random_with(&GenParams {
            nvars: 1 + (seed % 3) as usize,
            size: 3 + (seed % 8) as usize,
            degree_cap: 3,
            mode,
            seed,
            depth_cap: Some(2),
            field: f,
        });
        if c.degree() == 0 || expand(&c, DEFAULT_MAX_TERMS).map(|p| p.is_zero()).unwrap_or(true) {
            continue;
        }
        out.push((format!("random-{}-{seed}", mode.as_str()), c, false));
        got_nz += 1;
    }
    while got_z < zero {
        seed = seed.wrapping_add(1);
        let nvars = 2 + (seed % 2) as usize;
        let base = gen_random_with(&GenParams {
            nvars,
            size: 4,
            degree_cap: if nvars == 2 { 3 } else { 2 },
            mode: Mode::Comm,
            seed,
            depth_cap: Some(2),
            field: f,
        });
        if base.product_depth() == 0 {
            continue;
        }
        out.push((format!("swap-comm-{seed}"), corpus::swap_difference(&base), true));
        got_z += 1;
    }
    out
}

/// The hitting set finds every nonzero circuit, never flags a zero one, and
/// agrees with the white-box test.
pub fn criterion_8(cfg: &SuiteConfig) -> Outcome {
    let cases = hitting_corpus(cfg);
    let mut scanned: u128 = 0;
    for (name, c, is_zero) in &cases {
        if expand(c, DEFAULT_MAX_TERMS).map_err(err)?.is_zero() != *is_zero {
            return Err(format!("{name}: corpus label disagrees with expansion"));
        }
        let bb = CircuitBlackBox::new(c.clone());
        let det = blackbox_pit_det(&bb, c.size(), c.product_depth(), &cfg.hitting).map_err(|e| format!("{name}: {e}"))?;
        if det.is_zero() != *is_zero {
            return Err(format!("{name}: hitting set says zero={}", det.is_zero()));
        }
        if whitebox_pit_with(c, cfg.whitebox()).is_zero() != det.is_zero() {
            return Err(format!("{name}: white-box and hitting set disagree"));
        }
        scanned += bb.queries() as u128;
    }
    Ok(format!("{} circuits, {scanned} points evaluated", cases.len()))
}

/// Direct evaluation matches evaluation of the expanded polynomial.
pub fn criterion_9(cfg: &SuiteConfig) -> Outcome {
    let f = cfg.field;
    let per_mode = cfg.corpus.scale(150, 600);
    let mut rng = cfg.rng(9);
    let set: Vec<FieldElem> = (0..1000u64.min(f.modulus())).collect();
    let mut cases: Vec<Circuit> = corpus::fixtures(f).into_iter().map(|(_, c, _)| c).collect();
    for mode in [Mode::Comm, Mode::NonComm] {
        cases.extend(random_family(mode, f, per_mode, cfg.seed.wrapping_add(9)));
    }
    for (i, c) in cases.iter().enumerate() {
        let poly = expand(c, DEFAULT_MAX_TERMS).map_err(err)?;
        let alg = Algebra::new(f, c.degree().max(1), c.mode()).map_err(err)?;
        for _ in 0..10 {
            let pts: Vec<_> = (0..c.nvars()).map(|_| alg.random_elem(&set, &mut rng)).collect();
            let direct = alg.eval_circuit(c, &pts).map_err(err)?;
            let via = eval_poly_algebra(&alg, &poly, &pts).map_err(err)?;
            if direct != via {
                return Err(format!("circuit {i}: evaluators differ"));
            }
        }
    }
    Ok(format!("{} circuits x 10 points", cases.len()))
}
