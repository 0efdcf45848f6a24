//! The algebras used as evaluation domains.
//!
//! An element is a stack of `d` square matrices of side `d + 1` (the body)
//! together with one scalar coordinate for the adjoined unit. The body
//! product multiplies slice `k + 1` of each factor into slice `k` and
//! kills the last slice. The noncommutative algebra adjoins a unit to this
//! product, the commutative one adjoins a unit to its anticommutator.

use std::fmt::Write as _;

use rand::Rng;

use crate::circuit::{Circuit, GateKind, Mode};
use crate::error::{Error, Result};
use crate::ffield::{Field, FieldElem};

/// Largest supported algebra parameter.
pub const MAX_D: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElem {
    d: usize,
    /// Row-major `[k][i][j]`, all indices 0-based here.
    body: Vec<FieldElem>,
    scalar: FieldElem,
}

impl AlgebraElem {
    pub fn zero(d: usize) -> Self {
        assert!((1..=MAX_D).contains(&d), "algebra parameter out of range");
        AlgebraElem {
            d,
            body: vec![0; d * (d + 1) * (d + 1)],
            scalar: 0,
        }
    }

    /// The adjoined unit `(0, 1)`.
    pub fn unit(d: usize) -> Self {
        Self::constant(d, 1)
    }

    pub fn constant(d: usize, c: FieldElem) -> Self {
        let mut e = Self::zero(d);
        e.scalar = c;
        e
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Total coordinate count, `d(d+1)^2 + 1`.
    pub fn dimension(&self) -> usize {
        self.body.len() + 1
    }

    pub fn scalar(&self) -> FieldElem {
        self.scalar
    }

    pub fn set_scalar(&mut self, c: FieldElem) {
        self.scalar = c;
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        let s = self.d + 1;
        debug_assert!((1..=s).contains(&i) && (1..=s).contains(&j) && (1..=self.d).contains(&k));
        ((k - 1) * s + (i - 1)) * s + (j - 1)
    }

    /// Body entry `(i, j, k)`, 1-based with `i, j <= d+1` and `k <= d`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> FieldElem {
        self.body[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: FieldElem) {
        let at = self.idx(i, j, k);
        self.body[at] = v;
    }

    pub fn body(&self) -> &[FieldElem] {
        &self.body
    }

    pub fn is_zero(&self) -> bool {
        self.scalar == 0 && self.body.iter().all(|&v| v == 0)
    }

    /// Nonzero body entries as `((i, j, k), value)`.
    pub fn nonzero_entries(&self) -> Vec<((usize, usize, usize), FieldElem)> {
        let s = self.d + 1;
        let mut out = Vec::new();
        for k in 1..=self.d {
            for i in 1..=s {
                for j in 1..=s {
                    let v = self.get(i, j, k);
                    if v != 0 {
                        out.push(((i, j, k), v));
                    }
                }
            }
        }
        out
    }

    /// Debug dump: `elem d=<d>`, one `k=<k>` block per slice, then `scalar=<c>`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "elem d={}", self.d);
        for k in 1..=self.d {
            let _ = writeln!(s, "k={k}");
            for i in 1..=self.d + 1 {
                let row: Vec<String> = (1..=self.d + 1).map(|j| self.get(i, j, k).to_string()).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
        let _ = writeln!(s, "scalar={}", self.scalar);
        s
    }
}

/// Arithmetic context: field, parameter `d` and which product to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Algebra {
    pub field: Field,
    pub d: usize,
    pub mode: Mode,
}

impl Algebra {
    pub fn new(field: Field, d: usize, mode: Mode) -> Result<Algebra> {
        if !(1..=MAX_D).contains(&d) {
            return Err(Error::DimensionMismatch { expected: MAX_D, found: d });
        }
        Ok(Algebra { field, d, mode })
    }

    fn check(&self, x: &AlgebraElem) -> Result<()> {
        if x.d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: x.d,
            });
        }
        Ok(())
    }

    /// Body product: slice `k` of the result is slice `k+1` of `x` times
    /// slice `k+1` of `y`; the last slice is zero. Scalars are ignored.
    pub fn aprime_mul(&self, x: &AlgebraElem, y: &AlgebraElem) -> Result<AlgebraElem> {
        self.check(x)?;
        self.check(y)?;
        let mut z = AlgebraElem::zero(self.d);
        self.aprime_acc(&mut z, x, y);
        Ok(z)
    }

    fn aprime_acc(&self, z: &mut AlgebraElem, x: &AlgebraElem, y: &AlgebraElem) {
        let f = &self.field;
        let s = self.d + 1;
        let sq = s * s;
        for k in 0..self.d - 1 {
            let src = (k + 1) * sq;
            let dst = k * sq;
            for i in 0..s {
                for l in 0..s {
                    let a = x.body[src + i * s + l];
                    if a == 0 {
                        continue;
                    }
                    let yrow = &y.body[src + l * s..src + (l + 1) * s];
                    let zrow = &mut z.body[dst + i * s..dst + (i + 1) * s];
                    for (zv, &b) in zrow.iter_mut().zip(yrow) {
                        if b != 0 {
                            *zv = f.mul_add(*zv, a, b);
                        }
                    }
                }
            }
        }
    }

    fn unit_terms(&self, z: &mut AlgebraElem, x: &AlgebraElem, y: &AlgebraElem) {
        let f = &self.field;
        for ((zv, &a), &b) in z.body.iter_mut().zip(&x.body).zip(&y.body) {
            let mut v = *zv;
            if y.scalar != 0 {
                v = f.mul_add(v, a, y.scalar);
            }
            if x.scalar != 0 {
                v = f.mul_add(v, b, x.scalar);
            }
            *zv = v;
        }
        z.scalar = f.mul(x.scalar, y.scalar);
    }

    /// `(a, α)(b, β) = (a∘b + αb + βa, αβ)`.
    pub fn a_mul(&self, x: &AlgebraElem, y: &AlgebraElem) -> Result<AlgebraElem> {
        self.check(x)?;
        self.check(y)?;
        let mut z = AlgebraElem::zero(self.d);
        self.aprime_acc(&mut z, x, y);
        self.unit_terms(&mut z, x, y);
        Ok(z)
    }

    /// `(a, α)⊙(b, β) = (a∘b + b∘a + αb + βa, αβ)`, the unit adjoined to
    /// the anticommutator of the body product.
    pub fn c_mul(&self, x: &AlgebraElem, y: &AlgebraElem) -> Result<AlgebraElem> {
        self.check(x)?;
        self.check(y)?;
        let mut z = AlgebraElem::zero(self.d);
        self.aprime_acc(&mut z, x, y);
        self.aprime_acc(&mut z, y, x);
        self.unit_terms(&mut z, x, y);
        Ok(z)
    }

    pub fn mul(&self, x: &AlgebraElem, y: &AlgebraElem) -> Result<AlgebraElem> {
        match self.mode {
            Mode::Comm => self.c_mul(x, y),
            Mode::NonComm => self.a_mul(x, y),
        }
    }

    pub fn add(&self, x: &AlgebraElem, y: &AlgebraElem) -> Result<AlgebraElem> {
        self.check(x)?;
        self.check(y)?;
        let f = &self.field;
        Ok(AlgebraElem {
            d: self.d,
            body: x.body.iter().zip(&y.body).map(|(&a, &b)| f.add(a, b)).collect(),
            scalar: f.add(x.scalar, y.scalar),
        })
    }

    pub fn scale(&self, x: &AlgebraElem, c: FieldElem) -> AlgebraElem {
        let f = &self.field;
        AlgebraElem {
            d: x.d,
            body: x.body.iter().map(|&a| f.mul(a, c)).collect(),
            scalar: f.mul(x.scalar, c),
        }
    }

    /// Structured point for variable `i`: entry `(j, j+1, k)` holds `z(i, j, k)`.
    pub fn make_zi(&self, i: usize, z: impl Fn(usize, usize, usize) -> FieldElem) -> AlgebraElem {
        let mut e = AlgebraElem::zero(self.d);
        for j in 1..=self.d {
            for k in 1..=self.d {
                e.set(j, j + 1, k, self.field.reduce(z(i, j, k)));
            }
        }
        e
    }

    /// Every coordinate drawn independently and uniformly from `set`.
    pub fn random_elem<R: Rng + ?Sized>(&self, set: &[FieldElem], rng: &mut R) -> AlgebraElem {
        assert!(!set.is_empty(), "sample set must be nonempty");
        let mut e = AlgebraElem::zero(self.d);
        for v in e.body.iter_mut() {
            *v = self.field.reduce(set[rng.gen_range(0..set.len())]);
        }
        e.scalar = self.field.reduce(set[rng.gen_range(0..set.len())]);
        e
    }

    /// Evaluates every gate of `c` at `points`; constants are `(0, c)`.
    pub fn eval_circuit_all(&self, c: &Circuit, points: &[AlgebraElem]) -> Result<Vec<AlgebraElem>> {
        if points.len() != c.nvars() {
            return Err(Error::DimensionMismatch {
                expected: c.nvars(),
                found: points.len(),
            });
        }
        for p in points {
            self.check(p)?;
        }
        let mut vals: Vec<AlgebraElem> = Vec::with_capacity(c.size());
        for g in c.gates() {
            let v = match g.kind {
                GateKind::Var(i) => points[i - 1].clone(),
                GateKind::Const(k) => AlgebraElem::constant(self.d, self.field.reduce(k)),
                GateKind::Add(l, r) => self.add(&vals[l], &vals[r])?,
                GateKind::Mul(l, r) => self.mul(&vals[l], &vals[r])?,
                GateKind::MulC(ch, k) => self.scale(&vals[ch], k),
            };
            vals.push(v);
        }
        Ok(vals)
    }

    pub fn eval_circuit(&self, c: &Circuit, points: &[AlgebraElem]) -> Result<AlgebraElem> {
        let mut all = self.eval_circuit_all(c, points)?;
        Ok(all.swap_remove(c.output()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::monomial::{encode, Monomial};
    use proptest::prelude::{prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alg(d: usize, mode: Mode) -> Algebra {
        Algebra::new(Field::new(1_000_003).unwrap(), d, mode).unwrap()
    }

    fn rand_elem(a: &Algebra, seed: u64) -> AlgebraElem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<u64> = (0..50).collect();
        a.random_elem(&all, &mut rng)
    }

    #[test]
    fn d1_body_product_vanishes() {
        let a = alg(1, Mode::NonComm);
        let (x, y) = (rand_elem(&a, 1), rand_elem(&a, 2));
        assert!(a.aprime_mul(&x, &y).unwrap().is_zero());
        assert_eq!(x.dimension(), 5);
    }

    #[test]
    fn single_entry_product() {
        let a = alg(2, Mode::NonComm);
        let mut x = AlgebraElem::zero(2);
        let mut y = AlgebraElem::zero(2);
        x.set(1, 2, 2, 7);
        y.set(2, 3, 2, 11);
        let z = a.aprime_mul(&x, &y).unwrap();
        assert_eq!(z.nonzero_entries(), vec![((1, 3, 1), 77)]);
    }

    #[test]
    fn unit_is_two_sided() {
        for mode in [Mode::NonComm, Mode::Comm] {
            let a = alg(3, mode);
            for seed in 0..10 {
                let x = rand_elem(&a, seed);
                let u = AlgebraElem::unit(3);
                assert_eq!(a.mul(&u, &x).unwrap(), x);
                assert_eq!(a.mul(&x, &u).unwrap(), x);
            }
        }
    }

    #[test]
    fn subalgebra_closure() {
        let a = alg(3, Mode::NonComm);
        let mut x = rand_elem(&a, 3);
        let mut y = rand_elem(&a, 4);
        x.set_scalar(0);
        y.set_scalar(0);
        assert_eq!(a.a_mul(&x, &y).unwrap(), a.aprime_mul(&x, &y).unwrap());
    }

    // Sparse search over single-entry elements for a nonassociative triple.
    fn find_witness(a: &Algebra) -> (AlgebraElem, AlgebraElem, AlgebraElem) {
        let d = a.d;
        let mut singles = Vec::new();
        for k in 1..=d {
            for i in 1..=d + 1 {
                for j in 1..=d + 1 {
                    let mut e = AlgebraElem::zero(d);
                    e.set(i, j, k, 1);
                    singles.push(e);
                }
            }
        }
        for x in &singles {
            for y in &singles {
                let xy = a.mul(x, y).unwrap();
                for w in &singles {
                    let l = a.mul(&xy, w).unwrap();
                    let r = a.mul(x, &a.mul(y, w).unwrap()).unwrap();
                    if l != r {
                        return (x.clone(), y.clone(), w.clone());
                    }
                }
            }
        }
        panic!("algebra looks associative");
    }

    #[test]
    fn nonassociativity_witnesses() {
        for mode in [Mode::NonComm, Mode::Comm] {
            let a = alg(3, mode);
            let (x, y, w) = find_witness(&a);
            let l = a.mul(&a.mul(&x, &y).unwrap(), &w).unwrap();
            let r = a.mul(&x, &a.mul(&y, &w).unwrap()).unwrap();
            assert_ne!(l, r);
        }
        // fixed noncommutative fixture: x = e(1,2,3), y = e(2,3,3), w = e(3,4,2)
        let a = alg(3, Mode::NonComm);
        let mut x = AlgebraElem::zero(3);
        let mut y = AlgebraElem::zero(3);
        let mut w = AlgebraElem::zero(3);
        x.set(1, 2, 3, 1);
        y.set(2, 3, 3, 1);
        w.set(3, 4, 2, 1);
        let l = a.mul(&a.mul(&x, &y).unwrap(), &w).unwrap();
        let r = a.mul(&x, &a.mul(&y, &w).unwrap()).unwrap();
        assert_eq!(l.nonzero_entries(), vec![((1, 4, 1), 1)]);
        assert!(r.is_zero());
    }

    #[test]
    fn zi_layout() {
        let a = alg(2, Mode::NonComm);
        let z = a.make_zi(1, |_, _, _| 1);
        assert_eq!(z.nonzero_entries().len(), 4);
        assert!(z.nonzero_entries().iter().all(|((i, j, _), _)| *j == i + 1));
        let a1 = alg(1, Mode::NonComm);
        assert_eq!(a1.make_zi(1, |_, _, _| 5).nonzero_entries(), vec![((1, 2, 1), 5)]);
    }

    #[test]
    fn product_of_zi_entry() {
        let a = alg(2, Mode::NonComm);
        let z = |i: usize, j: usize, k: usize| (100 * i + 10 * j + k) as u64;
        let p = a.aprime_mul(&a.make_zi(1, z), &a.make_zi(2, z)).unwrap();
        assert_eq!(p.get(1, 3, 1), z(1, 1, 2) * z(2, 2, 2));
    }

    #[test]
    fn monomial_circuit_entry() {
        let f = Field::new(1_000_003).unwrap();
        let a = Algebra::new(f, 3, Mode::NonComm).unwrap();
        let mut b = CircuitBuilder::new(Mode::NonComm, f, 3);
        let (x1, x2, x3) = (b.var(1), b.var(2), b.var(3));
        let l = b.mul(x1, x2);
        let out = b.mul(l, x3);
        let c = b.finish(out).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let vals: Vec<u64> = (0..27).map(|_| rng.gen_range(1..f.modulus())).collect();
        let z = |i: usize, j: usize, k: usize| vals[((i - 1) * 3 + (j - 1)) * 3 + (k - 1)];
        let pts: Vec<AlgebraElem> = (1..=3).map(|i| a.make_zi(i, z)).collect();
        let v = a.eval_circuit(&c, &pts).unwrap();
        let code = encode(&Monomial::parse("((1 2) 3)").unwrap());
        let mut want = 1;
        for t in 0..3 {
            want = f.mul(want, z(code.sigma[t], t + 1, code.levels[t]));
        }
        assert_eq!(v.nonzero_entries(), vec![((1, 4, 1), want)]);
    }

    #[test]
    fn commutator_vanishes_only_in_comm_mode() {
        let f = Field::new(1_000_003).unwrap();
        for mode in [Mode::Comm, Mode::NonComm] {
            let mut b = CircuitBuilder::new(mode, f, 2);
            let (x, y) = (b.var(1), b.var(2));
            let xy = b.mul(x, y);
            let yx = b.mul(y, x);
            let out = b.sub(xy, yx);
            let c = b.finish(out).unwrap();
            let a = Algebra::new(f, 2, mode).unwrap();
            let pts = vec![rand_elem(&a, 11), rand_elem(&a, 12)];
            let v = a.eval_circuit(&c, &pts).unwrap();
            assert_eq!(v.is_zero(), mode == Mode::Comm);
        }
    }

    #[test]
    fn random_elem_determinism_and_zero_set() {
        let a = alg(2, Mode::Comm);
        assert!(a.random_elem(&[0], &mut ChaCha8Rng::seed_from_u64(1)).is_zero());
        assert_eq!(rand_elem(&a, 5), rand_elem(&a, 5));
    }

    #[test]
    fn coordinate_histogram_is_uniform() {
        // chi-square over 10^5 draws of one coordinate from a 10-element set
        let a = alg(1, Mode::NonComm);
        let set: Vec<u64> = (0..10).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut counts = [0f64; 10];
        for _ in 0..100_000 {
            counts[a.random_elem(&set, &mut rng).get(1, 2, 1) as usize] += 1.0;
        }
        let chi: f64 = counts.iter().map(|c| (c - 10_000.0).powi(2) / 10_000.0).sum();
        // 9 degrees of freedom, 0.999 quantile is about 27.9
        assert!(chi < 27.9, "chi-square {chi}");
    }

    proptest! {
        #[test]
        fn bilinear_and_commutative(s1 in 0u64..1000, s2 in 0u64..1000, s3 in 0u64..1000) {
            for mode in [Mode::NonComm, Mode::Comm] {
                let a = alg(3, mode);
                let (x, x2, y) = (rand_elem(&a, s1), rand_elem(&a, s2), rand_elem(&a, s3));
                let lhs = a.mul(&a.add(&x, &x2).unwrap(), &y).unwrap();
                let rhs = a.add(&a.mul(&x, &y).unwrap(), &a.mul(&x2, &y).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                if mode == Mode::Comm {
                    prop_assert_eq!(a.mul(&x, &y).unwrap(), a.mul(&y, &x).unwrap());
                }
            }
        }
    }
}
