//! Prime field arithmetic and the small amount of exact linear algebra the
//! testers need.

use crate::error::{Error, Result};

/// Residue in `[0, p)`. The modulus lives in the [`Field`] context.
pub type FieldElem = u64;

/// 2^61 - 1.
pub const DEFAULT_MODULUS: u64 = 2_305_843_009_213_693_951;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
}

impl Default for Field {
    fn default() -> Self {
        Field { p: DEFAULT_MODULUS }
    }
}

impl Field {
    pub fn new(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> FieldElem {
        v % self.p
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let s = a as u128 + b as u128;
        if s >= self.p as u128 {
            (s - self.p as u128) as u64
        } else {
            s as u64
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a >= b {
            a - b
        } else {
            (a as u128 + self.p as u128 - b as u128) as u64
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let x = a as u128 * b as u128;
        if self.p == DEFAULT_MODULUS {
            let m = DEFAULT_MODULUS as u128;
            let r = (x & m) + (x >> 61);
            let r = (r & m) + (r >> 61);
            let r = r as u64;
            if r >= DEFAULT_MODULUS {
                r - DEFAULT_MODULUS
            } else {
                r
            }
        } else {
            (x % self.p as u128) as u64
        }
    }

    /// `a + b*c`
    #[inline]
    pub fn mul_add(&self, a: FieldElem, b: FieldElem, c: FieldElem) -> FieldElem {
        self.add(a, self.mul(b, c))
    }

    pub fn pow(&self, mut base: FieldElem, mut exp: u128) -> FieldElem {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element (Fermat).
    pub fn inv(&self, a: FieldElem) -> FieldElem {
        assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, (self.p - 2) as u128)
    }

    /// Maps a signed integer into the field.
    pub fn from_i64(&self, v: i64) -> FieldElem {
        (v as i128).rem_euclid(self.p as i128) as u64
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &BASES {
        if n % q == 0 {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<FieldElem>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<FieldElem>], cols: usize) -> Result<Matrix> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.entries[r * self.cols + c]
    }

    /// Rank via full reduced row echelon form of a copy.
    pub fn rank(&self, f: &Field) -> usize {
        let mut m = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
                continue;
            };
            for j in 0..cols {
                m.swap(piv * cols + j, rank * cols + j);
            }
            let inv = f.inv(m[rank * cols + c]);
            for j in 0..cols {
                m[rank * cols + j] = f.mul(m[rank * cols + j], inv);
            }
            for r in 0..rows {
                if r == rank {
                    continue;
                }
                let factor = m[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for j in 0..cols {
                    let t = f.mul(factor, m[rank * cols + j]);
                    m[r * cols + j] = f.sub(m[r * cols + j], t);
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

/// Incrementally built echelon basis; answers span-membership queries.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: Field,
    dim: usize,
    rows: Vec<(usize, Vec<FieldElem>)>,
}

impl EchelonBasis {
    pub fn new(field: Field, dim: usize) -> Self {
        EchelonBasis {
            field,
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (pc, row) in &self.rows {
            let factor = v[*pc];
            if factor == 0 {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                if *r != 0 {
                    *x = f.sub(*x, f.mul(factor, *r));
                }
            }
        }
        v
    }

    fn check(&self, v: &[FieldElem]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[FieldElem]) -> Result<bool> {
        self.check(v)?;
        Ok(self.reduce(v).iter().all(|&x| x == 0))
    }

    /// Adds `v` if it is independent of the current rows. Returns whether it was kept.
    pub fn insert(&mut self, v: &[FieldElem]) -> Result<bool> {
        self.check(v)?;
        let mut r = self.reduce(v);
        let Some(pc) = r.iter().position(|&x| x != 0) else {
            return Ok(false);
        };
        let inv = self.field.inv(r[pc]);
        for x in r.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.rows.push((pc, r));
        Ok(true)
    }
}

/// Indices of a maximal independent subset, chosen greedily left to right.
pub fn greedy_basis(field: &Field, vectors: &[Vec<FieldElem>], dim: usize) -> Result<Vec<usize>> {
    let mut basis = EchelonBasis::new(*field, dim);
    let mut kept = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if basis.insert(v)? {
            kept.push(i);
        }
    }
    Ok(kept)
}
