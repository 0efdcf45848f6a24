//! Weight assignments on z-variables and the families they come from.

use std::collections::BTreeMap;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::zpoly::ZMonomial;

/// Nonnegative weight per z-variable, indexed by flat index and extended
/// additively to monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightAssignment(pub Vec<u128>);

impl WeightAssignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self, v: u32) -> u128 {
        self.0[v as usize]
    }

    pub fn of(&self, m: &ZMonomial) -> u128 {
        m.vars().iter().map(|&v| self.0[v as usize]).sum()
    }

    pub fn max_var(&self) -> u128 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Largest weight of a monomial with total degree at most `d` and no
    /// variable repeated more than `ind` times.
    pub fn max_monomial(&self, d: usize, ind: usize) -> u128 {
        let mut ws = self.0.clone();
        ws.sort_unstable_by(|a, b| b.cmp(a));
        let mut left = d;
        let mut total: u128 = 0;
        for w in ws {
            if left == 0 {
                break;
            }
            let take = left.min(ind);
            total = total.saturating_add(w.saturating_mul(take as u128));
            left -= take;
        }
        total
    }

    /// `w_1(z_i) = i` for the 1-based flat order of the variables.
    pub fn position(n_z: usize) -> Self {
        WeightAssignment((1..=n_z as u128).collect())
    }
}

/// A finite set of weight assignments such that every set of at most `k`
/// monomials over `n_z` variables with individual degree at most `d` is
/// separated by at least one member.
pub trait WeightFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    /// Member count, saturating.
    fn size(&self, n_z: usize, k: u128, d: usize) -> u128;
    fn members(&self, n_z: usize, k: u128, d: usize) -> Result<Vec<WeightAssignment>>;
    /// True if the single member is injective on every monomial of the
    /// class, so it isolates a basis without being combined with others.
    fn injective(&self) -> bool {
        false
    }
}

/// Weights `(d+1)^(i-1) mod p_t` for the first `N` primes `p_t`.
pub struct PrimeResidues;

/// A single member, the Kronecker weight `(d+1)^(i-1)`, injective on all
/// monomials of individual degree at most `d`.
pub struct ExactKronecker;

/// `N = ceil(n_z * k(k-1)/2 * log2(d+1))`, at least 1.
pub fn family_size(n_z: usize, k: u128, d: usize) -> u128 {
    let pairs = (k as f64) * (k.saturating_sub(1) as f64) / 2.0;
    let n = (n_z as f64 * pairs * ((d + 1) as f64).log2()).ceil();
    if n >= u128::MAX as f64 {
        u128::MAX
    } else {
        (n as u128).max(1)
    }
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut cand = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= cand).all(|&p| cand % p != 0) {
            out.push(cand);
        }
        cand += 1;
    }
    out
}

/// Upper bound on every weight in a family of size `n`: `max(ceil(2 n log2 n), 2)`.
pub fn weight_bound(n: u128) -> u128 {
    let v = (2.0 * n as f64 * (n as f64).log2()).ceil();
    (v as u128).max(2)
}

impl WeightFamily for PrimeResidues {
    fn name(&self) -> &'static str {
        "primes"
    }

    fn describe(&self) -> &'static str {
        "Kronecker code reduced modulo each of the first N primes"
    }

    fn size(&self, n_z: usize, k: u128, d: usize) -> u128 {
        family_size(n_z, k, d)
    }

    fn members(&self, n_z: usize, k: u128, d: usize) -> Result<Vec<WeightAssignment>> {
        let n = family_size(n_z, k, d);
        if n > 1 << 24 {
            return Err(Error::EnumerationCapExceeded {
                needed: n,
                budget: 1 << 24,
            });
        }
        let base = (d + 1) as u128;
        Ok(first_primes(n as usize)
            .into_iter()
            .map(|p| {
                let p = p as u128;
                let mut pw = 1 % p;
                let mut ws = Vec::with_capacity(n_z);
                for _ in 0..n_z {
                    ws.push(pw);
                    pw = pw * base % p;
                }
                WeightAssignment(ws)
            })
            .collect())
    }
}

impl WeightFamily for ExactKronecker {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn describe(&self) -> &'static str {
        "single injective Kronecker weight (d+1)^(i-1)"
    }

    fn size(&self, _n_z: usize, _k: u128, _d: usize) -> u128 {
        1
    }

    fn injective(&self) -> bool {
        true
    }

    fn members(&self, n_z: usize, _k: u128, d: usize) -> Result<Vec<WeightAssignment>> {
        let base = (d + 1) as u128;
        let mut ws = Vec::with_capacity(n_z);
        let mut pw: u128 = 1;
        for i in 0..n_z {
            ws.push(pw);
            if i + 1 < n_z {
                pw = pw.checked_mul(base).ok_or(Error::WeightOverflow)?;
            }
        }
        Ok(vec![WeightAssignment(ws)])
    }
}

static FAMILIES: Lazy<BTreeMap<&'static str, Box<dyn WeightFamily>>> = Lazy::new(|| {
    let mut m: BTreeMap<&'static str, Box<dyn WeightFamily>> = BTreeMap::new();
    for f in [Box::new(PrimeResidues) as Box<dyn WeightFamily>, Box::new(ExactKronecker)] {
        m.insert(f.name(), f);
    }
    m
});

pub fn weight_family(name: &str) -> Result<&'static dyn WeightFamily> {
    FAMILIES.get(name).map(|b| b.as_ref()).ok_or_else(|| Error::Unknown {
        kind: "weight family",
        name: name.to_string(),
    })
}

pub fn weight_family_names() -> Vec<&'static str> {
    FAMILIES.keys().copied().collect()
}

/// The prime-residue family for `(n_z, k, d)`.
pub fn kronecker_family(n_z: usize, k: u128, d: usize) -> Result<Vec<WeightAssignment>> {
    PrimeResidues.members(n_z, k, d)
}

/// True if `w` takes pairwise distinct values on `set`.
pub fn separates(w: &WeightAssignment, set: &[ZMonomial]) -> bool {
    let mut seen = std::collections::HashSet::new();
    set.iter().all(|m| seen.insert(w.of(m)))
}

/// All monomials over `n_z` variables with every exponent at most `d`.
pub fn bounded_monomials(n_z: usize, d: usize) -> Vec<ZMonomial> {
    let mut out = vec![ZMonomial::one()];
    for v in 0..n_z as u32 {
        let mut next = Vec::with_capacity(out.len() * (d + 1));
        for m in &out {
            for e in 0..=d {
                next.push(m.mul(&ZMonomial::from_vars(vec![v; e])));
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sizes_follow_the_formula() {
        assert_eq!(family_size(2, 2, 1), 2);
        assert_eq!(family_size(3, 1, 5), 1);
        assert_eq!(family_size(3, 3, 2), 15);
        assert_eq!(family_size(6, 4, 3), 72);
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn two_variables_are_separated() {
        let fam = kronecker_family(2, 2, 1).unwrap();
        let set = [ZMonomial::var(0), ZMonomial::var(1)];
        assert!(fam.iter().any(|w| separates(w, &set)));
        assert!(fam.iter().all(|w| separates(w, &set[..1])));
    }

    #[test]
    fn weights_stay_below_bound() {
        for (n_z, k, d) in [(2, 2, 1), (3, 3, 2), (6, 4, 3), (4, 10, 2)] {
            let fam = kronecker_family(n_z, k, d).unwrap();
            let bound = weight_bound(fam.len() as u128);
            assert!(fam.iter().all(|w| w.max_var() < bound));
        }
    }

    #[test]
    fn exhaustive_small_separation() {
        let (n_z, k, d) = (3, 3, 2);
        let fam = kronecker_family(n_z, k as u128, d).unwrap();
        let mons = bounded_monomials(n_z, d);
        assert_eq!(mons.len(), 27);
        for a in 0..mons.len() {
            for b in a + 1..mons.len() {
                assert!(fam.iter().any(|w| separates(w, &[mons[a].clone(), mons[b].clone()])));
                for c in b + 1..mons.len() {
                    let set = [mons[a].clone(), mons[b].clone(), mons[c].clone()];
                    assert!(fam.iter().any(|w| separates(w, &set)));
                }
            }
        }
    }

    #[test]
    fn exact_is_injective() {
        let w = &ExactKronecker.members(3, 0, 2).unwrap()[0];
        let mons = bounded_monomials(3, 2);
        assert!(separates(w, &mons));
        assert!(ExactKronecker.members(200, 0, 3).is_err());
    }

    #[test]
    fn sampled_separation() {
        let (n_z, k, d) = (6, 4, 3);
        let fam = kronecker_family(n_z, k as u128, d).unwrap();
        let mons = bounded_monomials(n_z, d);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let set: Vec<ZMonomial> = mons.choose_multiple(&mut rng, k).cloned().collect();
            assert!(fam.iter().any(|w| separates(w, &set)));
        }
    }

    #[test]
    fn max_monomial_respects_individual_degree() {
        let w = WeightAssignment(vec![1, 5, 3]);
        assert_eq!(w.max_monomial(2, 1), 8);
        assert_eq!(w.max_monomial(2, 2), 10);
        assert_eq!(w.max_monomial(5, 1), 9);
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(weight_family_names(), vec!["exact", "primes"]);
        assert!(weight_family("primes").is_ok());
        assert!(matches!(weight_family("nope"), Err(Error::Unknown { .. })));
    }
}
