//! Named fixture circuits and seeded random families used by the test suite.

use rand::Rng;

use crate::circuit::{gen_random_with, Circuit, CircuitBuilder, GenParams, Mode};
use crate::ffield::Field;
use crate::monomial::Monomial;

/// `(x1 x2) x3 - x1 (x2 x3)`.
pub fn associator(mode: Mode, field: Field) -> Circuit {
    let mut b = CircuitBuilder::new(mode, field, 3);
    let (x, y, z) = (b.var(1), b.var(2), b.var(3));
    let xy = b.mul(x, y);
    let l = b.mul(xy, z);
    let yz = b.mul(y, z);
    let r = b.mul(x, yz);
    let out = b.sub(l, r);
    b.finish(out).unwrap()
}

/// `x1 x2 - x2 x1`; zero exactly in the commutative mode.
pub fn commutator(mode: Mode, field: Field) -> Circuit {
    let mut b = CircuitBuilder::new(mode, field, 2);
    let (x, y) = (b.var(1), b.var(2));
    let xy = b.mul(x, y);
    let yx = b.mul(y, x);
    let out = b.sub(xy, yx);
    b.finish(out).unwrap()
}

/// `(x1 x2) (x1 x1) - x1 (x2 (x1 x1))`, the Jordan identity as a polynomial.
pub fn jordan(mode: Mode, field: Field) -> Circuit {
    let mut b = CircuitBuilder::new(mode, field, 2);
    let (a, bb) = (b.var(1), b.var(2));
    let aa = b.mul(a, a);
    let ab = b.mul(a, bb);
    let l = b.mul(ab, aa);
    let baa = b.mul(bb, aa);
    let r = b.mul(a, baa);
    let out = b.sub(l, r);
    b.finish(out).unwrap()
}

/// `(x1 + x2)(x1 + x2) - x1 x1 - x2 x2 - x1 x2 - x2 x1`; zero in both modes.
pub fn square_expansion(mode: Mode, field: Field) -> Circuit {
    let mut b = CircuitBuilder::new(mode, field, 2);
    let (x, y) = (b.var(1), b.var(2));
    let s = b.add(x, y);
    let ss = b.mul(s, s);
    let xx = b.mul(x, x);
    let yy = b.mul(y, y);
    let xy = b.mul(x, y);
    let yx = b.mul(y, x);
    let t = b.sub(ss, xx);
    let t = b.sub(t, yy);
    let t = b.sub(t, xy);
    let out = b.sub(t, yx);
    b.finish(out).unwrap()
}

/// `c + (g - g)` with `g` an independent copy of `pad`: same polynomial,
/// more gates.
pub fn zero_padded(c: &Circuit, pad: &Circuit) -> Circuit {
    let n = c.nvars().max(pad.nvars());
    let mut b = CircuitBuilder::new(c.mode(), *c.field(), n);
    let main = b.embed(c);
    let g1 = b.embed(pad);
    let g2 = b.embed(pad);
    let z = b.sub(g1, g2);
    let out = b.add(main, z);
    b.finish(out).unwrap()
}

/// The constant zero.
pub fn zero_circuit(mode: Mode, field: Field, nvars: usize) -> Circuit {
    let mut b = CircuitBuilder::new(mode, field, nvars.max(1));
    let z = b.constant(0);
    b.finish(z).unwrap()
}

/// `c - c'` where `c'` is `c` with every product's factors swapped. In
/// the commutative mode this is zero; otherwise usually not.
pub fn swap_difference(c: &Circuit) -> Circuit {
    let mut b = CircuitBuilder::new(c.mode(), *c.field(), c.nvars());
    let l = b.embed(c);
    let r = b.embed(&c.with_swapped_products());
    let out = b.sub(l, r);
    b.finish(out).unwrap()
}

/// Named fixtures in both modes, with their expected verdicts.
pub fn fixtures(field: Field) -> Vec<(String, Circuit, bool)> {
    let mut out = Vec::new();
    for mode in [Mode::Comm, Mode::NonComm] {
        let m = mode.as_str();
        let assoc = associator(mode, field);
        let comm = commutator(mode, field);
        let jor = jordan(mode, field);
        out.push((format!("associator-{m}"), assoc.clone(), false));
        out.push((format!("commutator-{m}"), comm.clone(), mode == Mode::Comm));
        out.push((format!("jordan-{m}"), jor.clone(), false));
        out.push((format!("square-{m}"), square_expansion(mode, field), true));
        out.push((format!("associator-padded-{m}"), zero_padded(&assoc, &jor), false));
        out.push((format!("jordan-padded-{m}"), zero_padded(&jor, &assoc), false));
        out.push((format!("commutator-padded-{m}"), zero_padded(&comm, &assoc), mode == Mode::Comm));
        out.push((format!("zero-{m}"), zero_circuit(mode, field, 2), true));
        out.push((format!("zero-padded-{m}"), zero_padded(&zero_circuit(mode, field, 3), &assoc), true));
    }
    out
}

/// Seeded random circuits of the shape used by the agreement checks. Every
/// fourth one is turned into a swap difference so zero instances show up.
pub fn random_family(mode: Mode, field: Field, count: usize, seed: u64) -> Vec<Circuit> {
    (0..count as u64)
        .map(|i| {
            let s = seed.wrapping_mul(1_000_003).wrapping_add(i);
            let nvars = 1 + (i % 4) as usize;
            let base = gen_random_with(&GenParams {
                nvars,
                size: if i % 4 == 3 { 4 + (i % 8) as usize } else { 6 + (i % 20) as usize },
                degree_cap: if i % 4 == 3 { 3 } else { 6 },
                mode,
                seed: s,
                depth_cap: None,
                field,
            });
            if i % 4 == 3 {
                swap_difference(&base)
            } else {
                base
            }
        })
        .collect()
}

/// Random tree with `degree` leaves over `x1..xn`.
pub fn random_tree<R: Rng + ?Sized>(n: usize, degree: usize, rng: &mut R) -> Monomial {
    if degree <= 1 {
        return Monomial::var(rng.gen_range(1..=n));
    }
    let left = rng.gen_range(1..degree);
    let l = random_tree(n, left, rng);
    let r = random_tree(n, degree - left, rng);
    Monomial::product(&l, &r)
}
