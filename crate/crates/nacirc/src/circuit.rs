//! Circuit representation, the `nacirc v1` text format, homogenization,
//! parse-tree enumeration and a seeded random generator.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Field, FieldElem};
use crate::monomial::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Comm,
    NonComm,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Comm => "comm",
            Mode::NonComm => "noncomm",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "comm" => Ok(Mode::Comm),
            "noncomm" => Ok(Mode::NonComm),
            other => Err(Error::BadMode(other.to_string())),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// 1-based input variable.
    Var(usize),
    Const(FieldElem),
    Add(usize, usize),
    Mul(usize, usize),
    /// Scalar multiple of a gate. Not a product gate.
    MulC(usize, FieldElem),
}

impl GateKind {
    pub fn children(&self) -> Vec<usize> {
        match *self {
            GateKind::Var(_) | GateKind::Const(_) => vec![],
            GateKind::Add(l, r) | GateKind::Mul(l, r) => vec![l, r],
            GateKind::MulC(c, _) => vec![c],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub degree: usize,
    pub product_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    mode: Mode,
    field: Field,
    nvars: usize,
    gates: Vec<Gate>,
    output: usize,
}

impl Circuit {
    /// Validates a topologically ordered gate list.
    pub fn new(mode: Mode, field: Field, nvars: usize, kinds: Vec<GateKind>, output: usize) -> Result<Circuit> {
        let mut gates: Vec<Gate> = Vec::with_capacity(kinds.len());
        for (id, kind) in kinds.into_iter().enumerate() {
            for ch in kind.children() {
                if ch == id {
                    return Err(Error::Cycle { gate: id });
                }
                if ch > id {
                    return Err(Error::BadReference { gate: id, child: ch });
                }
            }
            let (degree, product_depth, kind) = match kind {
                GateKind::Var(i) => {
                    if i == 0 || i > nvars {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("gate {id}: variable {i} outside 1..={nvars}"),
                        });
                    }
                    (1, 0, kind)
                }
                GateKind::Const(c) => (0, 0, GateKind::Const(field.reduce(c))),
                GateKind::Add(l, r) => (
                    gates[l].degree.max(gates[r].degree),
                    gates[l].product_depth.max(gates[r].product_depth),
                    kind,
                ),
                GateKind::Mul(l, r) => (
                    gates[l].degree + gates[r].degree,
                    1 + gates[l].product_depth.max(gates[r].product_depth),
                    kind,
                ),
                GateKind::MulC(c, k) => (
                    gates[c].degree,
                    gates[c].product_depth,
                    GateKind::MulC(c, field.reduce(k)),
                ),
            };
            gates.push(Gate {
                kind,
                degree,
                product_depth,
            });
        }
        if output >= gates.len() {
            return Err(Error::BadReference {
                gate: gates.len(),
                child: output,
            });
        }
        Ok(Circuit {
            mode,
            field,
            nvars,
            gates,
            output,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Syntactic degree of the output gate.
    pub fn degree(&self) -> usize {
        self.gates[self.output].degree
    }

    pub fn product_depth(&self) -> usize {
        self.gates[self.output].product_depth
    }

    pub fn kinds(&self) -> Vec<GateKind> {
        self.gates.iter().map(|g| g.kind).collect()
    }

    /// Same gates, reinterpreted in another mode.
    pub fn with_mode(&self, mode: Mode) -> Circuit {
        Circuit { mode, ..self.clone() }
    }

    /// Same circuit over another prime field, constants reduced.
    pub fn with_field(&self, field: Field) -> Circuit {
        Circuit::new(self.mode, field, self.nvars, self.kinds(), self.output).expect("structure unchanged")
    }

    /// Swaps the operands of every product gate.
    pub fn with_swapped_products(&self) -> Circuit {
        let kinds = self
            .kinds()
            .into_iter()
            .map(|k| match k {
                GateKind::Mul(l, r) => GateKind::Mul(r, l),
                k => k,
            })
            .collect();
        Circuit::new(self.mode, self.field, self.nvars, kinds, self.output).expect("structure unchanged")
    }

    /// Per-gate values over the field itself (commutative, associative).
    pub fn eval_field_all(&self, point: &[FieldElem]) -> Vec<FieldElem> {
        let f = &self.field;
        let mut vals: Vec<FieldElem> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g.kind {
                GateKind::Var(i) => f.reduce(point[i - 1]),
                GateKind::Const(c) => c,
                GateKind::Add(l, r) => f.add(vals[l], vals[r]),
                GateKind::Mul(l, r) => f.mul(vals[l], vals[r]),
                GateKind::MulC(c, k) => f.mul(vals[c], k),
            };
            vals.push(v);
        }
        vals
    }

    /// Keeps only the gates reachable from `root`, renumbered in order.
    pub fn subcircuit(&self, root: usize) -> Circuit {
        extract(self.mode, self.field, self.nvars, &self.kinds(), root)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nacirc v1");
        let _ = writeln!(s, "mode {}", self.mode);
        let _ = writeln!(s, "field {}", self.field.modulus());
        let _ = writeln!(s, "nvars {}", self.nvars);
        for (id, g) in self.gates.iter().enumerate() {
            let _ = match g.kind {
                GateKind::Var(i) => writeln!(s, "gate {id} var {i}"),
                GateKind::Const(c) => writeln!(s, "gate {id} const {c}"),
                GateKind::Add(l, r) => writeln!(s, "gate {id} add {l} {r}"),
                GateKind::Mul(l, r) => writeln!(s, "gate {id} mul {l} {r}"),
                GateKind::MulC(c, k) => writeln!(s, "gate {id} mulc {c} {k}"),
            };
        }
        let _ = writeln!(s, "output {}", self.output);
        s
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        parse_text(text, None)
    }

    /// Parses, then replaces the declared modulus by `field`.
    pub fn parse_with_field(text: &str, field: Field) -> Result<Circuit> {
        parse_text(text, Some(field))
    }
}

fn extract(mode: Mode, field: Field, nvars: usize, kinds: &[GateKind], root: usize) -> Circuit {
    let mut keep = vec![false; root + 1];
    keep[root] = true;
    for id in (0..=root).rev() {
        if keep[id] {
            for ch in kinds[id].children() {
                keep[ch] = true;
            }
        }
    }
    let mut remap = vec![usize::MAX; root + 1];
    let mut out = Vec::new();
    for id in 0..=root {
        if !keep[id] {
            continue;
        }
        remap[id] = out.len();
        out.push(match kinds[id] {
            GateKind::Add(l, r) => GateKind::Add(remap[l], remap[r]),
            GateKind::Mul(l, r) => GateKind::Mul(remap[l], remap[r]),
            GateKind::MulC(c, k) => GateKind::MulC(remap[c], k),
            k => k,
        });
    }
    let output = out.len() - 1;
    Circuit::new(mode, field, nvars, out, output).expect("extracted subcircuit is valid")
}

fn parse_text(text: &str, override_field: Option<Field>) -> Result<Circuit> {
    let perr = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut records: Vec<(usize, Vec<&str>)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if !toks.is_empty() {
            records.push((no + 1, toks));
        }
    }
    let mut it = records.into_iter();
    let last_line = text.lines().count().max(1);
    let mut next = |what: &str| it.next().ok_or_else(|| perr(last_line, &format!("missing {what}")));

    let (ln, toks) = next("header")?;
    if toks != ["nacirc", "v1"] {
        return Err(perr(ln, "expected `nacirc v1`"));
    }
    let (ln, toks) = next("mode")?;
    if toks.len() != 2 || toks[0] != "mode" {
        return Err(perr(ln, "expected `mode comm|noncomm`"));
    }
    let mode = Mode::parse(toks[1])?;
    let (ln, toks) = next("field")?;
    if toks.len() != 2 || toks[0] != "field" {
        return Err(perr(ln, "expected `field <p>`"));
    }
    let p: u64 = toks[1].parse().map_err(|_| perr(ln, "bad modulus"))?;
    let declared = Field::new(p).map_err(|_| perr(ln, "modulus is not prime"))?;
    let field = override_field.unwrap_or(declared);
    let (ln, toks) = next("nvars")?;
    if toks.len() != 2 || toks[0] != "nvars" {
        return Err(perr(ln, "expected `nvars <n>`"));
    }
    let nvars: usize = toks[1].parse().map_err(|_| perr(ln, "bad variable count"))?;
    if nvars > MAX_NVARS {
        return Err(perr(ln, "too many variables"));
    }

    let mut kinds: Vec<GateKind> = Vec::new();
    loop {
        let (ln, toks) = next("output")?;
        if toks[0] == "output" {
            if toks.len() != 2 {
                return Err(perr(ln, "expected `output <id>`"));
            }
            let out: usize = toks[1].parse().map_err(|_| perr(ln, "bad output id"))?;
            if out >= kinds.len() {
                return Err(Error::BadReference {
                    gate: kinds.len(),
                    child: out,
                });
            }
            if let Some((ln, _)) = it.next() {
                return Err(perr(ln, "trailing content after output"));
            }
            return Circuit::new(mode, field, nvars, kinds, out).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: ln, msg },
                e => e,
            });
        }
        if toks[0] != "gate" || toks.len() < 3 {
            return Err(perr(ln, "expected a gate record"));
        }
        let id: usize = toks[1].parse().map_err(|_| perr(ln, "bad gate id"))?;
        if id != kinds.len() {
            return Err(perr(ln, &format!("expected gate id {}", kinds.len())));
        }
        let num = |i: usize| -> Result<u64> {
            toks.get(i)
                .ok_or_else(|| perr(ln, "missing operand"))?
                .parse::<u64>()
                .map_err(|_| perr(ln, "bad operand"))
        };
        let arity = match toks[2] {
            "var" | "const" => 1,
            "add" | "mul" | "mulc" => 2,
            _ => return Err(perr(ln, "unknown gate kind")),
        };
        if toks.len() != 3 + arity {
            return Err(perr(ln, "wrong number of operands"));
        }
        let child = |v: u64| -> Result<usize> {
            let c = v as usize;
            if c == id {
                Err(Error::Cycle { gate: id })
            } else if c > id {
                Err(Error::BadReference { gate: id, child: c })
            } else {
                Ok(c)
            }
        };
        let kind = match toks[2] {
            "var" => {
                let i = num(3)? as usize;
                if i == 0 || i > nvars {
                    return Err(perr(ln, "variable index out of range"));
                }
                GateKind::Var(i)
            }
            "const" => GateKind::Const(field.reduce(num(3)?)),
            "add" => GateKind::Add(child(num(3)?)?, child(num(4)?)?),
            "mul" => GateKind::Mul(child(num(3)?)?, child(num(4)?)?),
            _ => GateKind::MulC(child(num(3)?)?, field.reduce(num(4)?)),
        };
        kinds.push(kind);
    }
}

/// Incremental construction of circuits in code.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    mode: Mode,
    field: Field,
    nvars: usize,
    kinds: Vec<GateKind>,
}

impl CircuitBuilder {
    pub fn new(mode: Mode, field: Field, nvars: usize) -> Self {
        CircuitBuilder {
            mode,
            field,
            nvars,
            kinds: Vec::new(),
        }
    }

    fn push(&mut self, k: GateKind) -> usize {
        self.kinds.push(k);
        self.kinds.len() - 1
    }

    pub fn var(&mut self, i: usize) -> usize {
        self.push(GateKind::Var(i))
    }

    pub fn constant(&mut self, c: FieldElem) -> usize {
        let c = self.field.reduce(c);
        self.push(GateKind::Const(c))
    }

    pub fn add(&mut self, l: usize, r: usize) -> usize {
        self.push(GateKind::Add(l, r))
    }

    pub fn mul(&mut self, l: usize, r: usize) -> usize {
        self.push(GateKind::Mul(l, r))
    }

    pub fn mulc(&mut self, g: usize, c: FieldElem) -> usize {
        let c = self.field.reduce(c);
        self.push(GateKind::MulC(g, c))
    }

    /// `l - r` as an add over a negated copy.
    pub fn sub(&mut self, l: usize, r: usize) -> usize {
        let neg = self.mulc(r, self.field.modulus() - 1);
        self.add(l, neg)
    }

    /// Appends a copy of `c`'s gates and returns the id of its output.
    pub fn embed(&mut self, c: &Circuit) -> usize {
        let base = self.kinds.len();
        for k in c.kinds() {
            let k = match k {
                GateKind::Add(l, r) => GateKind::Add(l + base, r + base),
                GateKind::Mul(l, r) => GateKind::Mul(l + base, r + base),
                GateKind::MulC(g, c) => GateKind::MulC(g + base, c),
                k => k,
            };
            self.kinds.push(k);
        }
        base + c.output()
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn finish(self, output: usize) -> Result<Circuit> {
        Circuit::new(self.mode, self.field, self.nvars, self.kinds, output)
    }
}

/// Splits `c` into its homogeneous components of degree `0..=d`.
///
/// The degree-0 part of every gate is a field constant and is folded into
/// scalar gates, so the components of positive degree contain no constant
/// leaves and every gate in them is homogeneous.
pub fn homogenize(c: &Circuit, d: usize) -> Result<Vec<Circuit>> {
    if c.degree() > d {
        return Err(Error::DegreeExceeded {
            degree: c.degree(),
            bound: d,
        });
    }
    let f = *c.field();
    let mut kinds: Vec<GateKind> = Vec::new();
    let mut push = |k: GateKind| {
        kinds.push(k);
        kinds.len() - 1
    };
    let mut scalar: Vec<FieldElem> = Vec::with_capacity(c.size());
    let mut comp: Vec<Vec<Option<usize>>> = Vec::with_capacity(c.size());

    for g in c.gates() {
        let top = g.degree.min(d);
        let mut parts = vec![None; top + 1];
        let s = match g.kind {
            GateKind::Var(i) => {
                parts[1] = Some(push(GateKind::Var(i)));
                0
            }
            GateKind::Const(k) => k,
            GateKind::Add(l, r) => {
                for i in 1..=top {
                    let a = comp[l].get(i).copied().flatten();
                    let b = comp[r].get(i).copied().flatten();
                    parts[i] = match (a, b) {
                        (Some(a), Some(b)) => Some(push(GateKind::Add(a, b))),
                        (x, None) | (None, x) => x,
                    };
                }
                f.add(scalar[l], scalar[r])
            }
            GateKind::MulC(ch, k) => {
                for i in 1..=top {
                    parts[i] = match (comp[ch].get(i).copied().flatten(), k) {
                        (None, _) | (_, 0) => None,
                        (Some(a), 1) => Some(a),
                        (Some(a), k) => Some(push(GateKind::MulC(a, k))),
                    };
                }
                f.mul(scalar[ch], k)
            }
            GateKind::Mul(l, r) => {
                for i in 1..=top {
                    let mut acc: Option<usize> = None;
                    for j in 0..=i {
                        let k = i - j;
                        let term = if j == 0 {
                            scale_part(&mut push, comp[r].get(k).copied().flatten(), scalar[l])
                        } else if k == 0 {
                            scale_part(&mut push, comp[l].get(j).copied().flatten(), scalar[r])
                        } else {
                            match (comp[l].get(j).copied().flatten(), comp[r].get(k).copied().flatten()) {
                                (Some(a), Some(b)) => Some(push(GateKind::Mul(a, b))),
                                _ => None,
                            }
                        };
                        acc = match (acc, term) {
                            (Some(a), Some(b)) => Some(push(GateKind::Add(a, b))),
                            (x, None) | (None, x) => x,
                        };
                    }
                    parts[i] = acc;
                }
                f.mul(scalar[l], scalar[r])
            }
        };
        scalar.push(s);
        comp.push(parts);
    }

    let out = c.output();
    let mut result = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let root = if i == 0 { None } else { comp[out].get(i).copied().flatten() };
        result.push(match root {
            Some(r) => extract(c.mode(), f, c.nvars(), &kinds, r),
            None => {
                let v = if i == 0 { scalar[out] } else { 0 };
                Circuit::new(c.mode(), f, c.nvars(), vec![GateKind::Const(v)], 0)?
            }
        });
    }
    Ok(result)
}

fn scale_part(push: &mut impl FnMut(GateKind) -> usize, part: Option<usize>, k: FieldElem) -> Option<usize> {
    match (part, k) {
        (None, _) | (_, 0) => None,
        (Some(a), 1) => Some(a),
        (Some(a), k) => Some(push(GateKind::MulC(a, k))),
    }
}

/// A reduced parse tree together with its aggregated coefficient. The
/// empty tree (`None`) collects parse trees whose leaves are all constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedTerm {
    pub tree: Option<Monomial>,
    pub coefficient: FieldElem,
}

/// Number of parse trees rooted at each gate, saturating.
pub fn parse_tree_counts(c: &Circuit) -> Vec<u128> {
    let mut counts: Vec<u128> = Vec::with_capacity(c.size());
    for g in c.gates() {
        let n = match g.kind {
            GateKind::Var(_) | GateKind::Const(_) => 1,
            GateKind::Add(l, r) => counts[l].saturating_add(counts[r]),
            GateKind::Mul(l, r) => counts[l].saturating_mul(counts[r]),
            GateKind::MulC(ch, _) => counts[ch],
        };
        counts.push(n);
    }
    counts
}

/// Enumerates every parse tree of the output gate one by one, drops
/// constant leaves and sum gates, and adds up coefficients per reduced tree.
/// In commutative mode reduced trees are identified up to child swaps.
pub fn reduced_parse_trees(c: &Circuit, cap: u128) -> Result<Vec<ReducedTerm>> {
    let count = parse_tree_counts(c)[c.output()];
    if count > cap {
        return Err(Error::CapExceeded { cap });
    }
    let f = *c.field();
    type Trees = Rc<Vec<(Option<Monomial>, FieldElem)>>;
    let mut memo: Vec<Option<Trees>> = vec![None; c.size()];
    fn trees(c: &Circuit, f: &Field, g: usize, memo: &mut Vec<Option<Trees>>) -> Trees {
        if let Some(t) = &memo[g] {
            return t.clone();
        }
        let out: Vec<(Option<Monomial>, FieldElem)> = match c.gates()[g].kind {
            GateKind::Var(i) => vec![(Some(Monomial::var(i)), 1)],
            GateKind::Const(k) => vec![(None, k)],
            GateKind::Add(l, r) => {
                let mut v = (*trees(c, f, l, memo)).clone();
                v.extend(trees(c, f, r, memo).iter().cloned());
                v
            }
            GateKind::MulC(ch, k) => trees(c, f, ch, memo)
                .iter()
                .map(|(t, x)| (t.clone(), f.mul(*x, k)))
                .collect(),
            GateKind::Mul(l, r) => {
                let (a, b) = (trees(c, f, l, memo), trees(c, f, r, memo));
                let mut v = Vec::with_capacity(a.len() * b.len());
                for (ta, ca) in a.iter() {
                    for (tb, cb) in b.iter() {
                        let t = match (ta, tb) {
                            (None, None) => None,
                            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
                            (Some(x), Some(y)) => Some(Monomial::product(x, y)),
                        };
                        v.push((t, f.mul(*ca, *cb)));
                    }
                }
                v
            }
        };
        let rc = Rc::new(out);
        memo[g] = Some(rc.clone());
        rc
    }
    let all = trees(c, &f, c.output(), &mut memo);
    let mut agg: BTreeMap<Option<Monomial>, FieldElem> = BTreeMap::new();
    for (t, x) in all.iter() {
        let key = t.as_ref().map(|m| m.canon(c.mode()));
        let e = agg.entry(key).or_insert(0);
        *e = f.add(*e, *x);
    }
    Ok(agg
        .into_iter()
        .map(|(tree, coefficient)| ReducedTerm { tree, coefficient })
        .collect())
}

/// Largest variable count accepted by the text parser.
pub const MAX_NVARS: usize = 1 << 16;

/// Knobs for [`gen_random_with`].
#[derive(Clone, Debug)]
pub struct GenParams {
    pub nvars: usize,
    pub size: usize,
    pub degree_cap: usize,
    pub mode: Mode,
    pub seed: u64,
    pub depth_cap: Option<usize>,
    pub field: Field,
}

pub fn gen_random(nvars: usize, size: usize, degree_cap: usize, mode: Mode, seed: u64) -> Circuit {
    gen_random_with(&GenParams {
        nvars,
        size,
        degree_cap,
        mode,
        seed,
        depth_cap: None,
        field: Field::default(),
    })
}

/// Seeded random circuit with exactly `size` gates; the last gate is the output.
pub fn gen_random_with(p: &GenParams) -> Circuit {
    assert!(p.size >= 1 && p.nvars >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let f = p.field;
    let depth_cap = p.depth_cap.unwrap_or(usize::MAX);
    let mut kinds: Vec<GateKind> = Vec::with_capacity(p.size);
    let mut deg: Vec<usize> = Vec::with_capacity(p.size);
    let mut depth: Vec<usize> = Vec::with_capacity(p.size);

    let constant = |rng: &mut ChaCha8Rng| -> FieldElem {
        if rng.gen_bool(0.6) {
            f.reduce(rng.gen_range(1..10))
        } else {
            rng.gen_range(0..f.modulus())
        }
    };
    // children skew towards recent gates so the output sees most of the circuit
    let pick = |rng: &mut ChaCha8Rng, id: usize| -> usize {
        if rng.gen_bool(0.5) {
            id - 1 - rng.gen_range(0..id.min(3))
        } else {
            rng.gen_range(0..id)
        }
    };

    for id in 0..p.size {
        let leaf_prob = if id == 0 { 1.0 } else { 0.25 };
        let kind = if rng.gen_bool(leaf_prob) {
            if p.degree_cap == 0 || rng.gen_bool(0.2) {
                GateKind::Const(constant(&mut rng))
            } else {
                GateKind::Var(rng.gen_range(1..=p.nvars))
            }
        } else {
            let roll: f64 = rng.gen();
            let mut chosen = None;
            if roll < 0.45 {
                for _ in 0..8 {
                    let (l, r) = (pick(&mut rng, id), pick(&mut rng, id));
                    if deg[l] + deg[r] <= p.degree_cap && 1 + depth[l].max(depth[r]) <= depth_cap {
                        chosen = Some(GateKind::Mul(l, r));
                        break;
                    }
                }
            } else if roll < 0.6 {
                let ch = pick(&mut rng, id);
                chosen = Some(GateKind::MulC(ch, constant(&mut rng)));
            }
            chosen.unwrap_or_else(|| GateKind::Add(pick(&mut rng, id), pick(&mut rng, id)))
        };
        let (dg, dp) = match kind {
            GateKind::Var(_) => (1, 0),
            GateKind::Const(_) => (0, 0),
            GateKind::Add(l, r) => (deg[l].max(deg[r]), depth[l].max(depth[r])),
            GateKind::Mul(l, r) => (deg[l] + deg[r], 1 + depth[l].max(depth[r])),
            GateKind::MulC(c, _) => (deg[c], depth[c]),
        };
        kinds.push(kind);
        deg.push(dg);
        depth.push(dp);
    }
    Circuit::new(p.mode, f, p.nvars, kinds, p.size - 1).expect("generator emits valid circuits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ONE_VAR: &str = "nacirc v1\nmode comm\nfield 101\nnvars 1\ngate 0 var 1\noutput 0\n";

    #[test]
    fn parse_single_variable() {
        let c = Circuit::parse(ONE_VAR).unwrap();
        assert_eq!(c.size(), 1);
        assert_eq!(c.gates()[0].kind, GateKind::Var(1));
        assert_eq!(c.to_text(), ONE_VAR);
    }

    #[test]
    fn parse_errors() {
        let fwd = "nacirc v1\nmode comm\nfield 101\nnvars 1\ngate 0 var 1\ngate 1 add 0 7\noutput 1\n";
        assert!(matches!(Circuit::parse(fwd), Err(Error::BadReference { gate: 1, child: 7 })));
        let cyc = "nacirc v1\nmode comm\nfield 101\nnvars 1\ngate 0 var 1\ngate 1 mul 1 0\noutput 1\n";
        assert!(matches!(Circuit::parse(cyc), Err(Error::Cycle { gate: 1 })));
        let mode = "nacirc v1\nmode assoc\nfield 101\nnvars 1\ngate 0 var 1\noutput 0\n";
        assert!(matches!(Circuit::parse(mode), Err(Error::BadMode(_))));
        let line = "nacirc v1\nmode comm\nfield 101\nnvars 1\ngate 0 var 2\noutput 0\n";
        assert!(matches!(Circuit::parse(line), Err(Error::Parse { line: 5, .. })));
        let notprime = "nacirc v1\nmode comm\nfield 100\nnvars 1\ngate 0 var 1\noutput 0\n";
        assert!(matches!(Circuit::parse(notprime), Err(Error::Parse { line: 3, .. })));
        assert!(Circuit::parse("").is_err());
        let huge = "nacirc v1\nmode comm\nfield 101\nnvars 99999999999\ngate 0 var 1\noutput 0\n";
        assert!(matches!(Circuit::parse(huge), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let t = "# header\nnacirc v1\n\nmode comm # trailing\nfield 101\nnvars 1\ngate 0 var 1\noutput 0\n";
        assert_eq!(Circuit::parse(t).unwrap().to_text(), ONE_VAR);
    }

    #[test]
    fn random_roundtrip_is_byte_exact() {
        for seed in 0..20 {
            let c = gen_random(3, 50, 6, Mode::NonComm, seed);
            let t = c.to_text();
            assert_eq!(Circuit::parse(&t).unwrap().to_text(), t);
            assert_eq!(gen_random(3, 50, 6, Mode::NonComm, seed).to_text(), t);
        }
    }

    #[test]
    fn generator_respects_caps() {
        for seed in 0..1000 {
            let c = gen_random(3, 15, 4, Mode::Comm, seed);
            assert!(c.gates().iter().all(|g| g.degree <= 4));
            assert!(Circuit::parse(&c.to_text()).is_ok());
        }
        for seed in 0..100 {
            let c = gen_random(2, 15, 1, Mode::Comm, seed);
            assert!(c.gates().iter().all(|g| g.degree <= 1));
            let c = gen_random_with(&GenParams {
                nvars: 2,
                size: 20,
                degree_cap: 6,
                mode: Mode::NonComm,
                seed,
                depth_cap: Some(2),
                field: Field::default(),
            });
            assert!(c.gates().iter().all(|g| g.product_depth <= 2));
        }
    }

    fn figure_circuit() -> Circuit {
        let mut b = CircuitBuilder::new(Mode::NonComm, Field::new(101).unwrap(), 5);
        let x: Vec<usize> = (1..=5).map(|i| b.var(i)).collect();
        let x11 = b.mul(x[0], x[0]);
        let three = b.constant(3);
        let x2p3 = b.add(x[1], three);
        let left = b.add(x11, x2p3);
        let x34 = b.mul(x[2], x[3]);
        let six = b.constant(6);
        let sx5 = b.mul(six, x[4]);
        let right = b.add(x34, sx5);
        let out = b.mul(left, right);
        b.finish(out).unwrap()
    }

    #[test]
    fn figure_reduced_tree() {
        let c = figure_circuit();
        let terms = reduced_parse_trees(&c, 100).unwrap();
        let want = Monomial::parse("((1 1) 5)").unwrap();
        let t = terms.iter().find(|t| t.tree.as_ref() == Some(&want)).unwrap();
        assert_eq!(t.coefficient, 6);
        assert_eq!(terms.len(), 6);
        let lone = terms.iter().find(|t| t.tree == Some(Monomial::var(5))).unwrap();
        assert_eq!(lone.coefficient, 18);
        assert!(matches!(reduced_parse_trees(&c, 5), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn single_product_tree() {
        let mut b = CircuitBuilder::new(Mode::Comm, Field::default(), 2);
        let (x, y) = (b.var(1), b.var(2));
        let m = b.mul(x, y);
        let c = b.finish(m).unwrap();
        let t = reduced_parse_trees(&c, 10).unwrap();
        assert_eq!(
            t,
            vec![ReducedTerm {
                tree: Some(Monomial::parse("(1 2)").unwrap()),
                coefficient: 1
            }]
        );
    }

    #[test]
    fn homogenize_size_and_depth() {
        for seed in 0..200 {
            let c = gen_random(3, 12, 5, if seed % 2 == 0 { Mode::Comm } else { Mode::NonComm }, seed);
            let d = c.degree().max(1);
            let parts = homogenize(&c, d).unwrap();
            assert_eq!(parts.len(), d + 1);
            for (i, h) in parts.iter().enumerate() {
                assert!(h.size() <= d * d * c.size(), "seed {seed}");
                assert!(h.product_depth() <= c.product_depth());
                if i > 0 {
                    assert!(h.gates().iter().all(|g| !matches!(g.kind, GateKind::Const(_)) || h.size() == 1));
                }
            }
        }
        let c = gen_random(2, 5, 3, Mode::Comm, 1);
        assert!(matches!(homogenize(&c, c.degree().saturating_sub(1)), Err(Error::DegreeExceeded { .. })) || c.degree() == 0);
    }

    proptest! {
        #[test]
        fn eval_field_matches_children(seed in 0u64..500) {
            let c = gen_random(2, 10, 4, Mode::Comm, seed);
            let zero = c.eval_field_all(&[0, 0]);
            let one = c.eval_field_all(&[1, 1]);
            prop_assert_eq!(zero.len(), c.size());
            prop_assert_eq!(one.len(), c.size());
        }
    }
}
