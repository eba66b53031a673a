//! Brute-force ground truth for small symplectic and orthogonal groups.
//!
//! A group is tabulated from the matrix of its form, either by a column-wise
//! search over all form-preserving matrices or by closing a few random
//! form-preserving generators. Conjugacy classes come from orbits under the
//! generators; statistics and Wall data are read off class representatives.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::genfun::{centralizer_order_from_data, group_order, Ambient, GroupKind, Statistic, Weighting, WallDatum, WallPart};
use crate::gfq::{Field, FieldCtx};
use crate::linalg;
use crate::polyring::{Factorization, MonicPoly};

/// Largest candidate space `q^{m^2}` for a full scan.
pub const FULL_SCAN_BOUND: u64 = 1 << 26;
/// Largest group order for generator closure.
pub const CLOSURE_BOUND: u64 = 1 << 17;
/// Auto mode scans below this candidate count and closes generators above it.
const CHEAP_SCAN: u64 = 1 << 20;
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;
const MAX_GENERATORS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormFamily {
    Sp,
    Oplus,
    Ominus,
    Oodd,
}

impl FormFamily {
    pub fn kind(self) -> GroupKind {
        match self {
            Self::Sp => GroupKind::Sp,
            Self::Oplus => GroupKind::Oplus,
            Self::Ominus => GroupKind::Ominus,
            Self::Oodd => GroupKind::Oodd,
        }
    }

    pub fn ambient(self) -> Ambient {
        match self {
            Self::Sp => Ambient::Sp,
            _ => Ambient::O,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sp => "sp",
            Self::Oplus => "o+",
            Self::Ominus => "o-",
            Self::Oodd => "o0",
        }
    }
}

impl FromStr for FormFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sp" => Ok(Self::Sp),
            "o+" | "oplus" => Ok(Self::Oplus),
            "o-" | "ominus" => Ok(Self::Ominus),
            "o0" | "oodd" => Ok(Self::Oodd),
            _ => Err(Error::Parse(format!("unknown group family {s:?}"))),
        }
    }
}

/// A nondegenerate form on `F_q^m`, stored as its Gram matrix.
#[derive(Clone, Debug)]
pub struct FormSpec {
    pub family: FormFamily,
    pub m: usize,
    pub field: Field,
    /// Row-major `m × m`.
    pub gram: Vec<u32>,
}

impl FormSpec {
    pub fn new(family: FormFamily, m: usize, q: u64) -> Result<Self> {
        let field = FieldCtx::of_order(q)?;
        let even = m.is_multiple_of(2);
        match family {
            FormFamily::Sp | FormFamily::Oplus | FormFamily::Ominus if !even || m == 0 => {
                return Err(Error::ParamDomain(format!("{} needs positive even dimension, got {m}", family.name())));
            }
            FormFamily::Oodd if even => {
                return Err(Error::ParamDomain(format!("o0 needs odd dimension, got {m}")));
            }
            FormFamily::Sp => {}
            _ if q.is_multiple_of(2) => return Err(Error::OddCharRequired),
            _ => {}
        }
        let one = 1u32;
        let minus_one = field.from_i64(-1);
        let mut gram = vec![0u32; m * m];
        let mut set = |i: usize, j: usize, v: u32| gram[i * m + j] = v;
        let n = m / 2;
        match family {
            FormFamily::Sp => {
                for i in 0..m {
                    set(i, m - 1 - i, if i < n { one } else { minus_one });
                }
            }
            FormFamily::Oplus | FormFamily::Oodd => {
                for i in 0..m {
                    set(i, m - 1 - i, one);
                }
            }
            FormFamily::Ominus => {
                let delta = field.least_nonsquare().ok_or(Error::OddCharRequired)?;
                for i in (0..n - 1).chain(n + 1..m) {
                    set(i, m - 1 - i, one);
                }
                set(n - 1, n - 1, one);
                set(n, n, field.neg(delta));
            }
        }
        Ok(Self { family, m, field, gram })
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    /// `x^T·G·y`.
    fn pairing(&self, x: &[u32], y: &[u32]) -> u32 {
        let f = &self.field;
        let m = self.m;
        let mut acc = 0;
        for (xi, g_row) in x.iter().zip(self.gram.chunks(m)) {
            if *xi == 0 {
                continue;
            }
            let row = g_row.iter().zip(y).fold(0, |r, (&g, &yj)| f.add(r, f.mul(g, yj)));
            acc = f.add(acc, f.mul(*xi, row));
        }
        acc
    }

    /// `A^T·G·A = G`.
    pub fn preserves(&self, a: &[u32]) -> bool {
        let f = &self.field;
        let m = self.m;
        let lhs = linalg::mat_mul(f, m, &linalg::transpose(m, a), &linalg::mat_mul(f, m, &self.gram, a));
        lhs == self.gram
    }

    pub fn expected_order(&self) -> Result<u64> {
        group_order(self.family.kind(), self.m as u64, self.q())?
            .to_u64()
            .ok_or_else(|| Error::BoundExceeded(format!("|{self}| does not fit in 64 bits")))
    }

    fn candidate_space(&self) -> Option<u64> {
        self.q().checked_pow((self.m * self.m) as u32)
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            FormFamily::Sp => "Sp",
            FormFamily::Oplus => "O+",
            FormFamily::Ominus => "O-",
            FormFamily::Oodd => "O0",
        };
        write!(f, "{name}({},{})", self.m, self.q())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuildMethod {
    Auto,
    Scan,
    Closure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub id: usize,
    pub representative: usize,
    pub size: u64,
    pub centralizer: u64,
}

/// Statistics and Wall datum shared by all elements of a class.
#[derive(Clone, Debug)]
pub struct ClassProfile {
    pub separable: bool,
    pub semisimple: bool,
    pub cyclic: bool,
    /// `None` when the group gives no criterion (even-q orthogonal).
    pub regular: Option<bool>,
    pub charpoly: Factorization,
    pub minpoly: MonicPoly,
    pub wall: WallDatum,
}

impl ClassProfile {
    pub fn has(&self, stat: Statistic) -> Option<bool> {
        match stat {
            Statistic::Separable => Some(self.separable),
            Statistic::Semisimple => Some(self.semisimple),
            Statistic::Cyclic => Some(self.cyclic),
            Statistic::Regular => self.regular,
        }
    }

    /// Whether the charpoly is a power of the single factor `t - c`.
    pub fn is_potent(&self, c: i64) -> bool {
        let ctx = self.minpoly.ctx();
        self.charpoly.len() == 1 && self.charpoly.factors[0].0 == MonicPoly::x_minus(ctx, ctx.from_i64(c))
    }

    pub fn flag_string(&self) -> String {
        let mut v = Vec::new();
        for (on, tag) in [
            (self.separable, "separable"),
            (self.semisimple, "semisimple"),
            (self.cyclic, "cyclic"),
            (self.regular == Some(true), "regular"),
        ] {
            if on {
                v.push(tag);
            }
        }
        v.join("+")
    }
}

#[derive(Clone, Debug)]
pub struct ElementProfile {
    pub index: usize,
    pub class_id: usize,
    pub separable: bool,
    pub semisimple: bool,
    pub cyclic: bool,
    pub regular: Option<bool>,
    pub charpoly: Factorization,
    pub minpoly: MonicPoly,
    pub centralizer_size: u64,
    /// `(M, is an M-th power)` per requested `M`.
    pub powers: Vec<(u64, bool)>,
}

/// Complete multiplication-closed list of a group's elements.
pub struct GroupTable {
    spec: FormSpec,
    elements: Vec<Vec<u32>>,
    index: HashMap<u64, usize>,
    generators: Vec<usize>,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
    profiles: OnceLock<Result<Vec<ClassProfile>>>,
    powers: Mutex<HashMap<u64, Arc<Vec<bool>>>>,
}

fn encode(q: u64, a: &[u32]) -> u64 {
    a.iter().rev().fold(0u64, |acc, &v| acc * q + v as u64)
}

fn all_vectors(q: u32, m: usize) -> Vec<Vec<u32>> {
    let total = (q as usize).pow(m as u32);
    (0..total)
        .map(|mut k| {
            (0..m)
                .map(|_| {
                    let d = (k % q as usize) as u32;
                    k /= q as usize;
                    d
                })
                .collect()
        })
        .collect()
}

/// Vectors that can serve as column `i` after the given columns.
fn column_candidates<'v>(spec: &FormSpec, vectors: &'v [Vec<u32>], cols: &[&Vec<u32>]) -> Vec<&'v Vec<u32>> {
    let m = spec.m;
    let i = cols.len();
    vectors
        .iter()
        .filter(|v| {
            spec.pairing(v, v) == spec.gram[i * m + i]
                && cols.iter().enumerate().all(|(j, c)| spec.pairing(c, v) == spec.gram[j * m + i])
        })
        .collect()
}

fn from_columns(m: usize, cols: &[&Vec<u32>]) -> Vec<u32> {
    let mut a = vec![0u32; m * m];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..m {
            a[i * m + j] = c[i];
        }
    }
    a
}

fn scan(spec: &FormSpec) -> Vec<Vec<u32>> {
    fn go<'v>(spec: &FormSpec, vectors: &'v [Vec<u32>], cols: &mut Vec<&'v Vec<u32>>, out: &mut Vec<Vec<u32>>) {
        if cols.len() == spec.m {
            out.push(from_columns(spec.m, cols));
            return;
        }
        for v in column_candidates(spec, vectors, cols) {
            cols.push(v);
            go(spec, vectors, cols, out);
            cols.pop();
        }
    }
    let vectors = all_vectors(spec.field.q(), spec.m);
    let mut out = Vec::new();
    go(spec, &vectors, &mut Vec::new(), &mut out);
    out
}

/// Depth-first search with shuffled candidates; dependent prefixes dead-end and backtrack.
fn random_element(spec: &FormSpec, vectors: &[Vec<u32>], rng: &mut ChaCha8Rng) -> Option<Vec<u32>> {
    fn go<'v>(spec: &FormSpec, vectors: &'v [Vec<u32>], cols: &mut Vec<&'v Vec<u32>>, rng: &mut ChaCha8Rng) -> bool {
        if cols.len() == spec.m {
            return true;
        }
        let mut cands = column_candidates(spec, vectors, cols);
        cands.shuffle(rng);
        for v in cands {
            cols.push(v);
            if go(spec, vectors, cols, rng) {
                return true;
            }
            cols.pop();
        }
        false
    }
    let mut cols = Vec::with_capacity(spec.m);
    go(spec, vectors, &mut cols, rng).then(|| from_columns(spec.m, &cols))
}

fn close(spec: &FormSpec, gens: &[Vec<u32>], limit: u64) -> (Vec<Vec<u32>>, HashMap<u64, usize>) {
    let f = &spec.field;
    let q = spec.q();
    let id = linalg::identity(spec.m);
    let mut index = HashMap::from([(encode(q, &id), 0usize)]);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let y = linalg::mat_mul(f, spec.m, &elements[i], g);
            let key = encode(q, &y);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(key) {
                e.insert(elements.len());
                queue.push_back(elements.len());
                elements.push(y);
                if elements.len() as u64 > limit {
                    return (elements, index);
                }
            }
        }
    }
    (elements, index)
}

pub fn build_group(spec: &FormSpec) -> Result<GroupTable> {
    build_group_with(spec, BuildMethod::Auto, DEFAULT_SEED)
}

pub fn build_group_with(spec: &FormSpec, method: BuildMethod, seed: u64) -> Result<GroupTable> {
    let expected = spec.expected_order()?;
    let space = spec.candidate_space();
    let scannable = space.is_some_and(|s| s <= FULL_SCAN_BOUND);
    let closable = expected <= CLOSURE_BOUND && space.is_some();
    let use_scan = match method {
        BuildMethod::Scan => scannable,
        BuildMethod::Closure => false,
        BuildMethod::Auto => space.is_some_and(|s| s <= CHEAP_SCAN) || (scannable && !closable),
    };
    if !use_scan && !closable {
        return Err(Error::BoundExceeded(format!(
            "{spec}: {expected} elements exceeds the closure bound {CLOSURE_BOUND}"
        )));
    }
    let q = spec.q();
    let vectors = all_vectors(spec.field.q(), spec.m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gens: Vec<Vec<u32>> = Vec::new();
    let (elements, index) = if use_scan {
        let mut elements = scan(spec);
        elements.sort_by_key(|a| encode(q, a));
        let index: HashMap<u64, usize> = elements.iter().enumerate().map(|(i, a)| (encode(q, a), i)).collect();
        if elements.len() as u64 != expected {
            return Err(Error::ClosureIncomplete { got: elements.len(), expected });
        }
        while close(spec, &gens, expected).0.len() as u64 != expected {
            gens.push(elements[rng.gen_range(0..elements.len())].clone());
        }
        (elements, index)
    } else {
        let mut reached = 0;
        loop {
            if gens.len() >= MAX_GENERATORS {
                return Err(Error::ClosureIncomplete { got: reached, expected });
            }
            let g = random_element(spec, &vectors, &mut rng).ok_or(Error::ClosureIncomplete { got: reached, expected })?;
            gens.push(g);
            if gens.len() < 2 {
                continue;
            }
            let (elements, index) = close(spec, &gens, expected);
            reached = elements.len();
            if reached as u64 == expected {
                break (elements, index);
            }
        }
    };
    if let Some(bad) = elements.iter().find(|a| !spec.preserves(a)) {
        return Err(Error::InvalidDatum(format!("{spec}: generated matrix {bad:?} does not preserve the form")));
    }
    let generators = gens.iter().map(|g| index[&encode(q, g)]).collect();
    let mut table = GroupTable {
        spec: spec.clone(),
        elements,
        index,
        generators,
        classes: Vec::new(),
        class_of: Vec::new(),
        profiles: OnceLock::new(),
        powers: Mutex::new(HashMap::new()),
    };
    table.partition_classes();
    Ok(table)
}

impl GroupTable {
    pub fn spec(&self) -> &FormSpec {
        &self.spec
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &[u32] {
        &self.elements[i]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn position(&self, a: &[u32]) -> Option<usize> {
        if a.len() != self.spec.m * self.spec.m || a.iter().any(|&v| v >= self.spec.field.q()) {
            return None;
        }
        self.index.get(&encode(self.spec.q(), a)).copied()
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    fn mul(&self, i: usize, j: usize) -> usize {
        let p = linalg::mat_mul(&self.spec.field, self.spec.m, &self.elements[i], &self.elements[j]);
        self.index[&encode(self.spec.q(), &p)]
    }

    fn inverse(&self, i: usize) -> usize {
        let inv = linalg::inverse(&self.spec.field, self.spec.m, &self.elements[i]).expect("group elements are invertible");
        self.index[&encode(self.spec.q(), &inv)]
    }

    fn partition_classes(&mut self) {
        let n = self.elements.len();
        let conj: Vec<(usize, usize)> = self.generators.iter().map(|&g| (g, self.inverse(g))).collect();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            class_of[start] = id;
            let mut queue = VecDeque::from([start]);
            let mut size = 0u64;
            while let Some(x) = queue.pop_front() {
                size += 1;
                for &(g, gi) in &conj {
                    let y = self.mul(self.mul(g, x), gi);
                    if class_of[y] == usize::MAX {
                        class_of[y] = id;
                        queue.push_back(y);
                    }
                }
            }
            classes.push(ConjugacyClass {
                id,
                representative: start,
                size,
                centralizer: n as u64 / size,
            });
        }
        self.classes = classes;
        self.class_of = class_of;
    }

    /// Counts `g` with `g·x = x·g` directly.
    pub fn brute_centralizer(&self, i: usize) -> u64 {
        let f = &self.spec.field;
        let m = self.spec.m;
        let x = &self.elements[i];
        self.elements
            .par_iter()
            .filter(|g| linalg::mat_mul(f, m, g, x) == linalg::mat_mul(f, m, x, g))
            .count() as u64
    }

    pub fn class_profiles(&self) -> Result<&[ClassProfile]> {
        self.profiles
            .get_or_init(|| {
                self.classes
                    .par_iter()
                    .map(|c| profile_matrix(&self.spec, &self.elements[c.representative]))
                    .collect()
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    /// Flags `A^M` for every `A`, indexed by element.
    pub fn power_image(&self, m: u64) -> Arc<Vec<bool>> {
        if let Some(hit) = self.powers.lock().expect("power cache").get(&m) {
            return Arc::clone(hit);
        }
        let f = &self.spec.field;
        let q = self.spec.q();
        let images: Vec<usize> = self
            .elements
            .par_iter()
            .map(|a| self.index[&encode(q, &linalg::mat_pow(f, self.spec.m, a, m))])
            .collect();
        let mut flags = vec![false; self.elements.len()];
        for i in images {
            flags[i] = true;
        }
        for (i, &flag) in flags.iter().enumerate() {
            let rep = self.classes[self.class_of[i]].representative;
            assert_eq!(flag, flags[rep], "M-power flag varies within a conjugacy class of {}", self.spec);
        }
        let flags = Arc::new(flags);
        self.powers.lock().expect("power cache").insert(m, Arc::clone(&flags));
        flags
    }

    /// Whether each class consists of M-th powers.
    pub fn class_power_flags(&self, m: u64) -> Vec<bool> {
        let image = self.power_image(m);
        self.classes.iter().map(|c| image[c.representative]).collect()
    }

    pub fn classify(&self, a: &[u32], ms: &[u64]) -> Result<ElementProfile> {
        let index = self.position(a).ok_or(Error::NotInGroup)?;
        self.profile_of(index, ms)
    }

    pub fn profile_of(&self, index: usize, ms: &[u64]) -> Result<ElementProfile> {
        let class = &self.classes[self.class_of[index]];
        let p = &self.class_profiles()?[class.id];
        Ok(ElementProfile {
            index,
            class_id: class.id,
            separable: p.separable,
            semisimple: p.semisimple,
            cyclic: p.cyclic,
            regular: p.regular,
            charpoly: p.charpoly.clone(),
            minpoly: p.minpoly.clone(),
            centralizer_size: class.centralizer,
            powers: ms.iter().map(|&m| (m, self.power_image(m)[index])).collect(),
        })
    }

    pub fn empirical(&self, stat: Statistic, m: u64) -> Result<Empirical> {
        let profiles = self.class_profiles()?;
        let flags = self.class_power_flags(m);
        let mut out = Empirical {
            elements: 0,
            order: self.order(),
            classes: 0,
            class_total: self.classes.len() as u64,
        };
        for (c, p) in self.classes.iter().zip(profiles) {
            let has = p.has(stat).ok_or_else(|| {
                Error::ParamDomain(format!("{} is not classified in {}", stat.name(), self.spec))
            })?;
            if has && flags[c.id] {
                out.elements += c.size;
                out.classes += 1;
            }
        }
        Ok(out)
    }

    /// Per-element CSV with one power column per requested `M`.
    pub fn snapshot_csv(&self, ms: &[u64]) -> Result<String> {
        let profiles = self.class_profiles()?;
        let images: Vec<Arc<Vec<bool>>> = ms.iter().map(|&m| self.power_image(m)).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["element", "charpoly", "minpoly", "flags", "centralizer", "class"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(ms.iter().map(|m| format!("power_{m}")));
        let csv_err = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.elements.len() {
            let c = &self.classes[self.class_of[i]];
            let p = &profiles[c.id];
            let mut row = vec![
                i.to_string(),
                p.charpoly.to_string(),
                p.minpoly.to_string(),
                p.flag_string(),
                c.centralizer.to_string(),
                c.id.to_string(),
            ];
            row.extend(images.iter().map(|img| u8::from(img[i]).to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Compares the centralizer formula with the class sizes for every class whose
    /// datum carries no form types
    /// (and, in even characteristic, no nontrivial unipotent part). Returns `(class id, formula, observed)` per class checked.
    pub fn centralizer_checks(&self) -> Result<Vec<(usize, u64, u64)>> {
        let ambient = self.spec.family.ambient();
        let mut out = Vec::new();
        for (c, p) in self.classes.iter().zip(self.class_profiles()?) {
            let even_unipotent = self.spec.q().is_multiple_of(2) && p.wall.parts.iter().any(|w| w.poly.degree() == 1 && w.partition[0] > 1);
            if p.wall.needs_signs(ambient) || even_unipotent {
                continue;
            }
            let formula = centralizer_order_from_data(&p.wall, ambient)?
                .to_u64()
                .ok_or_else(|| Error::BoundExceeded("centralizer order".into()))?;
            out.push((c.id, formula, c.centralizer));
        }
        Ok(out)
    }
}

/// Tallies behind an empirical coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Empirical {
    pub elements: u64,
    pub order: u64,
    pub classes: u64,
    pub class_total: u64,
}

impl Empirical {
    pub fn proportion(&self) -> BigRational {
        BigRational::new(self.elements.into(), self.order.into())
    }

    pub fn class_proportion(&self) -> BigRational {
        BigRational::new(self.classes.into(), self.class_total.into())
    }

    /// The quantity a generating-function coefficient predicts: a proportion for
    /// probability weighting and a class count for class weighting.
    pub fn value(&self, weighting: Weighting) -> BigRational {
        match weighting {
            Weighting::Probability => self.proportion(),
            Weighting::Classes => BigRational::from_integer(self.classes.into()),
        }
    }
}

pub fn empirical_coefficient(spec: &FormSpec, stat: Statistic, m: u64) -> Result<Empirical> {
    build_group(spec)?.empirical(stat, m)
}

/// Jordan partition of the `φ`-primary part from ranks of `φ(A)^j`.
fn primary_partition(f: &FieldCtx, n: usize, a: &[u32], phi: &MonicPoly, mult: u32) -> Vec<u64> {
    let d = phi.degree();
    let b = linalg::poly_at(f, n, phi.coeffs(), a);
    let mut ranks = vec![n];
    let mut power = linalg::identity(n);
    for _ in 0..mult {
        power = linalg::mat_mul(f, n, &power, &b);
        ranks.push(linalg::rank(f, n, n, &power));
    }
    let at_least: Vec<usize> = (1..=mult as usize).map(|j| (ranks[j - 1] - ranks[j]) / d).collect();
    let mut parts = Vec::new();
    for (j, &c) in at_least.iter().enumerate() {
        let next = at_least.get(j + 1).copied().unwrap_or(0);
        parts.extend(std::iter::repeat_n((j + 1) as u64, c - next));
    }
    parts.sort_unstable_by(|x, y| y.cmp(x));
    parts
}

/// Statistics of a single matrix in the group described by `spec`.
pub fn profile_matrix(spec: &FormSpec, a: &[u32]) -> Result<ClassProfile> {
    let f = &spec.field;
    let n = spec.m;
    let cp = MonicPoly::new(f, linalg::charpoly(f, n, a))?;
    let charpoly = cp.factorize()?;
    let mut minpoly = MonicPoly::one(f);
    let mut parts = Vec::new();
    for (phi, mult) in &charpoly.factors {
        let partition = primary_partition(f, n, a, phi, *mult);
        minpoly = minpoly.mul(&phi.pow(partition[0] as u32))?;
        parts.push(WallPart {
            poly: phi.clone(),
            partition,
            signs: BTreeMap::new(),
        });
    }
    let separable = charpoly.factors.iter().all(|(_, m)| *m == 1);
    let semisimple = parts.iter().all(|p| p.partition[0] == 1);
    let cyclic = parts.iter().all(|p| p.partition.len() == 1);
    let pm_one = |phi: &MonicPoly| phi.degree() == 1 && (phi.constant_term() == f.from_i64(1) || phi.constant_term() == f.from_i64(-1));
    let regular = match spec.family {
        FormFamily::Sp => Some(cyclic),
        _ if spec.q().is_multiple_of(2) => None,
        _ => Some(parts.iter().all(|p| {
            let len = p.partition.len();
            if !pm_one(&p.poly) || p.partition.iter().sum::<u64>() % 2 == 1 {
                len == 1
            } else {
                len == 1 || (len == 2 && p.partition[1] == 1)
            }
        })),
    };
    Ok(ClassProfile {
        separable,
        semisimple,
        cyclic,
        regular,
        charpoly,
        minpoly,
        wall: WallDatum { parts },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(family: FormFamily, m: usize, q: u64) -> GroupTable {
        build_group(&FormSpec::new(family, m, q).unwrap()).unwrap()
    }

    #[test]
    fn small_orders() {
        assert_eq!(table(FormFamily::Sp, 2, 2).order(), 6);
        assert_eq!(table(FormFamily::Sp, 2, 3).order(), 24);
        assert_eq!(table(FormFamily::Oodd, 3, 3).order(), 48);
        assert_eq!(table(FormFamily::Oplus, 2, 3).order(), 4);
        assert_eq!(table(FormFamily::Ominus, 2, 3).order(), 8);
    }

    #[test]
    fn sp22_is_s3() {
        let t = table(FormFamily::Sp, 2, 2);
        let mut sizes: Vec<u64> = t.classes().iter().map(|c| c.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
    }

    #[test]
    fn class_equation_and_centralizers() {
        let t = table(FormFamily::Sp, 2, 3);
        assert_eq!(t.classes().iter().map(|c| c.size).sum::<u64>(), 24);
        for c in t.classes() {
            assert_eq!(t.brute_centralizer(c.representative), c.centralizer);
        }
    }

    #[test]
    fn identity_and_minus_identity() {
        let t = table(FormFamily::Sp, 2, 3);
        let id = t.classify(&[1, 0, 0, 1], &[2]).unwrap();
        assert!(id.semisimple && !id.separable && !id.cyclic);
        assert_eq!(id.minpoly.degree(), 1);
        let neg = t.classify(&[2, 0, 0, 2], &[]).unwrap();
        assert!(neg.semisimple && !neg.cyclic);
        assert_eq!(t.classify(&[1, 1, 1, 1], &[]).unwrap_err(), Error::NotInGroup);
    }

    #[test]
    fn order_four_elements_are_separable() {
        let t = table(FormFamily::Sp, 2, 3);
        let f = &t.spec().field;
        for a in t.elements() {
            if linalg::mat_pow(f, 2, a, 4) == linalg::identity(2) && linalg::mat_pow(f, 2, a, 2) != linalg::identity(2) {
                let p = t.classify(a, &[]).unwrap();
                assert!(p.separable && p.cyclic);
                assert_eq!(p.charpoly.product(), MonicPoly::from_ints(f, &[1, 0, 1]).unwrap());
            }
        }
    }

    #[test]
    fn power_image_matches_direct_squares() {
        let t = table(FormFamily::Sp, 2, 3);
        let f = &t.spec().field;
        let squares: std::collections::HashSet<Vec<u32>> =
            t.elements().iter().map(|a| linalg::mat_mul(f, 2, a, a)).collect();
        let img = t.power_image(2);
        assert_eq!(img.iter().filter(|&&b| b).count(), squares.len());
        assert!(t.power_image(1).iter().all(|&b| b));
    }

    #[test]
    fn grams_have_the_right_symmetry() {
        for (fam, m, q) in [(FormFamily::Sp, 4, 3), (FormFamily::Ominus, 4, 5), (FormFamily::Oodd, 5, 3)] {
            let s = FormSpec::new(fam, m, q).unwrap();
            let t = linalg::transpose(m, &s.gram);
            let neg: Vec<u32> = s.gram.iter().map(|&v| s.field.neg(v)).collect();
            assert_eq!(t, if fam == FormFamily::Sp { neg } else { s.gram.clone() });
            assert!(linalg::is_invertible(&s.field, m, &s.gram));
        }
        assert_eq!(FormSpec::new(FormFamily::Oplus, 2, 2).unwrap_err(), Error::OddCharRequired);
    }

    #[test]
    fn quadratic_centralizer_in_sp23() {
        let t = table(FormFamily::Sp, 2, 3);
        let checks = t.centralizer_checks().unwrap();
        assert!(!checks.is_empty());
        for (_, formula, observed) in checks {
            assert_eq!(formula, observed);
        }
        let f = &t.spec().field;
        let quad = MonicPoly::from_ints(f, &[1, 0, 1]).unwrap();
        let profiles = t.class_profiles().unwrap();
        let c = t.classes().iter().find(|c| profiles[c.id].charpoly.product() == quad).unwrap();
        assert_eq!(c.centralizer, 4);
    }

    #[test]
    fn snapshot_has_one_row_per_element() {
        let t = table(FormFamily::Sp, 2, 2);
        let csv = t.snapshot_csv(&[2, 3]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "element,charpoly,minpoly,flags,centralizer,class,power_2,power_3");
    }
}
