//! Graver bases by conformal completion, Graver complexity, and the
//! two-element-fiber indispensability test.
//!
//! The default strategy completes coordinate by coordinate: it first
//! completes the projection of the lattice onto the pivot coordinates of its
//! Hermite basis, then adds the remaining coordinates one at a time. Each
//! stage is a completion in the usual sense (critical sums are reduced by
//! conformally smaller elements until nothing new appears); the staging only
//! limits which critical sums can matter. The plain one-stage completion is
//! kept as [`Strategy::Completion`] and serves as a cross-check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::enumerate_fiber;
use crate::lattice::{integer_kernel, Configuration, IntMatrix, Move};

/// Default bound on the number of intermediate vectors.
pub const DEFAULT_BUDGET: usize = 1_000_000;

const WORDS: usize = 4;
/// Largest number of columns the completion engine accepts.
pub const MAX_COLUMNS: usize = 64 * WORDS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Staged completion over growing coordinate sets.
    Staged,
    /// Single completion over all coordinates from a symmetric lattice basis.
    Completion,
}

#[derive(Debug, Clone, Copy)]
pub struct GraverOptions {
    pub budget: usize,
    pub strategy: Strategy,
}

impl Default for GraverOptions {
    fn default() -> Self {
        GraverOptions {
            budget: DEFAULT_BUDGET,
            strategy: Strategy::Staged,
        }
    }
}

/// Sign-canonical moves sorted by degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveSet {
    cols: usize,
    moves: Vec<Move>,
}

impl MoveSet {
    /// Canonicalizes signs, removes duplicates and sorts.
    pub fn new(cols: usize, moves: impl IntoIterator<Item = Move>) -> Self {
        let mut moves: Vec<Move> = moves
            .into_iter()
            .filter(|m| !m.is_zero())
            .map(|m| m.canonical())
            .collect();
        moves.sort_by(|a, b| (a.degree(), a).cmp(&(b.degree(), b)));
        moves.dedup();
        MoveSet { cols, moves }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Count with both signs, as Graver bases are usually reported.
    pub fn signed_len(&self) -> usize {
        2 * self.moves.len()
    }

    /// Membership up to sign.
    pub fn contains(&self, z: &Move) -> bool {
        let c = z.canonical();
        self.moves.contains(&c)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Move> {
        self.moves.iter()
    }

    pub fn max_degree(&self) -> u64 {
        self.moves.iter().map(Move::degree).max().unwrap_or(0)
    }

    pub fn max_one_norm(&self) -> u64 {
        self.moves.iter().map(Move::one_norm).max().unwrap_or(0)
    }

    /// Matrix whose columns are the moves.
    pub fn as_column_matrix(&self) -> IntMatrix {
        let cols: Vec<&[i64]> = self.moves.iter().map(Move::as_slice).collect();
        IntMatrix::from_columns(self.cols, &cols).expect("moves share a length")
    }
}

impl<'a> IntoIterator for &'a MoveSet {
    type Item = &'a Move;
    type IntoIter = std::slice::Iter<'a, Move>;
    fn into_iter(self) -> Self::IntoIter {
        self.moves.iter()
    }
}

pub fn graver_basis(cfg: &Configuration) -> Result<MoveSet> {
    graver_basis_with(cfg, GraverOptions::default())
}

pub fn graver_basis_with(cfg: &Configuration, opts: GraverOptions) -> Result<MoveSet> {
    graver_basis_of_matrix(cfg.matrix(), opts)
}

/// Graver basis of `ker_Z A` for any integer matrix; no grading is needed.
pub fn graver_basis_of_matrix(a: &IntMatrix, opts: GraverOptions) -> Result<MoveSet> {
    let n = a.cols();
    if n > MAX_COLUMNS {
        return Err(Error::PreconditionViolated(format!(
            "at most {} columns supported, got {}",
            MAX_COLUMNS, n
        )));
    }
    let basis = integer_kernel(a)?;
    if basis.is_empty() {
        return Ok(MoveSet::new(n, Vec::new()));
    }
    let basis: Vec<Vec<i64>> = basis.into_iter().map(Move::into_vec).collect();
    let elems = match opts.strategy {
        Strategy::Completion => {
            let all = Bits::first(n);
            let set = complete(basis, all, Mode::Clash, opts.budget)?;
            minimal(set, all)
        }
        Strategy::Staged => {
            let pivots: Vec<usize> = basis
                .iter()
                .map(|v| v.iter().position(|&x| x != 0).expect("nonzero basis row"))
                .collect();
            let mut active = Bits::default();
            for &p in &pivots {
                active.set(p);
            }
            let mut set = minimal(complete(basis, active, Mode::Clash, opts.budget)?, active);
            for c in 0..n {
                if active.get(c) {
                    continue;
                }
                let prev = active;
                active.set(c);
                let vs = set.into_iter().map(|e| e.v).collect();
                set = minimal(complete(vs, active, Mode::Lift { prev, c }, opts.budget)?, active);
            }
            set
        }
    };
    Ok(MoveSet::new(n, elems.into_iter().map(|e| Move::new(e.v))))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Bits([u64; WORDS]);

impl Bits {
    fn first(n: usize) -> Self {
        let mut b = Bits::default();
        for i in 0..n {
            b.set(i);
        }
        b
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn and(self, o: Bits) -> Bits {
        let mut r = self;
        for (a, b) in r.0.iter_mut().zip(o.0) {
            *a &= b;
        }
        r
    }
    fn or(self, o: Bits) -> Bits {
        let mut r = self;
        for (a, b) in r.0.iter_mut().zip(o.0) {
            *a |= b;
        }
        r
    }
    fn subset_of(self, o: Bits) -> bool {
        self.0.iter().zip(o.0).all(|(a, b)| a & !b == 0)
    }
    fn is_empty(self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

#[derive(Debug, Clone)]
struct Elem {
    v: Vec<i64>,
    pos: Bits,
    neg: Bits,
    norm: u64,
}

impl Elem {
    fn new(v: Vec<i64>, active: Bits) -> Self {
        let mut pos = Bits::default();
        let mut neg = Bits::default();
        let mut norm = 0;
        for (i, &x) in v.iter().enumerate() {
            if x > 0 {
                pos.set(i);
            } else if x < 0 {
                neg.set(i);
            }
            if active.get(i) {
                norm += x.unsigned_abs();
            }
        }
        Elem {
            pos: pos.and(active),
            neg: neg.and(active),
            v,
            norm,
        }
    }

    fn is_zero(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    /// Whether `sign * self` is conformally below `s` on the active set.
    fn below(&self, sign: i64, s: &Elem, active: Bits) -> bool {
        let (p, q) = if sign > 0 {
            (self.pos, self.neg)
        } else {
            (self.neg, self.pos)
        };
        if !p.subset_of(s.pos) || !q.subset_of(s.neg) || self.norm > s.norm {
            return false;
        }
        let supp = p.or(q);
        (0..self.v.len())
            .filter(|&i| supp.get(i) && active.get(i))
            .all(|i| self.v[i].unsigned_abs() <= s.v[i].unsigned_abs())
    }
}

#[derive(Debug, Clone, Copy)]
enum Mode {
    /// Any pair with a sign clash on the active set.
    Clash,
    /// Pairs sign-compatible on `prev` with opposite signs at `c`.
    Lift { prev: Bits, c: usize },
}

fn clash(f: &Elem, sign: i64, g: &Elem, mask: Bits) -> bool {
    let (gp, gn) = if sign > 0 { (g.pos, g.neg) } else { (g.neg, g.pos) };
    !f.pos.and(gn).or(f.neg.and(gp)).and(mask).is_empty()
}

fn wanted(mode: Mode, f: &Elem, sign: i64, g: &Elem, active: Bits) -> bool {
    match mode {
        Mode::Clash => clash(f, sign, g, active),
        Mode::Lift { prev, c } => f.v[c] * sign * g.v[c] < 0 && !clash(f, sign, g, prev),
    }
}

fn combine(f: &[i64], sign: i64, g: &[i64]) -> Result<Vec<i64>> {
    f.iter()
        .zip(g)
        .map(|(&a, &b)| {
            b.checked_mul(sign)
                .and_then(|t| a.checked_add(t))
                .ok_or(Error::Overflow("graver completion"))
        })
        .collect()
}

/// Completes a symmetric set (stored as one representative per sign pair).
fn complete(start: Vec<Vec<i64>>, active: Bits, mode: Mode, budget: usize) -> Result<Vec<Elem>> {
    let mut elems: Vec<Elem> = Vec::new();
    let mut queue: BTreeMap<u64, Vec<(u32, u32, i8)>> = BTreeMap::new();
    let push_pairs = |elems: &Vec<Elem>, queue: &mut BTreeMap<u64, Vec<(u32, u32, i8)>>| {
        let i = elems.len() - 1;
        let f = &elems[i];
        for (j, g) in elems[..i].iter().enumerate() {
            for sign in [1i64, -1] {
                if wanted(mode, f, sign, g, active) {
                    queue
                        .entry(f.norm + g.norm)
                        .or_default()
                        .push((i as u32, j as u32, sign as i8));
                }
            }
        }
    };
    for v in start {
        let e = Elem::new(v, active);
        if let Some(r) = normal_form(e, &elems, active)? {
            elems.push(r);
            push_pairs(&elems, &mut queue);
        }
    }
    while let Some((&key, _)) = queue.iter().next() {
        let batch = queue.remove(&key).expect("present");
        for (i, j, sign) in batch {
            let s = combine(&elems[i as usize].v, sign as i64, &elems[j as usize].v)?;
            let e = Elem::new(s, active);
            if let Some(r) = normal_form(e, &elems, active)? {
                if elems.len() >= budget {
                    return Err(Error::BudgetExceeded {
                        what: "graver completion vectors",
                        limit: budget,
                        lower_bound: None,
                    });
                }
                elems.push(r);
                push_pairs(&elems, &mut queue);
            }
        }
    }
    Ok(elems)
}

fn normal_form(mut s: Elem, elems: &[Elem], active: Bits) -> Result<Option<Elem>> {
    'outer: loop {
        if s.is_zero() {
            return Ok(None);
        }
        for g in elems {
            for sign in [1i64, -1] {
                if g.below(sign, &s, active) {
                    let v = combine(&s.v, -sign, &g.v)?;
                    s = Elem::new(v, active);
                    continue 'outer;
                }
            }
        }
        return Ok(Some(s));
    }
}

/// Keeps the conformally minimal elements on the active set.
fn minimal(elems: Vec<Elem>, active: Bits) -> Vec<Elem> {
    let keep: Vec<bool> = (0..elems.len())
        .map(|i| {
            !elems.iter().enumerate().any(|(j, g)| {
                j != i
                    && g.norm < elems[i].norm
                    && (g.below(1, &elems[i], active) || g.below(-1, &elems[i], active))
            })
        })
        .collect();
    let mut out: Vec<Elem> = elems
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect();
    // equal projections mean equal lattice vectors up to sign
    out.sort_by_key(|a| canon(&a.v));
    out.dedup_by(|a, b| canon(&a.v) == canon(&b.v));
    out
}

fn canon(v: &[i64]) -> Vec<i64> {
    Move::new(v.to_vec()).canonical().into_vec()
}

/// Result of a Graver complexity computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraverComplexity {
    pub value: u64,
    pub graver_size: usize,
    pub graver_of_graver_size: usize,
}

/// Maximum 1-norm over the Graver basis of the matrix whose columns are the
/// Graver basis elements of `A`.
pub fn graver_complexity(cfg: &Configuration) -> Result<GraverComplexity> {
    graver_complexity_with(cfg, GraverOptions::default())
}

pub fn graver_complexity_with(cfg: &Configuration, opts: GraverOptions) -> Result<GraverComplexity> {
    let g = graver_basis_with(cfg, opts)?;
    if g.is_empty() {
        return Ok(GraverComplexity {
            value: 0,
            graver_size: 0,
            graver_of_graver_size: 0,
        });
    }
    let gg = graver_basis_of_matrix(&g.as_column_matrix(), opts)?;
    Ok(GraverComplexity {
        value: gg.max_one_norm(),
        graver_size: g.len(),
        graver_of_graver_size: gg.len(),
    })
}

/// True iff the fiber through `z+` is exactly `{z+, z-}`.
pub fn is_indispensable(cfg: &Configuration, z: &Move) -> Result<bool> {
    if z.is_zero() {
        return Err(Error::PreconditionViolated("zero move".into()));
    }
    if !cfg.matrix().annihilates(z.as_slice()) {
        return Err(Error::PreconditionViolated("move is not in the kernel".into()));
    }
    let b = cfg.matrix().mul_vec(&z.positive_part())?;
    match enumerate_fiber(cfg, &b, 2) {
        Ok(f) => Ok(f.len() == 2),
        Err(Error::FiberTooLarge { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}
