//! Markov bases: connectivity checks, Markov degree, minimal Markov bases
//! with degree histograms, Markov complexity for a fixed lifting, and
//! indispensability certificates for lifted moves.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use rayon::prelude::*;

use crate::fiber::{enumerate_fiber, Fiber, DEFAULT_CAP};
use crate::graver::{graver_basis_with, is_indispensable, GraverOptions, MoveSet, DEFAULT_BUDGET};
use crate::lattice::{flat_type, lawrence_lift, Configuration, LiftedMove, Move};
use crate::toric::toric_generators;

/// Where candidate fibers for Markov computations come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberSource {
    /// Fibers through the positive parts of Graver basis elements.
    Graver,
    /// Fibers through the positive parts of a generating set of the toric
    /// ideal. Far cheaper than a Graver basis for configurations with many
    /// columns, such as fiber configurations.
    ToricGenerators,
}

#[derive(Debug, Clone, Copy)]
pub struct MarkovOptions {
    pub cap: usize,
    pub budget: usize,
    pub source: FiberSource,
    /// Process fibers of equal degree in reverse lexicographic order.
    pub reverse_ties: bool,
    /// Use lexicographically largest component representatives.
    pub reverse_representatives: bool,
}

impl Default for MarkovOptions {
    fn default() -> Self {
        MarkovOptions {
            cap: DEFAULT_CAP,
            budget: DEFAULT_BUDGET,
            source: FiberSource::ToricGenerators,
            reverse_ties: false,
            reverse_representatives: false,
        }
    }
}

impl MarkovOptions {
    fn graver(&self) -> GraverOptions {
        GraverOptions {
            budget: self.budget,
            ..Default::default()
        }
    }
}

/// Degree of a move mapped to the number of such moves.
pub type DegreeHistogram = BTreeMap<u64, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalMarkovBasis {
    pub basis: MoveSet,
    pub histogram: DegreeHistogram,
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
    components: usize,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            components: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        self.components -= 1;
        true
    }

    pub(crate) fn components(&self) -> usize {
        self.components
    }
}

fn step(x: &[i64], m: &[i64], sign: i64) -> Option<Vec<i64>> {
    x.iter()
        .zip(m)
        .map(|(&a, &b)| {
            let y = a + sign * b;
            (y >= 0).then_some(y)
        })
        .collect()
}

/// Union-find over a fiber with edges `x ~ x ± m` for `m` in `moves`.
fn components_under(elements: &[Vec<i64>], moves: &[Move]) -> Dsu {
    let index: HashMap<&[i64], usize> = elements
        .iter()
        .enumerate()
        .map(|(i, x)| (x.as_slice(), i))
        .collect();
    let mut dsu = Dsu::new(elements.len());
    for (i, x) in elements.iter().enumerate() {
        for m in moves {
            for sign in [1, -1] {
                if let Some(y) = step(x, m.as_slice(), sign) {
                    if let Some(&j) = index.get(y.as_slice()) {
                        dsu.union(i, j);
                    }
                }
            }
        }
        if dsu.components() == 1 {
            break;
        }
    }
    dsu
}

fn distinct_fibers(cfg: &Configuration, moves: &[Move]) -> Result<Vec<Vec<i64>>> {
    let mut seen = BTreeSet::new();
    for g in moves {
        seen.insert(cfg.matrix().mul_vec(&g.positive_part())?);
    }
    Ok(seen.into_iter().collect())
}

/// True iff `moves` connects every fiber through the positive part of an
/// element of `reference`, which must itself be a Markov basis (for example
/// the Graver basis). Conformal decomposition into reference elements
/// reduces connectivity of every fiber to these.
pub fn is_markov_basis(
    cfg: &Configuration,
    moves: &MoveSet,
    reference: &MoveSet,
    cap: usize,
) -> Result<bool> {
    for m in moves {
        if !cfg.matrix().annihilates(m.as_slice()) {
            return Err(Error::PreconditionViolated(format!(
                "{} is not in the kernel",
                m
            )));
        }
    }
    for b in distinct_fibers(cfg, reference.moves())? {
        let f = enumerate_fiber(cfg, &b, cap)?;
        if components_under(&f.elements, moves.moves()).components() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn candidate_moves(cfg: &Configuration, opts: &MarkovOptions) -> Result<Vec<Move>> {
    match opts.source {
        FiberSource::Graver => Ok(graver_basis_with(cfg, opts.graver())?.moves().to_vec()),
        FiberSource::ToricGenerators => toric_generators(cfg, opts.budget),
    }
}

pub fn minimal_markov_basis(cfg: &Configuration) -> Result<MinimalMarkovBasis> {
    minimal_markov_basis_with(cfg, MarkovOptions::default())
}

/// Processes candidate fibers by ascending degree (ties lexicographic in
/// `b`), adding one move per extra connected component under the moves
/// collected so far.
pub fn minimal_markov_basis_with(
    cfg: &Configuration,
    opts: MarkovOptions,
) -> Result<MinimalMarkovBasis> {
    let candidates = candidate_moves(cfg, &opts)?;
    let mut fibers: Vec<(u64, Vec<i64>)> = distinct_fibers(cfg, &candidates)?
        .into_iter()
        .map(|b| {
            let d = cfg.degree_of(&b);
            let d = crate::lattice::rational_to_integer(&d).unwrap_or(0) as u64;
            (d, b)
        })
        .collect();
    fibers.sort_by(|x, y| {
        x.0.cmp(&y.0).then_with(|| {
            if opts.reverse_ties {
                y.1.cmp(&x.1)
            } else {
                x.1.cmp(&y.1)
            }
        })
    });
    let enumerated: Vec<Result<Fiber>> = fibers
        .par_iter()
        .map(|(_, b)| enumerate_fiber(cfg, b, opts.cap))
        .collect();
    let mut basis: Vec<Move> = Vec::new();
    let mut histogram = DegreeHistogram::new();
    for f in enumerated {
        let f = f?;
        let mut dsu = components_under(&f.elements, &basis);
        if dsu.components() == 1 {
            continue;
        }
        // elements are in descending order, so the last member of each
        // component is its lexicographically smallest
        let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..f.len() {
            let r = dsu.find(i);
            let e = reps.entry(r).or_insert(i);
            if opts.reverse_representatives {
                *e = (*e).min(i);
            } else {
                *e = (*e).max(i);
            }
        }
        let mut reps: Vec<usize> = reps.into_values().collect();
        reps.sort_by(|&a, &c| f.elements[a].cmp(&f.elements[c]));
        if opts.reverse_representatives {
            reps.reverse();
        }
        let first = &f.elements[reps[0]];
        for &r in &reps[1..] {
            let m: Vec<i64> = f.elements[r].iter().zip(first).map(|(a, b)| a - b).collect();
            let m = Move::new(m).canonical();
            *histogram.entry(m.degree()).or_insert(0) += 1;
            basis.push(m);
        }
    }
    Ok(MinimalMarkovBasis {
        basis: MoveSet::new(cfg.cols(), basis),
        histogram,
    })
}

pub fn markov_degree(cfg: &Configuration) -> Result<u64> {
    markov_degree_with(cfg, MarkovOptions::default())
}

/// Smallest `m` such that moves of degree at most `m` form a Markov basis.
///
/// With [`FiberSource::Graver`] every Graver fiber is checked directly for
/// the smallest connecting threshold; with
/// [`FiberSource::ToricGenerators`] the value is read off the minimal Markov
/// basis.
pub fn markov_degree_with(cfg: &Configuration, opts: MarkovOptions) -> Result<u64> {
    match opts.source {
        FiberSource::ToricGenerators => Ok(minimal_markov_basis_with(cfg, opts)?
            .histogram
            .keys()
            .copied()
            .max()
            .unwrap_or(0)),
        FiberSource::Graver => {
            let g = graver_basis_with(cfg, opts.graver())?;
            let values: Vec<Result<u64>> = distinct_fibers(cfg, g.moves())?
                .par_iter()
                .map(|b| {
                    let f = enumerate_fiber(cfg, b, opts.cap)?;
                    Ok(bottleneck(&f.elements, |x, y| {
                        x.iter().zip(y).map(|(a, b)| (a - b).max(0) as u64).sum()
                    }))
                })
                .collect();
            values.into_iter().try_fold(0, |w, v| Ok(w.max(v?)))
        }
    }
}

/// Smallest `w` such that edges of weight at most `w` connect all points.
fn bottleneck(points: &[Vec<i64>], weight: impl Fn(&[i64], &[i64]) -> u64) -> u64 {
    if points.len() < 2 {
        return 0;
    }
    let mut edges: Vec<(u64, usize, usize)> = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            edges.push((weight(&points[i], &points[j]), i, j));
        }
    }
    edges.sort_unstable();
    let mut dsu = Dsu::new(points.len());
    for (w, i, j) in edges {
        if dsu.union(i, j) && dsu.components() == 1 {
            return w;
        }
    }
    unreachable!("complete graph is connected")
}

pub fn markov_complexity_at(cfg: &Configuration, copies: usize) -> Result<u64> {
    markov_complexity_at_with(cfg, copies, MarkovOptions::default())
}

/// Smallest `m` such that moves of type at most `m` form a Markov basis of
/// the `copies`-th Lawrence lifting.
pub fn markov_complexity_at_with(
    cfg: &Configuration,
    copies: usize,
    opts: MarkovOptions,
) -> Result<u64> {
    let lift = lawrence_lift(cfg, copies)?;
    let g = graver_basis_with(&lift, opts.graver())?;
    let n = cfg.cols();
    let values: Vec<Result<u64>> = distinct_fibers(&lift, g.moves())?
        .par_iter()
        .map(|b| {
            let f = enumerate_fiber(&lift, b, opts.cap)?;
            Ok(bottleneck(&f.elements, |x, y| {
                let d: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                flat_type(n, &d) as u64
            }))
        })
        .collect();
    values.into_iter().try_fold(0, |w, v| Ok(w.max(v?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMode {
    Exact,
    Forcing,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

/// One closure step: the partial sum at `coordinate` was `partial`, which
/// forced the slices in `added`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcingStep {
    pub coordinate: usize,
    pub partial: i64,
    pub added: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndispensabilityCertificate {
    pub verdict: Verdict,
    /// The mode that actually ran (never `Auto`).
    pub mode: CertifyMode,
    /// A nonempty proper zero-sum set of slice indices, when refuted.
    pub witness: Option<Vec<usize>>,
    /// Closure steps, in forcing mode.
    pub trace: Vec<ForcingStep>,
}

/// Largest slice count handled exhaustively in `Auto` mode.
pub const EXACT_LIMIT: usize = 24;

/// Decides whether a lifted move with indispensable slices is itself
/// indispensable, which holds iff no nonempty proper subset of its slices
/// sums to zero.
pub fn certify_indispensable_lift(
    cfg: &Configuration,
    m: &LiftedMove,
    mode: CertifyMode,
) -> Result<IndispensabilityCertificate> {
    m.check(cfg.matrix())?;
    let mut cache: HashMap<&[i64], bool> = HashMap::new();
    for (k, s) in m.slices().iter().enumerate() {
        if s.iter().all(|&x| x == 0) {
            return Err(Error::PreconditionViolated(format!("slice {} is zero", k)));
        }
        let ok = match cache.get(s.as_slice()) {
            Some(&v) => v,
            None => {
                let v = is_indispensable(cfg, &Move::new(s.clone()))?;
                cache.insert(s.as_slice(), v);
                v
            }
        };
        if !ok {
            return Err(Error::SliceNotIndispensable(k));
        }
    }
    let mode = match mode {
        CertifyMode::Auto if m.num_slices() <= EXACT_LIMIT => CertifyMode::Exact,
        CertifyMode::Auto => CertifyMode::Forcing,
        other => other,
    };
    Ok(match mode {
        CertifyMode::Exact => exact_certificate(m.slices()),
        _ => forcing_certificate(m.slices()),
    })
}

/// Exhaustive search for a zero-sum subset containing slice 0 and missing
/// at least one slice.
pub fn exact_certificate(slices: &[Vec<i64>]) -> IndispensabilityCertificate {
    let n = slices.len();
    let width = slices.first().map_or(0, Vec::len);
    // remaining[k][c]: sum of |slice_l[c]| over l >= k
    let mut remaining = vec![vec![0i64; width]; n + 1];
    for k in (0..n).rev() {
        for c in 0..width {
            remaining[k][c] = remaining[k + 1][c] + slices[k][c].abs();
        }
    }
    let mut chosen = vec![0usize];
    let mut sum = slices.first().cloned().unwrap_or_default();
    let found = n > 1 && search(slices, &remaining, 1, &mut sum, &mut chosen, n);
    IndispensabilityCertificate {
        verdict: if found {
            Verdict::Refuted
        } else {
            Verdict::Certified
        },
        mode: CertifyMode::Exact,
        witness: found.then_some(chosen),
        trace: Vec::new(),
    }
}

fn search(
    slices: &[Vec<i64>],
    remaining: &[Vec<i64>],
    k: usize,
    sum: &mut Vec<i64>,
    chosen: &mut Vec<usize>,
    n: usize,
) -> bool {
    if sum.iter().all(|&x| x == 0) {
        return chosen.len() < n;
    }
    if k == n || sum.iter().zip(&remaining[k]).any(|(s, r)| s.abs() > *r) {
        return false;
    }
    for (s, x) in sum.iter_mut().zip(&slices[k]) {
        *s += x;
    }
    chosen.push(k);
    if search(slices, remaining, k + 1, sum, chosen, n) {
        return true;
    }
    chosen.pop();
    for (s, x) in sum.iter_mut().zip(&slices[k]) {
        *s -= x;
    }
    search(slices, remaining, k + 1, sum, chosen, n)
}

/// Closure argument: any zero-sum subset containing the current set must
/// contain every outside slice that is nonzero at a coordinate where all
/// such slices oppose the partial sum.
pub fn forcing_certificate(slices: &[Vec<i64>]) -> IndispensabilityCertificate {
    let n = slices.len();
    let width = slices.first().map_or(0, Vec::len);
    let mut inside = vec![false; n];
    let mut sum = vec![0i64; width];
    let mut trace = Vec::new();
    if n > 0 {
        inside[0] = true;
        sum.clone_from(&slices[0]);
    }
    let mut count = n.min(1);
    loop {
        if sum.iter().all(|&x| x == 0) {
            let verdict = if count == n {
                Verdict::Certified
            } else {
                Verdict::Refuted
            };
            let witness = (verdict == Verdict::Refuted)
                .then(|| (0..n).filter(|&k| inside[k]).collect());
            return IndispensabilityCertificate {
                verdict,
                mode: CertifyMode::Forcing,
                witness,
                trace,
            };
        }
        let forced = (0..width).find_map(|c| {
            let s = sum[c];
            if s == 0 {
                return None;
            }
            let outside: Vec<usize> = (0..n)
                .filter(|&k| !inside[k] && slices[k][c] != 0)
                .collect();
            let opposed = !outside.is_empty()
                && outside.iter().all(|&k| slices[k][c].signum() == -s.signum());
            opposed.then_some((c, s, outside))
        });
        let Some((c, s, added)) = forced else {
            return IndispensabilityCertificate {
                verdict: Verdict::Inconclusive,
                mode: CertifyMode::Forcing,
                witness: None,
                trace,
            };
        };
        for &k in &added {
            inside[k] = true;
            for (t, x) in sum.iter_mut().zip(&slices[k]) {
                *t += x;
            }
        }
        count += added.len();
        trace.push(ForcingStep {
            coordinate: c,
            partial: s,
            added,
        });
    }
}

/// Searches multisets of `size` slices drawn from `pool` (and negations)
/// for a lifted move that is certified indispensable. Multisets are
/// enumerated in lexicographic order of pool indices; the first certified
/// one is returned.
pub fn find_indispensable_lift(
    cfg: &Configuration,
    pool: &[Move],
    size: usize,
) -> Result<Option<(LiftedMove, IndispensabilityCertificate)>> {
    let signed: Vec<Vec<i64>> = pool
        .iter()
        .flat_map(|m| [m.as_slice().to_vec(), m.negated().into_vec()])
        .collect();
    let n = cfg.cols();
    let mut pick = Vec::with_capacity(size);
    let mut found = None;
    multisets(&signed, size, 0, &mut pick, &mut |idx: &[usize]| {
        let mut sum = vec![0i64; n];
        for &i in idx {
            for (s, x) in sum.iter_mut().zip(&signed[i]) {
                *s += x;
            }
        }
        if sum.iter().any(|&x| x != 0) {
            return Ok(false);
        }
        let lm = LiftedMove::new(n, idx.iter().map(|&i| signed[i].clone()).collect())?;
        let cert = certify_indispensable_lift(cfg, &lm, CertifyMode::Exact)?;
        if cert.verdict == Verdict::Certified {
            found = Some((lm, cert));
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(found)
}

fn multisets(
    items: &[Vec<i64>],
    size: usize,
    from: usize,
    pick: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    if pick.len() == size {
        return visit(pick);
    }
    for i in from..items.len() {
        pick.push(i);
        if multisets(items, size, i, pick, visit)? {
            return Ok(true);
        }
        pick.pop();
    }
    Ok(false)
}
