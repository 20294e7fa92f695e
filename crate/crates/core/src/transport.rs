//! Connecting multisets of transportation tables by moves of degree at most
//! three.
//!
//! A member of a multiset is an `I x J` table stored row-major. All members
//! share the row margins `r` and column margins `c`. The engine drives one
//! member at a time onto a target table with swap operations between two
//! members, passing through improper multisets (one member with a single
//! `-1`), and then rewrites every proper-to-proper segment as a sequence of
//! moves that touch at most three members each.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportTable {
    pub rows: usize,
    pub cols: usize,
    pub g: Vec<i64>,
    pub r: Vec<i64>,
    pub c: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TableClass {
    Proper,
    Improper { cell: (usize, usize) },
    /// Rows whose sum is one above the margin.
    Collision { rows: Vec<usize> },
    Invalid,
}

impl TransportTable {
    pub fn new(rows: usize, cols: usize, g: Vec<i64>, r: Vec<i64>, c: Vec<i64>) -> Result<Self> {
        if g.len() != rows * cols || r.len() != rows || c.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "table of {} entries with {} row and {} column margins for {}x{}",
                g.len(),
                r.len(),
                c.len(),
                rows,
                cols
            )));
        }
        Ok(TransportTable { rows, cols, g, r, c })
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.g[i * self.cols + j]
    }

    pub fn classify(&self) -> TableClass {
        classify_entries(self.rows, self.cols, &self.g, &self.r, &self.c)
    }
}

fn row_sum(g: &[i64], cols: usize, i: usize) -> i64 {
    g[i * cols..(i + 1) * cols].iter().sum()
}

fn col_sum(g: &[i64], rows: usize, cols: usize, j: usize) -> i64 {
    (0..rows).map(|i| g[i * cols + j]).sum()
}

fn classify_entries(rows: usize, cols: usize, g: &[i64], r: &[i64], c: &[i64]) -> TableClass {
    let cols_ok = (0..cols).all(|j| col_sum(g, rows, cols, j) == c[j]);
    if !cols_ok {
        return TableClass::Invalid;
    }
    let rows_exact = (0..rows).all(|i| row_sum(g, cols, i) == r[i]);
    let negatives: Vec<usize> = (0..g.len()).filter(|&k| g[k] < 0).collect();
    if rows_exact {
        return match negatives.as_slice() {
            [] => TableClass::Proper,
            [k] if g[*k] == -1 => TableClass::Improper {
                cell: (k / cols, k % cols),
            },
            _ => TableClass::Invalid,
        };
    }
    if !negatives.is_empty() {
        return TableClass::Invalid;
    }
    let diffs: Vec<i64> = (0..rows).map(|i| row_sum(g, cols, i) - r[i]).collect();
    if diffs.iter().all(|&d| d <= 1) && diffs.contains(&1) {
        TableClass::Collision {
            rows: (0..rows).filter(|&i| diffs[i] == 1).collect(),
        }
    } else {
        TableClass::Invalid
    }
}

/// `a` and `b` as members of a resolvable pair `[k_im, k_pr]`: `im` holds
/// the improper edge, `pr` has a positive entry there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResolvablePair {
    pub im: usize,
    pub pr: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MultisetState {
    Proper,
    Improper { member: usize, cell: (usize, usize) },
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableMultiset {
    pub rows: usize,
    pub cols: usize,
    pub r: Vec<i64>,
    pub c: Vec<i64>,
    pub members: Vec<Vec<i64>>,
}

impl TableMultiset {
    pub fn new(
        rows: usize,
        cols: usize,
        r: Vec<i64>,
        c: Vec<i64>,
        members: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if r.len() != rows || c.len() != cols || members.iter().any(|g| g.len() != rows * cols) {
            return Err(Error::DimensionMismatch("multiset member shape".into()));
        }
        if r.iter().sum::<i64>() != c.iter().sum::<i64>() {
            return Err(Error::PreconditionViolated("row and column margins differ in total".into()));
        }
        Ok(TableMultiset {
            rows,
            cols,
            r,
            c,
            members,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn table(&self, k: usize) -> TransportTable {
        TransportTable {
            rows: self.rows,
            cols: self.cols,
            g: self.members[k].clone(),
            r: self.r.clone(),
            c: self.c.clone(),
        }
    }

    fn at(&self, k: usize, i: usize, j: usize) -> i64 {
        self.members[k][i * self.cols + j]
    }

    pub fn classify_member(&self, k: usize) -> TableClass {
        classify_entries(self.rows, self.cols, &self.members[k], &self.r, &self.c)
    }

    /// Entrywise sum of all members.
    pub fn edge_sums(&self) -> Vec<i64> {
        let mut e = vec![0i64; self.rows * self.cols];
        for g in &self.members {
            for (x, y) in e.iter_mut().zip(g) {
                *x += y;
            }
        }
        e
    }

    pub fn state(&self) -> MultisetState {
        let mut improper = None;
        for k in 0..self.len() {
            match self.classify_member(k) {
                TableClass::Proper => {}
                TableClass::Improper { cell } if improper.is_none() => improper = Some((k, cell)),
                _ => return MultisetState::Other,
            }
        }
        match improper {
            None => MultisetState::Proper,
            Some((member, cell)) => {
                if self.edge_sums().iter().any(|&x| x < 0) {
                    MultisetState::Other
                } else {
                    MultisetState::Improper { member, cell }
                }
            }
        }
    }

    pub fn is_proper(&self) -> bool {
        self.state() == MultisetState::Proper
    }

    /// All resolvable pairs of an improper multiset, lowest partner first.
    pub fn resolvable_pairs(&self) -> Vec<ResolvablePair> {
        match self.state() {
            MultisetState::Improper {
                member,
                cell: (i, j),
            } => (0..self.len())
                .filter(|&k| k != member && self.at(k, i, j) > 0)
                .map(|pr| ResolvablePair { im: member, pr })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn apply(&mut self, op: &SwapOperation) {
        for (x, z) in self.members[op.k1].iter_mut().zip(&op.z1) {
            *x += z;
        }
        for (x, z) in self.members[op.k2].iter_mut().zip(&op.z2) {
            *x += z;
        }
    }

    fn check_member(&self, k: usize) -> Result<()> {
        if k >= self.len() {
            return Err(Error::PreconditionViolated(format!(
                "member {} out of range for {} members",
                k,
                self.len()
            )));
        }
        Ok(())
    }
}

/// `k1` hands one unit of `(from, col)` to `k2` and receives one unit of
/// `(to, col)` from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ElementarySwap {
    pub from: usize,
    pub to: usize,
    pub col: usize,
}

/// A batch of elementary swaps between members `k1` and `k2`, with the
/// aggregated corrections `z1 = -z2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapOperation {
    pub k1: usize,
    pub k2: usize,
    pub swaps: Vec<ElementarySwap>,
    pub z1: Vec<i64>,
    pub z2: Vec<i64>,
}

impl SwapOperation {
    pub fn empty(rows: usize, cols: usize, k1: usize, k2: usize) -> Self {
        SwapOperation {
            k1,
            k2,
            swaps: Vec::new(),
            z1: vec![0; rows * cols],
            z2: vec![0; rows * cols],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.z1.iter().all(|&x| x == 0)
    }

    fn push(&mut self, cols: usize, s: ElementarySwap) {
        self.z1[s.from * cols + s.col] -= 1;
        self.z1[s.to * cols + s.col] += 1;
        self.z2[s.from * cols + s.col] += 1;
        self.z2[s.to * cols + s.col] -= 1;
        self.swaps.push(s);
    }

    /// Appends `other`, which must act on the same two members.
    fn extend(&mut self, cols: usize, other: &SwapOperation) {
        for &s in &other.swaps {
            if other.k1 == self.k1 {
                self.push(cols, s);
            } else {
                self.push(
                    cols,
                    ElementarySwap {
                        from: s.to,
                        to: s.from,
                        col: s.col,
                    },
                );
            }
        }
    }
}

fn single_swap(m: &TableMultiset, k1: usize, k2: usize, s: ElementarySwap) -> SwapOperation {
    let mut op = SwapOperation::empty(m.rows, m.cols, k1, k2);
    op.push(m.cols, s);
    op
}

fn collision_excess(m: &TableMultiset, g: &[i64]) -> Vec<i64> {
    (0..m.rows).map(|i| row_sum(g, m.cols, i) - m.r[i]).collect()
}

/// Resolves all collisions of members `k` and `kp` by one swap operation,
/// following alternating paths in the symbol matrix of the two members.
pub fn resolve_collisions_pair(m: &TableMultiset, k: usize, kp: usize) -> Result<SwapOperation> {
    m.check_member(k)?;
    m.check_member(kp)?;
    if k == kp {
        return Err(Error::PreconditionViolated("collision pair needs two members".into()));
    }
    for &x in &[k, kp] {
        match m.classify_member(x) {
            TableClass::Proper | TableClass::Collision { .. } => {}
            other => {
                return Err(Error::PreconditionViolated(format!(
                    "member {} is {:?}, expected proper or colliding",
                    x, other
                )))
            }
        }
    }
    for i in 0..m.rows {
        if row_sum(&m.members[k], m.cols, i) + row_sum(&m.members[kp], m.cols, i) != 2 * m.r[i] {
            return Err(Error::PreconditionViolated(format!(
                "row {} of the two members does not total twice its margin",
                i
            )));
        }
    }
    let mut a = m.members[k].clone();
    let mut b = m.members[kp].clone();
    let mut op = SwapOperation::empty(m.rows, m.cols, k, kp);
    while let Some(start) = collision_excess(m, &a).iter().position(|&d| d > 0) {
        let path = symbol_path(m.rows, m.cols, &a, &b, start).ok_or_else(|| {
            Error::InternalInvariant("no alternating path in the symbol matrix".into())
        })?;
        for s in path {
            a[s.from * m.cols + s.col] -= 1;
            a[s.to * m.cols + s.col] += 1;
            b[s.from * m.cols + s.col] += 1;
            b[s.to * m.cols + s.col] -= 1;
            op.push(m.cols, s);
        }
    }
    Ok(op)
}

/// One path of the symbol graph starting at a surplus copy of `start` in
/// `a`, as elementary swaps in which `a` hands over its symbol and takes the
/// symbol of `b` at the same position.
fn symbol_path(rows: usize, cols: usize, a: &[i64], b: &[i64], start: usize) -> Option<Vec<ElementarySwap>> {
    // Positions: per column, the cancelled-out symbols of a and b in row order.
    let mut pos_a: Vec<usize> = Vec::new();
    let mut pos_b: Vec<usize> = Vec::new();
    let mut pos_col: Vec<usize> = Vec::new();
    for j in 0..cols {
        let mut sa = Vec::new();
        let mut sb = Vec::new();
        for i in 0..rows {
            let x = a[i * cols + j];
            let y = b[i * cols + j];
            let common = x.min(y).max(0);
            for _ in common..x {
                sa.push(i);
            }
            for _ in common..y {
                sb.push(i);
            }
        }
        debug_assert_eq!(sa.len(), sb.len());
        for (p, q) in sa.into_iter().zip(sb) {
            pos_a.push(p);
            pos_b.push(q);
            pos_col.push(j);
        }
    }
    let s = pos_a.len();
    // Label each copy of a symbol by its occurrence number.
    let label = |syms: &[usize]| -> Vec<usize> {
        let mut seen = vec![0usize; rows];
        syms.iter()
            .map(|&x| {
                seen[x] += 1;
                seen[x] - 1
            })
            .collect()
    };
    let la = label(&pos_a);
    let lb = label(&pos_b);
    let count_b = |x: usize| pos_b.iter().filter(|&&y| y == x).count();
    let mut where_a = std::collections::HashMap::new();
    for p in 0..s {
        where_a.insert((pos_a[p], la[p]), p);
    }
    // A copy of `start` in `a` with no partner in `b` begins a path.
    let gamma = (0..s).find(|&p| pos_a[p] == start && la[p] >= count_b(start))?;
    let mut out = Vec::new();
    let mut p = gamma;
    let mut visited = vec![false; s];
    loop {
        if visited[p] {
            return None;
        }
        visited[p] = true;
        out.push(ElementarySwap {
            from: pos_a[p],
            to: pos_b[p],
            col: pos_col[p],
        });
        match where_a.get(&(pos_b[p], lb[p])) {
            Some(&next) => p = next,
            None => return Some(out),
        }
    }
}

/// Moves row surpluses of `a` onto its row deficits along shortest row
/// paths, never letting `a` give up a locked cell and never letting `b` give
/// up a forbidden cell. Used as the collision resolution inside an improper
/// multiset and as an independent route in tests.
fn row_path_resolution(
    rows: usize,
    cols: usize,
    r: &[i64],
    a: &mut [i64],
    b: &mut [i64],
    locked_a: &[(usize, usize)],
    forbidden_b: &[(usize, usize)],
) -> Option<Vec<ElementarySwap>> {
    let mut out = Vec::new();
    loop {
        let excess: Vec<i64> = (0..rows).map(|i| row_sum(a, cols, i) - r[i]).collect();
        let Some(start) = excess.iter().position(|&d| d > 0) else {
            return Some(out);
        };
        let avail_a = |i: usize, j: usize, a: &[i64]| {
            let lock = locked_a.iter().filter(|&&c| c == (i, j)).count() as i64;
            a[i * cols + j] - lock > 0
        };
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; rows];
        let mut seen = vec![false; rows];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut end = None;
        while let Some(x) = queue.pop_front() {
            if excess[x] < 0 {
                end = Some(x);
                break;
            }
            for j in 0..cols {
                if !avail_a(x, j, a) {
                    continue;
                }
                for y in 0..rows {
                    if !seen[y] && b[y * cols + j] > 0 && !forbidden_b.contains(&(y, j)) {
                        seen[y] = true;
                        prev[y] = Some((x, j));
                        queue.push_back(y);
                    }
                }
            }
        }
        let mut y = end?;
        let mut path = Vec::new();
        while let Some((x, j)) = prev[y] {
            path.push(ElementarySwap { from: x, to: y, col: j });
            y = x;
        }
        path.reverse();
        for s in path {
            a[s.from * cols + s.col] -= 1;
            a[s.to * cols + s.col] += 1;
            b[s.from * cols + s.col] += 1;
            b[s.to * cols + s.col] -= 1;
            out.push(s);
        }
    }
}

/// Same contract as [`resolve_collisions_pair`], computed by shortest row
/// paths instead of the symbol matrix.
pub fn resolve_collisions_by_row_paths(m: &TableMultiset, k: usize, kp: usize) -> Result<SwapOperation> {
    m.check_member(k)?;
    m.check_member(kp)?;
    let mut a = m.members[k].clone();
    let mut b = m.members[kp].clone();
    let swaps = row_path_resolution(m.rows, m.cols, &m.r, &mut a, &mut b, &[], &[])
        .ok_or_else(|| Error::PreconditionViolated("collisions cannot be resolved".into()))?;
    let mut op = SwapOperation::empty(m.rows, m.cols, k, kp);
    for s in swaps {
        op.push(m.cols, s);
    }
    Ok(op)
}

fn resolve_with_partner(m: &TableMultiset, pair: ResolvablePair) -> Result<SwapOperation> {
    let MultisetState::Improper { member, cell: (i, j) } = m.state() else {
        return Err(Error::PreconditionViolated("multiset is not improper".into()));
    };
    let (k, kp) = (pair.im, pair.pr);
    if k != member || kp == k || m.at(kp, i, j) <= 0 {
        return Err(Error::PreconditionViolated(format!(
            "[{}, {}] is not a resolvable pair",
            k, kp
        )));
    }
    let ip = (0..m.rows)
        .find(|&x| x != i && m.at(k, x, j) > 0)
        .ok_or_else(|| Error::InternalInvariant("improper column has no positive entry".into()))?;
    // k takes (i, j) from kp and hands over (i', j)
    let mut op = single_swap(m, k, kp, ElementarySwap { from: ip, to: i, col: j });
    let mut after = m.clone();
    after.apply(&op);
    let fix = resolve_collisions_pair(&after, k, kp)?;
    op.extend(m.cols, &fix);
    Ok(op)
}

/// Turns an improper multiset proper by one swap operation between the
/// improper member and the lowest-index member with a positive entry on the
/// improper edge.
pub fn resolve_improper(m: &TableMultiset) -> Result<(SwapOperation, ResolvablePair)> {
    let pair = *m
        .resolvable_pairs()
        .first()
        .ok_or_else(|| Error::PreconditionViolated("multiset is not improper".into()))?;
    Ok((resolve_with_partner(m, pair)?, pair))
}

/// Size of differences `sum |g - h|`.
pub fn difference_size(g: &[i64], h: &[i64]) -> i64 {
    g.iter().zip(h).map(|(a, b)| (a - b).abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    NoOp,
    Proper,
    Improper { pair: ResolvablePair },
}

fn outcome_of(m: &TableMultiset, pr: usize) -> Result<Outcome> {
    match m.state() {
        MultisetState::Proper => Ok(Outcome::Proper),
        MultisetState::Improper { member, .. } => {
            let pair = ResolvablePair { im: member, pr };
            if m.resolvable_pairs().contains(&pair) {
                Ok(Outcome::Improper { pair })
            } else {
                Err(Error::InternalInvariant(format!(
                    "[{}, {}] is not resolvable after the step",
                    member, pr
                )))
            }
        }
        MultisetState::Other => Err(Error::InternalInvariant(
            "step left neither a proper nor an improper multiset".into(),
        )),
    }
}

fn check_target(m: &TableMultiset, target: &[i64]) -> Result<()> {
    let t = TransportTable {
        rows: m.rows,
        cols: m.cols,
        g: target.to_vec(),
        r: m.r.clone(),
        c: m.c.clone(),
    };
    if t.classify() != TableClass::Proper {
        return Err(Error::PreconditionViolated("target is not a proper table".into()));
    }
    Ok(())
}

/// One swap operation among proper members that strictly decreases the
/// size of differences between member `k` and `target`. Donors are taken
/// from `active`.
pub fn reduce_toward_target(
    m: &TableMultiset,
    k: usize,
    target: &[i64],
    active: &[usize],
) -> Result<(Option<SwapOperation>, Outcome)> {
    m.check_member(k)?;
    check_target(m, target)?;
    if !m.is_proper() {
        return Err(Error::PreconditionViolated("multiset is not proper".into()));
    }
    let cols = m.cols;
    let g = &m.members[k];
    if g.as_slice() == target {
        return Ok((None, Outcome::NoOp));
    }
    let below = |i: usize, j: usize| g[i * cols + j] < target[i * cols + j];
    let above = |i: usize, j: usize| g[i * cols + j] > target[i * cols + j];
    let (i, j, jp) = (0..m.rows)
        .flat_map(|i| (0..cols).flat_map(move |j| (0..cols).map(move |jp| (i, j, jp))))
        .find(|&(i, j, jp)| below(i, j) && above(i, jp))
        .ok_or_else(|| Error::InternalInvariant("member and target have different margins".into()))?;
    let kpp = active
        .iter()
        .copied()
        .find(|&x| x != k && m.at(x, i, j) > 0)
        .ok_or_else(|| Error::PreconditionViolated("no donor for the deficient cell".into()))?;
    let ip = (0..m.rows)
        .find(|&x| x != i && above(x, j))
        .ok_or_else(|| Error::InternalInvariant("column of the target has a different sum".into()))?;
    let mut op = single_swap(m, k, kpp, ElementarySwap { from: ip, to: i, col: j });
    op.push(cols, ElementarySwap { from: i, to: ip, col: jp });
    let mut after = m.clone();
    after.apply(&op);
    let outcome = outcome_of(&after, k)?;
    Ok((Some(op), outcome))
}

/// At most two swap operations on an improper multiset with resolvable pair
/// `pair`, either decreasing the size of differences between `pair.pr` and
/// `target` or making the multiset proper with `pair.pr` untouched.
pub fn improper_step(
    m: &TableMultiset,
    pair: ResolvablePair,
    target: &[i64],
    active: &[usize],
) -> Result<(Vec<SwapOperation>, Outcome)> {
    check_target(m, target)?;
    let MultisetState::Improper { member, cell: (i, j) } = m.state() else {
        return Err(Error::PreconditionViolated("multiset is not improper".into()));
    };
    if !m.resolvable_pairs().contains(&pair) || pair.im != member {
        return Err(Error::PreconditionViolated(format!(
            "[{}, {}] is not a resolvable pair",
            pair.im, pair.pr
        )));
    }
    let cols = m.cols;
    let (im, pr) = (pair.im, pair.pr);
    let t = |i: usize, j: usize| target[i * cols + j];

    if t(i, j) >= m.at(pr, i, j) {
        let third = active
            .iter()
            .copied()
            .find(|&x| x != im && x != pr && m.at(x, i, j) > 0)
            .ok_or_else(|| Error::PreconditionViolated("no third donor on the improper edge".into()))?;
        let op = resolve_with_partner(m, ResolvablePair { im, pr: third })?;
        let mut after = m.clone();
        after.apply(&op);
        return Ok((vec![op], outcome_of(&after, pr)?));
    }

    let jp = (0..cols)
        .find(|&x| t(i, x) > m.at(pr, i, x))
        .ok_or_else(|| Error::InternalInvariant("row sums of target and member differ".into()))?;
    let ip = (0..m.rows)
        .find(|&x| m.at(pr, x, jp) > t(x, jp))
        .ok_or_else(|| Error::InternalInvariant("column sums of target and member differ".into()))?;

    let mut ops = Vec::new();
    let mut cur = m.clone();
    if cur.at(im, i, jp) == 0 {
        let kpp = active
            .iter()
            .copied()
            .find(|&x| x != im && x != pr && cur.at(x, i, jp) > 0)
            .ok_or_else(|| Error::PreconditionViolated("no donor for the pre-swap".into()))?;
        let ipp = (0..m.rows)
            .find(|&x| x != i && cur.at(im, x, jp) > 0)
            .ok_or_else(|| Error::InternalInvariant("improper member has an empty column".into()))?;
        // kpp hands (i, j') to im and receives (i'', j')
        let mut pre = single_swap(&cur, kpp, im, ElementarySwap { from: i, to: ipp, col: jp });
        let mut a = cur.members[im].clone();
        let mut b = cur.members[kpp].clone();
        for (x, z) in a.iter_mut().zip(&pre.z2) {
            *x += z;
        }
        for (x, z) in b.iter_mut().zip(&pre.z1) {
            *x += z;
        }
        let fix = row_path_resolution(m.rows, cols, &m.r, &mut a, &mut b, &[(i, jp)], &[(i, j)])
            .ok_or_else(|| Error::InternalInvariant("pre-swap collisions unresolved".into()))?;
        for s in fix {
            pre.push(
                cols,
                ElementarySwap {
                    from: s.to,
                    to: s.from,
                    col: s.col,
                },
            );
        }
        cur.apply(&pre);
        if cur.state()
            != (MultisetState::Improper {
                member: im,
                cell: (i, j),
            })
            || cur.at(im, i, jp) <= 0
        {
            return Err(Error::InternalInvariant("pre-swap broke the improper edge".into()));
        }
        ops.push(pre);
    }
    // pr hands (i, j) to im and takes (i', j); im hands (i, j') to pr and
    // takes (i', j')
    let mut op = single_swap(&cur, pr, im, ElementarySwap { from: i, to: ip, col: j });
    op.push(cols, ElementarySwap { from: ip, to: i, col: jp });
    cur.apply(&op);
    ops.push(op);
    Ok((ops, outcome_of(&cur, pr)?))
}

/// One step of a move script: the listed members are replaced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScriptStep {
    pub members: Vec<usize>,
    pub before: Vec<Vec<i64>>,
    pub after: Vec<Vec<i64>>,
}

impl ScriptStep {
    pub fn degree(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveScript {
    pub rows: usize,
    pub cols: usize,
    pub steps: Vec<ScriptStep>,
    /// Number of swap operations in the uncompacted run.
    pub swap_operations: usize,
}

impl MoveScript {
    pub fn max_degree(&self) -> usize {
        self.steps.iter().map(ScriptStep::degree).max().unwrap_or(0)
    }

    /// One line per step: `DEG k | members | before | after`.
    pub fn to_text(&self) -> String {
        let fmt = |ts: &[Vec<i64>]| {
            ts.iter()
                .map(|t| {
                    t.chunks(self.cols.max(1))
                        .map(|row| {
                            row.iter()
                                .map(|x| x.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        })
                        .collect::<Vec<_>>()
                        .join("/")
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!(
                "DEG {} | {} | {} | {}\n",
                s.degree(),
                s.members
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                fmt(&s.before),
                fmt(&s.after)
            ));
        }
        out
    }
}

/// Step budget per unit of total difference size.
const STEPS_PER_UNIT: usize = 8;

fn same_fiber(p: &TableMultiset, q: &TableMultiset) -> Result<()> {
    if p.rows != q.rows || p.cols != q.cols || p.r != q.r || p.c != q.c {
        return Err(Error::NotSameFiber("margins differ".into()));
    }
    if p.len() != q.len() {
        return Err(Error::NotSameFiber(format!(
            "{} members against {}",
            p.len(),
            q.len()
        )));
    }
    if !p.is_proper() || !q.is_proper() {
        return Err(Error::NotSameFiber("both multisets must be proper".into()));
    }
    if p.edge_sums() != q.edge_sums() {
        return Err(Error::NotSameFiber("edge sums differ".into()));
    }
    Ok(())
}

/// A transition of the raw run: the swap operations taking one state to the
/// next.
struct RawStep {
    ops: Vec<SwapOperation>,
    /// Resolvable pair carried by the state after the step, if improper.
    pair_after: Option<ResolvablePair>,
}

/// A move script taking `p` to `q`, both proper with the same margins and
/// edge sums. The script is replayed by [`verify_script`] before it is
/// returned.
pub fn connect(p: &TableMultiset, q: &TableMultiset) -> Result<MoveScript> {
    same_fiber(p, q)?;
    let mut state = p.clone();
    let mut active: Vec<usize> = (0..p.len()).collect();
    let mut targets: Vec<Vec<i64>> = q.members.clone();
    let mut raw: Vec<(TableMultiset, RawStep)> = Vec::new();
    let total: i64 = p
        .members
        .iter()
        .map(|g| targets.iter().map(|t| difference_size(g, t)).min().unwrap_or(0))
        .sum();
    let budget = STEPS_PER_UNIT * (total as usize + 1) * (p.len() + 1);
    let mut spent = 0usize;

    loop {
        // discard members already equal to a remaining target
        let mut x = 0;
        while x < active.len() {
            let k = active[x];
            if let Some(t) = targets.iter().position(|t| *t == state.members[k]) {
                targets.swap_remove(t);
                active.remove(x);
            } else {
                x += 1;
            }
        }
        let Some(&k) = active.first() else { break };
        let t = targets
            .iter()
            .enumerate()
            .min_by_key(|(_, t)| difference_size(&state.members[k], t))
            .map(|(x, _)| x)
            .expect("targets remain while members remain");
        let target = targets[t].clone();
        let mut pair: Option<ResolvablePair> = None;
        while pair.is_some() || state.members[k] != target {
            spent += 1;
            if spent > budget {
                return Err(Error::InternalInvariant(format!(
                    "step budget of {} exhausted",
                    budget
                )));
            }
            let before = state.clone();
            let (ops, outcome) = match pair {
                None => {
                    let (op, outcome) = reduce_toward_target(&state, k, &target, &active)?;
                    (op.into_iter().collect::<Vec<_>>(), outcome)
                }
                Some(pr) => improper_step(&state, pr, &target, &active)?,
            };
            for op in &ops {
                state.apply(op);
            }
            pair = match outcome {
                Outcome::Improper { pair } => Some(pair),
                _ => None,
            };
            raw.push((
                before,
                RawStep {
                    ops,
                    pair_after: pair,
                },
            ));
        }
    }
    let swap_operations = raw.iter().map(|(_, s)| s.ops.len()).sum();
    let steps = compact(p, &raw)?;
    let script = MoveScript {
        rows: p.rows,
        cols: p.cols,
        steps,
        swap_operations,
    };
    verify_script(p, q, &script)?;
    Ok(script)
}

/// The proper multiset obtained from an improper one by resolving along
/// `pair`.
fn resolution(m: &TableMultiset, pair: ResolvablePair) -> Result<TableMultiset> {
    let op = resolve_with_partner(m, pair)?;
    let mut out = m.clone();
    out.apply(&op);
    if !out.is_proper() {
        return Err(Error::InternalInvariant("resolution is not proper".into()));
    }
    Ok(out)
}

fn step_between(a: &TableMultiset, b: &TableMultiset) -> Option<ScriptStep> {
    let members: Vec<usize> = (0..a.len())
        .filter(|&k| a.members[k] != b.members[k])
        .collect();
    if members.is_empty() {
        return None;
    }
    Some(ScriptStep {
        before: members.iter().map(|&k| a.members[k].clone()).collect(),
        after: members.iter().map(|&k| b.members[k].clone()).collect(),
        members,
    })
}

/// Replaces every run of improper states by proper resolutions. Between two
/// improper states the resolutions use a common resolvable pair meeting the
/// members of the connecting operation; two resolutions of one improper
/// state share its improper member. Each step therefore touches at most
/// three members.
fn compact(p: &TableMultiset, raw: &[(TableMultiset, RawStep)]) -> Result<Vec<ScriptStep>> {
    let mut steps = Vec::new();
    let mut last_proper = p.clone();
    let push = |from: &TableMultiset, to: &TableMultiset, steps: &mut Vec<ScriptStep>| {
        if let Some(s) = step_between(from, to) {
            steps.push(s);
        }
    };
    // states[t] is the state after raw step t
    let mut states: Vec<TableMultiset> = Vec::with_capacity(raw.len());
    for (before, step) in raw {
        let mut s = before.clone();
        for op in &step.ops {
            s.apply(op);
        }
        states.push(s);
    }
    let mut prev_improper: Option<(usize, ResolvablePair)> = None;
    for (t, (before, step)) in raw.iter().enumerate() {
        let after = &states[t];
        // split multi-operation steps so every transition is one operation
        let mut mid = before.clone();
        let mut transitions: Vec<(TableMultiset, TableMultiset, &SwapOperation)> = Vec::new();
        for op in &step.ops {
            let from = mid.clone();
            mid.apply(op);
            transitions.push((from, mid.clone(), op));
        }
        debug_assert_eq!(&mid, after);
        for (from, to, op) in transitions {
            let from_improper = !from.is_proper();
            let to_improper = !to.is_proper();
            match (from_improper, to_improper) {
                (false, false) => {
                    push(&last_proper, &to, &mut steps);
                    last_proper = to;
                    prev_improper = None;
                }
                (false, true) => {
                    let pair = to_pair(&to, op, step.pair_after)?;
                    let res = resolution(&to, pair)?;
                    push(&last_proper, &res, &mut steps);
                    last_proper = res;
                    prev_improper = Some((t, pair));
                }
                (true, false) => {
                    push(&last_proper, &to, &mut steps);
                    last_proper = to;
                    prev_improper = None;
                }
                (true, true) => {
                    let (_, held) = prev_improper
                        .ok_or_else(|| Error::InternalInvariant("improper state without pair".into()))?;
                    let common = common_pair(&from, &to, op)?;
                    if common != held {
                        let res = resolution(&from, common)?;
                        push(&last_proper, &res, &mut steps);
                        last_proper = res;
                    }
                    let res = resolution(&to, common)?;
                    push(&last_proper, &res, &mut steps);
                    last_proper = res;
                    prev_improper = Some((t, common));
                }
            }
        }
    }
    Ok(steps)
}

fn to_pair(
    to: &TableMultiset,
    op: &SwapOperation,
    hint: Option<ResolvablePair>,
) -> Result<ResolvablePair> {
    let pairs = to.resolvable_pairs();
    if let Some(h) = hint.filter(|h| pairs.contains(h)) {
        return Ok(h);
    }
    pairs
        .iter()
        .copied()
        .find(|q| [op.k1, op.k2].contains(&q.pr))
        .or_else(|| pairs.first().copied())
        .ok_or_else(|| Error::InternalInvariant("improper state has no resolvable pair".into()))
}

/// A resolvable pair shared by both states that meets the operation.
fn common_pair(from: &TableMultiset, to: &TableMultiset, op: &SwapOperation) -> Result<ResolvablePair> {
    let later = to.resolvable_pairs();
    from.resolvable_pairs()
        .into_iter()
        .filter(|q| later.contains(q))
        .find(|q| [op.k1, op.k2].iter().any(|k| *k == q.im || *k == q.pr))
        .ok_or_else(|| Error::InternalInvariant("swap operation is not compatible".into()))
}

/// Replays `script` from `p`, checking member indices, proper intermediates,
/// preserved edge sums and degree at most three, and that the end state
/// equals `q` as a multiset.
pub fn verify_script(p: &TableMultiset, q: &TableMultiset, script: &MoveScript) -> Result<()> {
    let fail = |msg: String| Err(Error::InternalInvariant(format!("script check: {}", msg)));
    let mut state = p.clone();
    let e = p.edge_sums();
    for (n, s) in script.steps.iter().enumerate() {
        if s.degree() == 0 || s.degree() > 3 {
            return fail(format!("step {} has degree {}", n, s.degree()));
        }
        if s.before.len() != s.degree() || s.after.len() != s.degree() {
            return fail(format!("step {} is malformed", n));
        }
        for (x, &k) in s.members.iter().enumerate() {
            if k >= state.len() || state.members[k] != s.before[x] {
                return fail(format!("step {} does not match member {}", n, k));
            }
            state.members[k] = s.after[x].clone();
        }
        if !state.is_proper() {
            return fail(format!("state after step {} is not proper", n));
        }
        if state.edge_sums() != e {
            return fail(format!("step {} changes edge sums", n));
        }
    }
    let mut a = state.members.clone();
    let mut b = q.members.clone();
    a.sort();
    b.sort();
    if a != b {
        return fail("end state differs from the target".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(rows: usize, cols: usize, r: &[i64], c: &[i64], members: &[&[i64]]) -> TableMultiset {
        TableMultiset::new(
            rows,
            cols,
            r.to_vec(),
            c.to_vec(),
            members.iter().map(|g| g.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn classification() {
        let t = |g: &[i64]| TransportTable::new(2, 2, g.to_vec(), vec![1, 1], vec![1, 1]).unwrap();
        assert_eq!(t(&[1, 0, 0, 1]).classify(), TableClass::Proper);
        assert_eq!(
            TransportTable::new(2, 2, vec![-1, 2, 2, -1], vec![1, 1], vec![1, 1])
                .unwrap()
                .classify(),
            TableClass::Invalid
        );
        let imp = TransportTable::new(2, 2, vec![-1, 2, 2, 0], vec![1, 2], vec![1, 2]).unwrap();
        assert_eq!(imp.classify(), TableClass::Improper { cell: (0, 0) });
        assert_eq!(t(&[1, 1, 0, 0]).classify(), TableClass::Collision { rows: vec![0] });
        assert_eq!(t(&[1, 1, 1, 0]).classify(), TableClass::Invalid);
    }

    #[test]
    fn swap_preserves_edge_sums() {
        let mut m = ms(2, 2, &[1, 1], &[1, 1], &[&[1, 0, 0, 1], &[0, 1, 1, 0]]);
        let e = m.edge_sums();
        let op = single_swap(&m, 0, 1, ElementarySwap { from: 0, to: 1, col: 0 });
        m.apply(&op);
        assert_eq!(m.edge_sums(), e);
        assert!(op.z1.iter().zip(&op.z2).all(|(a, b)| a + b == 0));
        assert_eq!(m.members[0], vec![0, 0, 1, 1]);
    }

    #[test]
    fn no_collisions_gives_identity() {
        let m = ms(2, 2, &[1, 1], &[1, 1], &[&[1, 0, 0, 1], &[0, 1, 1, 0]]);
        assert!(resolve_collisions_pair(&m, 0, 1).unwrap().is_identity());
    }

    #[test]
    fn two_by_two_collision() {
        let mut m = ms(2, 2, &[1, 1], &[1, 1], &[&[1, 1, 0, 0], &[0, 0, 1, 1]]);
        let op = resolve_collisions_pair(&m, 0, 1).unwrap();
        assert_eq!(op.swaps.len(), 1);
        m.apply(&op);
        assert!(m.is_proper());
    }

    #[test]
    fn improper_resolution() {
        // member 0 has -1 at (0,0); member 1 donates
        let mut m = ms(
            3,
            3,
            &[1, 1, 1],
            &[1, 1, 1],
            &[&[-1, 1, 1, 1, 0, 0, 1, 0, 0], &[1, 0, 0, 0, 1, 0, 0, 0, 1]],
        );
        assert_eq!(
            m.state(),
            MultisetState::Improper {
                member: 0,
                cell: (0, 0)
            }
        );
        let (op, pair) = resolve_improper(&m).unwrap();
        assert_eq!(pair, ResolvablePair { im: 0, pr: 1 });
        let e = m.edge_sums();
        m.apply(&op);
        assert!(m.is_proper());
        assert_eq!(m.edge_sums(), e);
    }

    #[test]
    fn reduction_decreases_difference() {
        let m = ms(
            3,
            3,
            &[1, 1, 1],
            &[1, 1, 1],
            &[
                &[1, 0, 0, 0, 1, 0, 0, 0, 1],
                &[0, 1, 0, 0, 0, 1, 1, 0, 0],
                &[0, 0, 1, 1, 0, 0, 0, 1, 0],
            ],
        );
        let target = [0, 0, 1, 0, 1, 0, 1, 0, 0];
        let (op, outcome) = reduce_toward_target(&m, 0, &target, &[0, 1, 2]).unwrap();
        let mut after = m.clone();
        after.apply(&op.unwrap());
        assert!(
            difference_size(&after.members[0], &target) < difference_size(&m.members[0], &target)
        );
        assert_ne!(outcome, Outcome::NoOp);
        let (op, outcome) = reduce_toward_target(&m, 0, &m.members[0].clone(), &[0, 1, 2]).unwrap();
        assert!(op.is_none());
        assert_eq!(outcome, Outcome::NoOp);
    }

    fn birkhoff() -> (TableMultiset, TableMultiset) {
        let even: [&[i64]; 3] = [
            &[1, 0, 0, 0, 1, 0, 0, 0, 1],
            &[0, 1, 0, 0, 0, 1, 1, 0, 0],
            &[0, 0, 1, 1, 0, 0, 0, 1, 0],
        ];
        let odd: [&[i64]; 3] = [
            &[0, 1, 0, 1, 0, 0, 0, 0, 1],
            &[0, 0, 1, 0, 1, 0, 1, 0, 0],
            &[1, 0, 0, 0, 0, 1, 0, 1, 0],
        ];
        (
            ms(3, 3, &[1, 1, 1], &[1, 1, 1], &even),
            ms(3, 3, &[1, 1, 1], &[1, 1, 1], &odd),
        )
    }

    #[test]
    fn birkhoff_needs_degree_three() {
        let (p, q) = birkhoff();
        let s = connect(&p, &q).unwrap();
        assert_eq!(s.max_degree(), 3);
        assert!(!s.to_text().is_empty());
    }

    #[test]
    fn identical_multisets_give_empty_script() {
        let (p, _) = birkhoff();
        let s = connect(&p, &p).unwrap();
        assert!(s.steps.is_empty());
    }

    #[test]
    fn different_fibers_are_rejected() {
        let (p, _) = birkhoff();
        let mut q = p.clone();
        q.members.pop();
        assert!(matches!(connect(&p, &q), Err(Error::NotSameFiber(_))));
    }
}
