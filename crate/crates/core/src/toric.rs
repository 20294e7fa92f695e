//! Generating sets of toric ideals by binomial Buchberger completion with
//! saturation.
//!
//! Binomials `x^{u+} - x^{u-}` are stored as their exponent difference `u`,
//! so common monomial factors cancel automatically. Starting from a lattice
//! basis, the set is completed to a Gröbner basis in degree reverse
//! lexicographic order once for every variable, each time with that variable
//! smallest. After the pass for `x_i` no element is divisible by `x_i`, so
//! the ideal is saturated in `x_i`; after all passes the set generates the
//! full lattice ideal, which for a configuration is its toric ideal.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::lattice::{integer_kernel, Configuration, Move};

/// A generating set of the toric ideal of `cfg`, as moves.
pub fn toric_generators(cfg: &Configuration, budget: usize) -> Result<Vec<Move>> {
    let basis = integer_kernel(cfg.matrix())?;
    let n = cfg.cols();
    let mut set: Vec<Vec<i64>> = basis.into_iter().map(Move::into_vec).collect();
    for var in 0..n {
        if set.is_empty() {
            break;
        }
        let order: Vec<usize> = std::iter::once(var)
            .chain((0..n).rev().filter(|&k| k != var))
            .collect();
        set = buchberger(set, &order, budget)?;
    }
    Ok(set.into_iter().map(Move::new).collect())
}

#[derive(Debug, Clone)]
struct Binomial {
    u: Vec<i64>,
    lead_support: Vec<u64>,
}

impl Binomial {
    /// Orients `u` so that `x^{u+}` is the leading term; `None` for zero.
    fn new(mut u: Vec<i64>, order: &[usize]) -> Option<Self> {
        let k = order.iter().copied().find(|&k| u[k] != 0)?;
        if u[k] > 0 {
            for x in u.iter_mut() {
                *x = -*x;
            }
        }
        let mut lead_support = vec![0u64; u.len().div_ceil(64)];
        for (i, &x) in u.iter().enumerate() {
            if x > 0 {
                lead_support[i / 64] |= 1 << (i % 64);
            }
        }
        Some(Binomial { u, lead_support })
    }

    /// Whether the leading term of `self` divides that of `s`.
    fn lead_divides(&self, s: &Binomial) -> bool {
        self.lead_support
            .iter()
            .zip(&s.lead_support)
            .all(|(a, b)| a & !b == 0)
            && self
                .u
                .iter()
                .zip(&s.u)
                .all(|(&a, &b)| a <= 0 || a <= b)
    }

    fn lead_coprime(&self, o: &Binomial) -> bool {
        self.lead_support
            .iter()
            .zip(&o.lead_support)
            .all(|(a, b)| a & b == 0)
    }
}

fn lcm_lead(a: &Binomial, b: &Binomial) -> Vec<i64> {
    a.u.iter().zip(&b.u).map(|(&x, &y)| x.max(y).max(0)).collect()
}

fn difference(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.checked_sub(y).ok_or(Error::Overflow("binomial reduction")))
        .collect()
}

fn reduce(mut s: Binomial, set: &[Binomial], order: &[usize]) -> Result<Option<Binomial>> {
    'outer: loop {
        for g in set {
            if g.lead_divides(&s) {
                match Binomial::new(difference(&s.u, &g.u)?, order) {
                    None => return Ok(None),
                    Some(r) => {
                        s = r;
                        continue 'outer;
                    }
                }
            }
        }
        return Ok(Some(s));
    }
}

fn buchberger(start: Vec<Vec<i64>>, order: &[usize], budget: usize) -> Result<Vec<Vec<i64>>> {
    let mut set: Vec<Binomial> = Vec::new();
    let mut queue: BTreeMap<u64, Vec<(u32, u32)>> = BTreeMap::new();
    let mut pending: HashSet<(u32, u32)> = HashSet::new();

    fn insert(
        b: Binomial,
        set: &mut Vec<Binomial>,
        queue: &mut BTreeMap<u64, Vec<(u32, u32)>>,
        pending: &mut HashSet<(u32, u32)>,
        budget: usize,
    ) -> Result<()> {
        if set.len() >= budget {
            return Err(Error::BudgetExceeded {
                what: "toric generating set",
                limit: budget,
                lower_bound: None,
            });
        }
        let k = set.len() as u32;
        for (j, g) in set.iter().enumerate() {
            if !g.lead_coprime(&b) {
                let deg: i64 = lcm_lead(g, &b).iter().sum();
                queue.entry(deg as u64).or_default().push((j as u32, k));
                pending.insert((j as u32, k));
            }
        }
        set.push(b);
        Ok(())
    }

    for u in start {
        if let Some(b) = Binomial::new(u, order) {
            if let Some(r) = reduce(b, &set, order)? {
                insert(r, &mut set, &mut queue, &mut pending, budget)?;
            }
        }
    }
    while let Some((&key, _)) = queue.iter().next() {
        let batch = queue.remove(&key).expect("present");
        for (i, j) in batch {
            pending.remove(&(i, j));
            let (fi, fj) = (&set[i as usize], &set[j as usize]);
            let l = lcm_lead(fi, fj);
            let chain = set.iter().enumerate().any(|(h, g)| {
                let h = h as u32;
                h != i
                    && h != j
                    && g.u.iter().zip(&l).all(|(&a, &b)| a <= 0 || a <= b)
                    && !pending.contains(&(i.min(h), i.max(h)))
                    && !pending.contains(&(j.min(h), j.max(h)))
            });
            if chain {
                continue;
            }
            let s = difference(&fi.u, &fj.u)?;
            if let Some(b) = Binomial::new(s, order) {
                if let Some(r) = reduce(b, &set, order)? {
                    insert(r, &mut set, &mut queue, &mut pending, budget)?;
                }
            }
        }
    }
    // drop elements whose leading term is divisible by another one
    let keep: Vec<bool> = (0..set.len())
        .map(|i| {
            !set.iter().enumerate().any(|(j, g)| {
                j != i && g.lead_divides(&set[i]) && (!set[i].lead_divides(g) || j < i)
            })
        })
        .collect();
    Ok(set
        .into_iter()
        .zip(keep)
        .filter_map(|(b, k)| k.then_some(b.u))
        .collect())
}
