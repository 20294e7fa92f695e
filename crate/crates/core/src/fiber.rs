//! Fibers `F_{A,b}`, fiber configurations `A_b`, and the correspondence
//! between lifted points of `A^(N)` and points of `A_b`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::{rational_to_integer, Configuration, IntMatrix};

/// Default bound on the number of fiber elements.
pub const DEFAULT_CAP: usize = 1_000_000;

/// All nonnegative integer solutions of `Ax = b`, in descending
/// graded-lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiber {
    pub b: Vec<i64>,
    pub elements: Vec<Vec<i64>>,
    pub total_degree: u64,
}

impl Fiber {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn enumerate_fiber(cfg: &Configuration, b: &[i64], cap: usize) -> Result<Fiber> {
    if b.len() != cfg.rows() {
        return Err(Error::DimensionMismatch(format!(
            "b has length {}, configuration has {} rows",
            b.len(),
            cfg.rows()
        )));
    }
    let deg = cfg.degree_of(b);
    match rational_to_integer(&deg) {
        Some(t) if t >= 0 => enumerate_with_degree(cfg.matrix(), b, t as u64, cap),
        _ => Ok(Fiber {
            b: b.to_vec(),
            elements: Vec::new(),
            total_degree: 0,
        }),
    }
}

/// Solutions of `Ax = b` with `x >= 0` and `|x|_1 = total`, for any integer
/// matrix. When `A` is graded this is the whole fiber.
pub fn enumerate_with_degree(a: &IntMatrix, b: &[i64], total: u64, cap: usize) -> Result<Fiber> {
    if cap == 0 {
        return Err(Error::PreconditionViolated("fiber cap must be positive".into()));
    }
    let mut out = Vec::new();
    let mut search = Search::new(a, b, total, cap);
    if a.cols() > 0 {
        search.run(0, &mut out)?;
    } else if total == 0 && b.iter().all(|&x| x == 0) {
        out.push(Vec::new());
    }
    Ok(Fiber {
        b: b.to_vec(),
        elements: out,
        total_degree: total,
    })
}

struct Search<'a> {
    a: &'a IntMatrix,
    cap: usize,
    rem: Vec<i128>,
    left: i128,
    x: Vec<i64>,
    // suffix bounds: for row i and column j, min and max of A[i][k] over k >= j
    smin: Vec<Vec<i128>>,
    smax: Vec<Vec<i128>>,
}

impl<'a> Search<'a> {
    fn new(a: &'a IntMatrix, b: &[i64], total: u64, cap: usize) -> Self {
        let (d, n) = (a.rows(), a.cols());
        let mut smin = vec![vec![0i128; n + 1]; d];
        let mut smax = vec![vec![0i128; n + 1]; d];
        for i in 0..d {
            if n == 0 {
                break;
            }
            smin[i][n - 1] = a.get(i, n - 1) as i128;
            smax[i][n - 1] = a.get(i, n - 1) as i128;
            for j in (0..n - 1).rev() {
                let v = a.get(i, j) as i128;
                smin[i][j] = smin[i][j + 1].min(v);
                smax[i][j] = smax[i][j + 1].max(v);
            }
        }
        Search {
            a,
            cap,
            rem: b.iter().map(|&x| x as i128).collect(),
            left: total as i128,
            x: vec![0; n],
            smin,
            smax,
        }
    }

    fn feasible_from(&self, j: usize) -> bool {
        let t = self.left;
        (0..self.a.rows()).all(|i| {
            let r = self.rem[i];
            r >= t * self.smin[i][j] && r <= t * self.smax[i][j]
        })
    }

    fn run(&mut self, j: usize, out: &mut Vec<Vec<i64>>) -> Result<()> {
        let n = self.a.cols();
        if j == n - 1 {
            let t = self.left;
            if (0..self.a.rows()).all(|i| self.rem[i] == t * self.a.get(i, j) as i128) {
                if out.len() == self.cap {
                    return Err(Error::FiberTooLarge { cap: self.cap });
                }
                self.x[j] = t as i64;
                out.push(self.x.clone());
                self.x[j] = 0;
            }
            return Ok(());
        }
        if !self.feasible_from(j) {
            return Ok(());
        }
        for v in (0..=self.left).rev() {
            self.set(j, v);
            if self.feasible_from(j + 1) {
                self.run(j + 1, out)?;
            }
            self.set(j, -v);
        }
        self.x[j] = 0;
        Ok(())
    }

    // Adds `v` copies of column `j` to the partial solution (negative undoes).
    fn set(&mut self, j: usize, v: i128) {
        for i in 0..self.a.rows() {
            self.rem[i] -= v * self.a.get(i, j) as i128;
        }
        self.left -= v;
        self.x[j] += v as i64;
    }
}

/// The configuration `A_b` whose columns are the elements of `F_{A,b}`.
#[derive(Debug, Clone)]
pub struct FiberConfiguration {
    pub base: Configuration,
    pub b: Vec<i64>,
    pub fiber: Fiber,
    pub config: Configuration,
    column_index: HashMap<Vec<i64>, usize>,
}

impl FiberConfiguration {
    pub fn column_of(&self, x: &[i64]) -> Option<usize> {
        self.column_index.get(x).copied()
    }

    pub fn element(&self, col: usize) -> &[i64] {
        &self.fiber.elements[col]
    }

    pub fn len(&self) -> usize {
        self.fiber.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fiber.is_empty()
    }
}

pub fn fiber_configuration(cfg: &Configuration, b: &[i64], cap: usize) -> Result<FiberConfiguration> {
    let fiber = enumerate_fiber(cfg, b, cap)?;
    if fiber.is_empty() {
        return Err(Error::PreconditionViolated(format!(
            "fiber of b = {:?} is empty",
            b
        )));
    }
    let matrix = IntMatrix::from_columns(cfg.cols(), &fiber.elements)?;
    let t = BigRational::from_integer(BigInt::from(fiber.total_degree));
    let grading = vec![BigRational::from_integer(BigInt::from(1)) / t; cfg.cols()];
    let config = Configuration::with_grading(matrix, grading)?;
    let column_index = fiber
        .elements
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), i))
        .collect();
    Ok(FiberConfiguration {
        base: cfg.clone(),
        b: b.to_vec(),
        fiber,
        config,
        column_index,
    })
}

/// A point of a fiber of `A^(N)` whose slices all lie in one fiber of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPoint {
    pub slices: Vec<Vec<i64>>,
}

/// Counts how often each fiber element occurs among the slices.
pub fn project_fb(lp: &LiftedPoint, fc: &FiberConfiguration) -> Result<Vec<i64>> {
    let mut y = vec![0i64; fc.len()];
    for (k, w) in lp.slices.iter().enumerate() {
        let col = fc.column_of(w).ok_or(Error::SliceNotInFiber(k))?;
        y[col] += 1;
    }
    Ok(y)
}

/// Lists fiber element `x_i` exactly `y_i` times, in column order.
pub fn embed_fb(y: &[i64], fc: &FiberConfiguration) -> Result<LiftedPoint> {
    if y.len() != fc.len() {
        return Err(Error::DimensionMismatch(format!(
            "y has length {}, fiber has {} elements",
            y.len(),
            fc.len()
        )));
    }
    if let Some(i) = y.iter().position(|&c| c < 0) {
        return Err(Error::PreconditionViolated(format!(
            "entry {} of y is negative",
            i
        )));
    }
    let slices = y
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(fc.element(i).to_vec(), c as usize))
        .collect();
    Ok(LiftedPoint { slices })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rows: &[&[i64]]) -> Configuration {
        Configuration::validate(IntMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn k3_loops() -> Configuration {
        cfg(&[&[2, 1, 1, 0, 0, 0], &[0, 1, 0, 2, 1, 0], &[0, 0, 1, 0, 1, 2]])
    }

    #[test]
    fn weak_compositions_in_order() {
        let f = enumerate_fiber(&cfg(&[&[1, 1, 1]]), &[2], DEFAULT_CAP).unwrap();
        assert_eq!(
            f.elements,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        assert_eq!(f.total_degree, 2);
    }

    #[test]
    fn k3_loops_fiber_has_five_points() {
        let f = enumerate_fiber(&k3_loops(), &[2, 2, 2], DEFAULT_CAP).unwrap();
        assert_eq!(f.len(), 5);
    }

    #[test]
    fn k4_perfect_matchings() {
        let k4 = cfg(&[
            &[1, 1, 1, 0, 0, 0],
            &[1, 0, 0, 1, 1, 0],
            &[0, 1, 0, 1, 0, 1],
            &[0, 0, 1, 0, 1, 1],
        ]);
        let f = enumerate_fiber(&k4, &[1, 1, 1, 1], DEFAULT_CAP).unwrap();
        assert_eq!(
            f.elements,
            vec![vec![1, 0, 0, 0, 0, 1], vec![0, 1, 0, 0, 1, 0], vec![0, 0, 1, 1, 0, 0]]
        );
    }

    #[test]
    fn non_integral_degree_gives_empty_fiber() {
        let k4 = cfg(&[
            &[1, 1, 1, 0, 0, 0],
            &[1, 0, 0, 1, 1, 0],
            &[0, 1, 0, 1, 0, 1],
            &[0, 0, 1, 0, 1, 1],
        ]);
        assert!(enumerate_fiber(&k4, &[1, 0, 0, 0], DEFAULT_CAP).unwrap().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let c = cfg(&[&[1, 1, 1]]);
        assert_eq!(
            enumerate_fiber(&c, &[2], 5),
            Err(Error::FiberTooLarge { cap: 5 })
        );
        assert_eq!(enumerate_fiber(&c, &[2], 6).unwrap().len(), 6);
    }

    #[test]
    fn fiber_configuration_of_pairs() {
        let fc = fiber_configuration(&cfg(&[&[1, 1]]), &[3], DEFAULT_CAP).unwrap();
        assert_eq!(
            fc.config.matrix(),
            &IntMatrix::from_rows(&[[3, 2, 1, 0], [0, 1, 2, 3]]).unwrap()
        );
    }

    #[test]
    fn project_and_embed() {
        let fc = fiber_configuration(&k3_loops(), &[2, 2, 2], DEFAULT_CAP).unwrap();
        let y = vec![1, 0, 0, 0, 2];
        let lp = embed_fb(&y, &fc).unwrap();
        assert_eq!(
            lp.slices,
            vec![fc.element(0).to_vec(), fc.element(4).to_vec(), fc.element(4).to_vec()]
        );
        assert_eq!(project_fb(&lp, &fc).unwrap(), y);
        let single = LiftedPoint {
            slices: vec![fc.element(2).to_vec()],
        };
        assert_eq!(project_fb(&single, &fc).unwrap(), vec![0, 0, 1, 0, 0]);
        let bad = LiftedPoint {
            slices: vec![fc.element(0).to_vec(), vec![0; 6]],
        };
        assert_eq!(project_fb(&bad, &fc), Err(Error::SliceNotInFiber(1)));
    }
}
