//! Explicit indispensable lifted moves of two-way tables, giving lower bounds
//! on the Markov complexity of `A(I,J)`.
//!
//! Every slice is a basic move `Z(i1,i2;j1,j2)`: `+1` at `(i1,j1)` and
//! `(i2,j2)`, `-1` at `(i1,j2)` and `(i2,j1)`. Indices are 1-based here to
//! match the usual table notation.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::complete_bipartite_config;
use crate::lattice::{lifted_type, Configuration, LiftedMove};
use crate::markov::{certify_indispensable_lift, CertifyMode, IndispensabilityCertificate, Verdict};

/// The basic `I x J` move `Z(i1,i2;j1,j2)` as a row-major vector.
pub fn basic_slice(rows: usize, cols: usize, i1: usize, i2: usize, j1: usize, j2: usize) -> Vec<i64> {
    assert!(i1 != i2 && j1 != j2, "basic move needs distinct rows and columns");
    assert!(
        (1..=rows).contains(&i1)
            && (1..=rows).contains(&i2)
            && (1..=cols).contains(&j1)
            && (1..=cols).contains(&j2),
        "basic move index out of range"
    );
    let mut z = vec![0i64; rows * cols];
    let at = |i: usize, j: usize| (i - 1) * cols + (j - 1);
    z[at(i1, j1)] += 1;
    z[at(i2, j2)] += 1;
    z[at(i1, j2)] -= 1;
    z[at(i2, j1)] -= 1;
    z
}

/// Type of the construction: `(I-2)(J-d)d + 2d` with `d = floor(J/2)`.
pub fn zstar_type(rows: usize, cols: usize) -> usize {
    let d = cols / 2;
    (rows - 2) * (cols - d) * d + 2 * d
}

/// The bound `(I-2)(J^2-1)/4 + J - 1`.
pub fn zstar_bound(rows: usize, cols: usize) -> BigRational {
    let (i, j) = (rows as i64, cols as i64);
    BigRational::new(BigInt::from((i - 2) * (j * j - 1)), BigInt::from(4))
        + BigRational::from_integer(BigInt::from(j - 1))
}

/// Slice list of the lower-bound move for `3 <= I <= J`, as
/// `(i1, i2, j1, j2)` quadruples.
///
/// For odd `J` the literal list contains both `Z(I-1,I;d+1,d)` and
/// `Z(I-1,I;d+2,d+1)`, one slice more than the type formula. With
/// `merge_middle` these two are emitted as their sum `Z(I-1,I;d+2,d)`, a
/// single basic move, and the count matches the formula. Even `J` is
/// unaffected.
pub fn zstar_slices(
    rows: usize,
    cols: usize,
    merge_middle: bool,
) -> Vec<(usize, usize, usize, usize)> {
    let (ii, jj) = (rows, cols);
    let d = jj / 2;
    let odd = jj % 2 == 1;
    let r = d + 1;
    let mut out = Vec::new();
    for j in 1..=d {
        out.push((1, ii, j, jj - d + j));
    }
    for j in 1..d {
        out.push((ii - 1, ii, jj - d + j + 1, j));
    }
    match (odd, merge_middle) {
        (false, _) => out.push((ii - 1, ii, d + 1, d)),
        (true, true) => out.push((ii - 1, ii, r + 1, d)),
        (true, false) => {
            out.push((ii - 1, ii, d + 1, d));
            out.push((ii - 1, ii, r + 1, r));
        }
    }
    for i in 1..=ii - 2 {
        for j in 1..=d {
            for _ in 0..j {
                out.push((i, i + 1, j + 1, j));
            }
        }
        if odd {
            for _ in 0..d {
                out.push((i, i + 1, r + 1, r));
            }
        }
        for j in 1..d {
            for _ in 0..j {
                out.push((i, i + 1, jj - j + 1, jj - j));
            }
        }
    }
    out
}

/// The lower-bound move with exactly `(I-2)(J-d)d + 2d` slices.
pub fn build_zstar(rows: usize, cols: usize) -> Result<LiftedMove> {
    assemble_zstar(rows, cols, true, zstar_type(rows.max(2), cols))
}

/// The slice list taken literally, including both middle slices for odd
/// `J`.
pub fn build_zstar_literal(rows: usize, cols: usize) -> Result<LiftedMove> {
    assemble_zstar(rows, cols, false, zstar_type(rows.max(2), cols) + cols % 2)
}

fn assemble_zstar(rows: usize, cols: usize, merge: bool, expected: usize) -> Result<LiftedMove> {
    if !(3 <= rows && rows <= cols) {
        return Err(Error::PreconditionViolated(format!(
            "need 3 <= I <= J, got I = {}, J = {}",
            rows, cols
        )));
    }
    let slices: Vec<Vec<i64>> = zstar_slices(rows, cols, merge)
        .into_iter()
        .map(|(i1, i2, j1, j2)| basic_slice(rows, cols, i1, i2, j1, j2))
        .collect();
    let m = LiftedMove::new(rows * cols, slices)?;
    if m.num_slices() != expected || lifted_type(&m) != expected {
        return Err(Error::ConstructionInconsistent(format!(
            "{} slices, expected {}",
            m.num_slices(),
            expected
        )));
    }
    if m.slice_sum().iter().any(|&x| x != 0) {
        return Err(Error::ConstructionInconsistent("slices do not sum to zero".into()));
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize)]
pub struct ZStarReport {
    pub rows: usize,
    pub cols: usize,
    pub slices: usize,
    /// `(I-2)(J^2-1)/4 + J - 1` as a reduced fraction.
    pub bound: String,
    pub certificate: IndispensabilityCertificate,
    /// Certified lower bound on the Markov complexity, if certified.
    pub mc_lower_bound: Option<usize>,
}

pub fn certify_zstar(rows: usize, cols: usize, mode: CertifyMode) -> Result<ZStarReport> {
    let m = build_zstar(rows, cols)?;
    let cfg = complete_bipartite_config(rows, cols).cfg;
    let certificate = certify_indispensable_lift(&cfg, &m, mode)?;
    let certified = certificate.verdict == Verdict::Certified;
    Ok(ZStarReport {
        rows,
        cols,
        slices: m.num_slices(),
        bound: zstar_bound(rows, cols).to_string(),
        mc_lower_bound: certified.then_some(m.num_slices()),
        certificate,
    })
}

/// Signed basic moves of the 32-slice move on `5 x 5` tables; a negative
/// sign means `-Z(i1,i2;j1,j2) = Z(i1,i2;j2,j1)`.
const REMARK_SLICES: &[(i8, usize, usize, usize, usize, usize)] = &[
    (1, 1, 5, 1, 5, 1),
    (-1, 1, 2, 1, 2, 1),
    (-1, 1, 3, 2, 3, 1),
    (-1, 1, 2, 3, 4, 1),
    (-1, 1, 3, 4, 5, 1),
    (-1, 2, 3, 1, 3, 1),
    (1, 2, 4, 2, 4, 1),
    (-1, 2, 4, 3, 5, 2),
    (1, 2, 5, 4, 5, 2),
    (-1, 3, 4, 1, 2, 1),
    (-1, 3, 5, 2, 4, 2),
    (1, 3, 5, 3, 5, 2),
    (-1, 3, 4, 4, 5, 3),
    (-1, 4, 5, 1, 3, 1),
    (1, 4, 5, 2, 5, 2),
    (-1, 4, 5, 3, 4, 3),
    (-1, 4, 5, 4, 5, 7),
];

/// The 32-slice indispensable move on `5 x 5` tables.
pub fn remark_move_5x5() -> Result<LiftedMove> {
    let mut slices = Vec::new();
    for &(sign, i1, i2, j1, j2, times) in REMARK_SLICES {
        let (a, b) = if sign > 0 { (j1, j2) } else { (j2, j1) };
        for _ in 0..times {
            slices.push(basic_slice(5, 5, i1, i2, a, b));
        }
    }
    let m = LiftedMove::new(25, slices)?;
    if m.num_slices() != 32 {
        return Err(Error::ConstructionInconsistent(format!(
            "{} slices, expected 32",
            m.num_slices()
        )));
    }
    if m.slice_sum().iter().any(|&x| x != 0) {
        return Err(Error::ConstructionInconsistent("slices do not sum to zero".into()));
    }
    Ok(m)
}

/// `A(5,5)`, the configuration the 32-slice move lives over.
pub fn remark_configuration() -> Configuration {
    complete_bipartite_config(5, 5).cfg
}
