//! Plain-text integer matrices: a header line `R C`, then `R` lines of `C`
//! whitespace-separated integers.

use toric_fibers::{Error, IntMatrix, Result};

pub fn parse(text: &str) -> Result<IntMatrix> {
    let mut tokens = text.split_whitespace();
    let mut next_usize = |what: &str| -> Result<usize> {
        let t = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {}", what)))?;
        t.parse()
            .map_err(|_| Error::Parse(format!("{} is not a size: {:?}", what, t)))
    };
    let rows = next_usize("row count")?;
    let cols = next_usize("column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    for t in tokens {
        data.push(
            t.parse::<i64>()
                .map_err(|_| Error::Parse(format!("not an integer: {:?}", t)))?,
        );
    }
    if data.len() != rows * cols {
        return Err(Error::Parse(format!(
            "header announces {} x {} = {} entries, found {}",
            rows,
            cols,
            rows * cols,
            data.len()
        )));
    }
    IntMatrix::new(rows, cols, data)
}

pub fn render(m: &IntMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Rows of equal length as a matrix; `width` fixes the column count when
/// there are no rows.
pub fn from_rows(rows: &[Vec<i64>], width: usize) -> Result<IntMatrix> {
    if rows.is_empty() {
        return Ok(IntMatrix::zeros(0, width));
    }
    IntMatrix::from_rows(rows)
}
