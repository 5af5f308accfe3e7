use std::io::{self, Write};

use super::RegularizerKind;
use crate::error::{Error, Result};
use crate::fmt::full;
use crate::linalg::DenseVector;

/// One grid sample of a two-dimensional regularizer landscape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeRow {
    pub x1: f64,
    pub x2: f64,
    pub value: f64,
    /// `log10(value + 1e-12)`.
    pub log_value: f64,
}

/// Samples `kind` on a `resolution × resolution` grid over `[lo, hi]²`.
///
/// Rows are ordered with `x1` outermost.
pub fn landscape_grid(
    kind: &RegularizerKind,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> Result<Vec<LandscapeRow>> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "landscape resolution must be at least 2, got {resolution}"
        )));
    }
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (resolution - 1) as f64;
    let coord = |i: usize| {
        if i + 1 == resolution {
            hi
        } else {
            lo + step * i as f64
        }
    };
    let mut rows = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            let (x1, x2) = (coord(i), coord(j));
            let value = kind.value(&DenseVector::from_vec(vec![x1, x2]))?;
            rows.push(LandscapeRow {
                x1,
                x2,
                value,
                log_value: (value + 1e-12).log10(),
            });
        }
    }
    Ok(rows)
}

/// Writes `x1,x2,value,log_value` rows with 17 significant digits.
pub fn write_landscape_csv<W: Write>(mut out: W, rows: &[LandscapeRow]) -> io::Result<()> {
    writeln!(out, "x1,x2,value,log_value")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            full(r.x1),
            full(r.x2),
            full(r.value),
            full(r.log_value)
        )?;
    }
    Ok(())
}
