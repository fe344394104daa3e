use crate::error::{Error, Result};
use crate::series::{check_same_grid, ProbabilitySeries};

/// Finite-window convolution: `out[k] = Σ_{j≤k} a[j]·b[k−j]`, kept for the
/// length of the shorter input. Mass that would land past the window is
/// dropped.
pub fn convolve(a: &ProbabilitySeries, b: &ProbabilitySeries) -> Result<ProbabilitySeries> {
    check_same_grid(a.bin_width(), b.bin_width())?;
    let len = a.len().min(b.len());
    Ok(ProbabilitySeries::from_parts(
        a.bin_width(),
        convolve_window(a.values(), b.values(), len),
    ))
}

/// Untruncated convolution of length `a.len() + b.len() − 1`.
pub fn convolve_full(a: &ProbabilitySeries, b: &ProbabilitySeries) -> Result<ProbabilitySeries> {
    check_same_grid(a.bin_width(), b.bin_width())?;
    if a.is_empty() || b.is_empty() {
        return Ok(ProbabilitySeries::from_parts(a.bin_width(), Vec::new()));
    }
    let len = a.len() + b.len() - 1;
    Ok(ProbabilitySeries::from_parts(
        a.bin_width(),
        convolve_window(a.values(), b.values(), len),
    ))
}

pub(crate) fn convolve_window(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (j, &aj) in a.iter().enumerate().take(len) {
        if aj == 0.0 {
            continue;
        }
        for (o, &bk) in out[j..].iter_mut().zip(b) {
            *o += aj * bk;
        }
    }
    out
}

/// `[P1, P2, …, P_order]` with `Pn = P(n−1) ∗ P1`, each clipped to the window
/// of `p1`.
pub fn self_convolution_series(
    p1: &ProbabilitySeries,
    order: usize,
) -> Result<Vec<ProbabilitySeries>> {
    if order == 0 {
        return Err(Error::invalid("order", "must be at least 1"));
    }
    let mut terms = Vec::with_capacity(order);
    terms.push(p1.clone());
    for _ in 1..order {
        let next = convolve(terms.last().expect("non-empty"), p1)?;
        terms.push(next);
    }
    Ok(terms)
}
