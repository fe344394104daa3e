use crate::error::{Error, Result};
use crate::series::ProbabilitySeries;

/// Largest negative excursion of a recovered P1 bin that is attributed to
/// rounding and clamped to zero. Anything below is reported as non-physical.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Recovers the ideal interval distribution P1 from the per-bin pair
/// histogram G by solving the renewal equation `G = P1 + P1 ∗ G` bin by bin.
///
/// Because bin 0 may hold simultaneous pairs, P1[0] appears on both sides:
///
/// ```text
/// P1[0] = G[0] / (1 + G[0])
/// P1[k] = (G[k] − Σ_{j<k} P1[j]·G[k−j]) / (1 + G[0])
/// ```
///
/// This is the discrete counterpart of `P1 = L⁻¹(L(G) / (1 + L(G)))` and is
/// exact on the grid.
pub fn renewal_invert(g: &ProbabilitySeries) -> Result<ProbabilitySeries> {
    let bin_width = g.bin_width();
    let g = g.values();
    let Some(&g0) = g.first() else {
        return Ok(ProbabilitySeries::from_parts(bin_width, Vec::new()));
    };
    let denom = 1.0 + g0;
    let mut p1: Vec<f64> = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        // Σ_{j<k} P1[j]·G[k−j]
        let overlap: f64 = p1
            .iter()
            .zip(g[1..=k].iter().rev())
            .map(|(p, gk)| p * gk)
            .sum();
        let value = (g[k] - overlap) / denom;
        if value < -NEGATIVE_TOLERANCE {
            return Err(Error::NonPhysical { bin: k, value });
        }
        p1.push(value.max(0.0));
    }
    Ok(ProbabilitySeries::from_parts(bin_width, p1))
}
