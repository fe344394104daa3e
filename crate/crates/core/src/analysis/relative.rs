use crate::error::{Error, Result};
use crate::series::{check_same_grid, CorrelationCurve};

/// Percentage deviation per bin, `|estimate − truth| / truth × 100`.
pub fn relative_error(estimate: &CorrelationCurve, truth: &CorrelationCurve) -> Result<Vec<f64>> {
    check_same_grid(estimate.bin_width(), truth.bin_width())?;
    if estimate.len() != truth.len() {
        return Err(Error::GridMismatch(format!(
            "estimate has {} bins, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    estimate
        .values()
        .iter()
        .zip(truth.values())
        .enumerate()
        .map(|(k, (&e, &t))| {
            if t > 0.0 {
                Ok((e - t).abs() / t * 100.0)
            } else {
                Err(Error::invalid(
                    "truth",
                    format!("bin {k} is {t}; reference must be > 0"),
                ))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let e = CorrelationCurve::new(0.1, vec![1.05]).unwrap();
        let t = CorrelationCurve::new(0.1, vec![1.0]).unwrap();
        assert!((relative_error(&e, &t).unwrap()[0] - 5.0).abs() < 1e-12);

        let c = CorrelationCurve::new(0.1, vec![2.0, 1.5, 1.1]).unwrap();
        assert_eq!(relative_error(&c, &c).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn zero_iff_equal() {
        let a = CorrelationCurve::new(0.1, vec![2.0, 1.5, 1.1]).unwrap();
        let b = CorrelationCurve::new(0.1, vec![2.0, 1.5, 1.1 + 1e-15]).unwrap();
        let d = relative_error(&b, &a).unwrap();
        assert_eq!(&d[..2], &[0.0, 0.0]);
        assert!(d[2] > 0.0);
    }

    #[test]
    fn grid_checks() {
        let a = CorrelationCurve::new(0.1, vec![1.0, 1.0]).unwrap();
        let b = CorrelationCurve::new(0.1, vec![1.0]).unwrap();
        let c = CorrelationCurve::new(0.2, vec![1.0, 1.0]).unwrap();
        let z = CorrelationCurve::new(0.1, vec![1.0, 0.0]).unwrap();
        assert!(relative_error(&a, &b).is_err());
        assert!(relative_error(&a, &c).is_err());
        assert!(relative_error(&a, &z).is_err());
    }
}
