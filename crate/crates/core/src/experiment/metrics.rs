use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("reference value must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("signal-to-noise ratio needs at least one value")]
    Empty,
}

/// Relative error against a known optimum, in percent.
pub fn re(sol: f64, opt: f64) -> Result<f64, MetricError> {
    if !(opt > 0.0) {
        return Err(MetricError::NonPositiveReference(opt));
    }
    Ok((sol - opt) / opt * 100.0)
}

/// Relative percentage gap to a MILP reference solution; positive when the
/// algorithm is better than the reference.
pub fn rpe(alg: f64, milp: f64) -> Result<f64, MetricError> {
    if !(milp > 0.0) {
        return Err(MetricError::NonPositiveReference(milp));
    }
    Ok((milp - alg) / milp * 100.0)
}

/// Smaller-the-better signal-to-noise ratio in decibels. All-zero input
/// gives `+inf`.
pub fn sn(values: &[f64]) -> Result<f64, MetricError> {
    if values.is_empty() {
        return Err(MetricError::Empty);
    }
    let ms = values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64;
    Ok(-10.0 * ms.log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error() {
        assert_eq!(re(105.0, 100.0).unwrap(), 5.0);
        assert_eq!(re(100.0, 100.0).unwrap(), 0.0);
        assert_eq!(re(100.0, 200.0).unwrap(), -50.0);
        assert!(re(1.0, 0.0).is_err());
    }

    #[test]
    fn relative_percentage_error() {
        assert!((rpe(951.0, 1382.0).unwrap() - 31.19).abs() < 0.005);
        assert!((rpe(1226.0, 1739.0).unwrap() - 29.50).abs() < 0.005);
        assert_eq!(rpe(7.0, 7.0).unwrap(), 0.0);
        assert!(rpe(1.0, -3.0).is_err());
    }

    #[test]
    fn signal_to_noise() {
        assert_eq!(sn(&[1.0]).unwrap(), 0.0);
        assert!((sn(&[1.0, 3.0]).unwrap() + 10.0 * 5f64.log10()).abs() < 1e-12);
        assert!((sn(&[10.0, 10.0, 10.0]).unwrap() + 20.0).abs() < 1e-12);
        assert_eq!(sn(&[0.0, 0.0]).unwrap(), f64::INFINITY);
        assert_eq!(sn(&[]), Err(MetricError::Empty));
    }
}
