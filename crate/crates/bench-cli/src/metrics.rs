use thiserror::Error;

#[derive(Debug, Error)]
#[error("metric over an empty value list")]
pub struct EmptyValues;

/// Shifted geometric mean: `exp(mean(log(v + shift))) - shift`. The standard
/// outlier-robust aggregate for node counts and solve times.
pub fn shifted_geomean(values: &[f64], shift: f64) -> Result<f64, EmptyValues> {
    if values.is_empty() {
        return Err(EmptyValues);
    }
    debug_assert!(values.iter().all(|v| *v >= 0.0));
    let mean_log =
        values.iter().map(|v| (v + shift).ln()).sum::<f64>() / values.len() as f64;
    Ok(mean_log.exp() - shift)
}

/// Geometric standard deviation of the shifted values:
/// `exp(stddev(log(v + shift)))` with the population standard deviation, so
/// a single value or all-equal values give exactly 1.
pub fn geo_std(values: &[f64], shift: f64) -> Result<f64, EmptyValues> {
    if values.is_empty() {
        return Err(EmptyValues);
    }
    let logs: Vec<f64> = values.iter().map(|v| (v + shift).ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let var = logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / logs.len() as f64;
    Ok(var.sqrt().exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value_is_identity() {
        for v in [0.0, 1.0, 7.5, 123.0] {
            assert!((shifted_geomean(&[v], 1.0).unwrap() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn three_and_eight_give_five() {
        // sqrt(4 * 9) - 1 = 5.
        let got = shifted_geomean(&[3.0, 8.0], 1.0).unwrap();
        assert!((got - 5.0).abs() < 1e-12);
    }

    #[test]
    fn constant_values_have_unit_geo_std() {
        assert!((geo_std(&[4.0, 4.0, 4.0], 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((geo_std(&[9.0], 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_input_errors() {
        assert!(shifted_geomean(&[], 1.0).is_err());
        assert!(geo_std(&[], 1.0).is_err());
    }

    #[test]
    fn matches_direct_recomputation() {
        let values = [12.0, 7.0, 55.0, 3.0, 21.0];
        let direct = {
            let prod: f64 = values.iter().map(|v| v + 1.0).product();
            prod.powf(1.0 / values.len() as f64) - 1.0
        };
        let got = shifted_geomean(&values, 1.0).unwrap();
        assert!((got - direct).abs() / direct <= 1e-12);
    }
}
