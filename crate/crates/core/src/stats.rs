//! Classical (non-detrended) summary statistics.

use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::error::{MfxError, Result};
use crate::numeric::{mean, CompensatedSum};
use crate::series::Series;

/// Pearson coefficient with population (1/T) moments, clamped to [-1, 1].
pub fn pearson(x: &Series, y: &Series) -> Result<f64> {
    pearson_slices(x.values(), y.values())
}

pub fn pearson_slices(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(MfxError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(MfxError::SeriesTooShort {
            len: x.len(),
            min: 2,
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    let (vx, vy) = (sxx.value(), syy.value());
    if vx <= 0.0 || vy <= 0.0 {
        return Err(MfxError::ZeroVariance);
    }
    Ok((sxy.value() / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided p-value of `r` under the no-correlation null, using the
/// large-sample normal approximation `z = r sqrt(T - 2) / sqrt(1 - r^2)`.
pub fn pearson_p_value(r: f64, len: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let z = r.abs() * ((len as f64 - 2.0) / (1.0 - r * r)).sqrt();
    erfc(z / std::f64::consts::SQRT_2)
}

pub fn abs_series(x: &Series) -> Series {
    x.with_values(x.values().iter().map(|v| v.abs()).collect())
        .expect("absolute values of finite numbers are finite")
}

fn samples_for(duration: f64, dt: f64) -> Result<usize> {
    let k = duration / dt;
    let kr = k.round();
    if duration.is_nan() || duration <= 0.0 || kr < 1.0 || (k - kr).abs() > 1e-9 * k.max(1.0) {
        return Err(MfxError::NotMultipleOfDt {
            value: duration,
            dt,
        });
    }
    Ok(kr as usize)
}

/// Means over windows of `window` seconds advanced by `step` seconds.
///
/// Each mean is placed at its window's start; the output's `dt` is `step`.
pub fn rolling_mean(x: &Series, window: f64, step: f64) -> Result<Series> {
    let w = samples_for(window, x.dt())?;
    let st = samples_for(step, x.dt())?;
    if w > x.len() {
        return Err(MfxError::WindowTooLarge {
            window: w,
            len: x.len(),
        });
    }
    let v = x.values();
    let out: Vec<f64> = (0..=(v.len() - w))
        .step_by(st)
        .map(|start| mean(&v[start..start + w]))
        .collect();
    Ok(Series::new(out, step, x.t0())?.with_label(x.label()))
}

/// Symmetric matrix of pairwise Pearson coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.values[i][j])
    }

    /// CSV with a label header row and a label first column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.values) {
            out.push_str(l);
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub fn correlation_matrix(series: &[Series], labels: &[String]) -> Result<CorrelationMatrix> {
    if series.len() != labels.len() {
        return Err(MfxError::LengthMismatch(series.len(), labels.len()));
    }
    if series.is_empty() {
        return Err(MfxError::EmptyInput);
    }
    let n = series.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let coeffs = pairs
        .par_iter()
        .map(|&(i, j)| pearson(&series[i], &series[j]))
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![vec![1.0; n]; n];
    for (&(i, j), c) in pairs.iter().zip(coeffs) {
        values[i][j] = c;
        values[j][i] = c;
    }
    Ok(CorrelationMatrix {
        labels: labels.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gen_white;
    use proptest::prelude::*;

    fn s(v: &[f64]) -> Series {
        Series::new(v.to_vec(), 1.0, 0).unwrap()
    }

    #[test]
    fn pearson_self_and_negation() {
        let x = gen_white(500, 1).unwrap();
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        assert_eq!(pearson(&x, &x.negated()).unwrap(), -1.0);
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(
            pearson(&s(&[1.0, 1.0]), &s(&[1.0, 2.0])),
            Err(MfxError::ZeroVariance)
        );
        assert!(matches!(
            pearson(&s(&[1.0, 2.0]), &s(&[1.0, 2.0, 3.0])),
            Err(MfxError::LengthMismatch(2, 3))
        ));
    }

    #[test]
    fn p_value_behaviour() {
        assert!(pearson_p_value(0.0, 1000) > 0.99);
        assert!(pearson_p_value(0.2, 10_000) < 1e-10);
    }

    #[test]
    fn abs_examples() {
        assert_eq!(abs_series(&s(&[-1.0, 2.0])).values(), &[1.0, 2.0]);
        let pos = s(&[0.0, 3.0]);
        assert_eq!(abs_series(&pos), pos);
        let x = s(&[-3.0, 0.5, -0.25]);
        assert_eq!(abs_series(&abs_series(&x)), abs_series(&x));
    }

    #[test]
    fn rolling_examples() {
        let r = rolling_mean(&s(&[1.0, 2.0, 3.0, 4.0]), 2.0, 1.0).unwrap();
        assert_eq!(r.values(), &[1.5, 2.5, 3.5]);
        let c = rolling_mean(&s(&[7.0; 20]), 5.0, 3.0).unwrap();
        assert!(c.values().iter().all(|&v| v == 7.0));
        assert_eq!(c.dt(), 3.0);
        let v = [1.0, 5.0, 2.0, 8.0];
        let full = rolling_mean(&s(&v), 4.0, 4.0).unwrap();
        assert_eq!(full.values(), &[4.0]);
        assert!(matches!(
            rolling_mean(&s(&v), 5.0, 1.0),
            Err(MfxError::WindowTooLarge { .. })
        ));
        assert!(matches!(
            rolling_mean(&s(&v), 1.5, 1.0),
            Err(MfxError::NotMultipleOfDt { .. })
        ));
    }

    #[test]
    fn rolling_mean_of_linear_trend_is_linear() {
        let x = Series::new((0..1000).map(|i| 0.3 * i as f64 - 7.0).collect(), 10.0, 0).unwrap();
        let r = rolling_mean(&x, 300.0, 70.0).unwrap();
        // Output samples are 7 input samples apart.
        for w in r.values().windows(2) {
            assert!((w[1] - w[0] - 0.3 * 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_shapes() {
        let x = gen_white(100, 1).unwrap();
        let m = correlation_matrix(std::slice::from_ref(&x), &["x".into()]).unwrap();
        assert_eq!(m.values, vec![vec![1.0]]);
        let ys: Vec<Series> = (0..4).map(|k| gen_white(300, k).unwrap()).collect();
        let labels: Vec<String> = (0..4).map(|k| format!("s{k}")).collect();
        let m = correlation_matrix(&ys, &labels).unwrap();
        for i in 0..4 {
            assert_eq!(m.values[i][i], 1.0);
            for j in 0..4 {
                assert_eq!(m.values[i][j].to_bits(), m.values[j][i].to_bits());
            }
        }
        assert!(m.to_csv().starts_with("label,s0,s1,s2,s3\ns0,1,"));
    }

    #[test]
    fn independent_series_near_zero() {
        // Null Monte Carlo: |C| < 3/sqrt(T) for independent draws.
        let t = 10_000;
        let mut over = 0;
        for seed in 0..20 {
            let a = gen_white(t, 2 * seed).unwrap();
            let b = gen_white(t, 2 * seed + 1).unwrap();
            let m = correlation_matrix(&[a, b], &["a".into(), "b".into()]).unwrap();
            if m.values[0][1].abs() >= 3.0 / (t as f64).sqrt() {
                over += 1;
            }
        }
        assert!(over <= 1, "{over} of 20 exceeded 3 sigma");
    }

    proptest! {
        #[test]
        fn affine_invariance(a in 0.01f64..100.0, b in -50.0f64..50.0, seed in 0u64..500) {
            let x = gen_white(200, seed).unwrap();
            let y = gen_white(200, seed + 1000).unwrap();
            let r = pearson(&x, &y).unwrap();
            let xa = x.with_values(x.values().iter().map(|v| a * v + b).collect()).unwrap();
            prop_assert!((pearson(&xa, &y).unwrap() - r).abs() < 1e-12);
        }
    }
}
