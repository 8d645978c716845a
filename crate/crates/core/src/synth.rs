//! Synthetic processes with known scaling, used as correctness oracles.
//!
//! All generators draw from ChaCha20 (`rand_chacha::ChaCha20Rng`), a
//! counter-based generator keyed by the 64-bit seed. Independent
//! components of one realisation use distinct ChaCha streams of the same
//! key, so a `(spec, seed)` pair fully determines the output on every
//! platform. Gaussian variates come from `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{MfxError, Result};
use crate::series::Series;

/// Largest cascade depth accepted.
pub const MAX_CASCADE_DEPTH: u32 = 22;

/// A process family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProcessKind {
    Fgn {
        hurst: f64,
    },
    Cascade {
        multiplier: f64,
    },
    White,
    CoupledPair {
        coupling: f64,
        base: Box<ProcessKind>,
    },
}

/// Full generator specification, serialised next to generated files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub kind: ProcessKind,
    pub seed: u64,
    pub length: usize,
}

impl GenSpec {
    /// Generates one series (two for a coupled pair).
    pub fn generate(&self) -> Result<Vec<Series>> {
        match &self.kind {
            ProcessKind::CoupledPair { coupling, base } => {
                let (x, y) = gen_coupled_pair(*coupling, base, self.length, self.seed)?;
                Ok(vec![x, y])
            }
            kind => Ok(vec![generate_single(
                kind,
                self.length,
                &mut rng_for(self.seed, 0),
            )?]),
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn unit_series(values: Vec<f64>, label: &str) -> Result<Series> {
    Ok(Series::new(values, 1.0, 0)?.with_label(label))
}

fn generate_single(kind: &ProcessKind, len: usize, rng: &mut ChaCha20Rng) -> Result<Series> {
    match kind {
        ProcessKind::Fgn { hurst } => fgn_with(*hurst, len, rng),
        ProcessKind::White => {
            if len == 0 {
                return Err(MfxError::BadLength(len, "must be positive"));
            }
            unit_series(
                (0..len).map(|_| StandardNormal.sample(rng)).collect(),
                "white",
            )
        }
        ProcessKind::Cascade { multiplier } => {
            if !len.is_power_of_two() {
                return Err(MfxError::BadLength(
                    len,
                    "cascade length must be a power of two",
                ));
            }
            cascade_with(*multiplier, len.trailing_zeros(), rng)
        }
        ProcessKind::CoupledPair { .. } => Err(MfxError::Parse("nested coupled pair".into())),
    }
}

/// Exact autocovariance of unit-variance fractional Gaussian noise.
pub fn fgn_autocovariance(hurst: f64, lag: usize) -> f64 {
    let k = lag as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Fractional Gaussian noise of length `len` (a power of two) with Hurst
/// exponent `hurst`, unit variance.
pub fn gen_fgn(hurst: f64, len: usize, seed: u64) -> Result<Series> {
    fgn_with(hurst, len, &mut rng_for(seed, 0))
}

fn fgn_with(hurst: f64, len: usize, rng: &mut ChaCha20Rng) -> Result<Series> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(MfxError::BadH(hurst));
    }
    if len < 2 || !len.is_power_of_two() {
        return Err(MfxError::BadLength(
            len,
            "fGn length must be a power of two >= 2",
        ));
    }
    // Circulant embedding of size 2n. Eigenvalues of the circulant are the
    // DFT of its first row; a complex Gaussian vector weighted by
    // sqrt(lambda / 2n) and transformed again has real and imaginary parts
    // that are each exact realisations of the target process.
    let m = 2 * len;
    let mut row: Vec<Complex64> = (0..m)
        .map(|j| {
            let lag = if j <= len { j } else { m - j };
            Complex64::new(fgn_autocovariance(hurst, lag), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let peak = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let mut w: Vec<Complex64> = Vec::with_capacity(m);
    for ev in &row {
        let mut lambda = ev.re;
        if lambda < 0.0 {
            if lambda < -1e-10 * peak {
                return Err(MfxError::EmbeddingFailed(lambda));
            }
            lambda = 0.0;
        }
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        w.push(Complex64::new(re, im) * (lambda / m as f64).sqrt());
    }
    fft.process(&mut w);
    unit_series(w[..len].iter().map(|c| c.re).collect(), "fgn")
}

/// Increments of a binomial multiplicative cascade of depth `depth`
/// (length `2^depth`). At every node the mass splits into fractions `a` and
/// `1 - a`, with a random choice of which child gets `a`. Total mass is 1.
pub fn gen_cascade(multiplier: f64, depth: u32, seed: u64) -> Result<Series> {
    cascade_with(multiplier, depth, &mut rng_for(seed, 0))
}

fn cascade_with(a: f64, depth: u32, rng: &mut ChaCha20Rng) -> Result<Series> {
    if !(a > 0.5 && a < 1.0) {
        return Err(MfxError::BadMultiplier(a));
    }
    if depth == 0 || depth > MAX_CASCADE_DEPTH {
        return Err(MfxError::BadLength(
            1usize << depth.min(63),
            "cascade depth must be in 1..=22",
        ));
    }
    let mut mass = vec![1.0f64];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(mass.len() * 2);
        for &m in &mass {
            let (l, r) = if rng.random::<bool>() {
                (a, 1.0 - a)
            } else {
                (1.0 - a, a)
            };
            next.push(m * l);
            next.push(m * r);
        }
        mass = next;
    }
    unit_series(mass, "cascade")
}

/// `X = sqrt(1-w) E1 + sqrt(w) C`, `Y = sqrt(1-w) E2 + sqrt(w) C` with
/// `C`, `E1`, `E2` independent realisations of `base`.
pub fn gen_coupled_pair(
    coupling: f64,
    base: &ProcessKind,
    len: usize,
    seed: u64,
) -> Result<(Series, Series)> {
    if !(0.0..=1.0).contains(&coupling) {
        return Err(MfxError::BadCoupling(coupling));
    }
    let common = generate_single(base, len, &mut rng_for(seed, 1))?;
    let e1 = generate_single(base, len, &mut rng_for(seed, 2))?;
    let e2 = generate_single(base, len, &mut rng_for(seed, 3))?;
    let (a, b) = ((1.0 - coupling).sqrt(), coupling.sqrt());
    let mix = |e: &Series| -> Vec<f64> {
        e.values()
            .iter()
            .zip(common.values())
            .map(|(e, c)| a * e + b * c)
            .collect()
    };
    Ok((unit_series(mix(&e1), "x")?, unit_series(mix(&e2), "y")?))
}

/// White Gaussian noise, unit variance.
pub fn gen_white(len: usize, seed: u64) -> Result<Series> {
    generate_single(&ProcessKind::White, len, &mut rng_for(seed, 0))
}

/// Analytic generalized Hurst exponent of the binomial cascade.
pub fn cascade_hurst(multiplier: f64, q: f64) -> f64 {
    let a = multiplier;
    1.0 / q - (a.powf(q) + (1.0 - a).powf(q)).log2() / q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{mean, sum};

    fn lag_autocorr(v: &[f64], lag: usize) -> f64 {
        let m = mean(v);
        let var: f64 = v.iter().map(|x| (x - m).powi(2)).sum();
        let cov: f64 = v.windows(lag + 1).map(|w| (w[0] - m) * (w[lag] - m)).sum();
        cov / var
    }

    #[test]
    fn half_hurst_is_white() {
        let x = gen_fgn(0.5, 1 << 14, 3).unwrap();
        let bound = 3.0 / ((1 << 14) as f64).sqrt();
        assert!(lag_autocorr(x.values(), 1).abs() < bound);
    }

    #[test]
    fn fgn_matches_target_autocorrelation() {
        // Average sample autocorrelation over seeds versus the exact value.
        let h = 0.8;
        let n = 1 << 13;
        let seeds = 20;
        let mut acc = [0.0; 3];
        for seed in 0..seeds {
            let x = gen_fgn(h, n, seed).unwrap();
            for (lag, a) in acc.iter_mut().enumerate() {
                *a += lag_autocorr(x.values(), lag + 1) / seeds as f64;
            }
        }
        for (lag, a) in acc.iter().enumerate() {
            let want = fgn_autocovariance(h, lag + 1);
            assert!((a - want).abs() < 0.03, "lag {}: {a} vs {want}", lag + 1);
        }
    }

    #[test]
    fn fgn_has_unit_variance() {
        let x = gen_fgn(0.3, 1 << 15, 11).unwrap();
        let m = mean(x.values());
        let var = x.values().iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn same_seed_same_bits() {
        assert_eq!(
            gen_fgn(0.7, 1024, 42).unwrap(),
            gen_fgn(0.7, 1024, 42).unwrap()
        );
        assert_ne!(
            gen_fgn(0.7, 1024, 42).unwrap(),
            gen_fgn(0.7, 1024, 43).unwrap()
        );
        assert_eq!(
            gen_cascade(0.7, 10, 1).unwrap(),
            gen_cascade(0.7, 10, 1).unwrap()
        );
    }

    #[test]
    fn fgn_rejects_bad_parameters() {
        assert!(matches!(gen_fgn(1.0, 1024, 0), Err(MfxError::BadH(_))));
        assert!(matches!(gen_fgn(0.0, 1024, 0), Err(MfxError::BadH(_))));
        assert!(matches!(
            gen_fgn(0.5, 1000, 0),
            Err(MfxError::BadLength(..))
        ));
    }

    #[test]
    fn cascade_conserves_mass() {
        let x = gen_cascade(0.7, 16, 5).unwrap();
        assert_eq!(x.len(), 1 << 16);
        assert!((sum(x.values()) - 1.0).abs() < 1e-9);
        assert!(x.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn cascade_rejects_bad_multiplier() {
        assert!(matches!(
            gen_cascade(0.5, 10, 0),
            Err(MfxError::BadMultiplier(_))
        ));
        assert!(matches!(
            gen_cascade(1.0, 10, 0),
            Err(MfxError::BadMultiplier(_))
        ));
        assert!(gen_cascade(0.7, 23, 0).is_err());
    }

    #[test]
    fn cascade_formula_values() {
        assert!((cascade_hurst(0.7, 1.0) - 1.0).abs() < 1e-15);
        // (1 - log2(0.58)) / 2
        assert!((cascade_hurst(0.7, 2.0) - 0.892_937_597_323_576_4).abs() < 1e-12);
    }

    #[test]
    fn coupled_limits() {
        let base = ProcessKind::Fgn { hurst: 0.7 };
        let (x, y) = gen_coupled_pair(1.0, &base, 1024, 9).unwrap();
        assert_eq!(x.values(), y.values());
        let (x0, _) = gen_coupled_pair(0.0, &base, 1024, 9).unwrap();
        let e1 = generate_single(&base, 1024, &mut rng_for(9, 2)).unwrap();
        assert_eq!(x0.values(), e1.values());
        assert!(matches!(
            gen_coupled_pair(1.5, &base, 1024, 9),
            Err(MfxError::BadCoupling(_))
        ));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = GenSpec {
            kind: ProcessKind::CoupledPair {
                coupling: 0.5,
                base: Box::new(ProcessKind::Cascade { multiplier: 0.7 }),
            },
            seed: 7,
            length: 1024,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<GenSpec>(&text).unwrap(), spec);
        assert_eq!(spec.generate().unwrap().len(), 2);
    }
}
