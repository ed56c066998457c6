//! Sinusoid fitting: periodogram peak, then least-squares refinement.
//!
//! For a trial frequency the offset and the cosine/sine amplitudes enter
//! linearly, so the residual is minimised over the frequency alone
//! (variable projection) by golden-section search inside the main lobe of
//! the periodogram peak.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

use super::linalg::{inverse_diagonal, solve};
use super::track::{TrackResult, MIN_FRAMES};

const OVERSAMPLE: f64 = 10.0;
const MIN_PERIODS: f64 = 1.5;

/// d(t) ≈ offset + amplitude·cos(2π·frequency·t + phase).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit<T> {
    /// Cycles per unit of the input time axis.
    pub frequency: T,
    pub offset: T,
    /// Non-negative.
    pub amplitude: T,
    pub phase: T,
    pub residual_rms: T,
    /// One-sigma frequency uncertainty from the least-squares covariance.
    pub frequency_uncertainty: T,
    /// False when the refinement failed and the periodogram estimate is returned.
    pub refined: bool,
    pub samples: usize,
}

/// Distance-series fit of a soliton pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyFit<T> {
    /// ν_d of the distance oscillation.
    pub distance_frequency: T,
    /// ν_s = ν_d/2.
    pub soliton_frequency: T,
    /// Mean distance d₀.
    pub mean_distance: T,
    /// Single-soliton peak amplitude A/2.
    pub peak_amplitude: T,
    /// A/(2√2).
    pub rms_amplitude: T,
    /// Outer turning point (d₀ + A)/2 measured from the centre.
    pub max_displacement: T,
    pub residual_rms: T,
    pub distance_frequency_uncertainty: T,
    pub soliton_frequency_uncertainty: T,
    pub refined: bool,
    pub samples: usize,
}

struct Centered<T> {
    t: Vec<T>,
    y: Vec<T>,
    t_mean: T,
}

fn linear_part<T: Scalar>(data: &Centered<T>, nu: T) -> Option<([T; 3], T)> {
    let w = T::TAU() * nu;
    let mut ata = [[T::zero(); 3]; 3];
    let mut aty = [T::zero(); 3];
    for (&t, &y) in data.t.iter().zip(&data.y) {
        let (s, c) = (w * t).sin_cos();
        let row = [T::one(), c, s];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] = ata[i][j] + row[i] * row[j];
            }
            aty[i] = aty[i] + row[i] * y;
        }
    }
    let coef = solve(ata, aty)?;
    let ss = data.t.iter().zip(&data.y).fold(T::zero(), |acc, (&t, &y)| {
        let (s, c) = (w * t).sin_cos();
        let r = y - coef[0] - coef[1] * c - coef[2] * s;
        acc + r * r
    });
    Some((coef, ss))
}

fn periodogram_peak<T: Scalar>(data: &Centered<T>, span: T, dt_min: T) -> T {
    let mean = data.y.iter().fold(T::zero(), |a, &y| a + y) / lit(data.y.len() as f64);
    let step = (span * lit(OVERSAMPLE)).recip();
    let nyquist = lit::<T>(0.5) / dt_min;
    let count = (nyquist / step).to_usize().unwrap_or(1).max(1);
    let mut best = (T::zero(), step);
    for j in 1..=count {
        let nu = step * lit(j as f64);
        let w = T::TAU() * nu;
        let (mut re, mut im) = (T::zero(), T::zero());
        for (&t, &y) in data.t.iter().zip(&data.y) {
            let (s, c) = (w * t).sin_cos();
            re = re + (y - mean) * c;
            im = im + (y - mean) * s;
        }
        let p = re * re + im * im;
        if p > best.0 {
            best = (p, nu);
        }
    }
    best.1
}

/// Fits offset + A·cos(2πνt + φ) to samples (t, y).
///
/// Needs at least ten samples covering at least 1.5 periods of the fitted
/// oscillation; a constant series is reported as [`Error::NoOscillation`].
pub fn fit_sinusoid<T: Scalar>(times: &[T], values: &[T]) -> Result<SinusoidFit<T>> {
    let n = times.len();
    if n != values.len() {
        return Err(Error::InvalidInput("times and values differ in length".into()));
    }
    if n < MIN_FRAMES {
        return Err(Error::TooFewSamples {
            found: n,
            required: MIN_FRAMES,
        });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("sample times must increase strictly".into()));
    }
    let mean_y = values.iter().fold(T::zero(), |a, &y| a + y) / lit(n as f64);
    let var = values.iter().fold(T::zero(), |a, &y| a + (y - mean_y) * (y - mean_y)) / lit(n as f64);
    let scale = T::one() + mean_y.abs();
    if !(var.sqrt() > lit::<T>(1e3) * T::epsilon() * scale) {
        return Err(Error::NoOscillation("series is constant".into()));
    }

    let t_mean = times.iter().fold(T::zero(), |a, &t| a + t) / lit(n as f64);
    let data = Centered {
        t: times.iter().map(|&t| t - t_mean).collect(),
        y: values.to_vec(),
        t_mean,
    };
    let span = times[n - 1] - times[0];
    let dt_min = times.windows(2).fold(T::infinity(), |m, w| m.min(w[1] - w[0]));
    let nu0 = periodogram_peak(&data, span, dt_min);

    // Golden section over the main lobe.
    let half_width = span.recip();
    let mut a = (nu0 - half_width).max(nu0 * lit(0.05));
    let mut b = nu0 + half_width;
    let (lo, hi) = (a, b);
    let ss = |nu: T| linear_part(&data, nu).map(|(_, s)| s).unwrap_or(T::infinity());
    let r = lit::<T>(0.5 * (5f64.sqrt() - 1.0));
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (ss(c), ss(d));
    for _ in 0..200 {
        if (b - a) < lit::<T>(1e-14) * nu0 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = ss(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = ss(d);
        }
    }
    let nu_ref = lit::<T>(0.5) * (a + b);
    let edge = (hi - lo) * lit(1e-6);
    let interior = nu_ref > lo + edge && nu_ref < hi - edge;
    let refined_ok = interior && ss(nu_ref) <= ss(nu0);
    let nu = if refined_ok { nu_ref } else { nu0 };

    let (coef, ss_min) = linear_part(&data, nu)
        .ok_or_else(|| Error::NoOscillation("degenerate sinusoid basis".into()))?;
    let amplitude = (coef[1] * coef[1] + coef[2] * coef[2]).sqrt();
    if !(amplitude > T::zero()) {
        return Err(Error::NoOscillation("zero fitted amplitude".into()));
    }
    if span * nu < lit(MIN_PERIODS) {
        return Err(Error::NoOscillation(format!(
            "samples span {} periods, need {MIN_PERIODS}",
            (span * nu).as_f64()
        )));
    }
    // a·cos + b·sin = A cos(θ + φ) with φ = atan2(−b, a); shift back to t = 0.
    let phase_centered = (-coef[2]).atan2(coef[1]);
    let phase = phase_centered - T::TAU() * nu * data.t_mean;

    // Covariance of (offset, a, b, ν) from the Jacobian at the optimum.
    let w = T::TAU() * nu;
    let mut jtj = [[T::zero(); 4]; 4];
    for &t in &data.t {
        let (s, c) = (w * t).sin_cos();
        let row = [T::one(), c, s, T::TAU() * t * (coef[2] * c - coef[1] * s)];
        for i in 0..4 {
            for j in 0..4 {
                jtj[i][j] = jtj[i][j] + row[i] * row[j];
            }
        }
    }
    let dof = lit::<T>((n.saturating_sub(4)).max(1) as f64);
    let sigma2 = ss_min / dof;
    let nu_var = inverse_diagonal(jtj, 3).unwrap_or(T::infinity()) * sigma2;

    Ok(SinusoidFit {
        frequency: nu,
        offset: coef[0],
        amplitude,
        phase,
        residual_rms: (ss_min / lit(n as f64)).sqrt(),
        frequency_uncertainty: nu_var.max(T::zero()).sqrt(),
        refined: refined_ok,
        samples: n,
    })
}

/// Fits the distance series of a pair track; ν_s = ν_d/2.
pub fn fit_frequency<T: Scalar>(track: &TrackResult<T>) -> Result<FrequencyFit<T>> {
    let (t, d) = track.distance_series();
    let fit = fit_sinusoid(&t, &d)?;
    let two = lit::<T>(2.0);
    Ok(FrequencyFit {
        distance_frequency: fit.frequency,
        soliton_frequency: fit.frequency / two,
        mean_distance: fit.offset,
        peak_amplitude: fit.amplitude / two,
        rms_amplitude: fit.amplitude / (two * two.sqrt()),
        max_displacement: (fit.offset + fit.amplitude) / two,
        residual_rms: fit.residual_rms,
        distance_frequency_uncertainty: fit.frequency_uncertainty,
        soliton_frequency_uncertainty: fit.frequency_uncertainty / two,
        refined: fit.refined,
        samples: fit.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracking::track::{FrameQuality, FrameTrack};

    fn synthetic(nu: f64, noise: impl Fn(usize) -> f64) -> (Vec<f64>, Vec<f64>) {
        // 1 kHz sampling for 100 ms, times in seconds.
        (0..100)
            .map(|i| {
                let t = i as f64 * 1e-3;
                (t, 10.0 + 3.0 * (2.0 * std::f64::consts::PI * nu * t).cos() + noise(i))
            })
            .unzip()
    }

    #[test]
    fn recovers_clean_sinusoid() {
        let (t, y) = synthetic(75.0, |_| 0.0);
        let fit = fit_sinusoid(&t, &y).unwrap();
        assert!(fit.refined);
        assert!((fit.frequency / 75.0 - 1.0).abs() < 1e-3 * 1e-3, "{}", fit.frequency);
        assert!((fit.amplitude - 3.0).abs() < 1e-9);
        assert!((fit.offset - 10.0).abs() < 1e-9);
        assert!(fit.phase.sin().abs() < 1e-6);
    }

    #[test]
    fn pair_track_halves_the_frequency() {
        let (t, y) = synthetic(75.0, |_| 0.0);
        let frames = t
            .iter()
            .zip(&y)
            .map(|(&time, &d)| FrameTrack {
                time,
                dips: Vec::new(),
                selected: vec![-d / 2.0, d / 2.0],
                quality: FrameQuality::Ok,
            })
            .collect();
        let fit = fit_frequency(&TrackResult { frames }).unwrap();
        assert!((fit.distance_frequency - 75.0).abs() < 0.075);
        assert_eq!(fit.soliton_frequency, fit.distance_frequency / 2.0);
        assert!((fit.soliton_frequency - 37.5).abs() < 0.04);
        assert!((fit.peak_amplitude - 1.5).abs() < 1e-9);
        assert!((fit.max_displacement - 6.5).abs() < 1e-9);
    }

    #[test]
    fn constant_series_has_no_oscillation() {
        let t: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y = vec![4.2; 50];
        assert!(matches!(fit_sinusoid(&t, &y), Err(Error::NoOscillation(_))));
    }

    #[test]
    fn too_few_samples_or_periods() {
        let t: Vec<f64> = (0..5).map(|i| i as f64).collect();
        assert!(matches!(fit_sinusoid(&t, &t), Err(Error::TooFewSamples { .. })));
        // Half a period only.
        let (t, y): (Vec<f64>, Vec<f64>) = (0..40)
            .map(|i| {
                let t = i as f64 * 0.01;
                (t, (std::f64::consts::PI * t / 0.4).cos())
            })
            .unzip();
        assert!(fit_sinusoid(&t, &y).is_err());
    }
}
