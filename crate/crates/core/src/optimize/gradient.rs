use rand::Rng;

use super::Objective;
use crate::error::{Error, Result};

/// Central differences per coordinate; one-sided where `v ± step` would
/// leave `[0, 1]`.
pub fn fd_gradient(objective: &dyn Objective, v: &[f64], step: f64) -> Vec<f64> {
    let mut probe = v.to_vec();
    let mut base: Option<f64> = None;
    let mut grad = vec![0.0; v.len()];
    for i in 0..v.len() {
        let x = v[i];
        let (lo, hi) = (x - step, x + step);
        grad[i] = if lo >= 0.0 && hi <= 1.0 {
            probe[i] = hi;
            let f_hi = objective.eval(&probe);
            probe[i] = lo;
            let f_lo = objective.eval(&probe);
            (f_hi - f_lo) / (2.0 * step)
        } else {
            let f0 = *base.get_or_insert_with(|| objective.eval(v));
            if hi <= 1.0 {
                probe[i] = hi;
                (objective.eval(&probe) - f0) / step
            } else {
                probe[i] = lo.max(0.0);
                (f0 - objective.eval(&probe)) / (x - probe[i])
            }
        };
        probe[i] = x;
    }
    grad
}

/// Simultaneous-perturbation estimate averaged over `averages` Rademacher
/// draws, two objective evaluations per draw. Perturbed points are clamped
/// to `[0, 1]` and each coordinate is divided by its actual spread.
pub fn spsa_gradient(
    objective: &dyn Objective,
    v: &[f64],
    step: f64,
    averages: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    if averages == 0 {
        return Err(Error::InvalidConfig("SPSA needs at least one average".into()));
    }
    let d = v.len();
    let mut grad = vec![0.0; d];
    let mut plus = vec![0.0; d];
    let mut minus = vec![0.0; d];
    for _ in 0..averages {
        for i in 0..d {
            let delta = if rng.gen::<bool>() { step } else { -step };
            plus[i] = (v[i] + delta).clamp(0.0, 1.0);
            minus[i] = (v[i] - delta).clamp(0.0, 1.0);
        }
        let diff = objective.eval(&plus) - objective.eval(&minus);
        for i in 0..d {
            let spread = plus[i] - minus[i];
            if spread != 0.0 {
                grad[i] += diff / spread;
            }
        }
    }
    for g in grad.iter_mut() {
        *g /= averages as f64;
    }
    Ok(grad)
}
