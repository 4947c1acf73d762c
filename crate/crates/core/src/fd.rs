//! Central finite differences with Richardson extrapolation.

use serde::{Deserialize, Serialize};

/// A derivative estimate from a sequence of halved central differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub value: f64,
    pub error_estimate: f64,
    /// Observed order of the raw differences. `None` when successive
    /// differences already agree to rounding level.
    pub observed_order: Option<f64>,
    /// Change between the last two order estimates.
    pub order_uncertainty: Option<f64>,
    pub raw: Vec<f64>,
}

impl FdEstimate {
    /// Whether the observed order reaches `p` within its own uncertainty.
    pub fn order_at_least(&self, p: f64) -> bool {
        self.observed_order
            .is_none_or(|o| o + self.order_uncertainty.unwrap_or(0.0) >= p)
    }
}

/// Step sequence `h, h/2, h/4, ...` evaluated symmetrically about zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stencil {
    pub steps: Vec<f64>,
}

impl Default for Stencil {
    fn default() -> Self {
        Stencil {
            steps: vec![2e-2, 1e-2, 5e-3, 2.5e-3],
        }
    }
}

impl Stencil {
    pub fn halving(h0: f64, levels: usize) -> Self {
        Stencil {
            steps: (0..levels).map(|k| h0 / 2f64.powi(k as i32)).collect(),
        }
    }

    /// Evaluation points: `0` followed by `+h, -h` for each step.
    pub fn points(&self) -> Vec<f64> {
        let mut p = vec![0.0];
        for h in &self.steps {
            p.push(*h);
            p.push(-*h);
        }
        p
    }

    /// Scale every step by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Stencil {
            steps: self.steps.iter().map(|h| h * factor).collect(),
        }
    }

    /// Rounding level of a difference quotient of order `k` at the smallest step.
    fn noise(&self, values: &[f64], k: i32) -> f64 {
        let fmax = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let h = self.steps.iter().fold(f64::INFINITY, |a, h| a.min(*h));
        1e3 * f64::EPSILON * fmax / h.powi(k)
    }

    /// First derivative at zero from values ordered as in [`Stencil::points`].
    pub fn first(&self, values: &[f64]) -> FdEstimate {
        let raw: Vec<f64> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, h)| (values[1 + 2 * i] - values[2 + 2 * i]) / (2.0 * h))
            .collect();
        extrapolate(raw, self.noise(values, 1))
    }

    /// Second derivative at zero from values ordered as in [`Stencil::points`].
    pub fn second(&self, values: &[f64]) -> FdEstimate {
        let f0 = values[0];
        let raw: Vec<f64> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, h)| (values[1 + 2 * i] + values[2 + 2 * i] - 2.0 * f0) / (h * h))
            .collect();
        extrapolate(raw, self.noise(values, 2))
    }
}

/// Richardson table for an error expansion in even powers of a halved step.
fn extrapolate(raw: Vec<f64>, noise: f64) -> FdEstimate {
    let m = raw.len();
    let mut table = vec![raw.clone()];
    for j in 1..m {
        let prev = &table[j - 1];
        let factor = 4f64.powi(j as i32);
        let next: Vec<f64> = (1..prev.len())
            .map(|i| prev[i] + (prev[i] - prev[i - 1]) / (factor - 1.0))
            .collect();
        table.push(next);
    }
    let value = *table[m - 1].last().unwrap();
    let error_estimate = if m >= 2 {
        (value - table[m - 2].last().unwrap()).abs()
    } else {
        f64::NAN
    };
    let scale = raw.iter().fold(0.0f64, |a, r| a.max(r.abs())).max(1e-300);
    let diffs: Vec<f64> = raw.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    let resolved = |d: f64| d > (1e-11 * scale).max(noise);
    let orders: Vec<Option<f64>> = diffs
        .windows(2)
        .map(|w| (resolved(w[0]) && resolved(w[1])).then(|| (w[0] / w[1]).log2()))
        .collect();
    let observed_order = orders.last().copied().flatten();
    let order_uncertainty = match orders.as_slice() {
        [.., Some(a), Some(b)] => Some((b - a).abs()),
        _ => None,
    };
    FdEstimate {
        value,
        error_estimate,
        observed_order,
        order_uncertainty,
        raw,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(st: &Stencil, f: impl Fn(f64) -> f64) -> Vec<f64> {
        st.points().into_iter().map(f).collect()
    }

    #[test]
    fn derivatives_of_exponential() {
        let st = Stencil::default();
        let v = sample(&st, |t| (0.7 * t).exp() * 3.0);
        let d1 = st.first(&v);
        let d2 = st.second(&v);
        assert!((d1.value - 2.1).abs() < 1e-10, "{d1:?}");
        assert!((d2.value - 1.47).abs() < 1e-8, "{d2:?}");
        let o = d1.observed_order.unwrap();
        assert!((o - 2.0).abs() < 0.05, "order {o}");
    }

    #[test]
    fn quadratic_is_exact() {
        let st = Stencil::default();
        let v = sample(&st, |t| 1.0 + 2.0 * t + 5.0 * t * t);
        let d2 = st.second(&v);
        assert!((d2.value - 10.0).abs() < 1e-8);
        assert!(d2.order_at_least(2.0));
    }

    #[test]
    fn first_order_error_is_detected() {
        let st = Stencil::default();
        let v = sample(&st, |t: f64| t * t + t.abs().powi(3));
        let d2 = st.second(&v);
        let o = d2.observed_order.unwrap();
        assert!((o - 1.0).abs() < 1e-6, "order {o}");
        assert!(!d2.order_at_least(2.0));
    }
}
