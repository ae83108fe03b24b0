//! Three-factor lognormal cross-currency model under the domestic measure.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{invalid, EpsError, Result};
use crate::numerics::GaussianStream;

/// Volatility loadings on the three Brownian factors, annualized.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VolVector(pub [f64; 3]);

impl VolVector {
    pub const ZERO: VolVector = VolVector([0.0; 3]);

    pub fn dot(&self, other: &VolVector) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Cosine of the angle between two loadings.
    pub fn cosine(&self, other: &VolVector) -> Result<f64> {
        let n = self.norm() * other.norm();
        if n == 0.0 {
            return invalid("cosine of a zero volatility vector");
        }
        Ok((self.dot(other) / n).clamp(-1.0, 1.0))
    }
}

impl Add for VolVector {
    type Output = VolVector;
    fn add(self, o: VolVector) -> VolVector {
        VolVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for VolVector {
    type Output = VolVector;
    fn sub(self, o: VolVector) -> VolVector {
        VolVector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for VolVector {
    type Output = VolVector;
    fn neg(self) -> VolVector {
        VolVector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<VolVector> for f64 {
    type Output = VolVector;
    fn mul(self, v: VolVector) -> VolVector {
        VolVector([self * v.0[0], self * v.0[1], self * v.0[2]])
    }
}

/// Market constants: rates, volatility loadings and spot levels.
///
/// `q0` is a direct quote (domestic units per foreign unit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    pub r_d: f64,
    pub r_f: f64,
    pub sigma_d: VolVector,
    pub sigma_f: VolVector,
    pub sigma_q: VolVector,
    pub q0: f64,
    pub s_d0: f64,
    pub s_f0: f64,
}

impl Default for MarketParams {
    /// AUD/USD reference market with the rounded loadings used for the
    /// reference tables.
    fn default() -> Self {
        MarketParams {
            r_d: 0.0435,
            r_f: 0.0525,
            sigma_d: VolVector([0.10, 0.0, 0.0]),
            sigma_f: VolVector([0.015, 0.1493, 0.0]),
            sigma_q: VolVector([0.0045, -0.005, 0.0898]),
            q0: 1.48,
            s_d0: 76.5,
            s_f0: 52.5,
        }
    }
}

impl MarketParams {
    /// Checks positivity of the spot levels and finiteness of all inputs.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.r_d, self.r_f, self.q0, self.s_d0, self.s_f0]
            .iter()
            .chain(self.sigma_d.0.iter())
            .chain(self.sigma_f.0.iter())
            .chain(self.sigma_q.0.iter())
            .all(|x| x.is_finite());
        if !finite {
            return invalid("non-finite market parameter");
        }
        if self.q0 <= 0.0 || self.s_d0 <= 0.0 || self.s_f0 <= 0.0 {
            return invalid("spot levels and FX rate must be positive");
        }
        Ok(())
    }

    /// Checks that the volatility matrix is non-singular, i.e. the model is
    /// complete.
    pub fn check_complete(&self) -> Result<()> {
        self.validate()?;
        let [a, b, c] = [self.sigma_d.0, self.sigma_f.0, self.sigma_q.0];
        let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]);
        let scale = self.sigma_d.norm() * self.sigma_f.norm() * self.sigma_q.norm();
        if scale == 0.0 || det.abs() <= 1e-12 * scale {
            return invalid("volatility matrix is singular");
        }
        Ok(())
    }

    /// Loading of the effective foreign asset `Q·S^f`.
    pub fn sigma_fe(&self) -> VolVector {
        self.sigma_f + self.sigma_q
    }

    /// Initial effective foreign level `Q₀·S^f₀` in domestic currency.
    pub fn s_fe0(&self) -> f64 {
        self.q0 * self.s_f0
    }
}

/// Scalar volatilities and pairwise correlations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationInputs {
    pub vol_d: f64,
    pub vol_f: f64,
    pub vol_q: f64,
    pub rho_df: f64,
    pub rho_dq: f64,
    pub rho_fq: f64,
}

impl Default for CorrelationInputs {
    fn default() -> Self {
        CorrelationInputs {
            vol_d: 0.10,
            vol_f: 0.15,
            vol_q: 0.09,
            rho_df: 0.10,
            rho_dq: 0.05,
            rho_fq: -0.05,
        }
    }
}

/// Lower-triangular loadings reproducing the given volatilities and
/// correlations.
pub fn build_vol_vectors(inputs: &CorrelationInputs) -> Result<(VolVector, VolVector, VolVector)> {
    let CorrelationInputs {
        vol_d,
        vol_f,
        vol_q,
        rho_df,
        rho_dq,
        rho_fq,
    } = *inputs;
    if !(vol_d > 0.0 && vol_f > 0.0 && vol_q > 0.0) {
        return invalid("volatilities must be positive");
    }
    for r in [rho_df, rho_dq, rho_fq] {
        if !(-1.0..=1.0).contains(&r) {
            return invalid(format!("correlation {r} outside [-1, 1]"));
        }
    }
    if rho_df.abs() >= 1.0 {
        return invalid("equity correlation must lie strictly inside (-1, 1)");
    }
    let c12 = (1.0 - rho_df * rho_df).sqrt();
    let a1 = rho_dq;
    let a2 = (rho_fq - rho_df * rho_dq) / c12;
    let a3_sq = 1.0 - a1 * a1 - a2 * a2;
    if a3_sq < 0.0 {
        return invalid("correlation matrix is not positive semi-definite");
    }
    Ok((
        VolVector([vol_d, 0.0, 0.0]),
        VolVector([vol_f * rho_df, vol_f * c12, 0.0]),
        VolVector([vol_q * a1, vol_q * a2, vol_q * a3_sq.sqrt()]),
    ))
}

/// Quanto drift adjustment `r_f − r_d − σᶠ·σ^q`.
pub fn delta_q(params: &MarketParams) -> f64 {
    params.r_f - params.r_d - params.sigma_f.dot(&params.sigma_q)
}

/// Joint terminal values of the domestic equity, foreign equity and FX rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalSample {
    pub s_d_t: f64,
    pub s_f_t: f64,
    pub q_t: f64,
}

impl TerminalSample {
    pub fn s_fe_t(&self) -> f64 {
        self.q_t * self.s_f_t
    }
}

/// Precomputed exact lognormal map from three independent normals to the
/// log-returns of `(S^d, S^f, Q)` over a horizon `dt`.
#[derive(Debug, Clone, Copy)]
pub struct LognormalStep {
    drift: [f64; 3],
    load: [VolVector; 3],
}

impl LognormalStep {
    pub fn new(params: &MarketParams, dt: f64) -> Self {
        let p = params;
        let drift = [
            (p.r_d - 0.5 * p.sigma_d.norm_sq()) * dt,
            (p.r_f - p.sigma_f.dot(&p.sigma_q) - 0.5 * p.sigma_f.norm_sq()) * dt,
            (p.r_d - p.r_f - 0.5 * p.sigma_q.norm_sq()) * dt,
        ];
        let sq = dt.sqrt();
        LognormalStep {
            drift,
            load: [sq * p.sigma_d, sq * p.sigma_f, sq * p.sigma_q],
        }
    }

    /// Gross returns `(S^d_T/S^d_0, S^f_T/S^f_0, Q_T/Q_0)` for the draw `z`.
    #[inline]
    pub fn gross(&self, z: &[f64; 3]) -> [f64; 3] {
        let zv = VolVector(*z);
        [
            (self.drift[0] + self.load[0].dot(&zv)).exp(),
            (self.drift[1] + self.load[1].dot(&zv)).exp(),
            (self.drift[2] + self.load[2].dot(&zv)).exp(),
        ]
    }
}

/// Exact terminal draws; consumes three normals per sample from `stream`.
pub fn simulate_terminal(
    params: &MarketParams,
    t: f64,
    n: usize,
    stream: GaussianStream,
) -> Result<Vec<TerminalSample>> {
    params.validate()?;
    if !(t > 0.0) {
        return invalid("maturity must be positive");
    }
    if n == 0 {
        return invalid("sample count must be at least 1");
    }
    let step = LognormalStep::new(params, t);
    let mut cur = stream.cursor();
    Ok((0..n)
        .map(|_| {
            let z = [cur.next_normal(), cur.next_normal(), cur.next_normal()];
            let g = step.gross(&z);
            TerminalSample {
                s_d_t: params.s_d0 * g[0],
                s_f_t: params.s_f0 * g[1],
                q_t: params.q0 * g[2],
            }
        })
        .collect())
}

/// One node of a simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub s_d: f64,
    pub s_f: f64,
    pub q: f64,
    pub s_fe: f64,
}

/// Path on a uniform grid of `steps` intervals with exact lognormal
/// increments; the first node is the initial state.
pub fn simulate_path(
    params: &MarketParams,
    t: f64,
    steps: usize,
    stream: GaussianStream,
) -> Result<Vec<PathPoint>> {
    params.validate()?;
    if !(t > 0.0) {
        return invalid("maturity must be positive");
    }
    if steps == 0 {
        return Err(EpsError::InvalidInput("steps must be at least 1".into()));
    }
    let dt = t / steps as f64;
    let step = LognormalStep::new(params, dt);
    let mut cur = stream.cursor();
    let (mut s_d, mut s_f, mut q) = (params.s_d0, params.s_f0, params.q0);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(PathPoint {
        t: 0.0,
        s_d,
        s_f,
        q,
        s_fe: q * s_f,
    });
    for i in 1..=steps {
        let z = [cur.next_normal(), cur.next_normal(), cur.next_normal()];
        let g = step.gross(&z);
        s_d *= g[0];
        s_f *= g[1];
        q *= g[2];
        out.push(PathPoint {
            t: i as f64 * dt,
            s_d,
            s_f,
            q,
            s_fe: q * s_f,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_q_reference_market() {
        assert!((delta_q(&MarketParams::default()) - 0.0096790).abs() < 1e-6);
    }

    #[test]
    fn zero_correlations_give_axes() {
        let inp = CorrelationInputs {
            rho_df: 0.0,
            rho_dq: 0.0,
            rho_fq: 0.0,
            ..Default::default()
        };
        let (d, f, q) = build_vol_vectors(&inp).unwrap();
        assert_eq!(d.0, [0.10, 0.0, 0.0]);
        assert_eq!(f.0, [0.0, 0.15, 0.0]);
        assert_eq!(q.0, [0.0, 0.0, 0.09]);
    }

    #[test]
    fn non_psd_rejected() {
        let inp = CorrelationInputs {
            rho_df: 0.9,
            rho_dq: 0.9,
            rho_fq: -0.9,
            ..Default::default()
        };
        assert!(build_vol_vectors(&inp).is_err());
    }

    #[test]
    fn reference_market_is_complete() {
        MarketParams::default().check_complete().unwrap();
        let mut p = MarketParams::default();
        p.sigma_q = p.sigma_f;
        assert!(p.check_complete().is_err());
    }

    #[test]
    fn path_rejects_zero_steps() {
        assert!(
            simulate_path(&MarketParams::default(), 1.0, 0, GaussianStream::new(1, 0)).is_err()
        );
        assert!(
            simulate_terminal(&MarketParams::default(), 0.0, 1, GaussianStream::new(1, 0)).is_err()
        );
    }
}
