//! One-point gradient estimators.
//!
//! Each estimator is split into a propose phase (assemble the exploration
//! action from fresh draws) and an ingest phase (turn the single observed
//! reward into a gradient estimate), so delayed feedback and the wrapper's
//! sampled discrete rewards reuse the same code.

use crate::error::{Error, Result};
use crate::geometry::{LocalMetric, ProductSimplexDomain};
use crate::sampling::RandomStream;

/// `1 - 1/e`.
pub const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// Scales below this are treated as the measure-zero `z = 0` event.
pub const Z_FLOOR: f64 = 1e-12;

/// Which estimator produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Coordinate-masked multi-linear estimator.
    Mlsm,
    /// Product-simplex low-scale branch.
    Mlsm4PsLowZ,
    /// Smoothed-ellipsoid estimator.
    Drsm,
}

/// Everything sampled while assembling one exploration action.
#[derive(Debug, Clone)]
pub struct ExplorationTrace {
    pub kind: EstimatorKind,
    /// Block index the exploration belongs to (filled by the caller).
    pub block: usize,
    /// Round index the action is played at (filled by the caller).
    pub round: usize,
    /// Exploration scale `z` in `[0, 1]`.
    pub z: f64,
    /// Unit sphere direction `v`.
    pub direction: Vec<f64>,
    /// Exploration coordinate `u`: `None` encodes the zero vector. Always
    /// `Some` in the low-scale branch.
    pub coordinate: Option<usize>,
    /// Low-scale branch only: whether the played action carries the `+u/2`
    /// offset.
    pub low_z_offset: bool,
    /// Anchor `x_q`.
    pub anchor: Vec<f64>,
    /// `H v` at the anchor.
    pub hv: Vec<f64>,
    /// `H^{-1} v` at the anchor.
    pub hinv_v: Vec<f64>,
    /// Coordinate step `<H v, u>` actually used in the action (zero when `u`
    /// is the zero vector).
    pub coordinate_step: f64,
    /// The feasibility clamp on the coordinate step triggered. At anchors
    /// whose block sum plus anchor coordinate exceeds one, the raw step can
    /// leave the domain; it is clamped to the block slack so every played
    /// action stays feasible.
    pub clamped: bool,
    /// Smoothing radius (DRSM only; 1 otherwise).
    pub delta: f64,
    /// The action to play.
    pub action: Vec<f64>,
}

/// A one-point estimate `grad = d * scalar * H^{-1} v` with its provenance.
#[derive(Debug, Clone)]
pub struct GradientEstimate {
    /// The estimated linear-function value (the scalar in front of
    /// `d H^{-1} v`).
    pub scalar: f64,
    pub gradient: Vec<f64>,
    pub trace: ExplorationTrace,
}

impl GradientEstimate {
    fn from_scalar(trace: ExplorationTrace, scalar: f64) -> Self {
        let d = trace.hinv_v.len() as f64;
        let gradient = trace.hinv_v.iter().map(|h| d * scalar * h).collect();
        Self {
            scalar,
            gradient,
            trace,
        }
    }
}

fn check_membership(domain: &ProductSimplexDomain, y: &[f64]) -> Result<()> {
    if domain.contains(y) {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "exploration action left the domain (violation {:.3e})",
            domain.membership_violation(y)
        )))
    }
}

/// Assembles the coordinate-masked exploration action
/// `y = z x + z <H v, u> u`.
///
/// The coordinate step is clamped into `[-x_u, 1 - block_sum]`, which keeps
/// `z (x + step * e_u)` inside the closed domain for every `z` in `[0, 1]`;
/// the lower end never binds and the upper end only at anchors where the
/// anchor coordinate exceeds its block slack.
pub fn mlsm_propose(
    metric: &LocalMetric,
    domain: &ProductSimplexDomain,
    stream: &mut RandomStream,
) -> Result<ExplorationTrace> {
    let d = metric.dim();
    let z = stream.scale_z();
    let v = stream.unit_sphere(d);
    let u = stream.exploration_coordinate(d);
    build_masked_trace(metric, domain, z, v, u)
}

fn build_masked_trace(
    metric: &LocalMetric,
    domain: &ProductSimplexDomain,
    z: f64,
    v: Vec<f64>,
    u: Option<usize>,
) -> Result<ExplorationTrace> {
    let x = metric.anchor();
    let hv = metric.dikin_apply(&v);
    let hinv_v = metric.dikin_inv_apply(&v);
    let mut action: Vec<f64> = x.iter().map(|xi| z * xi).collect();
    let mut step = 0.0;
    let mut clamped = false;
    if let Some(i) = u {
        let raw = hv[i];
        let block = domain.block_of(i);
        let slack = 1.0 - domain.block_sum(x, block);
        step = raw.clamp(-x[i], slack.max(0.0));
        clamped = step != raw;
        action[i] = z * (x[i] + step);
    }
    check_membership(domain, &action)?;
    Ok(ExplorationTrace {
        kind: EstimatorKind::Mlsm,
        block: 0,
        round: 0,
        z,
        direction: v,
        coordinate: u,
        low_z_offset: false,
        anchor: x.to_vec(),
        hv,
        hinv_v,
        coordinate_step: step,
        clamped,
        delta: 1.0,
        action,
    })
}

/// Turns the observed reward at the trace's action into the estimate
/// `l = +-2 (1 - 1/e) (d / z) reward`, negative on the zero-coordinate
/// branch, and `grad = d l H^{-1} v`. A scale below `1e-12` yields the zero
/// estimate.
pub fn mlsm_ingest(trace: ExplorationTrace, observed: f64) -> GradientEstimate {
    debug_assert_eq!(trace.kind, EstimatorKind::Mlsm);
    let d = trace.hinv_v.len() as f64;
    let scalar = if trace.z <= Z_FLOOR {
        0.0
    } else {
        let sign = if trace.coordinate.is_some() { 1.0 } else { -1.0 };
        sign * 2.0 * ONE_MINUS_INV_E * (d / trace.z) * observed
    };
    GradientEstimate::from_scalar(trace, scalar)
}

/// Product-simplex proposal: the coordinate-masked action when `z >= 1/2`,
/// otherwise a uniformly random coordinate with the action
/// `z x` or `z x + u/2` at equal probability (feasible because the block sum
/// of `z x` stays below one half).
pub fn ps_propose(
    metric: &LocalMetric,
    domain: &ProductSimplexDomain,
    stream: &mut RandomStream,
) -> Result<ExplorationTrace> {
    let d = metric.dim();
    let z = stream.scale_z();
    let v = stream.unit_sphere(d);
    if z >= 0.5 {
        let u = stream.exploration_coordinate(d);
        return build_masked_trace(metric, domain, z, v, u);
    }
    let i = stream.uniform_coordinate(d);
    let offset = stream.coin();
    let x = metric.anchor();
    let hv = metric.dikin_apply(&v);
    let hinv_v = metric.dikin_inv_apply(&v);
    let mut action: Vec<f64> = x.iter().map(|xi| z * xi).collect();
    if offset {
        action[i] += 0.5;
    }
    check_membership(domain, &action)?;
    Ok(ExplorationTrace {
        kind: EstimatorKind::Mlsm4PsLowZ,
        block: 0,
        round: 0,
        z,
        direction: v,
        coordinate: Some(i),
        low_z_offset: offset,
        anchor: x.to_vec(),
        hv: hv.clone(),
        coordinate_step: hv[i],
        hinv_v,
        clamped: false,
        delta: 1.0,
        action,
    })
}

/// Ingest for the product-simplex estimator: delegates to [`mlsm_ingest`] on
/// the high-scale branch, and uses
/// `l = +-4 (1 - 1/e) d <H v, u> reward` on the low-scale branch (negative
/// when the action carried no offset).
pub fn ps_ingest(trace: ExplorationTrace, observed: f64) -> GradientEstimate {
    match trace.kind {
        EstimatorKind::Mlsm => mlsm_ingest(trace, observed),
        EstimatorKind::Mlsm4PsLowZ => {
            let d = trace.hinv_v.len() as f64;
            let sign = if trace.low_z_offset { 1.0 } else { -1.0 };
            let scalar = sign * 4.0 * ONE_MINUS_INV_E * d * trace.coordinate_step * observed;
            GradientEstimate::from_scalar(trace, scalar)
        }
        EstimatorKind::Drsm => unreachable!("DRSM traces use drsm_ingest"),
    }
}

/// Smoothed-ellipsoid proposal `y = z x + delta z H v`; the offset point
/// `x + delta H v` lies in the Dikin ellipsoid for `delta <= 1`, and scaling
/// by `z` toward the origin keeps it in the domain.
pub fn drsm_propose(
    metric: &LocalMetric,
    domain: &ProductSimplexDomain,
    delta: f64,
    stream: &mut RandomStream,
) -> Result<ExplorationTrace> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!(
            "smoothing radius must lie in (0, 1], got {delta}"
        )));
    }
    let d = metric.dim();
    let z = stream.scale_z();
    let v = stream.unit_sphere(d);
    let x = metric.anchor();
    let hv = metric.dikin_apply(&v);
    let hinv_v = metric.dikin_inv_apply(&v);
    let action: Vec<f64> = x
        .iter()
        .zip(&hv)
        .map(|(xi, hvi)| z * (xi + delta * hvi))
        .collect();
    check_membership(domain, &action)?;
    Ok(ExplorationTrace {
        kind: EstimatorKind::Drsm,
        block: 0,
        round: 0,
        z,
        direction: v,
        coordinate: None,
        low_z_offset: false,
        anchor: x.to_vec(),
        hv,
        hinv_v,
        coordinate_step: 0.0,
        clamped: false,
        delta,
        action,
    })
}

/// Ingest for the smoothed estimator:
/// `grad = (1 - 1/e) (d / (delta z)) reward H^{-1} v`, zero when the scale
/// underflows.
pub fn drsm_ingest(trace: ExplorationTrace, observed: f64) -> GradientEstimate {
    debug_assert_eq!(trace.kind, EstimatorKind::Drsm);
    let scalar = if trace.z <= Z_FLOOR {
        0.0
    } else {
        ONE_MINUS_INV_E * observed / (trace.delta * trace.z)
    };
    GradientEstimate::from_scalar(trace, scalar)
}
