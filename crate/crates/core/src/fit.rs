//! Gradient descent over unconstrained weights, projected onto ultrametrics
//! by the min-max operator at every step.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{cost_composite, CostSpec};
use crate::error::{Error, Result};
use crate::graph::{EdgeWeightVector, EdgeWeightedGraph};
use crate::hierarchy::{single_linkage, Dendrogram};
use crate::subdominant::{subdominant, subdominant_vjp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    /// Adam with the max-of-second-moment correction.
    AmsGrad { beta1: f64, beta2: f64, epsilon: f64 },
    /// Plain fixed-step gradient descent.
    GradientDescent,
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::AmsGrad { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub cost: CostSpec,
    pub iterations: usize,
    pub step_size: f64,
    pub optimizer: Optimizer,
    /// Seed for any sampling done on behalf of this fit (e.g. triplets).
    /// The descent itself is deterministic.
    pub seed: u64,
    /// Stop once `|J_t - J_{t-1}| <= tol * |J_{t-1}|`; 0 runs every iteration.
    pub convergence_tol: f64,
    pub record_trace: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            cost: CostSpec::closest(),
            iterations: 150,
            step_size: 0.1,
            optimizer: Optimizer::default(),
            seed: 0,
            convergence_tol: 0.0,
            record_trace: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1"));
        }
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::InvalidConfig("step size must be positive"));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol < 0.0 {
            return Err(Error::InvalidConfig("convergence tolerance must be non-negative"));
        }
        if let Optimizer::AmsGrad { beta1, beta2, epsilon } = self.optimizer {
            if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) {
                return Err(Error::InvalidConfig("moment decay rates must lie in [0, 1)"));
            }
            if epsilon.is_nan() || epsilon <= 0.0 {
                return Err(Error::InvalidConfig("epsilon must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    /// Fitted ultrametric, clamped at 0.
    pub u: EdgeWeightVector,
    /// Final optimization variable.
    pub w_tilde: EdgeWeightVector,
    pub dendrogram: Dendrogram,
    /// Cost at the starting point and after every update. Empty when
    /// `record_trace` is off.
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// Number of edges whose fitted value was negative and clamped to 0.
    pub clamped_edges: usize,
}

struct AmsGradState {
    m: Vec<f64>,
    v: Vec<f64>,
    v_max: Vec<f64>,
    t: i32,
}

impl AmsGradState {
    fn new(len: usize) -> Self {
        Self { m: vec![0.0; len], v: vec![0.0; len], v_max: vec![0.0; len], t: 0 }
    }

    fn step(&mut self, x: &mut [f64], grad: &[f64], lr: f64, beta1: f64, beta2: f64, eps: f64) {
        self.t += 1;
        let bc1 = 1.0 - libm::pow(beta1, self.t as f64);
        let bc2_sqrt = libm::sqrt(1.0 - libm::pow(beta2, self.t as f64));
        for i in 0..x.len() {
            let g = grad[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            self.v_max[i] = self.v_max[i].max(self.v[i]);
            let denom = libm::sqrt(self.v_max[i]) / bc2_sqrt + eps;
            x[i] -= lr * (self.m[i] / bc1) / denom;
        }
    }
}

/// Fits an ultrametric to `(g, w)` by minimizing `cfg.cost` composed with the
/// min-max operator, starting from `w̃ = w`.
pub fn fit(g: &EdgeWeightedGraph, w: &EdgeWeightVector, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    g.check_len(w.len())?;
    let reference = w.as_slice();
    let mut x = reference.to_vec();
    let mut adam = AmsGradState::new(x.len());
    let mut trace = Vec::new();
    let mut previous: Option<f64> = None;
    let mut executed = 0;

    let evaluate = |x: &[f64], iteration: usize| -> Result<(f64, Vec<f64>)> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCost { iteration });
        }
        let res = subdominant(g, &EdgeWeightVector::from_vec_unchecked(x.to_vec()))?;
        let c = cost_composite(&cfg.cost, &res, g.edges(), reference)?;
        if !c.value.is_finite() {
            return Err(Error::NonFiniteCost { iteration });
        }
        Ok((c.value, subdominant_vjp(&res, &c.grad)?))
    };

    for iteration in 0..cfg.iterations {
        let (value, grad) = evaluate(&x, iteration)?;
        if cfg.record_trace {
            trace.push(value);
        }
        if let Some(prev) = previous {
            if cfg.convergence_tol > 0.0 && (value - prev).abs() <= cfg.convergence_tol * prev.abs() {
                break;
            }
        }
        previous = Some(value);
        match cfg.optimizer {
            Optimizer::AmsGrad { beta1, beta2, epsilon } => {
                adam.step(&mut x, &grad, cfg.step_size, beta1, beta2, epsilon)
            }
            Optimizer::GradientDescent => {
                for (xi, gi) in x.iter_mut().zip(&grad) {
                    *xi -= cfg.step_size * gi;
                }
            }
        }
        executed += 1;
    }

    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteCost { iteration: executed });
    }
    let w_tilde = EdgeWeightVector::from_vec_unchecked(x);
    let res = subdominant(g, &w_tilde)?;
    if cfg.record_trace && trace.len() == executed {
        let c = cost_composite(&cfg.cost, &res, g.edges(), reference)?;
        if !c.value.is_finite() {
            return Err(Error::NonFiniteCost { iteration: executed });
        }
        trace.push(c.value);
    }
    let mut clamped_edges = 0;
    let u: Vec<f64> = res
        .u
        .iter()
        .map(|&v| {
            if v < 0.0 {
                clamped_edges += 1;
                0.0
            } else {
                v
            }
        })
        .collect();
    let u = EdgeWeightVector::from_vec_unchecked(u);
    let dendrogram = if clamped_edges == 0 { res.dendrogram } else { single_linkage(g, &u)? };
    Ok(FitResult { u, w_tilde, dendrogram, trace, iterations: executed, clamped_edges })
}

/// Rescales a cost trace to `[0, 1]` (lowest value → 0, highest → 1). A
/// constant trace maps to zeros.
pub fn normalize_trace(trace: &[f64]) -> Vec<f64> {
    let lo = trace.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range.is_nan() || range <= 0.0 {
        return vec![0.0; trace.len()];
    }
    trace.iter().map(|v| (v - lo) / range).collect()
}
