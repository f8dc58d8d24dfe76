//! Pitman-Yor mixture (PYM) and Dirichlet-process mixture (DPM) estimators.
//!
//! The prior over `(d, α)` is flat in the expected prior entropy `h` and
//! weighted by `q(γ)` in the tail coordinate `γ`. The posterior over `(d, α)` is
//! integrated on a Gauss-Legendre grid laid out around its mode using the local
//! curvature, in `(logit d, ln α)` coordinates.

use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counts::CountData;
use crate::error::{domain, Error, Result};
use crate::estimate::{Diagnostics, EntropyEstimate};
use crate::optimize::{hessian, nelder_mead, NelderMead};
use crate::pitman_yor::{log_evidence, posterior_moments, PosteriorMoments, PyParams, Suff};
use crate::quadrature::gauss_legendre;
use crate::sampler::{par_draws, posterior_entropy_with, RngSeed, DEFAULT_TAIL_VAR_TOL};
use crate::special::{inverse_digamma, psi0, psi1};

/// Minimum number of repeated observations for a finite PYM estimate.
pub const REQUIRED_COINCIDENCES: u64 = 2;

/// Prior weight `q(γ)` on the tail coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaPrior {
    /// `q(γ) = exp(−10 / (1 − γ))` on `[0, 1)`.
    Default,
    /// `q(γ) = 1` on `[0, 1]`.
    Flat,
    /// Piecewise-linear `q` through `[γ, q]` knots, zero outside them.
    Table(Vec<[f64; 2]>),
    /// All weight on `γ = 0`, i.e. `d = 0`: the Dirichlet-process mixture.
    DirichletOnly,
}

impl GammaPrior {
    /// `ln q(γ)`; `-inf` where `q` vanishes.
    pub fn ln_q(&self, gamma: f64) -> f64 {
        match self {
            GammaPrior::Default => {
                if (0.0..1.0).contains(&gamma) {
                    -10.0 / (1.0 - gamma)
                } else {
                    f64::NEG_INFINITY
                }
            }
            GammaPrior::Flat => {
                if (0.0..=1.0).contains(&gamma) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            GammaPrior::Table(knots) => {
                for w in knots.windows(2) {
                    let ([g0, q0], [g1, q1]) = (w[0], w[1]);
                    if gamma >= g0 && gamma <= g1 {
                        let t = if g1 > g0 { (gamma - g0) / (g1 - g0) } else { 0.0 };
                        return (q0 + t * (q1 - q0)).ln();
                    }
                }
                f64::NEG_INFINITY
            }
            GammaPrior::DirichletOnly => {
                if gamma == 0.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let GammaPrior::Table(knots) = self {
            if knots.len() < 2 {
                return Err(Error::Config("gamma prior table needs at least two knots".into()));
            }
            for w in knots.windows(2) {
                if !(w[1][0] > w[0][0]) {
                    return Err(Error::Config("gamma prior knots must be strictly increasing".into()));
                }
            }
            if knots.iter().any(|k| !(k[0] >= 0.0 && k[0] <= 1.0 && k[1] >= 0.0 && k[1].is_finite())) {
                return Err(Error::Config("gamma prior knots need γ in [0, 1] and q >= 0".into()));
            }
        }
        Ok(())
    }
}

impl FromStr for GammaPrior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(GammaPrior::Default),
            "flat" => Ok(GammaPrior::Flat),
            "dirichlet" | "dp" => Ok(GammaPrior::DirichletOnly),
            other => Err(Error::Config(format!(
                "unknown gamma prior {other:?} (expected default, flat or dirichlet)"
            ))),
        }
    }
}

/// Settings for the PYM and DPM estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PymConfig {
    pub gamma_prior: GammaPrior,
    /// Gauss-Legendre nodes per axis.
    pub grid_size: usize,
    /// Grid half-width in posterior standard deviations.
    pub std_span: f64,
    /// Largest concentration the grid may place a node at.
    pub alpha_cap: f64,
    /// Captured-mass level below which a warning is attached.
    pub mass_threshold: f64,
}

impl Default for PymConfig {
    fn default() -> Self {
        PymConfig {
            gamma_prior: GammaPrior::Default,
            grid_size: 30,
            std_span: 6.0,
            alpha_cap: 1e12,
            mass_threshold: 0.99,
        }
    }
}

impl PymConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 5 {
            return Err(Error::Config(format!("grid size must be at least 5, got {}", self.grid_size)));
        }
        if !(self.std_span > 0.0 && self.std_span.is_finite()) {
            return Err(Error::Config(format!("std span must be positive, got {}", self.std_span)));
        }
        if !(self.alpha_cap > 1.0) {
            return Err(Error::Config(format!("alpha cap must exceed 1, got {}", self.alpha_cap)));
        }
        self.gamma_prior.validate()
    }
}

/// Expected prior entropy `h` and tail coordinate `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HGammaParams {
    pub h: f64,
    pub gamma: f64,
}

/// `h = ψ0(α+1) − ψ0(1−d)`, `γ = (ψ0(1) − ψ0(1−d)) / h`.
pub fn to_hgamma(p: PyParams) -> Result<HGammaParams> {
    p.validate()?;
    if p.alpha < 0.0 {
        return Err(domain(format!("the mixture prior needs alpha >= 0, got {}", p.alpha)));
    }
    if p.alpha == 0.0 && p.d == 0.0 {
        return Err(domain("h = 0 at d = alpha = 0; gamma is undefined"));
    }
    let h = psi0(p.alpha + 1.0) - psi0(1.0 - p.d);
    let gamma = (psi0(1.0) - psi0(1.0 - p.d)) / h;
    Ok(HGammaParams { h, gamma })
}

/// Inverse of [`to_hgamma`].
pub fn to_dalpha(hg: HGammaParams) -> Result<PyParams> {
    let HGammaParams { h, gamma } = hg;
    if !(h > 0.0 && h.is_finite()) {
        return Err(domain(format!("h must be positive, got {h}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(domain(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let psi1_one = psi0(1.0);
    let mut alpha = inverse_digamma(h * (1.0 - gamma) + psi1_one)? - 1.0;
    let mut d = 1.0 - inverse_digamma(psi1_one - h * gamma)?;
    if alpha < 0.0 && alpha > -1e-10 {
        alpha = 0.0;
    }
    if d < 0.0 && d > -1e-10 {
        d = 0.0;
    }
    PyParams::new(d, alpha)
}

/// `∂(h, γ) / ∂(d, α)` as `[[∂h/∂d, ∂h/∂α], [∂γ/∂d, ∂γ/∂α]]`.
pub fn hgamma_jacobian(p: PyParams) -> Result<[[f64; 2]; 2]> {
    let hg = to_hgamma(p)?;
    let (t_d, t_a) = (psi1(1.0 - p.d), psi1(p.alpha + 1.0));
    let h = hg.h;
    let g = hg.gamma * h;
    Ok([[t_d, t_a], [t_d * (h - g) / (h * h), -g * t_a / (h * h)]])
}

/// `ln |det ∂(h, γ)/∂(d, α)| = ln ψ1(1−d) + ln ψ1(α+1) − ln h`.
fn ln_abs_det(d: f64, alpha: f64, h: f64) -> f64 {
    psi1(1.0 - d).ln() + psi1(alpha + 1.0).ln() - h.ln()
}

/// Log prior density on `(d, α)`: `ln q(γ) + ln |det J|`.
pub fn log_prior_density(p: PyParams, cfg: &PymConfig) -> f64 {
    match to_hgamma(p) {
        Ok(hg) => {
            let lq = cfg.gamma_prior.ln_q(hg.gamma);
            if lq == f64::NEG_INFINITY {
                lq
            } else {
                lq + ln_abs_det(p.d, p.alpha, hg.h)
            }
        }
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Log prior density on `α` alone along `d = 0`, flat in `h`: `ln ψ1(α + 1)`.
pub fn dpm_log_prior_density(alpha: f64) -> f64 {
    if alpha > 0.0 {
        psi1(alpha + 1.0).ln()
    } else {
        f64::NEG_INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Model<'a> {
    Pym(&'a GammaPrior),
    Dpm,
}

impl Model<'_> {
    fn log_post(&self, s: &Suff, d: f64, alpha: f64) -> f64 {
        let prior = match self {
            Model::Pym(q) => {
                if !(alpha > 0.0 && (0.0..1.0).contains(&d)) {
                    return f64::NEG_INFINITY;
                }
                let h = psi0(alpha + 1.0) - psi0(1.0 - d);
                let lq = q.ln_q((psi0(1.0) - psi0(1.0 - d)) / h);
                if lq == f64::NEG_INFINITY {
                    return lq;
                }
                lq + ln_abs_det(d, alpha, h)
            }
            Model::Dpm => dpm_log_prior_density(alpha),
        };
        let ev = log_evidence(s, d, alpha);
        if ev == f64::NEG_INFINITY {
            ev
        } else {
            ev + prior
        }
    }
}

const U_MIN: f64 = -30.0;
const U_MAX: f64 = 30.0;
const LAMBDA_MIN: f64 = -25.0;

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(d: f64) -> f64 {
    (d / (1.0 - d)).ln()
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Coordinates in which [`quadrature_grid`] interprets the centre and curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridCoords {
    /// `(d, α)` directly; the grid is an axis-aligned box.
    Natural,
    /// `(logit d, ln α)`; the grid follows the correlation of the curvature.
    Transformed,
}

/// One quadrature node; `weight` is with respect to `dd dα`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub params: PyParams,
    pub weight: f64,
}

/// A set of quadrature nodes over `(d, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nodes: Vec<GridNode>,
    /// Set when the curvature was not positive definite and the semi-infinite rule was used.
    pub fallback: bool,
}

impl Grid {
    fn ranges(&self) -> ([f64; 2], [f64; 2]) {
        let mut d = [f64::INFINITY, f64::NEG_INFINITY];
        let mut a = [f64::INFINITY, f64::NEG_INFINITY];
        for n in &self.nodes {
            d = [d[0].min(n.params.d), d[1].max(n.params.d)];
            a = [a[0].min(n.params.alpha), a[1].max(n.params.alpha)];
        }
        (d, a)
    }
}

fn positive_definite(h: &[[f64; 2]; 2]) -> bool {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    h.iter().flatten().all(|v| v.is_finite()) && h[0][0] > 0.0 && h[1][1] > 0.0 && det > 0.0
}

/// Quadrature nodes around `center` scaled by the negative log-posterior curvature `hess`.
///
/// With positive-definite curvature the nodes span `center ± std_span` standard
/// deviations (clipped to `d ∈ [0, 1)`, `α ∈ [0, alpha_cap]`). Otherwise the
/// grid falls back to Gauss-Legendre in `d` over `[0, 1)` times a rational
/// map `α = c t / (1 − t)` of `t ∈ (0, 1)` with `c = max(α_center, 1)`.
pub fn quadrature_grid(center: PyParams, hess: [[f64; 2]; 2], cfg: &PymConfig, coords: GridCoords) -> Grid {
    let n = cfg.grid_size;
    let span = cfg.std_span;
    if !positive_definite(&hess) {
        return fallback_grid(center.alpha, n, cfg.alpha_cap, false);
    }
    let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
    let rule = gauss_legendre(n);
    let mut nodes = Vec::with_capacity(n * n);
    match coords {
        GridCoords::Natural => {
            let sd = (hess[1][1] / det).sqrt();
            let sa = (hess[0][0] / det).sqrt();
            let (d0, d1) = ((center.d - span * sd).max(0.0), (center.d + span * sd).min(1.0));
            let (a0, a1) = ((center.alpha - span * sa).max(0.0), (center.alpha + span * sa).min(cfg.alpha_cap));
            let (hd, ha) = (0.5 * (d1 - d0), 0.5 * (a1 - a0));
            for &(x, wx) in &rule {
                for &(y, wy) in &rule {
                    let params = PyParams { d: d0 + hd * (x + 1.0), alpha: a0 + ha * (y + 1.0) };
                    nodes.push(GridNode { params, weight: wx * wy * hd * ha });
                }
            }
        }
        GridCoords::Transformed => {
            let u0 = logit(center.d);
            let l0 = center.alpha.ln();
            // Marginal sd of u, conditional sd of λ given u, and the regression slope.
            let su = (hess[1][1] / det).sqrt();
            let sl = 1.0 / hess[1][1].sqrt();
            let slope = -hess[0][1] / hess[1][1];
            let l_max = cfg.alpha_cap.ln();
            for &(x, wx) in &rule {
                let u = u0 + span * su * x;
                if !(U_MIN - 10.0..=U_MAX + 6.0).contains(&u) {
                    continue;
                }
                let d = logistic(u);
                if d <= 0.0 || d >= 1.0 {
                    continue;
                }
                let ln_jd = -softplus(-u) - softplus(u);
                let lc = l0 + slope * (u - u0);
                for &(y, wy) in &rule {
                    let l = lc + span * sl * y;
                    if l > l_max {
                        continue;
                    }
                    let w = wx * wy * span * span * su * sl;
                    nodes.push(GridNode {
                        params: PyParams { d, alpha: l.exp() },
                        weight: w * (ln_jd + l).exp(),
                    });
                }
            }
        }
    }
    Grid { nodes, fallback: false }
}

fn fallback_grid(alpha_center: f64, n: usize, alpha_cap: f64, dirichlet_only: bool) -> Grid {
    let c = alpha_center.max(1.0);
    let rule01: Vec<(f64, f64)> = gauss_legendre(n).into_iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let d_rule: Vec<(f64, f64)> = if dirichlet_only { vec![(0.0, 1.0)] } else { rule01.clone() };
    let mut nodes = Vec::with_capacity(d_rule.len() * n);
    for &(d, wd) in &d_rule {
        for &(t, wt) in &rule01 {
            let alpha = c * t / (1.0 - t);
            if alpha > alpha_cap {
                continue;
            }
            let jac = c / ((1.0 - t) * (1.0 - t));
            nodes.push(GridNode { params: PyParams { d, alpha }, weight: wd * wt * jac });
        }
    }
    Grid { nodes, fallback: true }
}

/// Grid along `d = 0` in `λ = ln α`, centred at `center_alpha` with curvature `curv` in λ.
fn dpm_grid(center_alpha: f64, curv: f64, cfg: &PymConfig) -> Grid {
    if !(curv.is_finite() && curv > 0.0) {
        return fallback_grid(center_alpha, cfg.grid_size, cfg.alpha_cap, true);
    }
    let sl = 1.0 / curv.sqrt();
    let l0 = center_alpha.ln();
    let l_max = cfg.alpha_cap.ln();
    let nodes = gauss_legendre(cfg.grid_size)
        .into_iter()
        .filter_map(|(x, w)| {
            let l = l0 + cfg.std_span * sl * x;
            (l <= l_max).then(|| GridNode {
                params: PyParams { d: 0.0, alpha: l.exp() },
                weight: w * cfg.std_span * sl * l.exp(),
            })
        })
        .collect();
    Grid { nodes, fallback: false }
}

fn check_data(c: &CountData, cfg: &PymConfig) -> Result<()> {
    cfg.validate()?;
    if c.is_empty() {
        return Err(Error::EmptyData);
    }
    let found = c.coincidences();
    if found < REQUIRED_COINCIDENCES {
        return Err(Error::NoCoincidences { found, required: REQUIRED_COINCIDENCES });
    }
    Ok(())
}

fn theta_to_params(x: &[f64], l_max: f64) -> (f64, f64) {
    let u = x[0].clamp(U_MIN, U_MAX);
    let l = x[1].clamp(LAMBDA_MIN, l_max);
    (logistic(u), l.exp())
}

fn map_fit_suff(s: &Suff, model: Model, cfg: &PymConfig) -> Result<PyParams> {
    let l_max = cfg.alpha_cap.ln().min(60.0);
    let opts = NelderMead { step: 0.7, ..NelderMead::default() };
    let best = match model {
        Model::Dpm => {
            let f = |x: &[f64]| -model.log_post(s, 0.0, x[0].clamp(LAMBDA_MIN, l_max).exp());
            [0.0, s.k.max(1.0).ln()]
                .iter()
                .map(|&l| nelder_mead(f, &[l], opts))
                .min_by(|a, b| a.fx.total_cmp(&b.fx))
                .expect("two starts")
        }
        Model::Pym(_) => {
            let f = |x: &[f64]| {
                let (d, a) = theta_to_params(x, l_max);
                -model.log_post(s, d, a)
            };
            let mut starts = Vec::new();
            for d in [0.05f64, 0.5] {
                for a in [1.0, s.k.max(1.0)] {
                    starts.push([logit(d), a.ln()]);
                }
            }
            starts
                .iter()
                .map(|x0| nelder_mead(f, x0, opts))
                .min_by(|a, b| a.fx.total_cmp(&b.fx))
                .expect("four starts")
        }
    };
    if !best.fx.is_finite() {
        return Err(Error::Numerical(format!(
            "MAP search found no point with finite posterior density (last point {:?})",
            best.x
        )));
    }
    Ok(match model {
        Model::Dpm => PyParams { d: 0.0, alpha: best.x[0].clamp(LAMBDA_MIN, l_max).exp() },
        Model::Pym(_) => {
            let (d, alpha) = theta_to_params(&best.x, l_max);
            PyParams { d, alpha }
        }
    })
}

/// Maximum a posteriori `(d, α)` under the configured prior.
pub fn map_fit(c: &CountData, cfg: &PymConfig) -> Result<PyParams> {
    cfg.validate()?;
    if c.is_empty() {
        return Err(Error::EmptyData);
    }
    let s = Suff::from_counts(c);
    map_fit_suff(&s, model_for(cfg), cfg)
}

fn model_for(cfg: &PymConfig) -> Model<'_> {
    match cfg.gamma_prior {
        GammaPrior::DirichletOnly => Model::Dpm,
        ref q => Model::Pym(q),
    }
}

/// Gridded posterior over `(d, α)` together with the entropy moments at each node.
#[derive(Debug, Clone)]
pub struct PymPosterior {
    pub map: PyParams,
    pub log_evidence_at_map: f64,
    /// Grid nodes with normalized posterior weights.
    pub nodes: Vec<PyParams>,
    pub weights: Vec<f64>,
    pub moments: Vec<PosteriorMoments>,
    pub mean: f64,
    pub variance: f64,
    pub diagnostics: Diagnostics,
    groups: Vec<(f64, f64)>,
}

struct Weighted {
    log_w: Vec<f64>,
    moments: Vec<PosteriorMoments>,
}

fn evaluate(s: &Suff, model: Model, grid: &Grid) -> Weighted {
    let out: Vec<(f64, PosteriorMoments)> = grid
        .nodes
        .par_iter()
        .map(|node| {
            let PyParams { d, alpha } = node.params;
            let lp = model.log_post(s, d, alpha);
            if lp == f64::NEG_INFINITY || !(node.weight > 0.0) {
                return (f64::NEG_INFINITY, PosteriorMoments { mean: 0.0, variance: 0.0 });
            }
            (lp + node.weight.ln(), posterior_moments(s, d, alpha))
        })
        .collect();
    let (log_w, moments) = out.into_iter().unzip();
    Weighted { log_w, moments }
}

fn log_sum_exp(xs: &[f64], shift: f64) -> f64 {
    shift + xs.iter().map(|&x| (x - shift).exp()).sum::<f64>().ln()
}

impl PymPosterior {
    /// Fit the posterior for `c`. With [`GammaPrior::DirichletOnly`] this is the DPM.
    pub fn fit(c: &CountData, cfg: &PymConfig) -> Result<Self> {
        check_data(c, cfg)?;
        Self::fit_model(c, cfg, model_for(cfg))
    }

    fn fit_model(c: &CountData, cfg: &PymConfig, model: Model) -> Result<Self> {
        let s = Suff::from_counts(c);
        let map = map_fit_suff(&s, model, cfg)?;
        let l_max = cfg.alpha_cap.ln().min(60.0);

        let build = |span: f64| -> Grid {
            let cfg = PymConfig { std_span: span, ..cfg.clone() };
            match model {
                Model::Dpm => {
                    // Mode and curvature of the density in λ = ln α.
                    let f = |x: &[f64]| {
                        let a = x[0].clamp(LAMBDA_MIN, l_max).exp();
                        model.log_post(&s, 0.0, a) + a.ln()
                    };
                    let m = nelder_mead(|x| -f(x), &[map.alpha.ln()], NelderMead { step: 0.3, ..Default::default() });
                    let h = hessian(|x| -f(x), &m.x, 1e-4);
                    dpm_grid(m.x[0].exp(), h[0][0], &cfg)
                }
                Model::Pym(_) => {
                    let f = |x: &[f64]| {
                        let (d, a) = theta_to_params(x, l_max);
                        model.log_post(&s, d, a) + d.ln() + (1.0 - d).ln() + a.ln()
                    };
                    let x0 = [logit(map.d.max(1e-12)), map.alpha.ln()];
                    let m = nelder_mead(|x| -f(x), &x0, NelderMead { step: 0.3, ..Default::default() });
                    let h = hessian(|x| -f(x), &m.x, 1e-4);
                    let (d, a) = theta_to_params(&m.x, l_max);
                    quadrature_grid(
                        PyParams { d, alpha: a },
                        [[h[0][0], h[0][1]], [h[1][0], h[1][1]]],
                        &cfg,
                        GridCoords::Transformed,
                    )
                }
            }
        };

        let grid = build(cfg.std_span);
        let w = evaluate(&s, model, &grid);
        let top = w.log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::Numerical("posterior weight vanishes on every grid node".into()));
        }
        let z = log_sum_exp(&w.log_w, top);
        let weights: Vec<f64> = w.log_w.iter().map(|&l| (l - z).exp()).collect();
        let mut mean = 0.0;
        let mut second = 0.0;
        for (wt, m) in weights.iter().zip(&w.moments) {
            mean += wt * m.mean;
            second += wt * (m.variance + m.mean * m.mean);
        }
        let variance = (second - mean * mean).max(0.0);
        if !mean.is_finite() || !variance.is_finite() {
            return Err(Error::Numerical(format!("non-finite posterior moments ({mean}, {variance})")));
        }

        let mut diagnostics = Diagnostics { node_count: grid.nodes.len(), fallback_grid: grid.fallback, ..Default::default() };
        let (dr, ar) = grid.ranges();
        diagnostics.d_range = Some(dr);
        diagnostics.alpha_range = Some(ar);
        if grid.fallback {
            diagnostics.warnings.push("curvature at the mode is not positive definite; used the semi-infinite fallback grid".into());
        } else {
            let wide = build(2.0 * cfg.std_span);
            let ww = evaluate(&s, model, &wide);
            let z_wide = log_sum_exp(&ww.log_w, top);
            let captured = (z - z_wide).exp().min(1.0);
            diagnostics.mass_captured = Some(captured);
            if captured < cfg.mass_threshold {
                diagnostics.warnings.push(format!(
                    "grid captured only {:.4} of the posterior mass (threshold {})",
                    captured, cfg.mass_threshold
                ));
            }
        }

        let (nodes, moments): (Vec<PyParams>, Vec<PosteriorMoments>) =
            grid.nodes.iter().map(|n| n.params).zip(w.moments).unzip();
        Ok(PymPosterior {
            map,
            log_evidence_at_map: log_evidence(&s, map.d, map.alpha),
            nodes,
            weights,
            moments,
            mean,
            variance,
            diagnostics,
            groups: s.groups.clone(),
        })
    }

    pub fn estimate(&self) -> EntropyEstimate {
        EntropyEstimate {
            mean: self.mean,
            std: Some(self.variance.sqrt()),
            map_d: Some(self.map.d),
            map_alpha: Some(self.map.alpha),
            log_evidence_at_map: Some(self.log_evidence_at_map),
            diagnostics: self.diagnostics.clone(),
        }
    }

    /// Posterior mean and covariance of `(d, α)` under the grid weights.
    pub fn param_moments(&self) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut m = [0.0; 2];
        for (w, p) in self.weights.iter().zip(&self.nodes) {
            m[0] += w * p.d;
            m[1] += w * p.alpha;
        }
        let mut c = [[0.0; 2]; 2];
        for (w, p) in self.weights.iter().zip(&self.nodes) {
            let x = [p.d - m[0], p.alpha - m[1]];
            for i in 0..2 {
                for j in 0..2 {
                    c[i][j] += w * x[i] * x[j];
                }
            }
        }
        (m, c)
    }

    /// `n` draws of entropy from the posterior, reproducible per seed.
    pub fn sample(&self, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let pick = WeightedIndex::new(&self.weights)
            .map_err(|e| Error::Numerical(format!("grid weights unusable for sampling: {e}")))?;
        par_draws(n, seed, |rng| {
            let node = self.nodes[pick.sample(rng)];
            posterior_entropy_with(&self.groups, node.d, node.alpha, DEFAULT_TAIL_VAR_TOL, rng)
        })
    }
}

/// PYM estimate of entropy with posterior standard deviation.
///
/// Requires at least two coincidences (`N − K >= 2`); with fewer the posterior
/// mean is infinite under this prior.
pub fn pym_estimate(c: &CountData, cfg: &PymConfig) -> Result<EntropyEstimate> {
    Ok(PymPosterior::fit(c, cfg)?.estimate())
}

/// DPM estimate: the same pipeline restricted to `d = 0`.
pub fn dpm_estimate(c: &CountData, cfg: &PymConfig) -> Result<EntropyEstimate> {
    check_data(c, cfg)?;
    Ok(PymPosterior::fit_model(c, cfg, Model::Dpm)?.estimate())
}
