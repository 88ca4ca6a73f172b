//! Closed-form model constants and packaged rigidity comparisons.
//!
//! The centerpiece is the model radius R(K, D): the Euclidean sphere of
//! radius R(K, D) is a pointed isoperimetric model space for every
//! n-manifold with `Ric ≥ (n-1) K g` and `diameter ≤ D`, with one formula
//! per sign of K. Sphere caps of prescribed relative volume supply the
//! comparison rigidities, and the Perelman diameter gap turns into the
//! factor `R(1, π - ε)²` multiplying the spherical bound.

use crate::manifold::{ManifoldError, RevolutionManifold};
use crate::quad::{self, QuadError};
use crate::radial::{self, RadialError};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("R(K, D) needs D > 0, got {0}")]
    NonPositiveDiameter(f64),
    #[error("Myers regime violated: D sqrt(K) = {0} exceeds pi")]
    BeyondMyers(f64),
    #[error("relative volume must lie in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("Perelman gap parameter must lie in (0, pi), got {0}")]
    BadGap(f64),
    #[error("domain volume {vol} inconsistent with the model: alpha^-1 vol = {scaled} exceeds the model volume {total}")]
    VolumeMismatch { vol: f64, scaled: f64, total: f64 },
    #[error("mixed finite/infinite total volumes; no symmetrized comparison exists")]
    MixedVolumes,
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
}

/// Which argument of the `Max(q, q^{1/n})` attains the K < 0 radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeBranchMax {
    Ratio,
    RatioNthRoot,
}

/// R(K, D) with the K < 0 branch diagnostics exposed.
#[derive(Debug, Clone)]
pub struct RkdDetail {
    pub radius: f64,
    /// Present only for K < 0.
    pub negative_branch: Option<(f64, NegativeBranchMax)>,
}

/// Radius of the Euclidean sphere that is a PIMS for Ricci ≥ (n-1)K,
/// diameter ≤ D manifolds.
pub fn r_kd(k: f64, d: f64, n: usize) -> Result<f64, ModelError> {
    r_kd_detail(k, d, n).map(|det| det.radius)
}

pub fn r_kd_detail(k: f64, d: f64, n: usize) -> Result<RkdDetail, ModelError> {
    if !(d > 0.0) {
        return Err(ModelError::NonPositiveDiameter(d));
    }
    let nf = n as f64;
    let cos_pow = |x: f64| x.cos().powi(n as i32 - 1);
    if k > 0.0 {
        let dk = d * k.sqrt();
        if dk > PI * (1.0 + 1e-12) {
            return Err(ModelError::BeyondMyers(dk));
        }
        let dk = dk.min(PI);
        let num = quad::integrate(&cos_pow, 0.0, dk / 2.0)?;
        let den = quad::integrate(&cos_pow, 0.0, PI / 2.0)?;
        Ok(RkdDetail {
            radius: (num / den).powf(1.0 / nf) / k.sqrt(),
            negative_branch: None,
        })
    } else if k == 0.0 {
        let den = quad::integrate(&cos_pow, 0.0, PI / 2.0)?;
        Ok(RkdDetail {
            radius: 0.5 * nf * den.powf(-1.0 / nf) * d,
            negative_branch: None,
        })
    } else {
        let dk = d * k.abs().sqrt();
        let num = quad::integrate(&|t: f64| (2.0 * t).cosh().powf((nf - 1.0) / 2.0), 0.0, dk)?;
        let den = quad::integrate(&|t: f64| t.sin().powi(n as i32 - 1), 0.0, PI)?;
        let q = num / den;
        let root = q.powf(1.0 / nf);
        let (val, which) = if q >= root {
            (q, NegativeBranchMax::Ratio)
        } else {
            (root, NegativeBranchMax::RatioNthRoot)
        };
        Ok(RkdDetail {
            radius: val / k.abs().sqrt(),
            negative_branch: Some((q, which)),
        })
    }
}

/// Radius r of the spherical cap with relative volume β on the unit n-sphere:
/// ∫_0^r sin^{n-1} / ∫_0^π sin^{n-1} = β, by bisection.
pub fn sphere_cap_radius_for_fraction(beta: f64, n: usize) -> Result<f64, ModelError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(ModelError::BadFraction(beta));
    }
    let sin_pow = |t: f64| t.sin().powi(n as i32 - 1);
    let total = quad::integrate(&sin_pow, 0.0, PI)?;
    let r = quad::bisect_increasing(
        &|r| quad::integrate_lenient(&sin_pow, 0.0, r, 1e-11),
        beta * total,
        0.0,
        PI,
        1e-12,
    )?;
    Ok(r)
}

/// Torsional rigidity of the cap of relative volume β on the canonical
/// n-sphere, through the radial solver.
pub fn sphere_cap_rigidity(beta: f64, n: usize, n_grid: usize) -> Result<f64, ModelError> {
    let r = sphere_cap_radius_for_fraction(beta, n)?;
    let sphere = RevolutionManifold::make("sphere", n, &[], None)?;
    Ok(radial::solve_radial_ball(&sphere, r, n_grid)?.rigidity)
}

/// The Perelman gap factor
/// `(1 - ∫_0^{ε/2} sin^{n-1} / ∫_0^{π/2} sin^{n-1})^{2/n}`,
/// equal to R(1, π - ε)². The constant ε is a user input: only its
/// existence is known, not a formula.
pub fn perelman_gap_factor(eps: f64, n: usize) -> Result<f64, ModelError> {
    if !(eps > 0.0 && eps < PI) {
        return Err(ModelError::BadGap(eps));
    }
    let sin_pow = |t: f64| t.sin().powi(n as i32 - 1);
    let num = quad::integrate(&sin_pow, 0.0, eps / 2.0)?;
    let den = quad::integrate(&sin_pow, 0.0, PI / 2.0)?;
    Ok((1.0 - num / den).powf(2.0 / n as f64))
}

/// Relative-tolerance pass margin for rigidity comparisons: the inequality
/// E(Ω) ≤ E(Ω*) is accepted up to 2% in its favor, matching the
/// discretization error budget of the 2-D solver.
pub const COMPARISON_TOL: f64 = 0.02;

/// Verdict of one `E(Ω) ≤ E(Ω*)` comparison.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub e_domain: f64,
    pub e_model: f64,
    /// Radius of the symmetrized ball on the model.
    pub model_radius: f64,
    /// Volume ratio α(M, M*); 1 when both manifolds are infinite.
    pub alpha: f64,
    /// E(Ω*) - E(Ω); negative means the inequality failed outright.
    pub slack: f64,
    pub pass: bool,
}

/// Compare a computed domain rigidity against the ball of matching
/// (relative) volume on a model manifold.
///
/// `source_total_volume` is `None` for unbounded sources; the model must
/// then be unbounded too (α = 1). Finite/finite pairs use the volume
/// ratio α = Vol(M)/Vol(M*) and match relative volumes.
pub fn comparison_verdict(
    e_domain: f64,
    domain_volume: f64,
    source_total_volume: Option<f64>,
    model: &RevolutionManifold,
    n_grid: usize,
) -> Result<ComparisonReport, ModelError> {
    let model_total = model.total_volume();
    let alpha = match (source_total_volume, model_total) {
        (None, None) => 1.0,
        (Some(vm), Some(vstar)) => vm / vstar,
        _ => return Err(ModelError::MixedVolumes),
    };
    let scaled = domain_volume / alpha;
    if let Some(total) = model_total {
        if scaled >= total {
            return Err(ModelError::VolumeMismatch {
                vol: domain_volume,
                scaled,
                total,
            });
        }
    }
    let model_radius = model.radius_for_volume(scaled)?;
    let e_model = radial::solve_radial_ball(model, model_radius, n_grid)?.rigidity;
    let slack = e_model - e_domain;
    Ok(ComparisonReport {
        e_domain,
        e_model,
        model_radius,
        alpha,
        slack,
        pass: e_domain <= e_model * (1.0 + COMPARISON_TOL),
    })
}

/// Comparison against the R(K, D) model: E(Ω) ≤ E(Ω*) = R(K,D)² E(Ω**),
/// where Ω* is the cap of relative volume β on the sphere of radius R(K,D)
/// and Ω** the cap of the same relative volume on the unit sphere.
#[derive(Debug, Clone)]
pub struct ModelBound {
    pub k: f64,
    pub d: f64,
    pub n: usize,
    pub r_kd: f64,
    /// E(Ω*) computed directly on the radius-R(K,D) sphere.
    pub rigidity_bound: f64,
    /// R(K,D)² · E(Ω**); agrees with `rigidity_bound` by metric homogeneity.
    pub rigidity_bound_via_unit_cap: f64,
    pub provenance: &'static str,
}

/// Build the R(K, D) rigidity bound for domains of relative volume β.
pub fn rkd_bound(k: f64, d: f64, n: usize, beta: f64, n_grid: usize) -> Result<ModelBound, ModelError> {
    let radius = r_kd(k, d, n)?;
    let cap_r = sphere_cap_radius_for_fraction(beta, n)?;
    let unit_sphere = RevolutionManifold::make("sphere", n, &[], None)?;
    let e_unit = radial::solve_radial_ball(&unit_sphere, cap_r, n_grid)?.rigidity;
    let scaled_sphere = unit_sphere.scaled(radius)?;
    let e_direct =
        radial::solve_radial_ball(&scaled_sphere, radius * cap_r, n_grid)?.rigidity;
    Ok(ModelBound {
        k,
        d,
        n,
        r_kd: radius,
        rigidity_bound: e_direct,
        rigidity_bound_via_unit_cap: radius * radius * e_unit,
        provenance: "sphere of radius R(K,D) as PIMS under Ricci/diameter bounds",
    })
}
