//! Schwarz symmetrization of scalar fields and its integral identities.
//!
//! For a nonnegative field f vanishing outside its domain, the distribution
//! ladder records `A(t) = Vol{f > t}` on uniform levels; the radius map
//! `R(t)` realizes `α⁻¹ A(t)` as a centered-ball volume on a model
//! manifold (α the total-volume ratio, 1 for a pair of unbounded spaces);
//! and the rearranged profile is the right-continuous step function
//!
//! ```text
//! f̄(r) = inf { t : R(t) ≤ r } ,
//! ```
//!
//! evaluated by binary search over the ladder. R is injective but in
//! general neither surjective nor continuous, so measure statements use
//! the step form of f̄ while energy statements use the monotone piecewise-
//! linear interpolant through the ladder points, the only place a
//! derivative of f̄ is needed.
//!
//! The checks in this module are the discrete versions of the
//! symmetrization identities: equality of p-th moments of f and f*,
//! decrease of the normalized Dirichlet energy, the layer-cake identity
//! `∫ f = ∫_0^{sup f} A(t) dt` with its exact Riemann sandwich, and the
//! coarea formula on radial fields (where level-set areas are exact).

use crate::fem::ScalarField;
use crate::manifold::{ManifoldError, RevolutionManifold};
use crate::quad::{self, QuadError};
use crate::radial::RadialTorsionSolution;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymmetrizeError {
    #[error("one total volume is finite and the other infinite; no volume-ratio normalization exists")]
    MixedVolumes,
    #[error("field is identically zero; no distribution ladder")]
    ZeroField,
    #[error("level count {0} too small, need at least 8")]
    TooFewLevels(usize),
    #[error("radial grid {0} too small, need at least 512 points")]
    TooFewRadialPoints(usize),
    #[error("model too small: needs volume {needed} but only has {total}")]
    ModelTooSmall { needed: f64, total: f64 },
    #[error("layer-cake sandwich violated: {0}")]
    SandwichViolation(String),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// The volume-ratio constant α(M, M*): 1 when both manifolds are unbounded,
/// Vol(M)/Vol(M*) when both are finite. Mixed pairs admit no comparison.
pub fn alpha(
    source_total: Option<f64>,
    model_total: Option<f64>,
) -> Result<f64, SymmetrizeError> {
    match (source_total, model_total) {
        (None, None) => Ok(1.0),
        (Some(a), Some(b)) => Ok(a / b),
        _ => Err(SymmetrizeError::MixedVolumes),
    }
}

/// A field whose super-level volumes can be measured: a finite-element
/// field, an exact radial solution, or raw (value, weight) samples.
pub enum FieldRef<'a> {
    Fem(&'a ScalarField),
    Radial(&'a RadialTorsionSolution),
    Weighted {
        /// (value, weight) pairs of the discrete measure.
        samples: &'a [(f64, f64)],
        domain_volume: f64,
    },
}

impl FieldRef<'_> {
    pub fn sup(&self) -> f64 {
        match self {
            FieldRef::Fem(f) => f.sup(),
            FieldRef::Radial(s) => s.sup_f(),
            FieldRef::Weighted { samples, .. } => {
                samples.iter().map(|p| p.0).fold(0.0, f64::max)
            }
        }
    }

    pub fn domain_volume(&self) -> f64 {
        match self {
            FieldRef::Fem(f) => f.mask().volume(),
            FieldRef::Radial(s) => s.volume,
            FieldRef::Weighted { domain_volume, .. } => *domain_volume,
        }
    }

    /// ∫ f^p dv.
    pub fn integral_pow(&self, p: f64) -> f64 {
        match self {
            FieldRef::Fem(f) => f.integral_pow(p),
            FieldRef::Radial(s) => {
                let m = s.manifold();
                m.omega()
                    * quad::integrate_lenient(
                        &|t| s.f_at(t).max(0.0).powf(p) * m.theta(t),
                        0.0,
                        s.r0(),
                        1e-10,
                    )
            }
            FieldRef::Weighted { samples, .. } => {
                samples.iter().map(|&(v, w)| w * v.powf(p)).sum()
            }
        }
    }

    /// (1/Vol) ∫ |∇f|² dv.
    pub fn normalized_energy(&self) -> f64 {
        match self {
            FieldRef::Fem(f) => f.dirichlet_energy() / f.mask().volume(),
            FieldRef::Radial(s) => s.energy / s.volume,
            FieldRef::Weighted { .. } => f64::NAN,
        }
    }
}

/// The distribution ladder: uniform levels t_j in [0, sup f] with the
/// super-level volumes A(t_j). A(0) is the domain volume and A(sup f) = 0.
#[derive(Debug, Clone)]
pub struct DistributionLadder {
    pub levels: Vec<f64>,
    pub a: Vec<f64>,
    pub domain_volume: f64,
    pub sup: f64,
}

/// Build the distribution ladder with `j_levels` uniform levels.
pub fn distribution_function(
    field: &FieldRef,
    j_levels: usize,
) -> Result<DistributionLadder, SymmetrizeError> {
    if j_levels < 8 {
        return Err(SymmetrizeError::TooFewLevels(j_levels));
    }
    let sup = field.sup();
    if !(sup > 0.0) {
        return Err(SymmetrizeError::ZeroField);
    }
    let domain_volume = field.domain_volume();
    let levels: Vec<f64> = (0..=j_levels)
        .map(|j| sup * j as f64 / j_levels as f64)
        .collect();

    let mut a = vec![0.0; levels.len()];
    a[0] = domain_volume;
    match field {
        FieldRef::Radial(sol) => {
            for j in 1..levels.len() {
                a[j] = match sol.level_radius(levels[j]) {
                    Some(rho) => sol.ball_volume_within(rho),
                    None => 0.0,
                };
            }
            a[j_levels] = 0.0;
        }
        _ => {
            // Sort (value, weight) once; A(t) is then a prefix sum.
            let mut samples: Vec<(f64, f64)> = match field {
                FieldRef::Fem(f) => f.inside_nodes().map(|(w, v)| (v, w)).collect(),
                FieldRef::Weighted { samples, .. } => samples.to_vec(),
                FieldRef::Radial(_) => unreachable!(),
            };
            samples.sort_by(|x, y| y.0.total_cmp(&x.0));
            let prefix: Vec<f64> = samples
                .iter()
                .scan(0.0, |acc, &(_, w)| {
                    *acc += w;
                    Some(*acc)
                })
                .collect();
            for j in 1..levels.len() {
                let t = levels[j];
                // Number of samples with value strictly above t.
                let k = samples.partition_point(|&(v, _)| v > t);
                a[j] = if k == 0 { 0.0 } else { prefix[k - 1] };
            }
        }
    }

    // Monotonicity can only be violated by floating-point ties; clamp.
    for j in 1..a.len() {
        if a[j] > a[j - 1] {
            a[j] = a[j - 1];
        }
    }
    Ok(DistributionLadder {
        levels,
        a,
        domain_volume,
        sup,
    })
}

/// Ladder plus the model radius map R(t_j) and the constant α.
#[derive(Debug, Clone)]
pub struct DistributionData {
    pub ladder: DistributionLadder,
    pub r: Vec<f64>,
    pub alpha: f64,
}

/// The rearranged field f* on a model manifold, pointed at its pole.
#[derive(Debug)]
pub struct SymmetrizedField {
    model: RevolutionManifold,
    pub data: DistributionData,
    /// Radial evaluation grid (≥ 512 points spanning [0, R(0)]).
    pub rho: Vec<f64>,
    /// Step values f̄(ρ_k) by the inf-formula.
    pub fbar: Vec<f64>,
}

/// Symmetrize a field onto `model` with volume ratio `alpha`.
pub fn symmetrize(
    field: &FieldRef,
    model: &RevolutionManifold,
    alpha: f64,
    j_levels: usize,
    n_radial: usize,
) -> Result<SymmetrizedField, SymmetrizeError> {
    if n_radial < 512 {
        return Err(SymmetrizeError::TooFewRadialPoints(n_radial));
    }
    let ladder = distribution_function(field, j_levels)?;
    let needed = ladder.domain_volume / alpha;
    if let Some(total) = model.total_volume() {
        if needed >= total {
            return Err(SymmetrizeError::ModelTooSmall { needed, total });
        }
    }
    let mut r = Vec::with_capacity(ladder.a.len());
    for &aj in &ladder.a {
        r.push(model.radius_for_volume(aj / alpha)?);
    }
    let support = r[0];
    let data = DistributionData {
        ladder,
        r,
        alpha,
    };
    let rho: Vec<f64> = (0..=n_radial)
        .map(|k| support * k as f64 / n_radial as f64)
        .collect();
    let fbar: Vec<f64> = rho.iter().map(|&x| data.fbar_at(x)).collect();
    Ok(SymmetrizedField {
        model: model.clone(),
        data,
        rho,
        fbar,
    })
}

impl DistributionData {
    /// f̄(r) = inf { t_j : R(t_j) ≤ r }, by binary search over the ladder
    /// (R is non-increasing in j).
    pub fn fbar_at(&self, rho: f64) -> f64 {
        let r = &self.r;
        // First index with R[j] <= rho.
        let mut lo = 0usize;
        let mut hi = r.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if r[mid] <= rho {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if lo >= r.len() {
            0.0
        } else {
            self.ladder.levels[lo]
        }
    }
}

impl SymmetrizedField {
    pub fn model(&self) -> &RevolutionManifold {
        &self.model
    }

    pub fn support_radius(&self) -> f64 {
        self.data.r[0]
    }

    pub fn sup(&self) -> f64 {
        *self.fbar.first().unwrap_or(&0.0)
    }

    /// Model-side volume of {f* > level}, from the step representation.
    pub fn volume_above(&self, level: f64) -> Result<f64, SymmetrizeError> {
        let j = self
            .data
            .ladder
            .levels
            .partition_point(|&t| t <= level);
        if j >= self.data.r.len() {
            return Ok(0.0);
        }
        Ok(self.model.ball_volume(self.data.r[j])?)
    }

    /// Model volume of the symmetrized domain Ω* = B(x*, R(0)).
    pub fn domain_volume(&self) -> Result<f64, SymmetrizeError> {
        Ok(self.model.ball_volume(self.support_radius())?)
    }

    /// (1/Vol*) ∫ (f*)^p dv*, integrating the step profile against the
    /// model density segment by segment.
    pub fn lp_mean_step(&self, p: f64) -> Result<f64, SymmetrizeError> {
        let levels = &self.data.ladder.levels;
        let r = &self.data.r;
        let mut acc = 0.0;
        for j in 0..levels.len() - 1 {
            // f̄ = t_{j+1} on [R_{j+1}, R_j).
            if r[j] > r[j + 1] {
                let shell = self.model.integrate_theta(r[j + 1], r[j])?;
                acc += levels[j + 1].powf(p) * shell;
            }
        }
        let vol = self.model.integrate_theta(0.0, self.support_radius())?;
        Ok(acc / vol)
    }

    /// (1/Vol*) ∫ |∇f*|² dv*, from the monotone piecewise-linear
    /// interpolant through the ladder points, the derivative-level
    /// reading of f̄.
    pub fn normalized_energy_linear(&self) -> Result<f64, SymmetrizeError> {
        let levels = &self.data.ladder.levels;
        let r = &self.data.r;
        let mut acc = 0.0;
        for j in 0..levels.len() - 1 {
            let dr = r[j] - r[j + 1];
            if dr > 1e-300 {
                let slope = (levels[j + 1] - levels[j]) / dr;
                let shell = self.model.integrate_theta(r[j + 1], r[j])?;
                acc += slope * slope * shell;
            }
        }
        let vol = self.model.integrate_theta(0.0, self.support_radius())?;
        Ok(acc / vol)
    }

    /// Largest |Δf̄/Δρ| between consecutive radial grid nodes; for radial
    /// inputs this is bounded by the source Lipschitz constant.
    pub fn max_step_slope(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.rho.len() - 1 {
            let dr = self.rho[k + 1] - self.rho[k];
            if dr > 0.0 {
                worst = worst.max((self.fbar[k] - self.fbar[k + 1]).abs() / dr);
            }
        }
        worst
    }

    /// Ladder export: one `t,A,R` row per level.
    pub fn write_ladder_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,A,R")?;
        let ladder = &self.data.ladder;
        for j in 0..ladder.levels.len() {
            writeln!(
                out,
                "{},{},{}",
                crate::report::fmt_f64(ladder.levels[j]),
                crate::report::fmt_f64(ladder.a[j]),
                crate::report::fmt_f64(self.data.r[j])
            )?;
        }
        Ok(())
    }

    /// Rearranged-profile export: one `rho,fbar` row per radial grid node.
    pub fn write_profile_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "rho,fbar")?;
        for (rho, fbar) in self.rho.iter().zip(&self.fbar) {
            writeln!(
                out,
                "{},{}",
                crate::report::fmt_f64(*rho),
                crate::report::fmt_f64(*fbar)
            )?;
        }
        Ok(())
    }

    /// Worst equimeasurability defect |Vol*{f* > t_j} - α⁻¹ A(t_j)| over
    /// the ladder, paired with the largest radial cell volume of the
    /// evaluation grid (the defect's natural unit).
    pub fn equimeasurability_defect(&self) -> Result<(f64, f64), SymmetrizeError> {
        let ladder = &self.data.ladder;
        let mut worst = 0.0f64;
        for (j, &t) in ladder.levels.iter().enumerate() {
            // Volume above from the ρ-grid step samples.
            let k = self.fbar.partition_point(|&v| v > t);
            let vol_grid = if k == 0 {
                0.0
            } else {
                self.model.ball_volume(self.rho[k - 1])?
            };
            let want = ladder.a[j] / self.data.alpha;
            worst = worst.max((vol_grid - want).abs());
        }
        let mut max_cell = 0.0f64;
        for k in 0..self.rho.len() - 1 {
            max_cell = max_cell.max(
                self.model.ball_volume(self.rho[k + 1])? - self.model.ball_volume(self.rho[k])?,
            );
        }
        Ok((worst, max_cell))
    }
}

/// Relative defect of the p-th moment identity between a field and its
/// symmetrization: |LHS - RHS| / LHS with LHS the source-side mean.
pub fn check_lp_equality(
    field: &FieldRef,
    sym: &SymmetrizedField,
    p: f64,
) -> Result<f64, SymmetrizeError> {
    let lhs = field.integral_pow(p) / field.domain_volume();
    let rhs = sym.lp_mean_step(p)?;
    Ok((lhs - rhs).abs() / lhs)
}

/// Both sides of the energy-decrease inequality: the source normalized
/// Dirichlet energy must dominate the model-side energy of f*.
#[derive(Debug, Clone, Copy)]
pub struct EnergyComparison {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs; nonnegative in exact arithmetic.
    pub margin: f64,
}

pub fn check_energy_decrease(
    field: &FieldRef,
    sym: &SymmetrizedField,
) -> Result<EnergyComparison, SymmetrizeError> {
    let lhs = field.normalized_energy();
    let rhs = sym.normalized_energy_linear()?;
    Ok(EnergyComparison {
        lhs,
        rhs,
        margin: lhs - rhs,
    })
}

/// Layer-cake identity data: ∫f, ∫A(t)dt, and the exact Riemann sandwich
/// S⁻ ≤ ∫f ≤ S⁺ with S⁺ - S⁻ ≤ (sup f / J) A(0).
#[derive(Debug, Clone)]
pub struct LayerCake {
    pub integral_f: f64,
    pub integral_a: f64,
    pub s_minus: f64,
    pub s_plus: f64,
    pub bracket_bound: f64,
}

pub fn layer_cake(field: &FieldRef, j_levels: usize) -> Result<LayerCake, SymmetrizeError> {
    let ladder = distribution_function(field, j_levels)?;
    let integral_f = match field {
        FieldRef::Radial(s) => s.integral_f,
        _ => field.integral_pow(1.0),
    };
    let mut s_minus = 0.0;
    let mut s_plus = 0.0;
    for j in 0..ladder.levels.len() - 1 {
        let da = ladder.a[j] - ladder.a[j + 1];
        s_minus += ladder.levels[j] * da;
        s_plus += ladder.levels[j + 1] * da;
    }
    let bracket_bound = ladder.sup / j_levels as f64 * ladder.a[0];
    let fudge = 1e-9 * integral_f.abs().max(1e-300);
    if !(s_minus <= integral_f + fudge && integral_f <= s_plus + fudge) {
        return Err(SymmetrizeError::SandwichViolation(format!(
            "S- = {s_minus}, ∫f = {integral_f}, S+ = {s_plus}"
        )));
    }
    if s_plus - s_minus > bracket_bound * (1.0 + 1e-9) {
        return Err(SymmetrizeError::SandwichViolation(format!(
            "S+ - S- = {} exceeds (sup f / J) A(0) = {bracket_bound}",
            s_plus - s_minus
        )));
    }
    Ok(LayerCake {
        integral_f,
        integral_a: 0.5 * (s_minus + s_plus),
        s_minus,
        s_plus,
        bracket_bound,
    })
}

/// Both sides of the coarea formula for a radial field and radial weight:
/// `∫ φ |∇f| dv` versus `∫ (∫_{f=t} φ da_t) dt`. Level sets of radial
/// fields are coordinate spheres with exact area ω b(ρ)^{n-1}, which is
/// what makes the right-hand side an independent oracle. Non-radial fields
/// have no exact level-set measure on a masked grid and are not accepted
/// here (the signature is radial-only by construction).
pub fn coarea_check<P: Fn(f64) -> f64>(
    sol: &RadialTorsionSolution,
    phi: P,
) -> (f64, f64, f64) {
    let m = sol.manifold();
    let omega = m.omega();
    let lhs = omega
        * quad::integrate_lenient(
            &|t| phi(t) * sol.f_deriv_at(t).abs() * m.theta(t),
            0.0,
            sol.r0(),
            1e-10,
        );
    let rhs = quad::integrate_lenient(
        &|level| match sol.level_radius(level) {
            Some(rho) => phi(rho) * omega * m.theta(rho),
            None => 0.0,
        },
        0.0,
        sol.sup_f(),
        1e-9,
    );
    let scale = lhs.abs().max(rhs.abs());
    let defect = if scale > 0.0 {
        (lhs - rhs).abs() / scale
    } else {
        0.0
    };
    (lhs, rhs, defect)
}
