//! Cheeger-constant machinery: radial Cheeger quotients, the proof chain
//! behind the bound E(Ω) ≤ 1/H(M, g)², and the exponential-neck family
//! that shows the bound is sharp.
//!
//! The sharpness family closes the profile `b_ε(s) = ε e^{-δ s}` (neck
//! coordinate s measured from the equator) with a sine cap:
//!
//! ```text
//! λ = (e^{δR}/ε) √(1 - ε²δ²e^{-2δR}) ,    η = arctan(λ/δ) / λ ,
//! b_ε(s) = ε e^{-δR} sin(λ(η + R - s)) / sin(λη)   on s ∈ [R, R+η] ,
//! ```
//!
//! which matches value and derivative at s = R and reaches the pole with
//! unit slope. The even reflection yields a two-pole manifold of coordinate
//! length 2(R + η); the test domains `Ω_r = {s ≥ r}` are geodesic balls of
//! radius (R + η) - r about a pole, so the exact radial solver applies.
//!
//! The true Cheeger constant over all domains is not computable; what is
//! computable is H_rad (the infimum over radial balls, dividing by the
//! smaller side) and the per-domain level-set constant H_Ω of a radial
//! torsion solution, whose super-level sets are balls with exact boundary
//! areas. Every assertion here is phrased at the level where it is exact:
//! H_rad ≥ (n-1)δ on the family, E · H_Ω² ≤ 1 on any radial solve over at
//! most half the manifold, and E(Ω_r) ≥ (1-ε)/((n-1)²δ²) once R is at
//! least 2 A_ε/((n-1)δ) and r ≤ R/2.

use crate::manifold::{ManifoldError, Profile, RevolutionManifold};
use crate::quad::{self, QuadError};
use crate::radial::{self, RadialError, RadialTorsionSolution};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheegerError {
    #[error("parameter gate violated: {0}")]
    ParameterGate(String),
    #[error("beta = {beta} outside the guaranteed range [{lo}, {hi}]")]
    BetaOutOfRange { beta: f64, lo: f64, hi: f64 },
    #[error("volume hypothesis violated: Vol(Ω) = {vol} exceeds half the manifold volume {half}")]
    VolumeHypothesis { vol: f64, half: f64 },
    #[error("family invariant failed: {0}")]
    FamilyInvariant(String),
    #[error("a_eps needs epsilon in (0, 2), got {0}")]
    AEpsRange(f64),
    #[error("r = {r} outside [0, {hi}]")]
    ROutOfRange { r: f64, hi: f64 },
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// One member of the sharpness family (M, g_ε).
#[derive(Debug, Clone)]
pub struct CheegerFamily {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub big_r: f64,
    pub lambda: f64,
    pub eta: f64,
    manifold: RevolutionManifold,
}

/// Build the family member, checking the parameter gates δ > 1/n,
/// 0 < ε ≤ 1/(nδ) and the C¹ matching of the two profile branches.
pub fn build_family(
    n: usize,
    epsilon: f64,
    delta: f64,
    big_r: f64,
) -> Result<CheegerFamily, CheegerError> {
    let nf = n as f64;
    if n < 2 {
        return Err(CheegerError::ParameterGate(format!("n must be >= 2, got {n}")));
    }
    if !(delta > 1.0 / nf) {
        return Err(CheegerError::ParameterGate(format!(
            "delta = {delta} must exceed 1/n = {}",
            1.0 / nf
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0 / (nf * delta)) {
        return Err(CheegerError::ParameterGate(format!(
            "epsilon = {epsilon} must lie in (0, 1/(n delta)] = (0, {}]",
            1.0 / (nf * delta)
        )));
    }
    if !(big_r > 0.0) {
        return Err(CheegerError::ParameterGate(format!("R = {big_r} must be positive")));
    }

    let lambda = ((delta * big_r).exp() / epsilon)
        * (1.0 - epsilon * epsilon * delta * delta * (-2.0 * delta * big_r).exp()).sqrt();
    let eta = (lambda / delta).atan() / lambda;
    let profile = Profile::CheegerNeck {
        epsilon,
        delta,
        big_r,
        lambda,
        eta,
    };
    let t_max = 2.0 * (big_r + eta);
    let manifold = RevolutionManifold::from_profile("cheeger_family", n, vec![epsilon, delta, big_r], profile, t_max)?;
    if !manifold.warnings().is_empty() {
        return Err(CheegerError::FamilyInvariant(format!(
            "pole smoothness: {:?}",
            manifold.warnings()
        )));
    }

    let fam = CheegerFamily {
        n,
        epsilon,
        delta,
        big_r,
        lambda,
        eta,
        manifold,
    };
    fam.check_profile_invariants()?;
    Ok(fam)
}

impl CheegerFamily {
    pub fn manifold(&self) -> &RevolutionManifold {
        &self.manifold
    }

    /// Half the coordinate length, R + η: the pole-to-equator distance.
    pub fn half_length(&self) -> f64 {
        self.big_r + self.eta
    }

    /// Profile value in neck coordinates (distance s from the equator).
    pub fn b_eps(&self, s: f64) -> f64 {
        self.manifold.profile_value(self.half_length() - s)
    }

    fn check_profile_invariants(&self) -> Result<(), CheegerError> {
        // Continuity and C¹ matching at the branch point s = R, comparing
        // the analytic one-sided branch formulas straddling the kink
        // (pole coordinate t = η).
        let expected = self.epsilon * (-self.delta * self.big_r).exp();
        let kink = self.eta;
        let nudge = kink * 1e-12;
        let below = self.manifold.profile_value(kink - nudge);
        let above = self.manifold.profile_value(kink + nudge);
        if (below - expected).abs() > 1e-8 * expected || (above - expected).abs() > 1e-8 * expected
        {
            return Err(CheegerError::FamilyInvariant(format!(
                "profile discontinuous at s = R: {below} | {expected} | {above}"
            )));
        }
        let d_below = self.manifold.profile_deriv(kink - nudge);
        let d_above = self.manifold.profile_deriv(kink + nudge);
        if (d_below - d_above).abs() > 1e-8 * d_below.abs().max(1.0) {
            return Err(CheegerError::FamilyInvariant(format!(
                "profile not C1 at s = R: slopes {d_below} vs {d_above}"
            )));
        }
        // b_ε(s) ≤ ε e^{-δ s} across the half profile.
        for k in 0..=512 {
            let s = self.half_length() * k as f64 / 512.0;
            let bound = self.epsilon * (-self.delta * s).exp();
            if self.b_eps(s) > bound * (1.0 + 1e-12) {
                return Err(CheegerError::FamilyInvariant(format!(
                    "b_eps({s}) = {} exceeds the envelope {bound}",
                    self.b_eps(s)
                )));
            }
        }
        Ok(())
    }

    /// Relative volume v(r) = Vol(Ω_r)/Vol(M) of the domain Ω_r = {s ≥ r}.
    pub fn relative_volume(&self, r: f64) -> Result<f64, CheegerError> {
        let total = self
            .manifold
            .total_volume()
            .expect("family manifolds are compact");
        Ok(self.manifold.ball_volume(self.half_length() - r)? / total)
    }

    /// Torsion solution on Ω_r (the geodesic ball of radius (R+η) - r about
    /// a pole; the two poles are isometric by the even reflection).
    pub fn solve_domain(&self, r: f64, n_grid: usize) -> Result<RadialTorsionSolution, CheegerError> {
        let hi = self.half_length();
        if !(0.0..hi).contains(&r) {
            return Err(CheegerError::ROutOfRange { r, hi });
        }
        Ok(radial::solve_radial_ball(&self.manifold, hi - r, n_grid)?)
    }
}

/// The radial Cheeger quotient scan: boundary area of the ball B(x0, t)
/// over the smaller of the two enclosed volumes, minimized over a grid.
#[derive(Debug, Clone, Copy)]
pub struct HRad {
    pub infimum: f64,
    pub argmin: f64,
}

/// Scan the radial Cheeger quotient of a two-pole manifold over `grid`
/// interior radii.
pub fn h_rad(m: &RevolutionManifold, grid: usize) -> Result<HRad, CheegerError> {
    if !m.two_poles() {
        return Err(CheegerError::Manifold(ManifoldError::NoSecondPole));
    }
    let grid = grid.max(16);
    let t_max = m.t_max();
    // Prefix volumes on the scan grid (breakpoints included).
    let mut ts: Vec<f64> = (1..grid).map(|k| t_max * k as f64 / grid as f64).collect();
    for bp in m.breakpoints() {
        ts.push(bp);
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15 * t_max);

    let mut vol_prefix = Vec::with_capacity(ts.len());
    let mut acc = 0.0;
    let mut lo = 0.0;
    for &t in &ts {
        acc += m.integrate_theta(lo, t)?;
        vol_prefix.push(acc);
        lo = t;
    }
    let total = acc + m.integrate_theta(lo, t_max)?;

    let mut best = f64::INFINITY;
    let mut argmin = ts[0];
    for (k, &t) in ts.iter().enumerate() {
        let small = vol_prefix[k].min(total - vol_prefix[k]);
        if small <= 0.0 {
            continue;
        }
        let ratio = m.theta(t) / small;
        if ratio < best {
            best = ratio;
            argmin = t;
        }
    }
    Ok(HRad {
        infimum: best,
        argmin,
    })
}

/// `h_rad` on a family member, with the proof's lower bound (n-1)δ
/// enforced.
pub fn h_rad_family(fam: &CheegerFamily, grid: usize) -> Result<HRad, CheegerError> {
    let h = h_rad(fam.manifold(), grid)?;
    let floor = (fam.n as f64 - 1.0) * fam.delta;
    if h.infimum < floor * (1.0 - 1e-9) {
        return Err(CheegerError::FamilyInvariant(format!(
            "H_rad = {} fell below (n-1)δ = {floor}",
            h.infimum
        )));
    }
    Ok(h)
}

/// The unique positive root of 2(1+x)e^{-x} = ε, by bisection. The map is
/// strictly decreasing from 2 at x = 0, so the root exists iff ε ∈ (0, 2).
pub fn a_eps(epsilon: f64) -> Result<f64, CheegerError> {
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(CheegerError::AEpsRange(epsilon));
    }
    // g(x) = -2(1+x)e^{-x} is increasing; bracket up to x = 750 (g ~ 1e-322).
    let root = quad::bisect_increasing(
        &|x: f64| -2.0 * (1.0 + x) * (-x).exp(),
        -epsilon,
        0.0,
        750.0,
        1e-12,
    )?;
    Ok(root)
}

/// One sharpness experiment: the domain of prescribed relative volume β on
/// the family member with the minimal admissible R.
#[derive(Debug, Clone)]
pub struct SharpnessReport {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub big_r: f64,
    pub lambda: f64,
    pub eta: f64,
    /// Neck coordinate of the domain boundary, r ∈ [0, R/2].
    pub r: f64,
    pub beta: f64,
    /// E(Ω_r) from the exact radial solver.
    pub e: f64,
    pub h_rad: f64,
    /// (1-ε)/((n-1)²δ²).
    pub guaranteed_lower_bound: f64,
    /// E · H_rad², the sharpness indicator tending to 1.
    pub product: f64,
}

/// Run the sharpness construction: R = 2 A_ε/((n-1)δ), locate r with
/// v(r) = β by bisection on [0, R/2], solve Ω_r exactly, and enforce the
/// proof's lower bound E ≥ (1-ε)/((n-1)²δ².
pub fn sharpness_experiment(
    n: usize,
    epsilon: f64,
    delta: f64,
    beta: f64,
    n_grid: usize,
    scan_grid: usize,
) -> Result<SharpnessReport, CheegerError> {
    if !(beta >= epsilon / 4.0 && beta <= 0.5) {
        return Err(CheegerError::BetaOutOfRange {
            beta,
            lo: epsilon / 4.0,
            hi: 0.5,
        });
    }
    let a = (n as f64 - 1.0) * delta;
    let big_r = 2.0 * a_eps(epsilon)? / a;
    let fam = build_family(n, epsilon, delta, big_r)?;

    // v is continuous and decreasing with v(0) = 1/2 and v(R/2) ≤ ε/4,
    // so -v brackets β on [0, R/2].
    let r = if beta == 0.5 {
        0.0
    } else {
        quad::bisect_increasing(
            &|r| -fam.relative_volume(r).expect("r within the half length"),
            -beta,
            0.0,
            big_r / 2.0,
            1e-12,
        )?
    };
    let sol = fam.solve_domain(r, n_grid)?;
    let h = h_rad_family(&fam, scan_grid)?;
    let guaranteed_lower_bound = (1.0 - epsilon) / (a * a);
    if sol.rigidity < guaranteed_lower_bound {
        return Err(CheegerError::FamilyInvariant(format!(
            "E(Ω_r) = {} fell below the guaranteed (1-ε)/((n-1)²δ²) = {guaranteed_lower_bound}",
            sol.rigidity
        )));
    }
    Ok(SharpnessReport {
        n,
        epsilon,
        delta,
        big_r,
        lambda: fam.lambda,
        eta: fam.eta,
        r,
        beta,
        e: sol.rigidity,
        h_rad: h.infimum,
        guaranteed_lower_bound,
        product: sol.rigidity * h.infimum * h.infimum,
    })
}

/// The proof's explicit test function on Ω_r: u = (s - r)/((n-1)δ) on the
/// exponential part, constant across the cap.
#[derive(Debug, Clone, Copy)]
pub struct TestFunctionBound {
    /// E(u) = (2∫u - ∫|∇u|²)/Vol(Ω_r), by quadrature.
    pub functional_value: f64,
    /// (1 - 2[1 + (n-1)δ(R-r)]e^{-(n-1)δ(R-r)})/((n-1)²δ²).
    pub displayed_lower_bound: f64,
    /// E(Ω_r) from the exact solver.
    pub exact_rigidity: f64,
}

pub fn ramp_test_function_bound(
    fam: &CheegerFamily,
    r: f64,
    n_grid: usize,
) -> Result<TestFunctionBound, CheegerError> {
    if !(0.0..=fam.big_r).contains(&r) {
        return Err(CheegerError::ROutOfRange { r, hi: fam.big_r });
    }
    let a = (fam.n as f64 - 1.0) * fam.delta;
    let half = fam.half_length();
    let r0 = half - r;
    let m = fam.manifold();
    // Ball coordinate d from the pole: s = half - d; the plateau covers the
    // cap d ∈ [0, η], the linear ramp runs down to u = 0 at d = r0.
    let u = |d: f64| {
        let s = half - d;
        if s >= fam.big_r {
            (fam.big_r - r) / a
        } else {
            (s - r) / a
        }
    };
    let du_sq = |d: f64| {
        let s = half - d;
        if s >= fam.big_r {
            0.0
        } else {
            1.0 / (a * a)
        }
    };
    let omega = m.omega();
    let int_u = omega
        * (quad::integrate_lenient(&|d| u(d) * m.theta(d), 0.0, fam.eta, 1e-10)
            + quad::integrate_lenient(&|d| u(d) * m.theta(d), fam.eta, r0, 1e-10));
    let int_du = omega * quad::integrate_lenient(&|d| du_sq(d) * m.theta(d), fam.eta, r0, 1e-10);
    let volume = m.ball_volume(r0)?;
    let functional_value = (2.0 * int_u - int_du) / volume;

    let x = a * (fam.big_r - r);
    let displayed_lower_bound = (1.0 - 2.0 * (1.0 + x) * (-x).exp()) / (a * a);
    let exact_rigidity = fam.solve_domain(r, n_grid)?.rigidity;

    if functional_value < displayed_lower_bound - 1e-6 {
        return Err(CheegerError::FamilyInvariant(format!(
            "test-function value {functional_value} below the displayed bound {displayed_lower_bound}"
        )));
    }
    if functional_value > exact_rigidity + 1e-9 * exact_rigidity.abs().max(1.0) {
        return Err(CheegerError::FamilyInvariant(format!(
            "test-function value {functional_value} exceeds the exact rigidity {exact_rigidity}"
        )));
    }
    Ok(TestFunctionBound {
        functional_value,
        displayed_lower_bound,
        exact_rigidity,
    })
}

/// The numerical proof chain of the Cheeger upper bound on one radial
/// solution: level sets are exact balls, so H_Ω and every intermediate
/// inequality are computable.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub e: f64,
    pub volume: f64,
    /// inf over sub-ball radii of area/volume (the domain's own level-set
    /// Cheeger quotient).
    pub h_omega: f64,
    pub h_omega_argmin: f64,
    /// ∫_0^{sup f} A(t) dt; equals Vol·E by the layer-cake identity.
    pub layer_cake: f64,
    /// ∫ |∇f| dv (coarea route).
    pub grad_l1: f64,
    /// √(Vol · ∫|∇f|²) (Cauchy–Schwarz majorant of grad_l1).
    pub cauchy_schwarz: f64,
    /// E · H_Ω², which the chain forces ≤ 1.
    pub product_e_homega2: f64,
    /// E · H_rad² of the ambient manifold, reported as observational data.
    pub product_e_hrad2: f64,
    pub h_rad: f64,
}

pub fn cheeger_chain_check(
    sol: &RadialTorsionSolution,
    scan_grid: usize,
) -> Result<ChainReport, CheegerError> {
    let m = sol.manifold();
    let total = match m.total_volume() {
        Some(v) => v,
        None => {
            return Err(CheegerError::Manifold(ManifoldError::NoSecondPole));
        }
    };
    if sol.volume > total / 2.0 * (1.0 + 1e-12) {
        return Err(CheegerError::VolumeHypothesis {
            vol: sol.volume,
            half: total / 2.0,
        });
    }

    // H_Ω: scan the sub-ball quotient area/volume over (0, r0].
    let grid = scan_grid.max(64);
    let mut h_omega = f64::INFINITY;
    let mut argmin = sol.r0();
    for k in 1..=grid {
        let rho = sol.r0() * k as f64 / grid as f64;
        let vol = sol.ball_volume_within(rho);
        if vol <= 0.0 {
            continue;
        }
        let ratio = m.omega() * m.theta(rho) / vol;
        if ratio < h_omega {
            h_omega = ratio;
            argmin = rho;
        }
    }

    let layer_cake = quad::integrate_lenient(
        &|level| match sol.level_radius(level) {
            Some(rho) => sol.ball_volume_within(rho),
            None => 0.0,
        },
        0.0,
        sol.sup_f(),
        1e-8,
    );
    // ∫|∇f| dv = ω ∫ (Φ/θ) θ = ω ∫ Φ; |f'| = Φ/θ exactly.
    let grad_l1 = m.omega()
        * quad::integrate_lenient(
            &|t| sol.f_deriv_at(t).abs() * m.theta(t),
            0.0,
            sol.r0(),
            1e-10,
        );
    let cauchy_schwarz = (sol.volume * sol.energy).sqrt();

    let slack = 1e-6;
    if layer_cake > grad_l1 / h_omega * (1.0 + slack) {
        return Err(CheegerError::FamilyInvariant(format!(
            "chain step failed: ∫A dt = {layer_cake} > (1/H_Ω)∫|∇f| = {}",
            grad_l1 / h_omega
        )));
    }
    if grad_l1 > cauchy_schwarz * (1.0 + slack) {
        return Err(CheegerError::FamilyInvariant(format!(
            "Cauchy–Schwarz step failed: ∫|∇f| = {grad_l1} > {cauchy_schwarz}"
        )));
    }
    let product = sol.rigidity * h_omega * h_omega;
    if product > 1.0 + 1e-6 {
        return Err(CheegerError::FamilyInvariant(format!(
            "E · H_Ω² = {product} exceeds 1"
        )));
    }

    let hr = h_rad(m, scan_grid)?;
    Ok(ChainReport {
        e: sol.rigidity,
        volume: sol.volume,
        h_omega,
        h_omega_argmin: argmin,
        layer_cake,
        grad_l1,
        cauchy_schwarz,
        product_e_homega2: product,
        product_e_hrad2: sol.rigidity * hr.infimum * hr.infimum,
        h_rad: hr.infimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn family_parameters_match_formula_evaluations() {
        let fam = build_family(2, 0.1, 1.0, 2.0).unwrap();
        assert!((fam.lambda - 73.8838).abs() < 1e-3, "lambda {}", fam.lambda);
        assert!((fam.eta - 0.0210772).abs() < 1e-6, "eta {}", fam.eta);

        let fam = build_family(2, 0.5, 1.0, 1.0).unwrap();
        assert!((fam.lambda - 5.34380).abs() < 1e-4, "lambda {}", fam.lambda);
        assert!((fam.eta - 0.259329).abs() < 1e-5, "eta {}", fam.eta);

        // Branch value at s = R from both formulas.
        let expected = 0.5 * (-1.0_f64).exp();
        assert!((fam.b_eps(1.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn family_gates() {
        assert!(matches!(
            build_family(2, 0.1, 0.4, 2.0),
            Err(CheegerError::ParameterGate(_))
        ));
        assert!(matches!(
            build_family(2, 0.6, 1.0, 2.0),
            Err(CheegerError::ParameterGate(_))
        ));
        assert!(build_family(3, 0.2, 0.5, 3.0).is_ok());
    }

    #[test]
    fn envelope_and_volume_decay() {
        let fam = build_family(2, 0.1, 1.0, 3.0).unwrap();
        // v(r) ≤ (1/2) e^{-(n-1)δr} across the r-grid.
        for k in 0..=40 {
            let r = fam.big_r * k as f64 / 40.0;
            let v = fam.relative_volume(r).unwrap();
            let bound = 0.5 * (-(fam.n as f64 - 1.0) * fam.delta * r).exp();
            assert!(v <= bound * (1.0 + 1e-9), "v({r}) = {v} > {bound}");
        }
        assert!((fam.relative_volume(0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn h_rad_on_model_manifolds() {
        // Unit sphere: inf area/min-volume = 1 at the equator.
        let s = RevolutionManifold::make("sphere", 2, &[], None).unwrap();
        let h = h_rad(&s, 4096).unwrap();
        assert!((h.infimum - 1.0).abs() < 1e-4, "sphere H_rad {}", h.infimum);
        assert!((h.argmin - PI / 2.0).abs() < 2.0 * PI / 4096.0);

        // Long capped cylinder: 2π / (half volume) = 1/(L/2 + 1).
        let cc = RevolutionManifold::make("capped_cylinder", 2, &[10.0], None).unwrap();
        let h = h_rad(&cc, 4096).unwrap();
        assert!((h.infimum - 1.0 / 6.0).abs() < 1e-3, "cylinder H_rad {}", h.infimum);

        let e = RevolutionManifold::make("euclidean", 2, &[], Some(5.0)).unwrap();
        assert!(h_rad(&e, 128).is_err());
    }

    #[test]
    fn family_h_rad_floor() {
        for (eps, delta, big_r) in [(0.1, 1.0, 2.0), (0.5, 1.0, 1.0), (0.2, 0.8, 4.0)] {
            let fam = build_family(2, eps, delta, big_r).unwrap();
            let h = h_rad_family(&fam, 4096).unwrap();
            let floor = fam.delta;
            assert!(
                h.infimum >= floor * (1.0 - 1e-9),
                "eps={eps}: H_rad {} vs floor {floor}",
                h.infimum
            );
        }
    }

    #[test]
    fn a_eps_inverse_property() {
        for eps in [1.999_999, 1.0, 0.5, 0.1, 0.01] {
            let x = a_eps(eps).unwrap();
            let back = 2.0 * (1.0 + x) * (-x).exp();
            assert!((back - eps).abs() < 1e-10, "eps={eps}: x={x} maps back to {back}");
        }
        // Monotone decreasing in ε.
        assert!(a_eps(0.1).unwrap() > a_eps(0.5).unwrap());
        // Spot values refined by the bisection oracle.
        assert!((a_eps(0.1).unwrap() - 4.7444).abs() < 1e-3);
        assert!((a_eps(0.5).unwrap() - 2.6935).abs() < 1e-3);
        assert!(a_eps(2.0).is_err());
        assert!(a_eps(0.0).is_err());
    }

    #[test]
    fn sharpness_experiment_asserts_guaranteed_bound() {
        let rep = sharpness_experiment(2, 0.1, 1.0, 0.3, 1024, 2048).unwrap();
        assert!(rep.e >= 0.9, "E = {}", rep.e);
        assert!(rep.r <= rep.big_r / 2.0);
        assert!((rep.beta - 0.3) < 1e-9);
        assert!(rep.product >= rep.e, "H_rad >= 1 makes the product dominate E");
        assert!(rep.product <= 1.02, "product {}", rep.product);

        // β = 1/2 pins r = 0.
        let rep = sharpness_experiment(2, 0.5, 1.0, 0.5, 512, 1024).unwrap();
        assert_eq!(rep.r, 0.0);
        assert!(rep.e >= 0.5, "E = {}", rep.e);

        assert!(matches!(
            sharpness_experiment(2, 0.1, 1.0, 0.01, 256, 512),
            Err(CheegerError::BetaOutOfRange { .. })
        ));

        // Higher dimension: (n-1)δ = 1.2 for n = 3, δ = 0.6.
        let rep = sharpness_experiment(3, 0.2, 0.6, 0.3, 512, 1024).unwrap();
        let a2 = (1.2f64).powi(2);
        assert!(rep.e >= 0.8 / a2, "E = {}", rep.e);
        assert!(rep.h_rad >= 1.2 * (1.0 - 1e-9));
    }

    #[test]
    fn sweep_products_increase_toward_one() {
        let e_half = sharpness_experiment(2, 0.5, 1.0, 0.3, 512, 1024).unwrap();
        let e_fifth = sharpness_experiment(2, 0.2, 1.0, 0.3, 512, 1024).unwrap();
        assert!(e_half.e >= 0.5 && e_fifth.e >= 0.8);
        let p1 = e_half.e; // (n-1)δ = 1, so E·((n-1)δ)² = E
        let p2 = e_fifth.e;
        assert!(p2 >= p1, "sweep not monotone: {p1} then {p2}");
    }

    #[test]
    fn test_function_bound_sandwich() {
        let big_r = 2.0 * a_eps(0.1).unwrap();
        let fam = build_family(2, 0.1, 1.0, big_r).unwrap();

        let b = ramp_test_function_bound(&fam, big_r / 2.0, 1024).unwrap();
        assert!(b.displayed_lower_bound >= 0.9 - 1e-9, "bound {}", b.displayed_lower_bound);
        assert!(b.functional_value <= b.exact_rigidity + 1e-9);

        // r = R: the test function vanishes and the bound goes negative.
        let b = ramp_test_function_bound(&fam, big_r, 1024).unwrap();
        assert!(b.functional_value.abs() < 1e-9);
        assert!(b.displayed_lower_bound < 0.0);

        assert!(matches!(
            ramp_test_function_bound(&fam, big_r * 1.5, 256),
            Err(CheegerError::ROutOfRange { .. })
        ));
    }

    #[test]
    fn chain_check_on_sphere_cap() {
        let s = RevolutionManifold::make("sphere", 2, &[], None).unwrap();
        let cap = radial::solve_radial_ball(&s, PI / 2.0, 512).unwrap();
        let rep = cheeger_chain_check(&cap, 2048).unwrap();
        // H_Ω = inf cot(ρ/2) over ρ ≤ π/2 is 1 at the hemisphere edge.
        assert!((rep.h_omega - 1.0).abs() < 1e-3, "H_Ω {}", rep.h_omega);
        let want = 2.0 * 2.0_f64.ln() - 1.0;
        assert!((rep.e - want).abs() < 1e-8);
        assert!(rep.product_e_homega2 <= 1.0 + 1e-6);
        assert!((rep.layer_cake - rep.volume * rep.e).abs() / rep.layer_cake < 1e-3);

        // Oversized domain violates the volume hypothesis.
        let big = radial::solve_radial_ball(&s, 2.5, 256).unwrap();
        assert!(matches!(
            cheeger_chain_check(&big, 512),
            Err(CheegerError::VolumeHypothesis { .. })
        ));
    }

    #[test]
    fn chain_check_on_family_domain() {
        let fam = build_family(2, 0.2, 1.0, 2.0 * a_eps(0.2).unwrap()).unwrap();
        let sol = fam.solve_domain(fam.big_r / 2.0, 1024).unwrap();
        let rep = cheeger_chain_check(&sol, 2048).unwrap();
        assert!(rep.product_e_homega2 <= 1.0 + 1e-6);
        assert!(rep.e >= 0.8, "E = {}", rep.e);
    }

    #[test]
    fn chain_product_is_scale_invariant() {
        let s = RevolutionManifold::make("sphere", 2, &[], None).unwrap();
        let cap = radial::solve_radial_ball(&s, 1.1, 512).unwrap();
        let rep = cheeger_chain_check(&cap, 2048).unwrap();

        let lam = 2.3;
        let scaled = s.scaled(lam).unwrap();
        let cap2 = radial::solve_radial_ball(&scaled, lam * 1.1, 512).unwrap();
        let rep2 = cheeger_chain_check(&cap2, 2048).unwrap();

        // E scales by λ², H_Ω by 1/λ; the product is invariant.
        let rel = (rep.product_e_homega2 - rep2.product_e_homega2).abs() / rep.product_e_homega2;
        assert!(rel < 1e-8, "{} vs {}", rep.product_e_homega2, rep2.product_e_homega2);
    }

    #[test]
    fn undersized_r_still_solves_without_the_guarantee() {
        // R = 2 is far below 2A_ε/((n-1)δ) ≈ 9.49 for ε = 0.1; the solver
        // still runs and reports the much smaller true rigidity.
        let fam = build_family(2, 0.1, 1.0, 2.0).unwrap();
        let sol = fam.solve_domain(1.0, 2048).unwrap();
        assert!((sol.rigidity - 0.2081).abs() < 5e-4, "E = {}", sol.rigidity);
        assert!((fam.relative_volume(1.0).unwrap() - 0.1352).abs() < 5e-4);
    }
}
