//! Manifolds of revolution `(dt)² + b(t)² g_{S^{n-1}}`.
//!
//! A manifold is described by its profile curve `b` on the coordinate
//! interval `[0, t_max]`, with `b(0) = 0` and unit slope at a smooth pole.
//! The volume density in polar normal coordinates is `θ(t) = b(t)^{n-1}`,
//! so geodesic-ball volumes, boundary areas and (for n = 2) the Gauss
//! curvature `K = -b''/b` all reduce to profile evaluations and 1-D
//! quadrature.
//!
//! The catalog covers the constant-curvature spaces, the capped cylinder,
//! the paraboloid `z = x² + y²`, the upper hyperboloid sheet
//! `x² + y² - z² = -1`, the sphere-with-crease surface
//! `x² + y² + (|z| + cos R)² = 1`, the exponential-neck family used by the
//! Cheeger sharpness construction, and tabulated profiles interpolated by
//! monotone cubics. Profiles of unbounded spaces (plane, hyperbolic plane,
//! paraboloid, hyperboloid) are truncated at a configurable coordinate
//! length; every computed domain must lie strictly inside the truncation,
//! which leaves all quantities on such domains unchanged.

use crate::quad::{self, MonotoneCubic, QuadError};
use std::f64::consts::PI;
use thiserror::Error;

/// Default truncation length for profiles of unbounded manifolds.
pub const DEFAULT_TRUNCATION: f64 = 20.0;

/// Tolerance on `|b'(pole)| - 1` before a pole-smoothness warning is issued.
pub const POLE_SLOPE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ManifoldError {
    #[error("unknown catalog kind `{0}`")]
    UnknownKind(String),
    #[error("invalid parameters for `{kind}`: {reason}")]
    BadParams { kind: String, reason: String },
    #[error("profile nonpositive in the interior: b({t}) = {b}")]
    NonpositiveProfile { t: f64, b: f64 },
    #[error("profile does not vanish at the pole: b(0) = {b0}")]
    PoleMismatch { b0: f64 },
    #[error("radius {r} outside the admissible range [0, {t_max}]")]
    RadiusOutOfRange { r: f64, t_max: f64 },
    #[error("volume {v} outside the admissible range (0, {total})")]
    VolumeOutOfRange { v: f64, total: f64 },
    #[error("Gauss curvature needs a 2-dimensional manifold, got n = {0}")]
    CurvatureDimension(usize),
    #[error("curvature refused at t = {t}: within {margin} of a pole or profile breakpoint")]
    CurvatureNearSingularity { t: f64, margin: f64 },
    #[error("manifold has a single pole; no far-pole coordinate reflection")]
    NoSecondPole,
    #[error("custom profile table invalid: {0}")]
    BadProfileTable(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Surface measure of the unit sphere `S^{n-1}`, i.e. `2 π^{n/2} / Γ(n/2)`.
///
/// Computed by the half-integer Gamma recursion, exact for the n used here.
pub fn unit_sphere_area(n: usize) -> f64 {
    assert!(n >= 2, "dimension must be at least 2");
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Γ(n/2) for integer n ≥ 1.
fn gamma_half(n: usize) -> f64 {
    match n {
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (n as f64 / 2.0 - 1.0) * gamma_half(n - 2),
    }
}

/// Profile curve of a manifold of revolution.
#[derive(Debug, Clone)]
pub enum Profile {
    /// b(t) = t (Euclidean space).
    Euclidean,
    /// b(t) = sin t on [0, π] (canonical sphere).
    Sphere,
    /// b(t) = sinh t (hyperbolic space).
    Hyperbolic,
    /// Hemispherical cap, cylinder of length `len`, hemispherical cap.
    CappedCylinder { len: f64 },
    /// z = x² + y² in R³, arclength-parametrized from the pole.
    Paraboloid,
    /// Upper sheet of x² + y² - z² = -1, arclength-parametrized.
    HyperboloidSheet { rho_table: MonotoneCubic },
    /// x² + y² + (|z| + cos R)² = 1: b(t) = sin(min(t, 2R - t)) on [0, 2R].
    /// Lipschitz but not C¹ at the crease t = R.
    Remark26 { big_r: f64 },
    /// Exponential neck b = ε e^{-δ s} closed by sine caps; the Cheeger
    /// sharpness family. `t` measures distance from a pole; the neck
    /// parameters live in the neck coordinate s = (R + η) - min(t, t_max - t).
    CheegerNeck {
        epsilon: f64,
        delta: f64,
        big_r: f64,
        lambda: f64,
        eta: f64,
    },
    /// Tabulated (t, b) pairs, monotone-cubic interpolated.
    Custom { interp: MonotoneCubic },
    /// Homothety (M, λ² g): b_λ(t) = λ b(t / λ).
    Scaled { inner: Box<Profile>, lambda: f64 },
    /// Coordinate reflection t ↦ length - t of a two-pole profile.
    Reflected { inner: Box<Profile>, length: f64 },
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Profile::Euclidean => t,
            Profile::Sphere => t.sin(),
            Profile::Hyperbolic => t.sinh(),
            Profile::CappedCylinder { len } => {
                let t_max = PI + len;
                if t <= PI / 2.0 {
                    t.sin()
                } else if t <= PI / 2.0 + len {
                    1.0
                } else {
                    (t_max - t).sin()
                }
            }
            Profile::Paraboloid => paraboloid_rho(t),
            Profile::HyperboloidSheet { rho_table } => rho_table.eval(t),
            Profile::Remark26 { big_r } => t.min(2.0 * big_r - t).sin(),
            Profile::CheegerNeck {
                epsilon,
                delta,
                big_r,
                lambda,
                eta,
            } => {
                let half = big_r + eta;
                let m = t.min(2.0 * half - t); // distance from nearest pole
                if m <= *eta {
                    epsilon * (-delta * big_r).exp() * (lambda * m).sin() / (lambda * eta).sin()
                } else {
                    // neck coordinate s = half - m lies in [0, R]
                    epsilon * (-delta * (half - m)).exp()
                }
            }
            Profile::Custom { interp } => interp.eval(t),
            Profile::Scaled { inner, lambda } => lambda * inner.value(t / lambda),
            Profile::Reflected { inner, length } => inner.value(length - t),
        }
    }

    /// Analytic b'(t) where available.
    fn deriv_analytic(&self, t: f64) -> Option<f64> {
        match self {
            Profile::Euclidean => Some(1.0),
            Profile::Sphere => Some(t.cos()),
            Profile::Hyperbolic => Some(t.cosh()),
            Profile::CappedCylinder { len } => {
                let t_max = PI + len;
                Some(if t <= PI / 2.0 {
                    t.cos()
                } else if t <= PI / 2.0 + len {
                    0.0
                } else {
                    -(t_max - t).cos()
                })
            }
            Profile::Paraboloid => {
                let rho = paraboloid_rho(t);
                Some(1.0 / (1.0 + 4.0 * rho * rho).sqrt())
            }
            Profile::HyperboloidSheet { rho_table } => {
                let rho = rho_table.eval(t);
                Some(((1.0 + rho * rho) / (1.0 + 2.0 * rho * rho)).sqrt())
            }
            Profile::Remark26 { big_r } => {
                let m = t.min(2.0 * big_r - t);
                let s = m.cos();
                Some(if t <= *big_r { s } else { -s })
            }
            Profile::CheegerNeck {
                epsilon,
                delta,
                big_r,
                lambda,
                eta,
            } => {
                let half = big_r + eta;
                let m = t.min(2.0 * half - t);
                let sign = if t <= half { 1.0 } else { -1.0 };
                let d = if m <= *eta {
                    epsilon * (-delta * big_r).exp() * lambda * (lambda * m).cos()
                        / (lambda * eta).sin()
                } else {
                    delta * epsilon * (-delta * (half - m)).exp()
                };
                Some(sign * d)
            }
            Profile::Custom { .. } => None,
            Profile::Scaled { inner, lambda } => inner.deriv_analytic(t / lambda),
            Profile::Reflected { inner, length } => {
                inner.deriv_analytic(length - t).map(|d| -d)
            }
        }
    }

    /// Analytic b''(t) where available.
    fn deriv2_analytic(&self, t: f64) -> Option<f64> {
        match self {
            Profile::Euclidean => Some(0.0),
            Profile::Sphere => Some(-t.sin()),
            Profile::Hyperbolic => Some(t.sinh()),
            Profile::CappedCylinder { .. } => {
                let b = self.value(t);
                // b'' = -b on the caps, 0 on the cylinder (where b = 1).
                Some(if (b - 1.0).abs() < 1e-15 { 0.0 } else { -b })
            }
            Profile::Paraboloid => {
                let rho = paraboloid_rho(t);
                let q = 1.0 + 4.0 * rho * rho;
                Some(-4.0 * rho / (q * q))
            }
            Profile::HyperboloidSheet { rho_table } => {
                let rho = rho_table.eval(t);
                let q = 1.0 + 2.0 * rho * rho;
                Some(-rho / (q * q))
            }
            Profile::Remark26 { .. } => Some(-self.value(t)),
            Profile::CheegerNeck { delta, lambda, eta, big_r, .. } => {
                let half = big_r + eta;
                let m = t.min(2.0 * half - t);
                Some(if m <= *eta {
                    -lambda * lambda * self.value(t)
                } else {
                    delta * delta * self.value(t)
                })
            }
            Profile::Custom { .. } => None,
            Profile::Scaled { inner, lambda } => {
                inner.deriv2_analytic(t / lambda).map(|d| d / lambda)
            }
            Profile::Reflected { inner, length } => inner.deriv2_analytic(length - t),
        }
    }

    /// Interior points where the profile is only piecewise smooth.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::CappedCylinder { len } => vec![PI / 2.0, PI / 2.0 + len],
            Profile::Remark26 { big_r } => vec![*big_r],
            Profile::CheegerNeck { big_r, eta, .. } => {
                vec![*eta, big_r + eta, 2.0 * big_r + eta]
            }
            Profile::Scaled { inner, lambda } => {
                inner.breakpoints().iter().map(|b| b * lambda).collect()
            }
            Profile::Reflected { inner, length } => {
                inner.breakpoints().iter().map(|b| length - b).collect()
            }
            _ => Vec::new(),
        }
    }

    /// True when the underlying space is unbounded (the stored `t_max` is
    /// then a truncation, not a second pole). `None` for tabulated
    /// profiles, where boundedness is read off the table's end value.
    fn unbounded(&self) -> Option<bool> {
        match self {
            Profile::Euclidean | Profile::Hyperbolic | Profile::Paraboloid => Some(true),
            Profile::HyperboloidSheet { .. } => Some(true),
            Profile::Sphere
            | Profile::CappedCylinder { .. }
            | Profile::Remark26 { .. }
            | Profile::CheegerNeck { .. } => Some(false),
            Profile::Custom { .. } => None,
            Profile::Scaled { inner, .. } => inner.unbounded(),
            Profile::Reflected { .. } => Some(false),
        }
    }
}

/// Arclength inversion for the paraboloid z = x² + y²: given geodesic
/// distance `t` from the pole, return the cylindrical radius ρ(t).
///
/// Uses Newton on the closed-form arclength
/// `t(ρ) = (ρ √(1+4ρ²) + asinh(2ρ)/2) / 2`.
fn paraboloid_rho(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let arclen = |rho: f64| 0.5 * (rho * (1.0 + 4.0 * rho * rho).sqrt() + 0.5 * (2.0 * rho).asinh());
    let mut rho = t; // arclength >= rho, so t bounds the root from above
    for _ in 0..60 {
        let g = arclen(rho) - t;
        let dg = (1.0 + 4.0 * rho * rho).sqrt();
        let step = g / dg;
        rho -= step;
        if rho < 0.0 {
            rho = 0.0;
        }
        if step.abs() < 1e-15 * (1.0 + rho) {
            break;
        }
    }
    rho
}

/// Build the ρ(t) table for the hyperboloid sheet by RK4 on
/// dρ/dt = √((1+ρ²)/(1+2ρ²)).
fn hyperboloid_rho_table(t_max: f64) -> MonotoneCubic {
    let n = 8192;
    let h = t_max * 1.0001 / n as f64;
    let g = |rho: f64| ((1.0 + rho * rho) / (1.0 + 2.0 * rho * rho)).sqrt();
    let mut ts = Vec::with_capacity(n + 1);
    let mut rhos = Vec::with_capacity(n + 1);
    let mut rho = 0.0_f64;
    ts.push(0.0);
    rhos.push(0.0);
    for i in 0..n {
        let k1 = g(rho);
        let k2 = g(rho + 0.5 * h * k1);
        let k3 = g(rho + 0.5 * h * k2);
        let k4 = g(rho + h * k3);
        rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ts.push((i + 1) as f64 * h);
        rhos.push(rho);
    }
    MonotoneCubic::new(ts, rhos)
}

/// An n-dimensional manifold of revolution, immutable after construction.
#[derive(Debug, Clone)]
pub struct RevolutionManifold {
    n: usize,
    profile: Profile,
    t_max: f64,
    two_poles: bool,
    unbounded: bool,
    omega: f64,
    name: String,
    params: Vec<f64>,
    warnings: Vec<String>,
    fd_step: f64,
}

impl RevolutionManifold {
    /// Catalog constructor. `t_trunc` overrides the truncation length of
    /// unbounded profiles; compact profiles ignore it.
    pub fn make(
        kind: &str,
        n: usize,
        params: &[f64],
        t_trunc: Option<f64>,
    ) -> Result<RevolutionManifold, ManifoldError> {
        if n < 2 {
            return Err(ManifoldError::BadParams {
                kind: kind.to_string(),
                reason: format!("dimension must be >= 2, got {n}"),
            });
        }
        let trunc = t_trunc.unwrap_or(DEFAULT_TRUNCATION);
        if trunc <= 0.0 {
            return Err(ManifoldError::BadParams {
                kind: kind.to_string(),
                reason: "truncation length must be positive".into(),
            });
        }
        let (profile, t_max) = match kind {
            "euclidean" => (Profile::Euclidean, trunc),
            "sphere" => (Profile::Sphere, PI),
            "hyperbolic" => (Profile::Hyperbolic, trunc),
            "capped_cylinder" => {
                let len = *params.first().ok_or_else(|| ManifoldError::BadParams {
                    kind: kind.into(),
                    reason: "needs the cylinder length as first parameter".into(),
                })?;
                if len <= 0.0 {
                    return Err(ManifoldError::BadParams {
                        kind: kind.into(),
                        reason: format!("cylinder length must be positive, got {len}"),
                    });
                }
                (Profile::CappedCylinder { len }, PI + len)
            }
            "paraboloid" => (Profile::Paraboloid, trunc),
            "hyperboloid_sheet" => (
                Profile::HyperboloidSheet {
                    rho_table: hyperboloid_rho_table(trunc),
                },
                trunc,
            ),
            "remark26_surface" => {
                let big_r = *params.first().ok_or_else(|| ManifoldError::BadParams {
                    kind: kind.into(),
                    reason: "needs R as first parameter".into(),
                })?;
                if !(big_r > 0.0 && big_r < PI / 2.0) {
                    return Err(ManifoldError::BadParams {
                        kind: kind.into(),
                        reason: format!("R must lie in (0, pi/2), got {big_r}"),
                    });
                }
                (Profile::Remark26 { big_r }, 2.0 * big_r)
            }
            other => return Err(ManifoldError::UnknownKind(other.to_string())),
        };
        Self::from_profile(kind, n, params.to_vec(), profile, t_max)
    }

    /// Manifold from a tabulated profile. The table must start at (0, 0) with
    /// strictly increasing coordinates and positive interior values; a zero
    /// final value is read as a second pole.
    pub fn from_table(n: usize, table: &[(f64, f64)]) -> Result<RevolutionManifold, ManifoldError> {
        if table.len() < 4 {
            return Err(ManifoldError::BadProfileTable(format!(
                "need at least 4 points, got {}",
                table.len()
            )));
        }
        if table[0].0 != 0.0 {
            return Err(ManifoldError::BadProfileTable(format!(
                "first coordinate must be 0, got {}",
                table[0].0
            )));
        }
        if table[0].1 != 0.0 {
            return Err(ManifoldError::BadProfileTable(format!(
                "profile must vanish at the pole, got b(0) = {}",
                table[0].1
            )));
        }
        for w in table.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(ManifoldError::BadProfileTable(format!(
                    "coordinates must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(t, b) in &table[1..table.len() - 1] {
            if !(b > 0.0) || !b.is_finite() {
                return Err(ManifoldError::NonpositiveProfile { t, b });
            }
        }
        let last = *table.last().expect("nonempty");
        if !last.1.is_finite() || last.1 < 0.0 {
            return Err(ManifoldError::NonpositiveProfile { t: last.0, b: last.1 });
        }
        let xs: Vec<f64> = table.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = table.iter().map(|p| p.1).collect();
        let interp = MonotoneCubic::new(xs, ys);
        Self::from_profile("custom", n, Vec::new(), Profile::Custom { interp }, last.0)
    }

    /// Internal constructor running the shared invariant checks.
    pub fn from_profile(
        name: &str,
        n: usize,
        params: Vec<f64>,
        profile: Profile,
        t_max: f64,
    ) -> Result<RevolutionManifold, ManifoldError> {
        let fd_step = 1e-5 * t_max;
        let b0 = profile.value(0.0);
        if b0.abs() > 1e-9 * t_max.max(1.0) {
            return Err(ManifoldError::PoleMismatch { b0 });
        }
        // Positivity sweep over the open interval plus breakpoint midpoints.
        let mut samples: Vec<f64> = (1..512).map(|i| t_max * i as f64 / 512.0).collect();
        for bp in profile.breakpoints() {
            if bp > 0.0 && bp < t_max {
                samples.push(bp);
            }
        }
        let b_end = profile.value(t_max);
        let two_poles =
            profile.unbounded() != Some(true) && b_end.abs() <= 1e-9 * t_max.max(1.0);
        // A tabulated profile ending at positive b is read as a truncation
        // of an unbounded space.
        let unbounded = profile.unbounded().unwrap_or(!two_poles);
        for &t in &samples {
            if two_poles && t >= t_max {
                continue;
            }
            let b = profile.value(t);
            if !(b > 0.0) || !b.is_finite() {
                return Err(ManifoldError::NonpositiveProfile { t, b });
            }
        }

        let mut warnings = Vec::new();
        let slope0 = profile
            .deriv_analytic(fd_step)
            .unwrap_or_else(|| fd_slope(&profile, fd_step, fd_step));
        // Evaluate the slope a step away from the pole; exact at the pole for
        // every analytic profile, and FD needs b on both sides anyway.
        let slope_pole = profile
            .deriv_analytic(0.0)
            .unwrap_or(slope0);
        if (slope_pole - 1.0).abs() > POLE_SLOPE_TOL {
            warnings.push(format!(
                "pole at t = 0 is not C1-smooth: b'(0) = {slope_pole} (expected 1); treating as a cusp"
            ));
        }
        if two_poles {
            let slope_far = profile
                .deriv_analytic(t_max)
                .unwrap_or_else(|| fd_slope(&profile, t_max - fd_step, fd_step));
            if (slope_far + 1.0).abs() > POLE_SLOPE_TOL {
                warnings.push(format!(
                    "far pole at t = {t_max} is not C1-smooth: b'(t_max) = {slope_far} (expected -1)"
                ));
            }
        }

        Ok(RevolutionManifold {
            n,
            unbounded,
            omega: unit_sphere_area(n),
            profile,
            t_max,
            two_poles,
            name: name.to_string(),
            params,
            warnings,
            fd_step,
        })
    }

    /// The same manifold with the coordinate measured from the far pole,
    /// i.e. the reflection t ↦ t_max - t. Two-pole manifolds only.
    pub fn reflected(&self) -> Result<RevolutionManifold, ManifoldError> {
        if !self.two_poles {
            return Err(ManifoldError::NoSecondPole);
        }
        Self::from_profile(
            &format!("{}~reflected", self.name),
            self.n,
            self.params.clone(),
            Profile::Reflected {
                inner: Box::new(self.profile.clone()),
                length: self.t_max,
            },
            self.t_max,
        )
    }

    /// The homothetic manifold (M, λ² g), realized by the profile
    /// λ b(t / λ) on [0, λ t_max].
    pub fn scaled(&self, lambda: f64) -> Result<RevolutionManifold, ManifoldError> {
        if !(lambda > 0.0) {
            return Err(ManifoldError::BadParams {
                kind: self.name.clone(),
                reason: format!("scale factor must be positive, got {lambda}"),
            });
        }
        Self::from_profile(
            &format!("{}*{}", self.name, lambda),
            self.n,
            self.params.clone(),
            Profile::Scaled {
                inner: Box::new(self.profile.clone()),
                lambda,
            },
            self.t_max * lambda,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn two_poles(&self) -> bool {
        self.two_poles
    }

    /// True when `t_max` is a truncation of an unbounded space.
    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    /// ω_{n-1}, the surface measure of the unit (n-1)-sphere.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn profile_value(&self, t: f64) -> f64 {
        self.profile.value(t)
    }

    pub fn profile_deriv(&self, t: f64) -> f64 {
        self.profile
            .deriv_analytic(t)
            .unwrap_or_else(|| fd_slope(&self.profile, t, self.fd_step))
    }

    /// Normal-coordinate density θ(t) = b(t)^{n-1}.
    pub fn theta(&self, t: f64) -> f64 {
        self.profile.value(t).powi(self.n as i32 - 1)
    }

    /// Interior smoothness breakpoints of the profile.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.profile
            .breakpoints()
            .into_iter()
            .filter(|&b| b > 0.0 && b < self.t_max)
            .collect()
    }

    /// Adaptive integral of θ over `[a, b]`, split at profile breakpoints.
    pub fn integrate_theta(&self, a: f64, b: f64) -> Result<f64, ManifoldError> {
        let mut cuts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .filter(|&c| c > a && c < b)
            .collect();
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        let mut lo = a;
        for c in cuts.into_iter().chain(std::iter::once(b)) {
            total += quad::integrate(&|t| self.theta(t), lo, c)?;
            lo = c;
        }
        Ok(total)
    }

    /// Volume of the geodesic ball B(x0, r): ω_{n-1} ∫_0^r b^{n-1}.
    pub fn ball_volume(&self, r: f64) -> Result<f64, ManifoldError> {
        if !(0.0..=self.t_max).contains(&r) || !r.is_finite() {
            return Err(ManifoldError::RadiusOutOfRange {
                r,
                t_max: self.t_max,
            });
        }
        Ok(self.omega * self.integrate_theta(0.0, r)?)
    }

    /// Boundary area of the geodesic ball: ω_{n-1} b(r)^{n-1}.
    pub fn ball_boundary_area(&self, r: f64) -> Result<f64, ManifoldError> {
        if !(r > 0.0 && r < self.t_max) {
            return Err(ManifoldError::RadiusOutOfRange {
                r,
                t_max: self.t_max,
            });
        }
        Ok(self.omega * self.theta(r))
    }

    /// Total volume, None for truncated unbounded spaces.
    pub fn total_volume(&self) -> Option<f64> {
        if self.unbounded {
            None
        } else {
            self.ball_volume(self.t_max).ok()
        }
    }

    /// Inverse of `ball_volume`: the unique r with Vol(B(x0, r)) = v,
    /// found by bisection to `quad::BISECT_TOL_DEFAULT` on the radius.
    pub fn radius_for_volume(&self, v: f64) -> Result<f64, ManifoldError> {
        if v == 0.0 {
            return Ok(0.0);
        }
        let total = self.ball_volume(self.t_max)?;
        if !(v > 0.0 && v <= total * (1.0 + 1e-12)) {
            return Err(ManifoldError::VolumeOutOfRange { v, total });
        }
        let v = v.min(total);
        let r = quad::bisect_increasing(
            &|r| {
                self.ball_volume(r)
                    .expect("radius inside [0, t_max] by construction")
            },
            v,
            0.0,
            self.t_max,
            quad::BISECT_TOL_DEFAULT,
        )?;
        Ok(r)
    }

    /// Gauss curvature K(t) = -b''(t)/b(t), n = 2 only. Refuses evaluation
    /// near poles and profile breakpoints where b is not C².
    pub fn gauss_curvature(&self, t: f64) -> Result<f64, ManifoldError> {
        if self.n != 2 {
            return Err(ManifoldError::CurvatureDimension(self.n));
        }
        let margin = 2.0 * self.fd_step;
        let hi = if self.two_poles { self.t_max - margin } else { self.t_max };
        if !(t > margin && t < hi) {
            return Err(ManifoldError::CurvatureNearSingularity { t, margin });
        }
        for bp in self.breakpoints() {
            if (t - bp).abs() < margin {
                return Err(ManifoldError::CurvatureNearSingularity { t, margin });
            }
        }
        let b = self.profile.value(t);
        let b2 = self.profile.deriv2_analytic(t).unwrap_or_else(|| {
            let h = self.fd_step;
            (self.profile.value(t - h) - 2.0 * b + self.profile.value(t + h)) / (h * h)
        });
        Ok(-b2 / b)
    }

    /// Sufficient criterion for being isoperimetric at the pole: positive
    /// Gauss curvature, strictly decreasing in the distance from the pole.
    /// A failed check is inconclusive, not a disproof.
    pub fn isoperimetric_at_pole_sufficient(
        &self,
        grid: usize,
    ) -> Result<IsoperimetricReport, ManifoldError> {
        if self.n != 2 {
            return Err(ManifoldError::CurvatureDimension(self.n));
        }
        let grid = grid.max(8);
        let margin = (2.0 * self.fd_step).max(1e-3 * self.t_max);
        let lo = margin;
        let hi = self.t_max - margin;
        let breakpoints = self.breakpoints();
        let mut samples = Vec::with_capacity(grid);
        for i in 0..grid {
            let t = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
            if breakpoints.iter().any(|bp| (t - bp).abs() < 2.0 * margin) {
                continue;
            }
            samples.push((t, self.gauss_curvature(t)?));
        }
        let mut violations = Vec::new();
        let mut positive = true;
        for &(t, k) in &samples {
            if k <= 0.0 {
                positive = false;
                violations.push(CurvatureViolation {
                    t_first: t,
                    t_second: t,
                    k_first: k,
                    k_second: k,
                    kind: ViolationKind::NonPositive,
                });
            }
        }
        let s_tol = 1e-9;
        let mut decreasing = true;
        for w in samples.windows(2) {
            let (t0, k0) = w[0];
            let (t1, k1) = w[1];
            if k1 >= k0 - s_tol * (1.0 + k0.abs()) {
                decreasing = false;
                violations.push(CurvatureViolation {
                    t_first: t0,
                    t_second: t1,
                    k_first: k0,
                    k_second: k1,
                    kind: ViolationKind::NotStrictlyDecreasing,
                });
            }
        }
        Ok(IsoperimetricReport {
            isoperimetric_at_pole: positive && decreasing,
            positive,
            strictly_decreasing: decreasing,
            samples_checked: samples.len(),
            violations,
        })
    }
}

fn fd_slope(profile: &Profile, t: f64, h: f64) -> f64 {
    let lo = (t - h).max(0.0);
    (profile.value(t + h) - profile.value(lo)) / (t + h - lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViolationKind {
    NonPositive,
    NotStrictlyDecreasing,
}

#[derive(Debug, Clone)]
pub struct CurvatureViolation {
    pub t_first: f64,
    pub t_second: f64,
    pub k_first: f64,
    pub k_second: f64,
    pub kind: ViolationKind,
}

/// Result of the Gauss-curvature sufficient criterion scan.
#[derive(Debug, Clone)]
pub struct IsoperimetricReport {
    pub isoperimetric_at_pole: bool,
    pub positive: bool,
    pub strictly_decreasing: bool,
    pub samples_checked: usize,
    pub violations: Vec<CurvatureViolation>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn sphere2() -> RevolutionManifold {
        RevolutionManifold::make("sphere", 2, &[], None).unwrap()
    }

    fn euclid2() -> RevolutionManifold {
        RevolutionManifold::make("euclidean", 2, &[], None).unwrap()
    }

    #[test]
    fn catalog_construction_and_pole_invariants() {
        let m = sphere2();
        assert!(m.two_poles());
        assert_eq!(m.t_max(), PI);
        assert!((m.omega() - 2.0 * PI).abs() < 1e-15);

        let e = euclid2();
        assert!(!e.two_poles());
        assert!(e.is_unbounded());

        let r26 = RevolutionManifold::make("remark26_surface", 2, &[1.0], None).unwrap();
        assert!(r26.two_poles());
        assert!((r26.profile_value(0.0)).abs() < 1e-15);
        assert!((r26.profile_deriv(1e-9) - 1.0).abs() < 1e-8);
        assert!(r26.warnings().is_empty(), "{:?}", r26.warnings());

        let cc = RevolutionManifold::make("capped_cylinder", 2, &[3.0], None).unwrap();
        assert!(cc.two_poles());
        assert!((cc.t_max() - (PI + 3.0)).abs() < 1e-15);

        assert!(matches!(
            RevolutionManifold::make("klein_bottle", 2, &[], None),
            Err(ManifoldError::UnknownKind(_))
        ));
        assert!(matches!(
            RevolutionManifold::make("remark26_surface", 2, &[2.0], None),
            Err(ManifoldError::BadParams { .. })
        ));
    }

    #[test]
    fn omega_matches_known_sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn ball_volume_trivial_and_derived_values() {
        let e = euclid2();
        assert!((e.ball_volume(1.0).unwrap() - PI).abs() < 1e-10);

        let s = sphere2();
        assert!((s.ball_volume(PI).unwrap() - 4.0 * PI).abs() < 1e-9);
        assert!((s.ball_volume(PI / 2.0).unwrap() - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn sphere_volume_matches_closed_forms_for_n_2_3_4() {
        // Closed forms for ω_{n-1} ∫_0^r sin^{n-1} t dt.
        let cases: [(usize, fn(f64) -> f64); 3] = [
            (2, |r| 2.0 * PI * (1.0 - r.cos())),
            (3, |r| 2.0 * PI * (r - r.sin() * r.cos())),
            (4, |r| {
                2.0 * PI * PI * (r.cos().powi(3) / 3.0 - r.cos() + 2.0 / 3.0)
            }),
        ];
        for (n, exact) in cases {
            let m = RevolutionManifold::make("sphere", n, &[], None).unwrap();
            for k in 1..=8 {
                let r = PI * k as f64 / 8.0;
                let v = m.ball_volume(r).unwrap();
                let want = exact(r);
                assert!(
                    (v - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "n={n} r={r}: {v} vs {want}"
                );
            }
        }
    }

    #[test]
    fn boundary_area_examples() {
        let e = euclid2();
        assert!((e.ball_boundary_area(1.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        let s = sphere2();
        assert!((s.ball_boundary_area(PI / 2.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        let r26 = RevolutionManifold::make("remark26_surface", 2, &[1.0], None).unwrap();
        let got = r26.ball_boundary_area(1.0).unwrap();
        let want = 2.0 * PI * 1.0_f64.sin();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((want - 5.2872).abs() < 1e-3);
    }

    #[test]
    fn radius_for_volume_inverts_ball_volume() {
        let e = euclid2();
        assert!((e.radius_for_volume(PI).unwrap() - 1.0).abs() < 1e-10);

        let s = sphere2();
        assert!((s.radius_for_volume(2.0 * PI).unwrap() - PI / 2.0).abs() < 1e-10);

        let h = RevolutionManifold::make("hyperbolic", 2, &[], None).unwrap();
        let v = 2.0 * PI * (1.0_f64.cosh() - 1.0);
        assert!((h.radius_for_volume(v).unwrap() - 1.0).abs() < 1e-10);

        // Round-trip property on 100 seeded radii.
        let mut rng = SplitMix64::new(0xD15EA5E);
        for m in [&e, &s, &h] {
            for _ in 0..34 {
                let r = rng.uniform(1e-3, 0.98 * m.t_max());
                let v = m.ball_volume(r).unwrap();
                let back = m.radius_for_volume(v).unwrap();
                assert!((back - r).abs() < 1e-9, "{}: r={r} back={back}", m.name());
            }
        }

        assert!(matches!(
            s.radius_for_volume(100.0),
            Err(ManifoldError::VolumeOutOfRange { .. })
        ));
    }

    #[test]
    fn ball_volume_strictly_increasing() {
        for m in [
            sphere2(),
            euclid2(),
            RevolutionManifold::make("paraboloid", 2, &[], Some(8.0)).unwrap(),
            RevolutionManifold::make("remark26_surface", 2, &[1.2], None).unwrap(),
        ] {
            let mut prev = 0.0;
            for i in 1..=64 {
                let r = m.t_max() * i as f64 / 64.0;
                let v = m.ball_volume(r).unwrap();
                assert!(v > prev, "{} not increasing at r={r}", m.name());
                prev = v;
            }
        }
    }

    #[test]
    fn gauss_curvature_of_model_spaces() {
        assert!((sphere2().gauss_curvature(1.0).unwrap() - 1.0).abs() < 1e-10);
        assert!(euclid2().gauss_curvature(1.0).unwrap().abs() < 1e-12);
        let h = RevolutionManifold::make("hyperbolic", 2, &[], None).unwrap();
        assert!((h.gauss_curvature(1.0).unwrap() + 1.0).abs() < 1e-10);

        let s3 = RevolutionManifold::make("sphere", 3, &[], None).unwrap();
        assert!(matches!(
            s3.gauss_curvature(1.0),
            Err(ManifoldError::CurvatureDimension(3))
        ));
        assert!(matches!(
            sphere2().gauss_curvature(1e-9),
            Err(ManifoldError::CurvatureNearSingularity { .. })
        ));
        // Refusal near the remark26 crease.
        let r26 = RevolutionManifold::make("remark26_surface", 2, &[1.0], None).unwrap();
        assert!(matches!(
            r26.gauss_curvature(1.0),
            Err(ManifoldError::CurvatureNearSingularity { .. })
        ));
        // Away from the crease the surface is a unit sphere piece.
        assert!((r26.gauss_curvature(0.5).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn paraboloid_and_hyperboloid_curvature_profiles() {
        let p = RevolutionManifold::make("paraboloid", 2, &[], Some(6.0)).unwrap();
        // K = 4 / (1 + 4 rho^2)^2, rho(t) from the arclength inversion.
        let t = 1.3;
        let rho = p.profile_value(t);
        let want = 4.0 / (1.0 + 4.0 * rho * rho).powi(2);
        assert!((p.gauss_curvature(t).unwrap() - want).abs() < 1e-9);

        let h = RevolutionManifold::make("hyperboloid_sheet", 2, &[], Some(6.0)).unwrap();
        let rho = h.profile_value(t);
        let want = 1.0 / (1.0 + 2.0 * rho * rho).powi(2);
        assert!((h.gauss_curvature(t).unwrap() - want).abs() < 1e-6);
        assert!((h.profile_deriv(1e-8) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn isoperimetric_sufficient_criterion() {
        let p = RevolutionManifold::make("paraboloid", 2, &[], Some(6.0)).unwrap();
        let rep = p.isoperimetric_at_pole_sufficient(256).unwrap();
        assert!(rep.isoperimetric_at_pole, "{:?}", rep.violations.first());

        let h = RevolutionManifold::make("hyperboloid_sheet", 2, &[], Some(6.0)).unwrap();
        assert!(h.isoperimetric_at_pole_sufficient(256).unwrap().isoperimetric_at_pole);

        let rep = euclid2().isoperimetric_at_pole_sufficient(128).unwrap();
        assert!(!rep.isoperimetric_at_pole);
        assert!(!rep.positive);

        // Constant curvature fails strictness; the criterion is only sufficient.
        let rep = sphere2().isoperimetric_at_pole_sufficient(128).unwrap();
        assert!(!rep.isoperimetric_at_pole);
        assert!(rep.positive);
        assert!(!rep.strictly_decreasing);

        let r26 = RevolutionManifold::make("remark26_surface", 2, &[1.0], None).unwrap();
        assert!(!r26.isoperimetric_at_pole_sufficient(128).unwrap().isoperimetric_at_pole);
    }

    #[test]
    fn remark26_competitor_beats_the_ball() {
        // length(∂Ω₁) = 4R < 2π sin R = length(∂B(x0, R)), evaluated as stated.
        for big_r in [0.5, 1.0, 1.4] {
            let m = RevolutionManifold::make("remark26_surface", 2, &[big_r], None).unwrap();
            let ball_boundary = m.ball_boundary_area(big_r).unwrap();
            let competitor = 4.0 * big_r;
            assert!(
                competitor < ball_boundary,
                "R={big_r}: 4R = {competitor} !< {ball_boundary}"
            );
        }
    }

    #[test]
    fn custom_table_roundtrip_and_errors() {
        // Tabulated euclidean profile.
        let table: Vec<(f64, f64)> = (0..=200).map(|i| (i as f64 / 50.0, i as f64 / 50.0)).collect();
        let m = RevolutionManifold::from_table(2, &table).unwrap();
        assert!((m.ball_volume(1.0).unwrap() - PI).abs() < 1e-8);
        assert!(!m.two_poles());

        assert!(RevolutionManifold::from_table(2, &[(0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(RevolutionManifold::from_table(2, &[(0.1, 0.0), (1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(
            RevolutionManifold::from_table(2, &[(0.0, 0.0), (1.0, -1.0), (2.0, 1.0), (3.0, 1.0)]).is_err()
        );

        // Cusped pole: slope 2 at t = 0 warns but does not fail.
        let cusp: Vec<(f64, f64)> = (0..=100).map(|i| (i as f64 / 50.0, 2.0 * i as f64 / 50.0)).collect();
        let m = RevolutionManifold::from_table(2, &cusp).unwrap();
        assert!(!m.warnings().is_empty());
    }

    #[test]
    fn scaled_profile_matches_homothety() {
        let s = sphere2();
        let lam = 2.5;
        let scaled = s.scaled(lam).unwrap();
        assert!((scaled.t_max() - lam * PI).abs() < 1e-12);
        // Vol(B(λr)) on (M, λ²g) = λ² Vol(B(r)) in dimension 2.
        let v1 = s.ball_volume(1.0).unwrap();
        let v2 = scaled.ball_volume(lam).unwrap();
        assert!((v2 - lam * lam * v1).abs() < 1e-9 * v2);
        assert!(scaled.two_poles());
    }
}
