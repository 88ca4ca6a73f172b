//! Numeric kernel: adaptive Gauss–Kronrod quadrature, bisection inversion,
//! and monotone (Fritsch–Carlson) cubic interpolation.
//!
//! The quadrature is a 7-point Gauss / 15-point Kronrod pair with greedy
//! interval refinement: the segment with the largest error estimate is
//! bisected until the summed estimate meets the requested tolerance. All
//! geometric quantities in this crate (volumes, torsion integrals, model
//! constants) are reduced to 1-D integrals evaluated through this module,
//! so its target accuracy (`REL_TOL_DEFAULT` = 1e-10 relative) is what makes
//! the radial solver an oracle for the 2-D code.

use thiserror::Error;

/// Default relative tolerance for adaptive quadrature.
pub const REL_TOL_DEFAULT: f64 = 1e-10;
/// Default absolute tolerance for bisection-based inversion.
pub const BISECT_TOL_DEFAULT: f64 = 1e-12;

/// Kronrod abscissae (positive half) for the G7-K15 pair.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the embedded 7-point rule (odd-index abscissae of `XGK`).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: estimate {estimate}, error {error} after {segments} segments")]
    NonConvergence {
        estimate: f64,
        error: f64,
        segments: usize,
    },
    #[error("bisection failed: no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}

/// One G7-K15 panel on `[a, b]`. Returns `(kronrod_value, error_estimate)`.
pub fn gk15_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);

    let fc = f(c);
    let mut result_g = WG[3] * fc;
    let mut result_k = WGK[7] * fc;
    let mut abs_k = WGK[7] * fc.abs();

    for i in 0..7 {
        let x = h * XGK[i];
        let f1 = f(c - x);
        let f2 = f(c + x);
        let sum = f1 + f2;
        result_k += WGK[i] * sum;
        abs_k += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            result_g += WG[i / 2] * sum;
        }
    }

    let value = result_k * h;
    // QUADPACK-style scaled error estimate.
    let raw = ((result_k - result_g) * h).abs();
    let resabs = abs_k * h.abs();
    let err = if resabs > 0.0 && raw > 0.0 {
        raw.min(resabs * (200.0 * raw / resabs).powf(1.5).min(1.0))
    } else {
        raw
    };
    (value, err.max(f64::EPSILON * resabs))
}

/// Adaptive integral of `f` over `[a, b]` to relative tolerance `rel_tol`
/// (with a small absolute floor `abs_tol` for integrals near zero).
pub fn integrate_tol<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    const MAX_SEGMENTS: usize = 4096;

    // (error, a, b, value); a Vec scanned as a small max-heap keyed on error.
    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v0, e0) = gk15_panel(f, a, b);
    segs.push((e0, a, b, v0));
    let mut total = v0;
    let mut total_err = e0;

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if segs.len() >= MAX_SEGMENTS {
            return Err(QuadError::NonConvergence {
                estimate: total,
                error: total_err,
                segments: segs.len(),
            });
        }
        // Split the worst segment.
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.0.total_cmp(&y.0))
            .expect("segment list nonempty");
        let (err, sa, sb, val) = segs.swap_remove(idx);
        let mid = 0.5 * (sa + sb);
        if mid <= sa || mid >= sb {
            // Interval at floating-point resolution; accept its estimate.
            segs.push((0.0, sa, sb, val));
            total_err -= err;
            continue;
        }
        let (v1, e1) = gk15_panel(f, sa, mid);
        let (v2, e2) = gk15_panel(f, mid, sb);
        total += v1 + v2 - val;
        total_err += e1 + e2 - err;
        segs.push((e1, sa, mid, v1));
        segs.push((e2, mid, sb, v2));
    }
    Ok(total)
}

/// Adaptive integral at the default oracle tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64, QuadError> {
    integrate_tol(f, a, b, REL_TOL_DEFAULT, 1e-300)
}

/// Adaptive integral that refuses to fail: assumes the integrand is smooth
/// enough that the panel estimate is meaningful even at the segment cap.
pub fn integrate_lenient<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    match integrate_tol(f, a, b, rel_tol, 1e-300) {
        Ok(v) => v,
        Err(QuadError::NonConvergence { estimate, .. }) => estimate,
        Err(_) => unreachable!("integrate_tol only reports non-convergence"),
    }
}

/// Root of the increasing function `g` (i.e. `g(r) = target`) on `[lo, hi]`
/// by bisection, to absolute tolerance `tol` on the abscissa.
pub fn bisect_increasing<G: Fn(f64) -> f64>(
    g: &G,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, QuadError> {
    let glo = g(lo) - target;
    let ghi = g(hi) - target;
    if glo > 0.0 || ghi < 0.0 {
        return Err(QuadError::NoBracket { lo, hi });
    }
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (lo, hi);
    // 200 halvings exhaust f64 resolution on any practical interval.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        if g(mid) - target <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Monotonicity-preserving piecewise-cubic Hermite interpolant
/// (Fritsch–Carlson slope limiting).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneCubic {
    /// Build from samples with strictly increasing `xs`. Panics on fewer than
    /// two points or non-increasing abscissae (internal misuse, not input).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() == ys.len() && xs.len() >= 2, "need >= 2 samples");
        let n = xs.len();
        let mut h = vec![0.0; n - 1];
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            h[i] = xs[i + 1] - xs[i];
            assert!(h[i] > 0.0, "abscissae must be strictly increasing");
            delta[i] = (ys[i + 1] - ys[i]) / h[i];
        }
        let mut ds = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                ds[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        ds[0] = edge_slope(h[0], h.get(1).copied().unwrap_or(h[0]), delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        let (hn, hp) = (h[n - 2], h.get(n.wrapping_sub(3)).copied().unwrap_or(h[n - 2]));
        let (dn, dp) = (
            delta[n - 2],
            delta.get(n.wrapping_sub(3)).copied().unwrap_or(delta[n - 2]),
        );
        ds[n - 1] = edge_slope(hn, hp, dn, dp);
        MonotoneCubic { xs, ys, ds }
    }

    /// Evaluate at `x`, clamped to the sample range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let s = (x - self.xs[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[k] + h10 * h * self.ds[k] + h01 * self.ys[k + 1] + h11 * h * self.ds[k + 1]
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().expect("nonempty")
    }
}

/// One-sided endpoint slope with the standard Fritsch–Carlson clipping.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        d = 0.0;
    } else if d0 * d1 < 0.0 && d.abs() > 3.0 * d0.abs() {
        d = 3.0 * d0;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn panel_is_exact_on_low_degree_polynomials() {
        // K15 integrates degree <= 22 exactly; check a few.
        let (v, _) = gk15_panel(&|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0);
        let exact = |x: f64| x.powi(4) / 4.0 - x * x + x;
        assert!((v - (exact(3.0) - exact(-1.0))).abs() < 1e-13);
    }

    #[test]
    fn adaptive_hits_oracle_tolerance() {
        let v = integrate(&|x: f64| x.sin(), 0.0, PI).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "got {v}");

        // Integrable sqrt singularity at the left end.
        let v = integrate(&|x: f64| x.sqrt(), 0.0, 1.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn adaptive_handles_narrow_feature() {
        // Gaussian of width 1e-4 on an interval that brackets it, the same
        // situation as integrating a profile segment split at breakpoints.
        let s = 1e-4;
        let v = integrate(&|x: f64| (-((x - 0.3) / s).powi(2)).exp(), 0.29, 0.31).unwrap();
        let exact = s * PI.sqrt();
        assert!((v - exact).abs() / exact < 1e-9, "got {v} want {exact}");
    }

    #[test]
    fn bisect_inverts_monotone_function() {
        let r = bisect_increasing(&|x: f64| x * x * x, 8.0, 0.0, 10.0, 1e-13).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        assert!(matches!(
            bisect_increasing(&|x: f64| x, 100.0, 0.0, 1.0, 1e-12),
            Err(QuadError::NoBracket { .. })
        ));
    }

    #[test]
    fn monotone_cubic_preserves_monotonicity() {
        // Data with a sharp knee; plain cubic splines would overshoot.
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 0.2, 5.0, 10.0];
        let mc = MonotoneCubic::new(xs, ys);
        let mut prev = -1.0;
        for k in 0..=400 {
            let x = 4.0 * k as f64 / 400.0;
            let y = mc.eval(x);
            assert!(y >= prev - 1e-12, "not monotone at x={x}: {y} < {prev}");
            prev = y;
        }
        assert!((mc.eval(0.0) - 0.0).abs() < 1e-15);
        assert!((mc.eval(4.0) - 10.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_cubic_is_accurate_on_smooth_data() {
        let n = 200;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (2.0 * x).exp()).collect();
        let mc = MonotoneCubic::new(xs, ys);
        // O(h^4) in the interior, O(h^3) in the edge cells.
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            let err = (mc.eval(x) - (2.0 * x).exp()).abs();
            assert!(err < 5e-7, "err {err} at {x}");
        }
    }
}
