//! Masked-grid finite-element torsion solver on 2-D surfaces of revolution.
//!
//! The mesh is a structured periodic (t, θ) grid with cell-centered node
//! rows `t_i = t_lo + (i + 1/2) Δt` and metric-weighted lumped integration:
//! a node carries the measure `b(t_i) Δt Δθ` and the Dirichlet energy is a
//! sum over grid edges
//!
//! ```text
//! Σ_t-edges  (Δf)² b(t̄) Δθ / Δt   +   Σ_θ-edges  (Δf)² Δt / (b(t̄) Δθ) ,
//! ```
//!
//! with t̄ the edge midpoint. Meshes that include a pole place the first
//! node row half a cell away from it, fold the pole cap's measure into that
//! row's weight, and couple antipodal node pairs of the pole row through
//! the cap, so no edge weight ever evaluates 1/b at b = 0.
//!
//! Domains are boolean node masks rasterized from a spec (geodesic ball,
//! cosine star, rectangle union). The torsion equation becomes the SPD
//! system `A f = w` (A the weighted graph Laplacian, w the node measures)
//! with the Dirichlet condition imposed by eliminating outside and
//! boundary-layer unknowns; it is solved by Jacobi-preconditioned
//! conjugate gradients with a fixed iteration order, so solves are
//! deterministic. Boundary rasterization is first order, which sets the
//! 1–2% tolerance scale used by everything downstream.

use crate::manifold::{ManifoldError, RevolutionManifold};
use crate::quad;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error("mesh needs n = 2, got n = {0}")]
    Dimension(usize),
    #[error("mesh resolution {nt}x{ntheta} below the 16x16 minimum (ntheta must be even)")]
    Resolution { nt: usize, ntheta: usize },
    #[error("invalid t-range [{t_lo}, {t_hi}] for a manifold with t_max = {t_max}")]
    BadRange { t_lo: f64, t_hi: f64, t_max: f64 },
    #[error("profile degenerate on the mesh interior: b({t}) = {b}")]
    DegenerateProfile { t: f64, b: f64 },
    #[error("domain spec invalid: {0}")]
    BadSpec(String),
    #[error("rasterized domain is empty")]
    EmptyDomain,
    #[error("rasterized domain has no interior unknowns after boundary elimination")]
    EmptyInterior,
    #[error("rasterized domain is not edge-connected ({components} components)")]
    Disconnected { components: usize },
    #[error("domain touches the mesh edge at row {row}; enlarge the mesh t-range")]
    TouchesMeshEdge { row: usize },
    #[error("domain complement is empty; the complement must be a nonempty open set")]
    NoComplement,
    #[error("conjugate gradient stalled: residual {residual} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("discrete maximum principle violated: min f = {min} (assembly bug)")]
    MaximumPrinciple { min: f64 },
    #[error("cg tolerance {0} outside (0, 1e-4]")]
    BadTolerance(f64),
}

/// Structured periodic grid with metric weights. Immutable once built.
#[derive(Debug)]
pub struct Mesh2D {
    manifold: RevolutionManifold,
    t_lo: f64,
    t_hi: f64,
    nt: usize,
    ntheta: usize,
    dt: f64,
    dtheta: f64,
    rows: Vec<f64>,
    b_row: Vec<f64>,
    /// Node volume weight per row (same for every θ).
    w_node_row: Vec<f64>,
    /// t-edge weight between rows i and i+1.
    w_tedge_row: Vec<f64>,
    /// θ-edge weight within row i.
    w_thedge_row: Vec<f64>,
    pole_lo: bool,
    pole_hi: bool,
    /// Through-pole coupling weight per antipodal pair, when pole-inclusive.
    w_pole_lo: f64,
    w_pole_hi: f64,
}

/// Build a mesh over `t_range` with `nt × ntheta` nodes.
///
/// A range starting at exactly 0 (or ending at exactly t_max of a two-pole
/// manifold) is pole-inclusive.
pub fn build_mesh(
    m: &RevolutionManifold,
    t_range: (f64, f64),
    nt: usize,
    ntheta: usize,
) -> Result<Arc<Mesh2D>, FemError> {
    if m.n() != 2 {
        return Err(FemError::Dimension(m.n()));
    }
    if nt < 16 || ntheta < 16 || ntheta % 2 != 0 {
        return Err(FemError::Resolution { nt, ntheta });
    }
    let (t_lo, t_hi) = t_range;
    if !(t_lo >= 0.0 && t_lo < t_hi && t_hi <= m.t_max()) {
        return Err(FemError::BadRange {
            t_lo,
            t_hi,
            t_max: m.t_max(),
        });
    }
    let dt = (t_hi - t_lo) / nt as f64;
    let dtheta = 2.0 * PI / ntheta as f64;
    let pole_lo = t_lo == 0.0;
    let pole_hi = m.two_poles() && t_hi == m.t_max();

    let rows: Vec<f64> = (0..nt).map(|i| t_lo + (i as f64 + 0.5) * dt).collect();
    let b_row: Vec<f64> = rows.iter().map(|&t| m.profile_value(t)).collect();
    for (i, &b) in b_row.iter().enumerate() {
        if !(b > 0.0) || !b.is_finite() {
            return Err(FemError::DegenerateProfile { t: rows[i], b });
        }
    }

    // Node weights: midpoint rule per cell; pole rows integrate the whole
    // cell so the cap sliver below the first row is not dropped.
    let cell_quad = |a: f64, b: f64| quad::integrate_lenient(&|t| m.profile_value(t), a, b, 1e-10);
    let mut w_node_row: Vec<f64> = (0..nt).map(|i| b_row[i] * dt * dtheta).collect();
    if pole_lo {
        w_node_row[0] = cell_quad(0.0, t_lo + dt) * dtheta;
    }
    if pole_hi {
        w_node_row[nt - 1] = cell_quad(t_hi - dt, t_hi) * dtheta;
    }

    let mut w_tedge_row = Vec::with_capacity(nt - 1);
    for i in 0..nt - 1 {
        let t_mid = t_lo + (i as f64 + 1.0) * dt;
        let b = m.profile_value(t_mid);
        if !(b > 0.0) {
            return Err(FemError::DegenerateProfile { t: t_mid, b });
        }
        w_tedge_row.push(b * dtheta / dt);
    }
    let w_thedge_row: Vec<f64> = (0..nt).map(|i| dt / (b_row[i] * dtheta)).collect();

    // Through-pole pair weight, normalized to reproduce the cap Dirichlet
    // energy of linear functions at a smooth pole.
    let w_pole_lo = if pole_lo {
        4.0 * cell_quad(0.0, t_lo + 0.5 * dt) * dtheta / (dt * dt)
    } else {
        0.0
    };
    let w_pole_hi = if pole_hi {
        4.0 * cell_quad(t_hi - 0.5 * dt, t_hi) * dtheta / (dt * dt)
    } else {
        0.0
    };

    Ok(Arc::new(Mesh2D {
        manifold: m.clone(),
        t_lo,
        t_hi,
        nt,
        ntheta,
        dt,
        dtheta,
        rows,
        b_row,
        w_node_row,
        w_tedge_row,
        w_thedge_row,
        pole_lo,
        pole_hi,
        w_pole_lo,
        w_pole_hi,
    }))
}

impl Mesh2D {
    pub fn manifold(&self) -> &RevolutionManifold {
        &self.manifold
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    pub fn row_t(&self, i: usize) -> f64 {
        self.rows[i]
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    pub fn node_count(&self) -> usize {
        self.nt * self.ntheta
    }

    pub fn node_weight(&self, idx: usize) -> f64 {
        self.w_node_row[idx / self.ntheta]
    }

    /// Sum of all node weights; approximates the band volume.
    pub fn total_weight(&self) -> f64 {
        self.w_node_row.iter().map(|w| w * self.ntheta as f64).sum()
    }

    /// Apply `visit(a, b, w)` to every grid edge exactly once, in a fixed
    /// deterministic order (t-edges row by row, θ-edges, pole pairs).
    fn for_each_edge<F: FnMut(usize, usize, f64)>(&self, mut visit: F) {
        for i in 0..self.nt - 1 {
            let w = self.w_tedge_row[i];
            for j in 0..self.ntheta {
                visit(self.node(i, j), self.node(i + 1, j), w);
            }
        }
        for i in 0..self.nt {
            let w = self.w_thedge_row[i];
            for j in 0..self.ntheta {
                let jn = (j + 1) % self.ntheta;
                visit(self.node(i, j), self.node(i, jn), w);
            }
        }
        let half = self.ntheta / 2;
        if self.pole_lo {
            for j in 0..half {
                visit(self.node(0, j), self.node(0, j + half), self.w_pole_lo);
            }
        }
        if self.pole_hi {
            for j in 0..half {
                visit(
                    self.node(self.nt - 1, j),
                    self.node(self.nt - 1, j + half),
                    self.w_pole_hi,
                );
            }
        }
    }

    /// Neighbor node indices of `idx` (grid adjacency plus pole pairs).
    fn neighbors(&self, idx: usize, out: &mut Vec<usize>) {
        out.clear();
        let (i, j) = (idx / self.ntheta, idx % self.ntheta);
        if i > 0 {
            out.push(self.node(i - 1, j));
        }
        if i + 1 < self.nt {
            out.push(self.node(i + 1, j));
        }
        out.push(self.node(i, (j + 1) % self.ntheta));
        out.push(self.node(i, (j + self.ntheta - 1) % self.ntheta));
        let half = self.ntheta / 2;
        if (self.pole_lo && i == 0) || (self.pole_hi && i == self.nt - 1) {
            out.push(self.node(i, (j + half) % self.ntheta));
        }
    }
}

/// Domain shapes rasterizable onto a mesh. Balls and stars are centered at
/// the pole x0 (t = 0); rectangles live directly in (t, θ) coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Ball {
        r0: f64,
    },
    /// Boundary r(θ) = r0 (1 + amplitude · cos(k (θ - phase))).
    Star {
        r0: f64,
        amplitude: f64,
        k: u32,
        phase: f64,
    },
    RectUnion(Vec<RectTTheta>),
}

/// A coordinate rectangle [t_lo, t_hi] × [theta_lo, theta_hi]; the θ arc
/// wraps when theta_hi < theta_lo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectTTheta {
    pub t_lo: f64,
    pub t_hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl RectTTheta {
    fn contains(&self, t: f64, theta: f64) -> bool {
        if t < self.t_lo || t > self.t_hi {
            return false;
        }
        // A span of at least 2π is the full circle.
        if self.theta_hi - self.theta_lo >= 2.0 * PI * (1.0 - 1e-12) {
            return true;
        }
        let th = theta.rem_euclid(2.0 * PI);
        let lo = self.theta_lo.rem_euclid(2.0 * PI);
        let hi = self.theta_hi.rem_euclid(2.0 * PI);
        if lo <= hi {
            th >= lo && th <= hi
        } else {
            th >= lo || th <= hi
        }
    }
}

impl DomainSpec {
    /// Node membership; a node exactly on the boundary counts as inside.
    fn contains(&self, t: f64, theta: f64) -> bool {
        match self {
            DomainSpec::Ball { r0 } => t <= *r0,
            DomainSpec::Star {
                r0,
                amplitude,
                k,
                phase,
            } => t <= r0 * (1.0 + amplitude * (*k as f64 * (theta - phase)).cos()),
            DomainSpec::RectUnion(rects) => rects.iter().any(|r| r.contains(t, theta)),
        }
    }

    fn validate(&self) -> Result<(), FemError> {
        match self {
            DomainSpec::Ball { r0 } => {
                if !(*r0 > 0.0) {
                    return Err(FemError::BadSpec(format!("ball radius {r0} must be positive")));
                }
            }
            DomainSpec::Star { r0, amplitude, k, .. } => {
                if !(*r0 > 0.0) {
                    return Err(FemError::BadSpec(format!("star radius {r0} must be positive")));
                }
                if amplitude.abs() >= 1.0 {
                    return Err(FemError::BadSpec(format!(
                        "star amplitude {amplitude} must satisfy |a| < 1"
                    )));
                }
                if *k == 0 {
                    return Err(FemError::BadSpec("star wave number k must be >= 1".into()));
                }
            }
            DomainSpec::RectUnion(rects) => {
                if rects.is_empty() {
                    return Err(FemError::BadSpec("rectangle union is empty".into()));
                }
                for r in rects {
                    if !(r.t_hi > r.t_lo) {
                        return Err(FemError::BadSpec(format!(
                            "rectangle t-range [{}, {}] is empty",
                            r.t_lo, r.t_hi
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Per-node membership of a rasterized domain.
#[derive(Debug)]
pub struct DomainMask {
    inside: Vec<bool>,
    /// Inside nodes adjacent to an outside node; the Dirichlet layer.
    boundary: Vec<bool>,
    n_inside: usize,
    volume: f64,
}

impl DomainMask {
    pub fn is_inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        self.boundary[idx]
    }

    pub fn inside_count(&self) -> usize {
        self.n_inside
    }

    /// Σ of node weights over the inside set: the discrete Vol(Ω).
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }
}

/// Rasterize a domain spec onto the mesh: membership, boundary layer,
/// connectivity and placement checks.
pub fn rasterize_domain(mesh: &Arc<Mesh2D>, spec: &DomainSpec) -> Result<Arc<DomainMask>, FemError> {
    spec.validate()?;
    let n = mesh.node_count();
    let mut inside = vec![false; n];
    let mut n_inside = 0usize;
    let mut volume = 0.0;
    for i in 0..mesh.nt {
        let t = mesh.rows[i];
        for j in 0..mesh.ntheta {
            if spec.contains(t, mesh.theta(j)) {
                let idx = mesh.node(i, j);
                inside[idx] = true;
                n_inside += 1;
                volume += mesh.w_node_row[i];
            }
        }
    }
    if n_inside == 0 {
        return Err(FemError::EmptyDomain);
    }
    if n_inside == n {
        return Err(FemError::NoComplement);
    }

    // The domain must be interior to the mesh: an inside node on a
    // non-pole mesh edge means the t-range is too tight.
    for j in 0..mesh.ntheta {
        if !mesh.pole_lo && inside[mesh.node(0, j)] {
            return Err(FemError::TouchesMeshEdge { row: 0 });
        }
        if !mesh.pole_hi && inside[mesh.node(mesh.nt - 1, j)] {
            return Err(FemError::TouchesMeshEdge { row: mesh.nt - 1 });
        }
    }

    // Edge-connectivity by flood fill.
    let start = inside.iter().position(|&b| b).expect("nonempty");
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 0usize;
    let mut nbrs = Vec::with_capacity(5);
    while let Some(p) = stack.pop() {
        reached += 1;
        mesh.neighbors(p, &mut nbrs);
        for &q in &nbrs {
            if inside[q] && !seen[q] {
                seen[q] = true;
                stack.push(q);
            }
        }
    }
    if reached != n_inside {
        return Err(FemError::Disconnected {
            components: 1 + (n_inside - reached).max(1),
        });
    }

    let mut boundary = vec![false; n];
    let mut any_unknown = false;
    for idx in 0..n {
        if !inside[idx] {
            continue;
        }
        mesh.neighbors(idx, &mut nbrs);
        if nbrs.iter().any(|&q| !inside[q]) {
            boundary[idx] = true;
        } else {
            any_unknown = true;
        }
    }
    if !any_unknown {
        return Err(FemError::EmptyInterior);
    }

    Ok(Arc::new(DomainMask {
        inside,
        boundary,
        n_inside,
        volume,
    }))
}

/// Nodal scalar field on a mesh: zero outside its domain mask.
#[derive(Debug, Clone)]
pub struct ScalarField {
    mesh: Arc<Mesh2D>,
    mask: Arc<DomainMask>,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wrap explicit nodal values (forced to zero outside the mask).
    pub fn from_values(
        mesh: Arc<Mesh2D>,
        mask: Arc<DomainMask>,
        mut values: Vec<f64>,
    ) -> ScalarField {
        assert_eq!(values.len(), mesh.node_count());
        for (idx, v) in values.iter_mut().enumerate() {
            if !mask.is_inside(idx) {
                *v = 0.0;
            }
        }
        ScalarField { mesh, mask, values }
    }

    pub fn mesh(&self) -> &Arc<Mesh2D> {
        &self.mesh
    }

    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// (weight, value) over inside nodes, row-major order.
    pub fn inside_nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().filter_map(|(idx, &v)| {
            self.mask
                .is_inside(idx)
                .then(|| (self.mesh.node_weight(idx), v))
        })
    }

    /// Discrete Dirichlet energy Σ w_e (Δf)² over all mesh edges.
    pub fn dirichlet_energy(&self) -> f64 {
        let mut e = 0.0;
        self.mesh.for_each_edge(|a, b, w| {
            let d = self.values[a] - self.values[b];
            e += w * d * d;
        });
        e
    }

    /// ∫ f dv over the mask.
    pub fn integral(&self) -> f64 {
        self.inside_nodes().map(|(w, v)| w * v).sum()
    }

    /// ∫ f^p dv over the mask.
    pub fn integral_pow(&self, p: f64) -> f64 {
        self.inside_nodes().map(|(w, v)| w * v.powf(p)).sum()
    }

    /// Write the field as CSV rows `t,theta,f` over inside nodes.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,theta,f")?;
        for i in 0..self.mesh.nt {
            for j in 0..self.mesh.ntheta {
                let idx = self.mesh.node(i, j);
                if self.mask.is_inside(idx) {
                    writeln!(
                        out,
                        "{},{},{}",
                        crate::report::fmt_f64(self.mesh.rows[i]),
                        crate::report::fmt_f64(self.mesh.theta(j)),
                        crate::report::fmt_f64(self.values[idx])
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Solver diagnostics for one torsion solve.
#[derive(Debug, Clone)]
pub struct FemDiagnostics {
    pub iterations: usize,
    pub residual: f64,
    /// |(1/Vol)∫f - E| / E, the discrete energy-identity defect.
    pub energy_identity_defect: f64,
}

/// Solve the torsion problem on the masked domain to relative residual
/// `cg_tol` by Jacobi-preconditioned conjugate gradients.
pub fn solve_torsion_fem(
    mesh: &Arc<Mesh2D>,
    mask: &Arc<DomainMask>,
    cg_tol: f64,
) -> Result<(ScalarField, FemDiagnostics), FemError> {
    if !(cg_tol > 0.0 && cg_tol <= 1e-4) {
        return Err(FemError::BadTolerance(cg_tol));
    }
    let n = mesh.node_count();

    // Unknowns: inside nodes that are not in the Dirichlet boundary layer.
    let mut unknown_of_node = vec![-1i64; n];
    let mut nodes_of_unknown = Vec::new();
    for idx in 0..n {
        if mask.is_inside(idx) && !mask.is_boundary(idx) {
            unknown_of_node[idx] = nodes_of_unknown.len() as i64;
            nodes_of_unknown.push(idx);
        }
    }
    let m = nodes_of_unknown.len();
    if m == 0 {
        return Err(FemError::EmptyInterior);
    }

    // Assemble diagonal and neighbor lists (≤ 5 neighbors per node).
    let mut diag = vec![0.0f64; m];
    let mut nbr: Vec<[(i64, f64); 5]> = vec![[(-1, 0.0); 5]; m];
    let mut nbr_len = vec![0u8; m];
    mesh.for_each_edge(|a, b, w| {
        let ua = unknown_of_node[a];
        let ub = unknown_of_node[b];
        if ua >= 0 {
            diag[ua as usize] += w;
            if ub >= 0 {
                let slot = &mut nbr[ua as usize];
                slot[nbr_len[ua as usize] as usize] = (ub, w);
                nbr_len[ua as usize] += 1;
            }
        }
        if ub >= 0 {
            diag[ub as usize] += w;
            if ua >= 0 {
                let slot = &mut nbr[ub as usize];
                slot[nbr_len[ub as usize] as usize] = (ua, w);
                nbr_len[ub as usize] += 1;
            }
        }
    });

    let load: Vec<f64> = nodes_of_unknown
        .iter()
        .map(|&idx| mesh.node_weight(idx))
        .collect();

    let matvec = |x: &[f64], y: &mut [f64]| {
        for p in 0..m {
            let mut acc = diag[p] * x[p];
            let row = &nbr[p];
            for s in 0..nbr_len[p] as usize {
                let (q, w) = row[s];
                acc -= w * x[q as usize];
            }
            y[p] = acc;
        }
    };

    // Jacobi-preconditioned CG.
    let b_norm = load.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0f64; m];
    let mut r = load.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut q = vec![0.0f64; m];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 40 * (mesh.nt + mesh.ntheta) + 1000;
    let mut iterations = 0;
    let mut residual = 1.0;
    for it in 0..max_iter {
        residual = r.iter().map(|v| v * v).sum::<f64>().sqrt() / b_norm;
        iterations = it;
        if residual <= cg_tol {
            break;
        }
        matvec(&p, &mut q);
        let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        let alpha = rz / pq;
        for k in 0..m {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        for k in 0..m {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..m {
            p[k] = z[k] + beta * p[k];
        }
    }
    if residual > cg_tol {
        return Err(FemError::NonConvergence {
            residual,
            iterations,
        });
    }

    let mut values = vec![0.0f64; n];
    for (u, &idx) in nodes_of_unknown.iter().enumerate() {
        values[idx] = x[u];
    }
    let field = ScalarField {
        mesh: Arc::clone(mesh),
        mask: Arc::clone(mask),
        values,
    };

    // Discrete maximum principle: the solution of an M-matrix system with
    // positive load must be nonnegative.
    let max_f = field.sup();
    let min_f = field
        .values
        .iter()
        .enumerate()
        .filter(|(idx, _)| mask.is_inside(*idx))
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    if min_f < -1e-10 * max_f {
        return Err(FemError::MaximumPrinciple { min: min_f });
    }

    let report = rigidity_fem(&field);
    Ok((
        field,
        FemDiagnostics {
            iterations,
            residual,
            energy_identity_defect: report.identity_defect,
        },
    ))
}

/// Rigidity functional of a field: (2∫f - ∫|∇f|²)/Vol with discrete
/// integrals, plus the |mean(f) - E| identity defect.
#[derive(Debug, Clone)]
pub struct FemRigidity {
    pub rigidity: f64,
    pub volume: f64,
    pub integral_f: f64,
    pub energy: f64,
    pub identity_defect: f64,
}

pub fn rigidity_fem(field: &ScalarField) -> FemRigidity {
    let volume = field.mask.volume();
    let integral_f = field.integral();
    let energy = field.dirichlet_energy();
    let rigidity = (2.0 * integral_f - energy) / volume;
    let identity_defect = if rigidity != 0.0 {
        ((integral_f / volume) - rigidity).abs() / rigidity.abs()
    } else {
        0.0
    };
    FemRigidity {
        rigidity,
        volume,
        integral_f,
        energy,
        identity_defect,
    }
}

/// |∇f| statistics over the Dirichlet boundary layer; the relative spread
/// (max - min)/mean is the harmonic-domain detector.
#[derive(Debug, Clone)]
pub struct BoundaryGradientStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub relative_spread: f64,
    pub nodes: usize,
}

pub fn boundary_gradient_stats(field: &ScalarField) -> BoundaryGradientStats {
    let mesh = &field.mesh;
    let mask = &field.mask;
    let f = &field.values;
    let mut vals = Vec::new();
    for i in 0..mesh.nt {
        for j in 0..mesh.ntheta {
            let idx = mesh.node(i, j);
            if !mask.is_boundary(idx) {
                continue;
            }
            // Staircase rasterization leaves boundary nodes whose whole
            // neighborhood is Dirichlet-zero; they carry no gradient
            // information and are skipped.
            let mut solved_neighbor = false;
            for q in [
                (i > 0).then(|| mesh.node(i - 1, j)),
                (i + 1 < mesh.nt).then(|| mesh.node(i + 1, j)),
                Some(mesh.node(i, (j + 1) % mesh.ntheta)),
                Some(mesh.node(i, (j + mesh.ntheta - 1) % mesh.ntheta)),
            ]
            .into_iter()
            .flatten()
            {
                if mask.is_inside(q) && !mask.is_boundary(q) {
                    solved_neighbor = true;
                }
            }
            if !solved_neighbor {
                continue;
            }
            // One-sided differences into the domain: f vanishes at the
            // node, so the inward neighbor value over the spacing is the
            // normal-derivative magnitude along that axis.
            let f_up = (i + 1 < mesh.nt).then(|| f[mesh.node(i + 1, j)]).unwrap_or(0.0);
            let f_down = (i > 0).then(|| f[mesh.node(i - 1, j)]).unwrap_or(0.0);
            let g_t = f_up.max(f_down).max(0.0) / mesh.dt;
            let f_left = f[mesh.node(i, (j + mesh.ntheta - 1) % mesh.ntheta)];
            let f_right = f[mesh.node(i, (j + 1) % mesh.ntheta)];
            let g_th = f_left.max(f_right).max(0.0) / (mesh.b_row[i] * mesh.dtheta);
            vals.push(g_t.hypot(g_th));
        }
    }
    let n = vals.len().max(1);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = vals.iter().sum::<f64>() / n as f64;
    BoundaryGradientStats {
        min,
        max,
        mean,
        relative_spread: if mean > 0.0 { (max - min) / mean } else { f64::NAN },
        nodes: vals.len(),
    }
}
