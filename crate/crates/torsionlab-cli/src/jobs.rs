//! Experiment expansion: one config becomes a CSV header plus a list of
//! row jobs. Sweep axes expand in declaration order, jobs run on a worker
//! pool, and rows are emitted in job order regardless of completion order,
//! so a config reproduces its CSV byte for byte.

use std::f64::consts::PI;
use torsionlab::cheeger;
use torsionlab::config::{DomainConfig, ExperimentConfig, ExperimentKind, ManifoldConfig, MeshConfig};
use torsionlab::fem;
use torsionlab::manifold::RevolutionManifold;
use torsionlab::models;
use torsionlab::quad::QuadError;
use torsionlab::radial;
use torsionlab::report::fmt_f64;
use torsionlab::symmetrize::{self, FieldRef};
use torsionlab::verify;

/// How a failed row maps onto the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowFailure {
    /// Exit 2: the experiment description cannot be computed as stated.
    Invalid(String),
    /// Exit 3: a solver failed to converge.
    NonConvergence(String),
}

#[derive(Debug, Clone)]
pub struct RowOutcome {
    pub cells: Vec<String>,
    pub pass: bool,
    pub summary: String,
    pub failure: Option<RowFailure>,
}

pub type Job = Box<dyn FnOnce() -> Vec<RowOutcome> + Send>;

fn fmt_usize(x: usize) -> String {
    x.to_string()
}

fn pass_cell(pass: bool) -> String {
    if pass { "true".into() } else { "false".into() }
}

/// Commas would break the CSV; details and error strings are sanitized.
fn sanitize(text: &str) -> String {
    text.replace([',', '\n'], ";")
}

fn classify_fem(e: &fem::FemError) -> RowFailure {
    match e {
        fem::FemError::NonConvergence { .. } => RowFailure::NonConvergence(e.to_string()),
        _ => RowFailure::Invalid(e.to_string()),
    }
}

fn classify_radial(e: &radial::RadialError) -> RowFailure {
    match e {
        radial::RadialError::Quad(QuadError::NonConvergence { .. })
        | radial::RadialError::Consistency(_) => RowFailure::NonConvergence(e.to_string()),
        _ => RowFailure::Invalid(e.to_string()),
    }
}

fn error_row(header_len: usize, id: String, hash: String, failure: RowFailure) -> RowOutcome {
    let msg = match &failure {
        RowFailure::Invalid(m) | RowFailure::NonConvergence(m) => m.clone(),
    };
    let mut cells = vec![id.clone(), hash];
    cells.resize(header_len - 1, String::new());
    cells.push("false".into());
    RowOutcome {
        cells,
        pass: false,
        summary: format!("{id}: ERROR {msg}"),
        failure: Some(failure),
    }
}

fn build_manifold(
    cfg: &ManifoldConfig,
    table: &Option<Vec<(f64, f64)>>,
) -> Result<RevolutionManifold, RowFailure> {
    cfg.build(table.as_deref())
        .map_err(|e| RowFailure::Invalid(e.to_string()))
}

fn domain_label(d: &DomainConfig) -> String {
    match d {
        DomainConfig::Ball { r0 } => format!("ball(r0={r0})"),
        DomainConfig::Star { r0, amplitude, k, phase } => {
            format!("star(r0={r0};a={amplitude};k={k};phase={phase})")
        }
        DomainConfig::Rects { rects } => format!("rects(n={})", rects.len()),
    }
}

/// Expand a validated config into its CSV header and row jobs.
pub fn build_jobs(
    config: &ExperimentConfig,
    hash: u64,
    seed: u64,
) -> (Vec<&'static str>, Vec<Job>) {
    let hash_cell = format!("{hash:016x}");
    match &config.experiment {
        ExperimentKind::BallRigidity { manifold, r0, grid } => {
            let header = vec![
                "id", "config_hash", "manifold", "dim", "r0", "grid", "volume", "integral_f",
                "energy", "rigidity", "energy_defect", "pass",
            ];
            let mut jobs: Vec<Job> = Vec::new();
            for (i, &r) in r0.iter().enumerate() {
                let manifold = manifold.clone();
                let grid = *grid;
                let hash_cell = hash_cell.clone();
                let hlen = header.len();
                jobs.push(Box::new(move || {
                    let id = format!("ball-rigidity/{i}");
                    let m = match build_manifold(&manifold, &None) {
                        Ok(m) => m,
                        Err(f) => return vec![error_row(hlen, id, hash_cell, f)],
                    };
                    match radial::solve_radial_ball(&m, r, grid) {
                        Ok(sol) => {
                            let defect = (sol.integral_f - sol.energy).abs() / sol.integral_f;
                            let pass = defect <= 1e-6;
                            vec![RowOutcome {
                                cells: vec![
                                    id.clone(),
                                    hash_cell,
                                    manifold.kind.clone(),
                                    fmt_usize(m.n()),
                                    fmt_f64(r),
                                    fmt_usize(grid),
                                    fmt_f64(sol.volume),
                                    fmt_f64(sol.integral_f),
                                    fmt_f64(sol.energy),
                                    fmt_f64(sol.rigidity),
                                    fmt_f64(defect),
                                    pass_cell(pass),
                                ],
                                pass,
                                summary: format!(
                                    "{id}: E = {} on {} ball r0 = {r}",
                                    fmt_f64(sol.rigidity),
                                    manifold.kind
                                ),
                                failure: None,
                            }]
                        }
                        Err(e) => vec![error_row(hlen, id, hash_cell, classify_radial(&e))],
                    }
                }));
            }
            (header, jobs)
        }

        ExperimentKind::FemSolve {
            manifold,
            domain,
            mesh,
            cg_tol,
            field_csv,
        } => {
            let header = vec![
                "id", "config_hash", "manifold", "domain", "nt", "ntheta", "cg_tol",
                "iterations", "residual", "volume", "rigidity", "identity_defect",
                "boundary_spread", "pass",
            ];
            let job = fem_solve_job(
                manifold.clone(),
                domain.clone(),
                *mesh,
                *cg_tol,
                field_csv.clone(),
                hash_cell,
                header.len(),
            );
            (header, vec![job])
        }

        ExperimentKind::Symmetrize {
            manifold,
            domain,
            mesh,
            model,
            levels,
            radial_points,
            cg_tol,
            ladder_csv,
            fbar_csv,
        } => {
            let header = vec![
                "id", "config_hash", "manifold", "domain", "model", "levels", "lp1_defect",
                "lp2_defect", "lp3_defect", "energy_lhs", "energy_rhs", "energy_margin",
                "equi_defect", "equi_cell", "pass",
            ];
            let manifold = manifold.clone();
            let domain = domain.clone();
            let model = model.clone();
            let mesh = *mesh;
            let (levels, radial_points, cg_tol) = (*levels, *radial_points, *cg_tol);
            let (ladder_csv, fbar_csv) = (ladder_csv.clone(), fbar_csv.clone());
            let hlen = header.len();
            let job: Job = Box::new(move || {
                let id = "symmetrize/0".to_string();
                let run = || -> Result<Vec<String>, RowFailure> {
                    let m = build_manifold(&manifold, &None)?;
                    let mdl = build_manifold(&model, &None)?;
                    let mesh2d = fem::build_mesh(&m, (mesh.t_lo, mesh.t_hi), mesh.nt, mesh.ntheta)
                        .map_err(|e| classify_fem(&e))?;
                    let mask = fem::rasterize_domain(&mesh2d, &domain.to_spec())
                        .map_err(|e| classify_fem(&e))?;
                    let (field, _) =
                        fem::solve_torsion_fem(&mesh2d, &mask, cg_tol).map_err(|e| classify_fem(&e))?;
                    let fref = FieldRef::Fem(&field);
                    let a = symmetrize::alpha(m.total_volume(), mdl.total_volume())
                        .map_err(|e| RowFailure::Invalid(e.to_string()))?;
                    let sym = symmetrize::symmetrize(&fref, &mdl, a, levels, radial_points)
                        .map_err(|e| RowFailure::Invalid(e.to_string()))?;
                    if let Some(path) = &ladder_csv {
                        let mut buf = Vec::new();
                        sym.write_ladder_csv(&mut buf)
                            .map_err(|e| RowFailure::Invalid(format!("dump {path}: {e}")))?;
                        std::fs::write(path, buf)
                            .map_err(|e| RowFailure::Invalid(format!("dump {path}: {e}")))?;
                    }
                    if let Some(path) = &fbar_csv {
                        let mut buf = Vec::new();
                        sym.write_profile_csv(&mut buf)
                            .map_err(|e| RowFailure::Invalid(format!("dump {path}: {e}")))?;
                        std::fs::write(path, buf)
                            .map_err(|e| RowFailure::Invalid(format!("dump {path}: {e}")))?;
                    }
                    let mut lp = Vec::new();
                    for p in [1.0, 2.0, 3.0] {
                        lp.push(
                            symmetrize::check_lp_equality(&fref, &sym, p)
                                .map_err(|e| RowFailure::Invalid(e.to_string()))?,
                        );
                    }
                    let en = symmetrize::check_energy_decrease(&fref, &sym)
                        .map_err(|e| RowFailure::Invalid(e.to_string()))?;
                    let (equi, cell) = sym
                        .equimeasurability_defect()
                        .map_err(|e| RowFailure::Invalid(e.to_string()))?;
                    Ok(vec![
                        fmt_f64(lp[0]),
                        fmt_f64(lp[1]),
                        fmt_f64(lp[2]),
                        fmt_f64(en.lhs),
                        fmt_f64(en.rhs),
                        fmt_f64(en.margin),
                        fmt_f64(equi),
                        fmt_f64(cell),
                    ])
                };
                match run() {
                    Ok(vals) => {
                        let lp_ok = vals[0..3]
                            .iter()
                            .all(|v| v.parse::<f64>().unwrap_or(1.0) <= 0.02);
                        let margin: f64 = vals[5].parse().unwrap_or(-1.0);
                        let lhs: f64 = vals[3].parse().unwrap_or(1.0);
                        let equi: f64 = vals[6].parse().unwrap_or(1.0);
                        let cell: f64 = vals[7].parse().unwrap_or(0.0);
                        let pass = lp_ok && margin >= -0.02 * lhs && equi <= cell;
                        let mut cells = vec![
                            id.clone(),
                            hash_cell,
                            manifold.kind.clone(),
                            domain_label(&domain),
                            model.kind.clone(),
                            fmt_usize(levels),
                        ];
                        cells.extend(vals);
                        cells.push(pass_cell(pass));
                        vec![RowOutcome {
                            cells,
                            pass,
                            summary: format!("{id}: symmetrization identities checked"),
                            failure: None,
                        }]
                    }
                    Err(f) => vec![error_row(hlen, id, hash_cell, f)],
                }
            });
            (header, vec![job])
        }

        ExperimentKind::Compare {
            manifold,
            domain,
            mesh,
            model,
            cg_tol,
            grid,
        } => {
            let header = vec![
                "id", "config_hash", "manifold", "domain", "model", "e_domain", "e_model",
                "model_radius", "alpha", "slack", "pass",
            ];
            let manifold = manifold.clone();
            let domain = domain.clone();
            let model = model.clone();
            let mesh = *mesh;
            let (cg_tol, grid) = (*cg_tol, *grid);
            let hlen = header.len();
            let job: Job = Box::new(move || {
                let id = "compare/0".to_string();
                let run = || -> Result<(models::ComparisonReport,), RowFailure> {
                    let m = build_manifold(&manifold, &None)?;
                    let mdl = build_manifold(&model, &None)?;
                    let mesh2d = fem::build_mesh(&m, (mesh.t_lo, mesh.t_hi), mesh.nt, mesh.ntheta)
                        .map_err(|e| classify_fem(&e))?;
                    let mask = fem::rasterize_domain(&mesh2d, &domain.to_spec())
                        .map_err(|e| classify_fem(&e))?;
                    let (field, _) =
                        fem::solve_torsion_fem(&mesh2d, &mask, cg_tol).map_err(|e| classify_fem(&e))?;
                    let rep = fem::rigidity_fem(&field);
                    let verdict = models::comparison_verdict(
                        rep.rigidity,
                        rep.volume,
                        m.total_volume(),
                        &mdl,
                        grid,
                    )
                    .map_err(|e| RowFailure::Invalid(e.to_string()))?;
                    Ok((verdict,))
                };
                match run() {
                    Ok((v,)) => vec![RowOutcome {
                        cells: vec![
                            id.clone(),
                            hash_cell,
                            manifold.kind.clone(),
                            domain_label(&domain),
                            model.kind.clone(),
                            fmt_f64(v.e_domain),
                            fmt_f64(v.e_model),
                            fmt_f64(v.model_radius),
                            fmt_f64(v.alpha),
                            fmt_f64(v.slack),
                            pass_cell(v.pass),
                        ],
                        pass: v.pass,
                        summary: format!(
                            "{id}: E(domain) = {} vs E(ball) = {} ({})",
                            fmt_f64(v.e_domain),
                            fmt_f64(v.e_model),
                            if v.pass { "pass" } else { "FAIL" }
                        ),
                        failure: None,
                    }],
                    Err(f) => vec![error_row(hlen, id, hash_cell, f)],
                }
            });
            (header, vec![job])
        }

        ExperimentKind::Rkd { k, d, n, beta } => {
            // With beta, each row carries the Corollary-style rigidity
            // bound: E(Ω*) on the R(K,D)-sphere and its unit-cap route
            // R(K,D)²·E(Ω**), which must agree by metric homogeneity.
            let header = if beta.is_some() {
                vec![
                    "id", "config_hash", "k", "d", "n", "beta", "r_kd", "rigidity_bound",
                    "rkd_sq_times_unit_cap", "pass",
                ]
            } else {
                vec!["id", "config_hash", "k", "d", "n", "r_kd", "pass"]
            };
            let mut jobs: Vec<Job> = Vec::new();
            let mut idx = 0;
            for &kk in k {
                for &dd in d {
                    for &nn in n {
                        let hash_cell = hash_cell.clone();
                        let hlen = header.len();
                        let id = format!("rkd/{idx}");
                        let beta = *beta;
                        idx += 1;
                        jobs.push(Box::new(move || {
                            let outcome = match beta {
                                None => match models::r_kd(kk, dd, nn) {
                                    Ok(r) => Ok((r, None)),
                                    Err(e) => Err(e),
                                },
                                Some(b) => match models::rkd_bound(kk, dd, nn, b, 1024) {
                                    Ok(bound) => Ok((bound.r_kd, Some(bound))),
                                    Err(e) => Err(e),
                                },
                            };
                            match outcome {
                                Ok((r, bound)) => {
                                    let mut cells = vec![
                                        id.clone(),
                                        hash_cell,
                                        fmt_f64(kk),
                                        fmt_f64(dd),
                                        fmt_usize(nn),
                                    ];
                                    let mut pass = true;
                                    if let Some(bound) = &bound {
                                        let cross = (bound.rigidity_bound
                                            - bound.rigidity_bound_via_unit_cap)
                                            .abs()
                                            / bound.rigidity_bound;
                                        pass = cross <= 1e-8;
                                        cells.push(fmt_f64(beta.expect("beta set")));
                                        cells.push(fmt_f64(r));
                                        cells.push(fmt_f64(bound.rigidity_bound));
                                        cells.push(fmt_f64(bound.rigidity_bound_via_unit_cap));
                                    } else {
                                        cells.push(fmt_f64(r));
                                    }
                                    cells.push(pass_cell(pass));
                                    vec![RowOutcome {
                                        cells,
                                        pass,
                                        summary: format!("{id}: R({kk}, {dd}) = {}", fmt_f64(r)),
                                        failure: None,
                                    }]
                                }
                                Err(e) => vec![error_row(
                                    hlen,
                                    id,
                                    hash_cell,
                                    RowFailure::Invalid(e.to_string()),
                                )],
                            }
                        }));
                    }
                }
            }
            (header, jobs)
        }

        ExperimentKind::Perelman { eps, n } => {
            let header = vec![
                "id", "config_hash", "eps", "n", "factor", "rkd_squared", "cross_defect", "pass",
            ];
            let mut jobs: Vec<Job> = Vec::new();
            let mut idx = 0;
            for &e in eps {
                for &nn in n {
                    let hash_cell = hash_cell.clone();
                    let hlen = header.len();
                    let id = format!("perelman/{idx}");
                    idx += 1;
                    jobs.push(Box::new(move || {
                        let run = || -> Result<(f64, f64), RowFailure> {
                            let f = models::perelman_gap_factor(e, nn)
                                .map_err(|er| RowFailure::Invalid(er.to_string()))?;
                            let r = models::r_kd(1.0, PI - e, nn)
                                .map_err(|er| RowFailure::Invalid(er.to_string()))?;
                            Ok((f, r * r))
                        };
                        match run() {
                            Ok((f, r2)) => {
                                let defect = (f - r2).abs();
                                let pass = defect <= 1e-10;
                                vec![RowOutcome {
                                    cells: vec![
                                        id.clone(),
                                        hash_cell,
                                        fmt_f64(e),
                                        fmt_usize(nn),
                                        fmt_f64(f),
                                        fmt_f64(r2),
                                        fmt_f64(defect),
                                        pass_cell(pass),
                                    ],
                                    pass,
                                    summary: format!("{id}: gap factor {}", fmt_f64(f)),
                                    failure: None,
                                }]
                            }
                            Err(f) => vec![error_row(hlen, id, hash_cell, f)],
                        }
                    }));
                }
            }
            (header, jobs)
        }

        ExperimentKind::CheegerFamily {
            n,
            eps,
            delta,
            beta,
            grid,
            scan_grid,
        } => {
            let header = vec![
                "id", "config_hash", "epsilon", "delta", "R", "r", "beta", "lambda", "eta",
                "H_rad", "E", "paper_bound", "product", "pass",
            ];
            let mut jobs: Vec<Job> = Vec::new();
            for (i, &e) in eps.iter().enumerate() {
                let (n, delta, beta, grid, scan) = (*n, *delta, *beta, *grid, *scan_grid);
                let hash_cell = hash_cell.clone();
                let hlen = header.len();
                jobs.push(Box::new(move || {
                    let id = format!("cheeger-family/{i}");
                    match cheeger::sharpness_experiment(n, e, delta, beta, grid, scan) {
                        Ok(rep) => {
                            let pass = rep.e >= rep.guaranteed_lower_bound;
                            vec![RowOutcome {
                                cells: vec![
                                    id.clone(),
                                    hash_cell,
                                    fmt_f64(rep.epsilon),
                                    fmt_f64(rep.delta),
                                    fmt_f64(rep.big_r),
                                    fmt_f64(rep.r),
                                    fmt_f64(rep.beta),
                                    fmt_f64(rep.lambda),
                                    fmt_f64(rep.eta),
                                    fmt_f64(rep.h_rad),
                                    fmt_f64(rep.e),
                                    fmt_f64(rep.guaranteed_lower_bound),
                                    fmt_f64(rep.product),
                                    pass_cell(pass),
                                ],
                                pass,
                                summary: format!(
                                    "{id}: eps = {e}, E = {} >= {}, E*H_rad^2 = {}",
                                    fmt_f64(rep.e),
                                    fmt_f64(rep.guaranteed_lower_bound),
                                    fmt_f64(rep.product)
                                ),
                                failure: None,
                            }]
                        }
                        Err(err) => vec![error_row(
                            hlen,
                            id,
                            hash_cell,
                            RowFailure::Invalid(err.to_string()),
                        )],
                    }
                }));
            }
            (header, jobs)
        }

        ExperimentKind::Verify { selection } => {
            let header = vec!["id", "config_hash", "suite", "property", "pass", "detail"];
            let mut jobs: Vec<Job> = Vec::new();
            for (i, &sel) in selection.iter().enumerate() {
                let hash_cell = hash_cell.clone();
                jobs.push(Box::new(move || {
                    verify::run_suite(sel, seed)
                        .into_iter()
                        .enumerate()
                        .map(|(k, r)| RowOutcome {
                            cells: vec![
                                format!("verify/{i}.{k}"),
                                hash_cell.clone(),
                                r.suite.to_string(),
                                r.name.to_string(),
                                pass_cell(r.pass),
                                sanitize(&r.detail),
                            ],
                            pass: r.pass,
                            summary: format!(
                                "verify {}/{}: {}",
                                r.suite,
                                r.name,
                                if r.pass { "pass" } else { "FAIL" }
                            ),
                            failure: None,
                        })
                        .collect()
                }));
            }
            (header, jobs)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn fem_solve_job(
    manifold: ManifoldConfig,
    domain: DomainConfig,
    mesh: MeshConfig,
    cg_tol: f64,
    field_csv: Option<String>,
    hash_cell: String,
    hlen: usize,
) -> Job {
    Box::new(move || {
        let id = "fem-solve/0".to_string();
        let run = || -> Result<Vec<String>, RowFailure> {
            let m = build_manifold(&manifold, &None)?;
            let mesh2d = fem::build_mesh(&m, (mesh.t_lo, mesh.t_hi), mesh.nt, mesh.ntheta)
                .map_err(|e| classify_fem(&e))?;
            let mask = fem::rasterize_domain(&mesh2d, &domain.to_spec())
                .map_err(|e| classify_fem(&e))?;
            let (field, diag) =
                fem::solve_torsion_fem(&mesh2d, &mask, cg_tol).map_err(|e| classify_fem(&e))?;
            let rep = fem::rigidity_fem(&field);
            let stats = fem::boundary_gradient_stats(&field);
            if let Some(path) = &field_csv {
                let mut out = Vec::new();
                field
                    .write_csv(&mut out)
                    .map_err(|e| RowFailure::Invalid(format!("field dump: {e}")))?;
                std::fs::write(path, out)
                    .map_err(|e| RowFailure::Invalid(format!("field dump {path}: {e}")))?;
            }
            Ok(vec![
                fmt_usize(diag.iterations),
                fmt_f64(diag.residual),
                fmt_f64(rep.volume),
                fmt_f64(rep.rigidity),
                fmt_f64(rep.identity_defect),
                fmt_f64(stats.relative_spread),
            ])
        };
        match run() {
            Ok(vals) => {
                let defect: f64 = vals[4].parse().unwrap_or(1.0);
                let pass = defect <= 1e-3;
                let mut cells = vec![
                    id.clone(),
                    hash_cell,
                    manifold.kind.clone(),
                    domain_label(&domain),
                    fmt_usize(mesh.nt),
                    fmt_usize(mesh.ntheta),
                    fmt_f64(cg_tol),
                ];
                cells.extend(vals.clone());
                cells.push(pass_cell(pass));
                vec![RowOutcome {
                    cells,
                    pass,
                    summary: format!("{id}: E = {} ({} iterations)", vals[3], vals[0]),
                    failure: None,
                }]
            }
            Err(f) => vec![error_row(hlen, id, hash_cell, f)],
        }
    })
}
