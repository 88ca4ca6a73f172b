//! Runnable property suites: each selection executes the invariants of one
//! subsystem at its documented default resolution and reports
//! machine-readable pass/fail lines. The CLI `verify` subcommand and the
//! acceptance tests are both thin wrappers over these functions.

use crate::cheeger;
use crate::config::Selection;
use crate::fem::{self, DomainSpec};
use crate::manifold::RevolutionManifold;
use crate::models;
use crate::radial;
use crate::report::fmt_f64;
use crate::rng::SplitMix64;
use crate::symmetrize::{self, FieldRef};
use std::f64::consts::PI;

/// Outcome of one property check.
#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl PropertyResult {
    fn fail(suite: &'static str, name: &'static str, detail: String) -> Self {
        PropertyResult {
            suite,
            name,
            pass: false,
            detail,
        }
    }

    fn from_bound(
        suite: &'static str,
        name: &'static str,
        measured: f64,
        bound: f64,
    ) -> Self {
        PropertyResult {
            suite,
            name,
            pass: measured <= bound,
            detail: format!("measured {} vs bound {}", fmt_f64(measured), fmt_f64(bound)),
        }
    }
}

/// Run one selected suite with the given seed.
pub fn run_suite(selection: Selection, seed: u64) -> Vec<PropertyResult> {
    match selection {
        Selection::Radial => radial_suite(seed),
        Selection::Fem => fem_suite(),
        Selection::Symmetrization => symmetrization_suite(),
        Selection::Models => models_suite(),
        Selection::Cheeger => cheeger_suite(),
    }
}

fn euclid(n: usize, trunc: f64) -> RevolutionManifold {
    RevolutionManifold::make("euclidean", n, &[], Some(trunc)).expect("catalog euclidean")
}

fn sphere(n: usize) -> RevolutionManifold {
    RevolutionManifold::make("sphere", n, &[], None).expect("catalog sphere")
}

fn hyperbolic(trunc: f64) -> RevolutionManifold {
    RevolutionManifold::make("hyperbolic", 2, &[], Some(trunc)).expect("catalog hyperbolic")
}

fn radial_suite(seed: u64) -> Vec<PropertyResult> {
    const SUITE: &str = "radial";
    let mut out = Vec::new();

    // Closed-form rigidity of Euclidean balls.
    let mut worst = 0.0f64;
    let mut worst_case = String::new();
    for n in [2usize, 3, 4, 5] {
        let m = euclid(n, 8.0);
        for r0 in [0.5, 1.0, 2.0] {
            match radial::solve_radial_ball(&m, r0, 256) {
                Ok(sol) => {
                    let want = r0 * r0 / (n as f64 * (n as f64 + 2.0));
                    let rel = (sol.rigidity - want).abs() / want;
                    if rel > worst {
                        worst = rel;
                        worst_case = format!("n={n} r0={r0}");
                    }
                }
                Err(e) => {
                    out.push(PropertyResult::fail(SUITE, "closed_form", e.to_string()));
                    return out;
                }
            }
        }
    }
    out.push(PropertyResult {
        suite: SUITE,
        name: "closed_form_euclidean",
        pass: worst <= 1e-8,
        detail: format!("worst rel err {} at {worst_case}", fmt_f64(worst)),
    });

    // Homogeneity under metric scaling on 20 seeded cases.
    let mut rng = SplitMix64::new(seed);
    let s2 = sphere(2);
    let h2 = hyperbolic(6.0);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let m = if i % 2 == 0 { &s2 } else { &h2 };
        let r0 = rng.uniform(0.2, 0.75) * m.t_max();
        let lambda = rng.uniform(0.3, 4.0);
        match radial::rigidity_scaled(m, r0, lambda, 128) {
            Ok((a, b)) => worst = worst.max((b - lambda * lambda * a).abs() / (lambda * lambda * a)),
            Err(e) => {
                out.push(PropertyResult::fail(SUITE, "homogeneity", e.to_string()));
                return out;
            }
        }
    }
    out.push(PropertyResult::from_bound(SUITE, "homogeneity_20_random", worst, 1e-8));

    // Energy identity on a mixed bag of manifolds.
    let mut worst = 0.0f64;
    for (m, r0) in [
        (euclid(2, 8.0), 1.5),
        (sphere(3), 2.0),
        (hyperbolic(8.0), 1.3),
        (RevolutionManifold::make("paraboloid", 2, &[], Some(8.0)).unwrap(), 2.0),
    ] {
        match radial::solve_radial_ball(&m, r0, 256) {
            Ok(sol) => worst = worst.max((sol.integral_f - sol.energy).abs() / sol.integral_f),
            Err(e) => {
                out.push(PropertyResult::fail(SUITE, "energy_identity", e.to_string()));
                return out;
            }
        }
    }
    out.push(PropertyResult::from_bound(SUITE, "energy_identity", worst, 1e-6));

    // Grid refinement stability at N = 4096.
    match (
        radial::solve_radial_ball(&s2, 1.2, 4096),
        radial::solve_radial_ball(&s2, 1.2, 8192),
    ) {
        (Ok(a), Ok(b)) => {
            let rel = (a.rigidity - b.rigidity).abs() / a.rigidity;
            out.push(PropertyResult::from_bound(SUITE, "refinement_4096", rel, 1e-6));
        }
        _ => out.push(PropertyResult::fail(SUITE, "refinement_4096", "solve failed".into())),
    }

    // Maximality of the solved torsion function.
    match radial::solve_radial_ball(&euclid(2, 8.0), 1.0, 256) {
        Ok(sol) => {
            let pass = sol.maximality_check(100, seed ^ 0x5eed);
            out.push(PropertyResult {
                suite: SUITE,
                name: "maximality_100_trials",
                pass,
                detail: "random admissible perturbations must not increase the functional".into(),
            });
        }
        Err(e) => out.push(PropertyResult::fail(SUITE, "maximality_100_trials", e.to_string())),
    }

    out
}

fn fem_suite() -> Vec<PropertyResult> {
    const SUITE: &str = "fem";
    let mut out = Vec::new();
    let e2 = euclid(2, 8.0);
    let s2 = sphere(2);
    let h2 = hyperbolic(8.0);

    // Band weights against exact band volumes.
    let mut worst = 0.0f64;
    for (m, lo, hi) in [(&e2, 1.0, 2.0), (&s2, PI / 4.0, 3.0 * PI / 4.0), (&e2, 0.0, 1.0)] {
        match fem::build_mesh(m, (lo, hi), 256, 64) {
            Ok(mesh) => {
                let want = m.ball_volume(hi).unwrap() - m.ball_volume(lo).unwrap();
                worst = worst.max((mesh.total_weight() - want).abs() / want);
            }
            Err(e) => {
                out.push(PropertyResult::fail(SUITE, "band_weights", e.to_string()));
                return out;
            }
        }
    }
    out.push(PropertyResult::from_bound(SUITE, "band_weights_vs_volume", worst, 1e-3));

    // FEM vs radial oracle at 512x512 on three model balls, with the
    // energy-identity defect and maximum principle along the way.
    let cases: [(&RevolutionManifold, f64, f64); 3] = [
        (&e2, 1.0, 1.3),
        (&s2, PI / 2.0, 2.2),
        (&h2, 1.0, 1.4),
    ];
    let mut worst_rel = 0.0f64;
    let mut worst_defect = 0.0f64;
    let mut min_principle = 0.0f64;
    for (m, r0, t_hi) in cases {
        let run = || -> Result<(f64, f64, f64), String> {
            let mesh = fem::build_mesh(m, (0.0, t_hi), 512, 512).map_err(|e| e.to_string())?;
            let mask = fem::rasterize_domain(&mesh, &DomainSpec::Ball { r0 }).map_err(|e| e.to_string())?;
            let (field, diag) = fem::solve_torsion_fem(&mesh, &mask, 1e-8).map_err(|e| e.to_string())?;
            let rep = fem::rigidity_fem(&field);
            let oracle = radial::solve_radial_ball(m, r0, 1024)
                .map_err(|e| e.to_string())?
                .rigidity;
            let min_f = field
                .values()
                .iter()
                .enumerate()
                .filter(|(i, _)| field.mask().is_inside(*i))
                .map(|(_, &v)| v)
                .fold(f64::INFINITY, f64::min);
            Ok((
                (rep.rigidity - oracle).abs() / oracle,
                diag.energy_identity_defect,
                min_f / field.sup(),
            ))
        };
        match run() {
            Ok((rel, defect, min_norm)) => {
                worst_rel = worst_rel.max(rel);
                worst_defect = worst_defect.max(defect);
                min_principle = min_principle.min(min_norm);
            }
            Err(e) => {
                out.push(PropertyResult::fail(SUITE, "oracle_agreement_512", e));
                return out;
            }
        }
    }
    out.push(PropertyResult::from_bound(SUITE, "oracle_agreement_512", worst_rel, 0.01));
    out.push(PropertyResult::from_bound(SUITE, "energy_identity_defect_512", worst_defect, 1e-3));
    out.push(PropertyResult {
        suite: SUITE,
        name: "discrete_maximum_principle",
        pass: min_principle >= -1e-10,
        detail: format!("min f / max f = {}", fmt_f64(min_principle)),
    });

    // First-order convergence: error ratio under mesh doubling.
    let ratio = || -> Result<f64, String> {
        let mut errs = Vec::new();
        for res in [256usize, 512] {
            let mesh = fem::build_mesh(&e2, (0.0, 1.3), res, res).map_err(|e| e.to_string())?;
            let mask = fem::rasterize_domain(&mesh, &DomainSpec::Ball { r0: 1.0 }).map_err(|e| e.to_string())?;
            let (field, _) = fem::solve_torsion_fem(&mesh, &mask, 1e-9).map_err(|e| e.to_string())?;
            errs.push((fem::rigidity_fem(&field).rigidity - 0.125).abs());
        }
        Ok(errs[0] / errs[1])
    };
    match ratio() {
        Ok(r) => out.push(PropertyResult {
            suite: SUITE,
            name: "convergence_ratio_doubling",
            pass: r >= 1.8,
            detail: format!("error ratio {}", fmt_f64(r)),
        }),
        Err(e) => out.push(PropertyResult::fail(SUITE, "convergence_ratio_doubling", e)),
    }

    // Rotational equivariance of star rasterization.
    let equi = || -> Result<f64, String> {
        let mesh = fem::build_mesh(&e2, (0.0, 1.5), 256, 256).map_err(|e| e.to_string())?;
        let spec = |phase: f64| DomainSpec::Star {
            r0: 1.0,
            amplitude: 0.3,
            k: 3,
            phase,
        };
        let ma = fem::rasterize_domain(&mesh, &spec(0.0)).map_err(|e| e.to_string())?;
        let mb = fem::rasterize_domain(&mesh, &spec(17.0 * mesh.dtheta())).map_err(|e| e.to_string())?;
        let ea = fem::rigidity_fem(&fem::solve_torsion_fem(&mesh, &ma, 1e-9).map_err(|e| e.to_string())?.0).rigidity;
        let eb = fem::rigidity_fem(&fem::solve_torsion_fem(&mesh, &mb, 1e-9).map_err(|e| e.to_string())?.0).rigidity;
        Ok((ea - eb).abs() / ea)
    };
    match equi() {
        Ok(rel) => out.push(PropertyResult::from_bound(SUITE, "rotation_equivariance", rel, 1e-6)),
        Err(e) => out.push(PropertyResult::fail(SUITE, "rotation_equivariance", e)),
    }

    // Harmonic-domain detector: tight spread on balls, wide on stars.
    let spread = |spec: &DomainSpec, t_hi: f64| -> Result<f64, String> {
        let mesh = fem::build_mesh(&e2, (0.0, t_hi), 512, 512).map_err(|e| e.to_string())?;
        let mask = fem::rasterize_domain(&mesh, spec).map_err(|e| e.to_string())?;
        let (field, _) = fem::solve_torsion_fem(&mesh, &mask, 1e-8).map_err(|e| e.to_string())?;
        Ok(fem::boundary_gradient_stats(&field).relative_spread)
    };
    match (
        spread(&DomainSpec::Ball { r0: 1.0 }, 1.3),
        spread(
            &DomainSpec::Star {
                r0: 1.0,
                amplitude: 0.3,
                k: 3,
                phase: 0.0,
            },
            1.5,
        ),
    ) {
        (Ok(ball), Ok(star)) => {
            out.push(PropertyResult {
                suite: SUITE,
                name: "harmonic_domain_detector",
                pass: ball <= 0.05 && star >= 0.20,
                detail: format!("ball spread {}, star spread {}", fmt_f64(ball), fmt_f64(star)),
            });
        }
        (a, b) => out.push(PropertyResult::fail(
            SUITE,
            "harmonic_domain_detector",
            format!("{a:?} / {b:?}"),
        )),
    }

    out
}

fn symmetrization_suite() -> Vec<PropertyResult> {
    const SUITE: &str = "symmetrization";
    let mut out = Vec::new();
    let e2 = euclid(2, 8.0);

    // Radial equality cases at a fine ladder.
    let radial_case = || -> Result<(f64, f64), String> {
        let sol = radial::solve_radial_ball(&e2, 1.0, 512).map_err(|e| e.to_string())?;
        let field = FieldRef::Radial(&sol);
        let sym = symmetrize::symmetrize(&field, &e2, 1.0, 8192, 1024).map_err(|e| e.to_string())?;
        let mut worst_lp = 0.0f64;
        for p in [1.0, 2.0, 3.0] {
            worst_lp = worst_lp.max(symmetrize::check_lp_equality(&field, &sym, p).map_err(|e| e.to_string())?);
        }
        let cmp = symmetrize::check_energy_decrease(&field, &sym).map_err(|e| e.to_string())?;
        Ok((worst_lp, (cmp.lhs - cmp.rhs).abs() / cmp.lhs))
    };
    match radial_case() {
        Ok((lp, en)) => {
            out.push(PropertyResult::from_bound(SUITE, "radial_lp_equality", lp, 1e-3));
            out.push(PropertyResult::from_bound(SUITE, "radial_energy_equality", en, 1e-3));
        }
        Err(e) => out.push(PropertyResult::fail(SUITE, "radial_equality", e)),
    }

    // Star domain: moment equality within 2%, energy decrease, and
    // equimeasurability within one cell.
    let star_case = || -> Result<(f64, f64, bool), String> {
        let mesh = fem::build_mesh(&e2, (0.0, 1.5), 256, 256).map_err(|e| e.to_string())?;
        let mask = fem::rasterize_domain(
            &mesh,
            &DomainSpec::Star {
                r0: 1.0,
                amplitude: 0.3,
                k: 3,
                phase: 0.0,
            },
        )
        .map_err(|e| e.to_string())?;
        let (f, _) = fem::solve_torsion_fem(&mesh, &mask, 1e-8).map_err(|e| e.to_string())?;
        let field = FieldRef::Fem(&f);
        let sym = symmetrize::symmetrize(&field, &e2, 1.0, 512, 1024).map_err(|e| e.to_string())?;
        let mut worst_lp = 0.0f64;
        for p in [1.0, 2.0, 3.0] {
            worst_lp = worst_lp.max(symmetrize::check_lp_equality(&field, &sym, p).map_err(|e| e.to_string())?);
        }
        let cmp = symmetrize::check_energy_decrease(&field, &sym).map_err(|e| e.to_string())?;
        let (defect, cell) = sym.equimeasurability_defect().map_err(|e| e.to_string())?;
        Ok((worst_lp, cmp.margin / cmp.lhs, defect <= cell))
    };
    match star_case() {
        Ok((lp, margin, equi)) => {
            out.push(PropertyResult::from_bound(SUITE, "star_lp_equality", lp, 0.02));
            out.push(PropertyResult {
                suite: SUITE,
                name: "star_energy_decrease",
                pass: margin >= -0.02,
                detail: format!("normalized margin {}", fmt_f64(margin)),
            });
            out.push(PropertyResult {
                suite: SUITE,
                name: "equimeasurability_one_cell",
                pass: equi,
                detail: "worst level defect within one radial cell volume".into(),
            });
        }
        Err(e) => out.push(PropertyResult::fail(SUITE, "star_symmetrization", e)),
    }

    // Monotone, right-continuous step profile; Lipschitz bound; idempotence.
    let structure = || -> Result<(bool, f64), String> {
        let sol = radial::solve_radial_ball(&e2, 1.0, 512).map_err(|e| e.to_string())?;
        let sym = symmetrize::symmetrize(&FieldRef::Radial(&sol), &e2, 1.0, 2048, 2048)
            .map_err(|e| e.to_string())?;
        let monotone = sym.fbar.windows(2).all(|w| w[1] <= w[0] + 1e-15);
        Ok((monotone, sym.max_step_slope() / 0.5))
    };
    match structure() {
        Ok((monotone, slope_ratio)) => {
            out.push(PropertyResult {
                suite: SUITE,
                name: "fbar_monotone",
                pass: monotone,
                detail: "step profile non-increasing on the radial grid".into(),
            });
            out.push(PropertyResult::from_bound(SUITE, "lipschitz_radial", slope_ratio, 1.05));
        }
        Err(e) => out.push(PropertyResult::fail(SUITE, "fbar_structure", e)),
    }

    // Layer cake at J = 1024 on disk and sphere cap.
    let lc_case = |m: &RevolutionManifold, r0: f64| -> Result<f64, String> {
        let sol = radial::solve_radial_ball(m, r0, 512).map_err(|e| e.to_string())?;
        let lc = symmetrize::layer_cake(&FieldRef::Radial(&sol), 1024).map_err(|e| e.to_string())?;
        Ok((lc.integral_a - lc.integral_f).abs() / lc.integral_f)
    };
    match (lc_case(&e2, 1.0), lc_case(&sphere(2), PI / 2.0)) {
        (Ok(a), Ok(b)) => {
            out.push(PropertyResult::from_bound(SUITE, "layer_cake_1pct", a.max(b), 0.01))
        }
        (a, b) => out.push(PropertyResult::fail(SUITE, "layer_cake_1pct", format!("{a:?} {b:?}"))),
    }

    // Coarea on radial fields.
    let coarea = || -> Result<f64, String> {
        let sol = radial::solve_radial_ball(&e2, 1.0, 512).map_err(|e| e.to_string())?;
        let (_, _, d1) = symmetrize::coarea_check(&sol, |_| 1.0);
        let cap = radial::solve_radial_ball(&sphere(2), PI / 2.0, 512).map_err(|e| e.to_string())?;
        let capf = cap.clone();
        let (_, _, d2) = symmetrize::coarea_check(&cap, move |t| capf.f_at(t));
        Ok(d1.max(d2))
    };
    match coarea() {
        Ok(d) => out.push(PropertyResult::from_bound(SUITE, "coarea_radial", d, 1e-4)),
        Err(e) => out.push(PropertyResult::fail(SUITE, "coarea_radial", e)),
    }

    out
}

fn models_suite() -> Vec<PropertyResult> {
    const SUITE: &str = "models";
    let mut out = Vec::new();

    // R(1, π) = 1 and strict dominance below π.
    match models::r_kd(1.0, PI, 3) {
        Ok(r) => out.push(PropertyResult::from_bound(SUITE, "rkd_unit_at_pi", (r - 1.0).abs(), 1e-10)),
        Err(e) => out.push(PropertyResult::fail(SUITE, "rkd_unit_at_pi", e.to_string())),
    }
    let mut below_one = true;
    let mut monotone = true;
    for n in 2..=6usize {
        let mut prev = 0.0;
        for i in 1..=50 {
            let d = PI * i as f64 / 50.0;
            match models::r_kd(1.0, d, n) {
                Ok(r) => {
                    if i < 50 && r >= 1.0 {
                        below_one = false;
                    }
                    if r < prev - 1e-12 {
                        monotone = false;
                    }
                    prev = r;
                }
                Err(e) => {
                    out.push(PropertyResult::fail(SUITE, "rkd_grid", e.to_string()));
                    return out;
                }
            }
        }
    }
    out.push(PropertyResult {
        suite: SUITE,
        name: "rkd_below_one_monotone",
        pass: below_one && monotone,
        detail: "R(1, D) < 1 and non-decreasing on a 50-point D-grid, n = 2..6".into(),
    });

    // Perelman gap cross-identity on a 20-point grid.
    let mut worst = 0.0f64;
    for n in [2usize, 3, 4] {
        for i in 1..=20 {
            let eps = PI * i as f64 / 21.0;
            match (models::perelman_gap_factor(eps, n), models::r_kd(1.0, PI - eps, n)) {
                (Ok(g), Ok(r)) => worst = worst.max((g - r * r).abs()),
                _ => {
                    out.push(PropertyResult::fail(SUITE, "perelman_identity", "evaluation failed".into()));
                    return out;
                }
            }
        }
    }
    out.push(PropertyResult::from_bound(SUITE, "perelman_identity", worst, 1e-10));

    // Cap rigidity strictly increasing in β.
    let mut increasing = true;
    let mut prev = 0.0;
    for i in 1..=19 {
        match models::sphere_cap_rigidity(i as f64 / 20.0, 2, 256) {
            Ok(e) => {
                if e <= prev {
                    increasing = false;
                }
                prev = e;
            }
            Err(e) => {
                out.push(PropertyResult::fail(SUITE, "cap_rigidity_monotone", e.to_string()));
                return out;
            }
        }
    }
    out.push(PropertyResult {
        suite: SUITE,
        name: "cap_rigidity_monotone",
        pass: increasing,
        detail: "E(cap) strictly increasing in the volume fraction".into(),
    });

    // Cartan–Hadamard desk check: nonpositively curved revolution surfaces
    // against the flat ball of equal area.
    let desk = |m: &RevolutionManifold| -> Result<(bool, f64), String> {
        // Curvature sign sweep.
        for k in 1..=64 {
            let t = 0.02 + (m.t_max() * 0.6 - 0.02) * k as f64 / 64.0;
            let kk = m.gauss_curvature(t).map_err(|e| e.to_string())?;
            if kk > 1e-9 {
                return Err(format!("positive curvature {kk} at t = {t}"));
            }
        }
        let mesh = fem::build_mesh(m, (0.0, 1.6), 256, 256).map_err(|e| e.to_string())?;
        let mask = fem::rasterize_domain(
            &mesh,
            &DomainSpec::Star {
                r0: 1.0,
                amplitude: 0.25,
                k: 4,
                phase: 0.3,
            },
        )
        .map_err(|e| e.to_string())?;
        let (field, _) = fem::solve_torsion_fem(&mesh, &mask, 1e-8).map_err(|e| e.to_string())?;
        let rep = fem::rigidity_fem(&field);
        let flat = euclid(2, 8.0);
        let cmp = models::comparison_verdict(rep.rigidity, rep.volume, None, &flat, 512)
            .map_err(|e| e.to_string())?;
        Ok((cmp.pass, cmp.slack / cmp.e_model))
    };
    let cubic_table: Vec<(f64, f64)> = (0..=4000)
        .map(|i| {
            let t = 6.0 * i as f64 / 4000.0;
            (t, t + t * t * t)
        })
        .collect();
    let cubic = RevolutionManifold::from_table(2, &cubic_table).expect("cubic profile");
    for (name, m) in [
        ("cartan_hadamard_hyperbolic", hyperbolic(8.0)),
        ("cartan_hadamard_cubic_profile", cubic),
    ] {
        match desk(&m) {
            Ok((pass, slack)) => out.push(PropertyResult {
                suite: SUITE,
                name,
                pass,
                detail: format!("normalized slack {}", fmt_f64(slack)),
            }),
            Err(e) => out.push(PropertyResult::fail(SUITE, name, e)),
        }
    }

    out
}

fn cheeger_suite() -> Vec<PropertyResult> {
    const SUITE: &str = "cheeger";
    let mut out = Vec::new();

    // Family envelope and H_rad floor.
    for (eps, delta) in [(0.5, 1.0), (0.1, 1.0), (0.2, 0.8)] {
        let name: &'static str = "family_invariants";
        let run = || -> Result<f64, String> {
            let big_r = 2.0 * cheeger::a_eps(eps).map_err(|e| e.to_string())?
                / ((2.0 - 1.0) * delta);
            let fam = cheeger::build_family(2, eps, delta, big_r).map_err(|e| e.to_string())?;
            let h = cheeger::h_rad_family(&fam, 4096).map_err(|e| e.to_string())?;
            Ok(h.infimum / delta)
        };
        match run() {
            Ok(ratio) => out.push(PropertyResult {
                suite: SUITE,
                name,
                pass: ratio >= 1.0 - 1e-9,
                detail: format!("eps={eps} delta={delta}: H_rad/(n-1)δ = {}", fmt_f64(ratio)),
            }),
            Err(e) => out.push(PropertyResult::fail(SUITE, name, format!("eps={eps}: {e}"))),
        }
    }

    // a_eps inverse identity.
    let mut worst = 0.0f64;
    for eps in [1.9, 1.0, 0.5, 0.2, 0.1, 0.05, 0.01] {
        match cheeger::a_eps(eps) {
            Ok(x) => worst = worst.max((2.0 * (1.0 + x) * (-x).exp() - eps).abs()),
            Err(e) => {
                out.push(PropertyResult::fail(SUITE, "a_eps_inverse", e.to_string()));
                return out;
            }
        }
    }
    out.push(PropertyResult::from_bound(SUITE, "a_eps_inverse", worst, 1e-10));

    // Proof chain on radial solves over at most half the manifold.
    let chain = || -> Result<f64, String> {
        let mut worst = 0.0f64;
        let s2 = sphere(2);
        for r0 in [0.8, PI / 2.0] {
            let sol = radial::solve_radial_ball(&s2, r0, 512).map_err(|e| e.to_string())?;
            let rep = cheeger::cheeger_chain_check(&sol, 2048).map_err(|e| e.to_string())?;
            worst = worst.max(rep.product_e_homega2);
        }
        let fam = cheeger::build_family(2, 0.2, 1.0, 2.0 * cheeger::a_eps(0.2).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let sol = fam.solve_domain(fam.big_r / 2.0, 1024).map_err(|e| e.to_string())?;
        let rep = cheeger::cheeger_chain_check(&sol, 2048).map_err(|e| e.to_string())?;
        worst = worst.max(rep.product_e_homega2);
        Ok(worst)
    };
    match chain() {
        Ok(worst) => out.push(PropertyResult::from_bound(SUITE, "chain_e_homega2", worst, 1.0 + 1e-6)),
        Err(e) => out.push(PropertyResult::fail(SUITE, "chain_e_homega2", e)),
    }

    // The ε-sweep: products non-decreasing toward ≤ 1.02, each ≥ 1 - ε.
    let sweep = || -> Result<(bool, bool, f64), String> {
        let mut prev = 0.0f64;
        let mut monotone = true;
        let mut lower_ok = true;
        let mut last = 0.0;
        for eps in [0.5, 0.2, 0.1, 0.05] {
            let rep = cheeger::sharpness_experiment(2, eps, 1.0, 0.3, 1024, 2048)
                .map_err(|e| format!("eps={eps}: {e}"))?;
            let scaled = rep.e; // (n-1)δ = 1
            if scaled < 1.0 - eps {
                lower_ok = false;
            }
            if scaled < prev - 1e-12 {
                monotone = false;
            }
            prev = scaled;
            last = scaled;
        }
        Ok((monotone, lower_ok, last))
    };
    match sweep() {
        Ok((monotone, lower_ok, last)) => out.push(PropertyResult {
            suite: SUITE,
            name: "sharpness_sweep",
            pass: monotone && lower_ok && last <= 1.02,
            detail: format!(
                "monotone={monotone}, E ≥ 1-ε everywhere={lower_ok}, final product {}",
                fmt_f64(last)
            ),
        }),
        Err(e) => out.push(PropertyResult::fail(SUITE, "sharpness_sweep", e)),
    }

    // Test-function sandwich at r = R/2.
    let tf = || -> Result<(f64, f64, f64), String> {
        let big_r = 2.0 * cheeger::a_eps(0.1).map_err(|e| e.to_string())?;
        let fam = cheeger::build_family(2, 0.1, 1.0, big_r).map_err(|e| e.to_string())?;
        let b = cheeger::ramp_test_function_bound(&fam, big_r / 2.0, 1024).map_err(|e| e.to_string())?;
        Ok((b.displayed_lower_bound, b.functional_value, b.exact_rigidity))
    };
    match tf() {
        Ok((bound, value, exact)) => out.push(PropertyResult {
            suite: SUITE,
            name: "test_function_sandwich",
            pass: bound - 1e-6 <= value && value <= exact + 1e-9,
            detail: format!(
                "bound {} ≤ value {} ≤ exact {}",
                fmt_f64(bound),
                fmt_f64(value),
                fmt_f64(exact)
            ),
        }),
        Err(e) => out.push(PropertyResult::fail(SUITE, "test_function_sandwich", e)),
    }

    // Scale invariance of E · H_Ω².
    let scale = || -> Result<f64, String> {
        let s2 = sphere(2);
        let a = cheeger::cheeger_chain_check(
            &radial::solve_radial_ball(&s2, 1.1, 512).map_err(|e| e.to_string())?,
            2048,
        )
        .map_err(|e| e.to_string())?;
        let scaled = s2.scaled(1.7).map_err(|e| e.to_string())?;
        let b = cheeger::cheeger_chain_check(
            &radial::solve_radial_ball(&scaled, 1.7 * 1.1, 512).map_err(|e| e.to_string())?,
            2048,
        )
        .map_err(|e| e.to_string())?;
        Ok((a.product_e_homega2 - b.product_e_homega2).abs() / a.product_e_homega2)
    };
    match scale() {
        Ok(rel) => out.push(PropertyResult::from_bound(SUITE, "chain_scale_invariance", rel, 1e-8)),
        Err(e) => out.push(PropertyResult::fail(SUITE, "chain_scale_invariance", e)),
    }

    out
}
