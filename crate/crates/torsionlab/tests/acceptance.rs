//! Acceptance suite: every release criterion as one test, each printing a
//! single pass/fail line with its measured numbers (visible under
//! `cargo test --test acceptance -- --nocapture`).
//!
//! Tolerances and runtime budgets are pinned in the constants below; a
//! criterion fails loudly rather than being weakened.

use std::f64::consts::PI;
use std::time::{Duration, Instant};
use torsionlab::cheeger;
use torsionlab::fem::{self, DomainSpec, RectTTheta};
use torsionlab::manifold::RevolutionManifold;
use torsionlab::models;
use torsionlab::radial;
use torsionlab::rng::SplitMix64;
use torsionlab::symmetrize::{self, FieldRef};

fn euclid(trunc: f64) -> RevolutionManifold {
    RevolutionManifold::make("euclidean", 2, &[], Some(trunc)).unwrap()
}

fn sphere() -> RevolutionManifold {
    RevolutionManifold::make("sphere", 2, &[], None).unwrap()
}

fn hyperbolic(trunc: f64) -> RevolutionManifold {
    RevolutionManifold::make("hyperbolic", 2, &[], Some(trunc)).unwrap()
}

/// Tabulated profile b(t) sampled densely on [0, span].
fn table_manifold(b: impl Fn(f64) -> f64, span: f64) -> RevolutionManifold {
    let table: Vec<(f64, f64)> = (0..=4000)
        .map(|i| {
            let t = span * i as f64 / 4000.0;
            (t, b(t))
        })
        .collect();
    RevolutionManifold::from_table(2, &table).unwrap()
}

fn fem_star(
    m: &RevolutionManifold,
    t_hi: f64,
    spec: &DomainSpec,
    res: usize,
) -> (fem::ScalarField, fem::FemRigidity) {
    let mesh = fem::build_mesh(m, (0.0, t_hi), res, res).unwrap();
    let mask = fem::rasterize_domain(&mesh, spec).unwrap();
    let (field, _) = fem::solve_torsion_fem(&mesh, &mask, 1e-8).unwrap();
    let rep = fem::rigidity_fem(&field);
    (field, rep)
}

fn report(criterion: u32, pass: bool, budget: Duration, elapsed: Duration, detail: &str) {
    println!(
        "acceptance {criterion}: {} [{:.2}s of {:.0}s budget] {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(pass, "criterion {criterion}: {detail}");
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

#[test]
fn criterion_01_radial_oracle_exactness() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [2usize, 3, 4, 5] {
        let m = RevolutionManifold::make("euclidean", n, &[], Some(8.0)).unwrap();
        for r0 in [0.5, 1.0, 2.0] {
            let sol = radial::solve_radial_ball(&m, r0, 256).unwrap();
            let want = r0 * r0 / (n as f64 * (n as f64 + 2.0));
            worst = worst.max((sol.rigidity - want).abs() / want);
        }
    }
    report(
        1,
        worst <= 1e-8,
        Duration::from_secs(1),
        start.elapsed(),
        &format!("worst closed-form deviation {worst:.3e} (tol 1e-8)"),
    );
}

#[test]
fn criterion_02_fem_vs_oracle_and_convergence() {
    let start = Instant::now();
    let e2 = euclid(8.0);
    let s2 = sphere();
    let h2 = hyperbolic(8.0);

    let mut worst = 0.0f64;
    for (m, r0, t_hi) in [(&e2, 1.0, 1.3), (&s2, PI / 2.0, 2.2), (&h2, 1.0, 1.4)] {
        let (_, rep) = fem_star(m, t_hi, &DomainSpec::Ball { r0 }, 512);
        let oracle = radial::solve_radial_ball(m, r0, 1024).unwrap().rigidity;
        worst = worst.max((rep.rigidity - oracle).abs() / oracle);
    }

    // First-order convergence, read as the geometric mean of the error
    // ratio under mesh doubling over three disk placements (individual
    // ratios wobble with how the circle falls across the node rows).
    let mut log_sum = 0.0;
    let mut count = 0;
    for (r0, t_hi) in [(1.0, 1.3), (0.8, 1.1), (0.9, 1.21)] {
        let mut errs = Vec::new();
        for res in [256usize, 512] {
            let (_, rep) = fem_star(&e2, t_hi, &DomainSpec::Ball { r0 }, res);
            errs.push((rep.rigidity - r0 * r0 / 8.0).abs());
        }
        log_sum += (errs[0] / errs[1]).ln();
        count += 1;
    }
    let ratio = (log_sum / count as f64).exp();

    report(
        2,
        worst <= 0.01 && ratio >= 1.8,
        Duration::from_secs(60),
        start.elapsed(),
        &format!("worst oracle deviation {worst:.3e} (tol 1e-2), doubling ratio {ratio:.2} (floor 1.8)"),
    );
}

#[test]
fn criterion_03_homogeneity() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x7054_1ab0);
    let s2 = sphere();
    let h3 = RevolutionManifold::make("hyperbolic", 3, &[], Some(6.0)).unwrap();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let m = if i % 2 == 0 { &s2 } else { &h3 };
        let r0 = rng.uniform(0.2, 0.75) * m.t_max();
        let lambda = rng.uniform(0.3, 4.0);
        let (a, b) = radial::rigidity_scaled(m, r0, lambda, 128).unwrap();
        worst = worst.max((b - lambda * lambda * a).abs() / (lambda * lambda * a));
    }
    report(
        3,
        worst <= 1e-8,
        Duration::from_secs(5),
        start.elapsed(),
        &format!("worst scaling deviation {worst:.3e} over 20 random cases (tol 1e-8)"),
    );
}

#[test]
fn criterion_04_symmetrization_suite() {
    let start = Instant::now();
    let e2 = euclid(8.0);
    let s2 = sphere();
    let h2 = hyperbolic(8.0);

    // Ten star-shaped FEM domains across the three model geometries.
    let star = |r0: f64, a: f64, k: u32, phase: f64| DomainSpec::Star {
        r0,
        amplitude: a,
        k,
        phase,
    };
    let cases: Vec<(&RevolutionManifold, f64, DomainSpec)> = vec![
        (&e2, 1.5, star(1.0, 0.3, 3, 0.0)),
        (&e2, 1.4, star(1.0, 0.2, 5, 0.4)),
        (&e2, 1.6, star(1.2, 0.15, 2, 0.0)),
        (&e2, 1.3, star(0.9, 0.25, 4, 1.0)),
        (&s2, 1.5, star(1.0, 0.2, 3, 0.0)),
        (&s2, 1.3, star(0.8, 0.3, 2, 0.7)),
        (&s2, 1.7, star(1.2, 0.15, 4, 0.0)),
        (&h2, 1.6, star(1.0, 0.3, 3, 0.0)),
        (&h2, 1.2, star(0.8, 0.2, 4, 0.2)),
        (&h2, 1.7, star(1.1, 0.25, 2, 0.0)),
    ];
    assert!(cases.len() >= 10);

    let mut worst_lp = 0.0f64;
    let mut worst_energy_margin = f64::INFINITY;
    for (m, t_hi, spec) in &cases {
        let (field, _) = fem_star(m, *t_hi, spec, 512);
        let fref = FieldRef::Fem(&field);
        let alpha = symmetrize::alpha(m.total_volume(), m.total_volume()).unwrap();
        let sym = symmetrize::symmetrize(&fref, m, alpha, 512, 1024).unwrap();
        for p in [1.0, 2.0, 3.0] {
            worst_lp = worst_lp.max(symmetrize::check_lp_equality(&fref, &sym, p).unwrap());
        }
        let cmp = symmetrize::check_energy_decrease(&fref, &sym).unwrap();
        worst_energy_margin = worst_energy_margin.min(cmp.margin / cmp.lhs);
    }

    // Equality case on radial inputs, with the fine ladder the step
    // profile needs for sub-1e-3 moment bias.
    let mut worst_radial = 0.0f64;
    for (m, r0) in [(&e2, 1.0), (&s2, PI / 2.0), (&h2, 1.0)] {
        let sol = radial::solve_radial_ball(m, r0, 512).unwrap();
        let fref = FieldRef::Radial(&sol);
        let sym = symmetrize::symmetrize(&fref, m, 1.0, 8192, 1024).unwrap();
        for p in [1.0, 2.0, 3.0] {
            worst_radial = worst_radial.max(symmetrize::check_lp_equality(&fref, &sym, p).unwrap());
        }
        let cmp = symmetrize::check_energy_decrease(&fref, &sym).unwrap();
        worst_radial = worst_radial.max((cmp.lhs - cmp.rhs).abs() / cmp.lhs);
    }

    report(
        4,
        worst_lp <= 0.02 && worst_energy_margin >= -0.02 && worst_radial <= 1e-3,
        Duration::from_secs(600),
        start.elapsed(),
        &format!(
            "worst Lp defect {worst_lp:.3e} (tol 2e-2), worst energy margin {worst_energy_margin:.3e} (floor -2e-2), radial equality {worst_radial:.3e} (tol 1e-3)"
        ),
    );
}

#[test]
fn criterion_05_comparison_theorems() {
    let start = Instant::now();
    let e2 = euclid(8.0);
    let s2 = sphere();
    let h2 = hyperbolic(8.0);
    // Two more nonpositively curved revolution surfaces (flat plane as the
    // model in all nonpositive cases, per the 2-D Cartan–Hadamard check).
    let cubic = table_manifold(|t| t + t * t * t, 6.0);
    let flared = table_manifold(|t| t * (t * t / 4.0).exp(), 5.0);
    for m in [&cubic, &flared] {
        for k in 1..=64 {
            let t = 0.03 + 2.0 * k as f64 / 64.0;
            assert!(
                m.gauss_curvature(t).unwrap() <= 1e-9,
                "sampled curvature must be nonpositive"
            );
        }
    }

    let star = |r0: f64, a: f64, k: u32| DomainSpec::Star {
        r0,
        amplitude: a,
        k,
        phase: 0.0,
    };
    let rect = |t_lo: f64, t_hi: f64, th_lo: f64, th_hi: f64| {
        DomainSpec::RectUnion(vec![RectTTheta {
            t_lo,
            t_hi,
            theta_lo: th_lo,
            theta_hi: th_hi,
        }])
    };
    // (manifold, mesh extent, domain, model)
    let cases: Vec<(&RevolutionManifold, f64, DomainSpec, &RevolutionManifold)> = vec![
        (&e2, 1.5, star(1.0, 0.3, 3), &e2),
        (&e2, 1.4, star(1.0, 0.2, 5), &e2),
        (&e2, 1.6, rect(0.5, 1.2, 0.7, 2.6), &e2),
        (&s2, 1.5, star(1.0, 0.2, 3), &s2),
        (&s2, 2.2, rect(0.6, 1.8, 0.4, 3.9), &s2),
        (&h2, 1.6, star(1.0, 0.3, 3), &h2),
        (&h2, 1.3, star(0.9, 0.15, 4), &h2),
        (&cubic, 1.5, star(1.0, 0.25, 4), &e2),
        (&flared, 1.3, star(0.9, 0.3, 3), &e2),
    ];

    let mut worst_excess = f64::NEG_INFINITY;
    let mut all_pass = true;
    for (m, t_hi, spec, model) in &cases {
        let (_, rep) = fem_star(m, *t_hi, spec, 512);
        let verdict =
            models::comparison_verdict(rep.rigidity, rep.volume, m.total_volume(), model, 1024)
                .unwrap();
        all_pass &= verdict.pass;
        worst_excess = worst_excess.max(verdict.e_domain / verdict.e_model - 1.0);
    }
    report(
        5,
        all_pass,
        Duration::from_secs(600),
        start.elapsed(),
        &format!(
            "{} domains, worst E(Ω)/E(Ω*) - 1 = {worst_excess:.3e} (tol 2e-2)",
            cases.len()
        ),
    );
}

#[test]
fn criterion_06_model_constants() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();

    let r_unit = models::r_kd(1.0, PI, 3).unwrap();
    if (r_unit - 1.0).abs() > 1e-10 {
        pass = false;
        detail.push_str(&format!("R(1,π) = {r_unit}; "));
    }

    for n in [2usize, 3, 4, 5, 6] {
        for i in 1..50 {
            let d = PI * i as f64 / 50.0;
            let r = models::r_kd(1.0, d, n).unwrap();
            if r >= 1.0 {
                pass = false;
                detail.push_str(&format!("R(1,{d}) = {r} not < 1; "));
            }
        }
    }

    let mut worst_cross = 0.0f64;
    for n in [2usize, 3, 4] {
        for i in 1..=20 {
            let eps = PI * i as f64 / 21.0;
            let gap = models::perelman_gap_factor(eps, n).unwrap();
            let r = models::r_kd(1.0, PI - eps, n).unwrap();
            worst_cross = worst_cross.max((gap - r * r).abs());
        }
    }
    if worst_cross > 1e-10 {
        pass = false;
    }

    report(
        6,
        pass,
        Duration::from_secs(5),
        start.elapsed(),
        &format!("R(1,π) defect {:.3e}, gap-factor cross defect {worst_cross:.3e} (tol 1e-10){detail}", (r_unit - 1.0).abs()),
    );
}

#[test]
fn criterion_07_layer_cake_and_coarea() {
    let start = Instant::now();
    let e2 = euclid(8.0);
    let s2 = sphere();

    let mut worst_lc = 0.0f64;
    let disk = radial::solve_radial_ball(&e2, 1.0, 512).unwrap();
    let cap = radial::solve_radial_ball(&s2, PI / 2.0, 512).unwrap();
    for sol in [&disk, &cap] {
        // `layer_cake` enforces the Riemann sandwich internally.
        let lc = symmetrize::layer_cake(&FieldRef::Radial(sol), 1024).unwrap();
        worst_lc = worst_lc.max((lc.integral_a - lc.integral_f).abs() / lc.integral_f);
    }
    // A discrete FEM field: the sandwich is exact for the nodal measure.
    let (field, _) = fem_star(
        &e2,
        1.5,
        &DomainSpec::Star {
            r0: 1.0,
            amplitude: 0.3,
            k: 3,
            phase: 0.0,
        },
        256,
    );
    let lc = symmetrize::layer_cake(&FieldRef::Fem(&field), 1024).unwrap();
    worst_lc = worst_lc.max((lc.integral_a - lc.integral_f).abs() / lc.integral_f);

    let (_, _, d1) = symmetrize::coarea_check(&disk, |_| 1.0);
    let capf = cap.clone();
    let (_, _, d2) = symmetrize::coarea_check(&cap, move |t| capf.f_at(t));
    let h2 = hyperbolic(8.0);
    let hyp = radial::solve_radial_ball(&h2, 1.0, 512).unwrap();
    let (_, _, d3) = symmetrize::coarea_check(&hyp, |t| h2.profile_value(t));
    let worst_coarea = d1.max(d2).max(d3);

    report(
        7,
        worst_lc <= 0.01 && worst_coarea <= 1e-4,
        Duration::from_secs(30),
        start.elapsed(),
        &format!("layer-cake defect {worst_lc:.3e} (tol 1e-2), coarea defect {worst_coarea:.3e} (tol 1e-4)"),
    );
}

#[test]
fn criterion_08_cheeger_suite() {
    let start = Instant::now();

    // Valid families at the minimal admissible R: the floor on H_rad and
    // the guaranteed lower bound on E(Ω_r) are enforced inside the library.
    let mut products = Vec::new();
    let mut all_bounds = true;
    for eps in [0.5, 0.2, 0.1, 0.05] {
        let rep = cheeger::sharpness_experiment(2, eps, 1.0, 0.3, 1024, 2048).unwrap();
        let scaled = rep.e; // (n-1)δ = 1
        all_bounds &= scaled >= 1.0 - eps;
        products.push(scaled);
    }
    let monotone = products.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let final_ok = *products.last().unwrap() <= 1.02;

    // One off-sweep family with a different delta.
    let fam = cheeger::build_family(3, 0.2, 0.6, 2.0 * cheeger::a_eps(0.2).unwrap() / 1.2).unwrap();
    let h = cheeger::h_rad_family(&fam, 2048).unwrap();
    let floor_ok = h.infimum >= 1.2 * (1.0 - 1e-9);

    // Proof chain on radial solves covering at most half the manifold.
    let s2 = sphere();
    let mut worst_chain = 0.0f64;
    for r0 in [0.9, PI / 2.0] {
        let sol = radial::solve_radial_ball(&s2, r0, 512).unwrap();
        let rep = cheeger::cheeger_chain_check(&sol, 2048).unwrap();
        worst_chain = worst_chain.max(rep.product_e_homega2);
    }
    let fam2 = cheeger::build_family(2, 0.1, 1.0, 2.0 * cheeger::a_eps(0.1).unwrap()).unwrap();
    let sol = fam2.solve_domain(fam2.big_r / 2.0, 1024).unwrap();
    let rep = cheeger::cheeger_chain_check(&sol, 2048).unwrap();
    worst_chain = worst_chain.max(rep.product_e_homega2);

    report(
        8,
        all_bounds && monotone && final_ok && floor_ok && worst_chain <= 1.0 + 1e-6,
        Duration::from_secs(120),
        start.elapsed(),
        &format!(
            "sweep products {:?} (each ≥ 1-ε, non-decreasing, final ≤ 1.02), worst E·H_Ω² = {worst_chain:.9}",
            products
        ),
    );
}

#[test]
fn criterion_09_remark_26_competitor() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for big_r in [0.5, 1.0, 1.4] {
        let m = RevolutionManifold::make("remark26_surface", 2, &[big_r], None).unwrap();
        let ball_boundary = m.ball_boundary_area(big_r).unwrap();
        let competitor = 4.0 * big_r;
        let strict = competitor < ball_boundary;
        pass &= strict;
        detail.push_str(&format!(
            "R={big_r}: 4R = {competitor:.4} vs 2π sin R = {ball_boundary:.4}; "
        ));
    }
    report(9, pass, Duration::from_secs(1), start.elapsed(), &detail);
}

#[test]
fn criterion_10_harmonic_domain_detector() {
    let start = Instant::now();
    let e2 = euclid(8.0);
    let s2 = sphere();

    let (ball_field, _) = fem_star(&e2, 1.3, &DomainSpec::Ball { r0: 1.0 }, 512);
    let ball_spread = fem::boundary_gradient_stats(&ball_field).relative_spread;
    let (cap_field, _) = fem_star(&s2, 2.2, &DomainSpec::Ball { r0: PI / 2.0 }, 512);
    let cap_spread = fem::boundary_gradient_stats(&cap_field).relative_spread;
    let (star_field, _) = fem_star(
        &e2,
        1.5,
        &DomainSpec::Star {
            r0: 1.0,
            amplitude: 0.3,
            k: 3,
            phase: 0.0,
        },
        512,
    );
    let star_spread = fem::boundary_gradient_stats(&star_field).relative_spread;

    report(
        10,
        ball_spread <= 0.05 && cap_spread <= 0.05 && star_spread >= 0.20,
        Duration::from_secs(60),
        start.elapsed(),
        &format!(
            "ball spread {ball_spread:.4}, cap spread {cap_spread:.4} (≤ 0.05); star spread {star_spread:.4} (≥ 0.20)"
        ),
    );
}
