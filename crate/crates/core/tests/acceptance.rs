//! End-to-end acceptance run: one PASS/FAIL line per criterion, with the
//! elapsed time checked against its budget. Exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rolling_twistor::cartan::{g2_check, quartic_at, quartic_killing_case, root_type, G2Report, CONSTANT_PATTERN, ZERO_TOL};
use rolling_twistor::distribution::{default_bracket_step, derived_frame, growth_vector, lie_bracket, Vec5};
use rolling_twistor::embedding::{algebraic_residual, default_range, embed_point, induced_metric_residual, MeshFamily, RevolutionMesh};
use rolling_twistor::oracle::{cartan_from_weyl, compare_projective, oracle_residual, DEFAULT_STEP};
use rolling_twistor::rolling::{contact_arclengths, integrate, no_slip_residual, no_twist_residual, ControlCurve};
use rolling_twistor::surfaces::{
    profile_conformal_derivatives, profile_ode_residual, profile_ode_scale, scale_chart_point, scale_surface,
};
use rolling_twistor::{CartanQuartic, Epsilon, Error, RollingPair, RootTag, SurfaceFamily, SurfaceJet};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sphere(r: f64) -> SurfaceFamily {
    SurfaceFamily::Sphere { radius: r }
}

fn hyperbolic(r: f64) -> SurfaceFamily {
    SurfaceFamily::Hyperbolic { radius: r }
}

fn grid(a: f64, b: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n).map(|i| [a + (b - a) * i as f64 / (n - 1) as f64, 0.0]).collect()
}

fn default_grid(s: &SurfaceFamily, n: usize) -> Vec<[f64; 2]> {
    let (a, b) = s.default_range();
    grid(a, b, n)
}

fn random_point(rng: &mut ChaCha8Rng, pair: &RollingPair) -> Vec5 {
    let (a, b) = pair.s1.default_range();
    let (c, d) = pair.s2.default_range();
    [rng.gen_range(a..b), rng.gen_range(0.0..6.28), rng.gen_range(c..d), rng.gen_range(0.0..6.28), rng.gen_range(0.0..6.28)]
}

fn g2(s: &SurfaceFamily, lambda: f64, grid: &[[f64; 2]]) -> Result<G2Report, String> {
    g2_check(s, lambda, grid, ZERO_TOL).map_err(|e| format!("{s} vs λ={lambda}: {e}"))
}

fn constant_factorization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let (k, l) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let q = quartic_killing_case(&SurfaceJet::constant(rng.gen_range(-2.0..2.0), k), l).map_err(|e| e.to_string())?;
        let leading = (k - l).powi(4) * (k - 9.0 * l) * (9.0 * k - l);
        let want: Vec<f64> = CONSTANT_PATTERN.iter().map(|c| c * leading).collect();
        let norm = want.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
        let rel = q.coeffs.iter().zip(&want).map(|(a, w)| (a - w).abs()).fold(0.0, f64::max) / norm;
        worst = worst.max(rel);
        check(rel <= 1e-12, || format!("κ={k} λ={l}: relative error {rel:.3e}"))?;
        check(root_type(&q).tag == RootTag::TwoDouble, || format!("κ={k} λ={l}: tag {}", root_type(&q).tag))?;
    }
    Ok(format!("50 pairs, worst relative error {worst:.2e}"))
}

fn nine_to_one() -> Outcome {
    let cases = [(sphere(1.0), 1.0 / 9.0), (hyperbolic(1.0), -1.0 / 9.0), (sphere(3.0), 1.0)];
    let mut worst = 0.0_f64;
    for (s, l) in cases {
        let grid = default_grid(&s, 50);
        let r = g2(&s, l, &grid)?;
        worst = worst.max(r.max_scaled);
        check(r.is_g2() && r.max_scaled < 1e-10, || format!("{s} vs λ={l}: {:.3e}", r.max_scaled))?;
        for f in [1.01, 0.99] {
            let p = g2(&s, l * f, &grid)?;
            check(!p.is_g2(), || format!("{s} vs λ={}: still G2", l * f))?;
        }
    }
    Ok(format!("κ=9λ and λ=9κ G2 (worst {worst:.2e}), 1% perturbations not G2"))
}

fn three_g2_surfaces() -> Outcome {
    let mut worst = 0.0_f64;
    let mut cases: Vec<(SurfaceFamily, Vec<[f64; 2]>)> =
        Epsilon::ALL.iter().map(|&e| SurfaceFamily::g2(e)).map(|s| (s, default_grid(&s, 100))).collect();
    cases.push((SurfaceFamily::profile(1.0, -5.0, 0.0).map_err(|e| e.to_string())?, grid(0.5, 1.9, 100)));
    for (s, grid) in cases {
        let r = g2(&s, 0.0, &grid)?;
        worst = worst.max(r.max_scaled);
        check(r.is_g2(), || format!("{s}: {:.3e}", r.max_scaled))?;
    }
    Ok(format!("ε ∈ {{0,+1,−1}} and alpha=1,beta=−5 on 100-point grids, worst {worst:.2e}"))
}

fn ode_sufficiency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut worst_ode, mut worst_q) = (0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let alpha = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let beta = rng.gen_range(-3.0..3.0);
        let gamma = rng.gen_range(-2.0..2.0);
        let s = SurfaceFamily::profile(alpha, beta, gamma).map_err(|e| e.to_string())?;
        let grid = default_grid(&s, 15);
        for p in &grid {
            let [r, d1, d2, d3] = profile_conformal_derivatives(alpha, beta, p[0]).map_err(|e| e.to_string())?;
            let res = profile_ode_residual(r, d1, d2, d3).abs() / profile_ode_scale(r, d1, d2, d3);
            worst_ode = worst_ode.max(res);
            check(res < 1e-10, || format!("{s} at ρ={}: ODE residual {res:.3e}", p[0]))?;
        }
        let rep = g2(&s, 0.0, &grid)?;
        worst_q = worst_q.max(rep.max_scaled);
        check(rep.is_g2(), || format!("{s}: {:.3e}", rep.max_scaled))?;
    }
    check(matches!(SurfaceFamily::profile(0.0, 1.0, 0.0), Err(Error::FlatProfile(_))), || "α=0 accepted".into())?;
    Ok(format!("20 profiles, ODE {worst_ode:.2e}, quartic {worst_q:.2e}, α=0 rejected"))
}

fn brackets_and_growth() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let pair = RollingPair::new(sphere(1.0), SurfaceFamily::Plane);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let p = random_point(&mut rng, &pair);
        let f = derived_frame(&pair, &p).map_err(|e| e.to_string())?;
        let b = lie_bracket(&pair.x1(), &pair.x2(), &p, default_bracket_step(&p)).map_err(|e| e.to_string())?;
        let scale = f.fields[2].iter().fold(1.0_f64, |m, c| m.max(c.abs()));
        let err = b.iter().zip(&f.fields[2]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(err);
        check(err < 1e-6, || format!("[X1,X2] at {p:?}: {err:.3e}"))?;
        let g = growth_vector(&pair, &p).map_err(|e| e.to_string())?;
        check(g == [2, 3, 5], || format!("sphere/plane at {p:?}: {g:?}"))?;
    }
    let equal = RollingPair::new(sphere(1.0), sphere(1.0));
    for _ in 0..20 {
        let p = random_point(&mut rng, &equal);
        let g = growth_vector(&equal, &p).map_err(|e| e.to_string())?;
        check(g == [2, 2, 2], || format!("equal spheres at {p:?}: {g:?}"))?;
    }
    Ok(format!("bracket error {worst:.2e}, (2,3,5) and (2,2,2) at 20 points each"))
}

fn weyl_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let pair = RollingPair::new(sphere(1.0), SurfaceFamily::Plane);
    let mut worst = 0.0_f64;
    for _ in 0..5 {
        let p = random_point(&mut rng, &pair);
        let o = cartan_from_weyl(&pair, &p, DEFAULT_STEP).map_err(|e| e.to_string())?;
        let c = quartic_at(&pair, &p).map_err(|e| e.to_string())?;
        let r = oracle_residual(&o, &c);
        worst = worst.max(r);
        check(r < 1e-3 && compare_projective(&o.quartic, &CartanQuartic::new(c.coeffs).with_tolerance(0.0), 1e-3), || {
            format!("sphere/plane at {p:?}: residual {r:.3e}")
        })?;
    }
    let mut flat = 0.0_f64;
    for pair in [RollingPair::new(sphere(1.0), sphere(3.0)), RollingPair::new(SurfaceFamily::g2(Epsilon::Plus), SurfaceFamily::Plane)] {
        for _ in 0..5 {
            let p = random_point(&mut rng, &pair);
            let o = cartan_from_weyl(&pair, &p, DEFAULT_STEP).map_err(|e| e.to_string())?;
            flat = flat.max(o.weyl_norm / o.weyl_noise);
            check(o.conformally_flat(), || format!("{} / {} at {p:?}: |C| {:.3e} noise {:.3e}", pair.s1, pair.s2, o.weyl_norm, o.weyl_noise))?;
        }
    }
    Ok(format!("minor residual {worst:.2e}; flat pairs |C|/noise ≤ {flat:.2}"))
}

fn embedding_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = 0.0_f64;
    for eps in [Epsilon::Plus, Epsilon::Minus] {
        let sign = eps.value();
        let lo = if sign > 0.0 { 0.0 } else { 2f64.sqrt() };
        for _ in 0..10_000 {
            let rho = rng.gen_range(lo..lo + 4.0);
            let [x, y, z] = embed_point(eps, rho, rng.gen_range(0.0..6.3)).map_err(|e| e.to_string())?;
            let scale = (rho * rho + 2.0 * sign).powi(3).abs().max(1.0);
            let r = algebraic_residual(eps, x, y, z).map_err(|e| e.to_string())?.abs() / scale;
            worst = worst.max(r);
            check(r < 1e-9, || format!("ε={eps} ρ={rho}: {r:.3e}"))?;
        }
    }
    let mut metric = 0.0_f64;
    for eps in Epsilon::ALL {
        let family = MeshFamily::G2(eps);
        let mesh = RevolutionMesh::build(family, default_range(family), 64, 64).map_err(|e| e.to_string())?;
        let r = induced_metric_residual(&mesh).map_err(|e| e.to_string())?;
        metric = metric.max(r);
        check(r < 1e-5, || format!("ε={eps}: first fundamental form {r:.3e}"))?;
    }
    Ok(format!("algebraic {worst:.2e} on 2×10⁴ points, 64×64 metric {metric:.2e}"))
}

fn rolling_constraints() -> Outcome {
    let pair = RollingPair::new(sphere(1.0), SurfaceFamily::Plane);
    let t_end = 1.5;
    let ctrl = ControlCurve::new(vec![0.0, t_end], vec![[1.0, 0.3], [0.5, 0.8]]).map_err(|e| e.to_string())?;
    let start = [1.0, 0.2, 0.3, -0.1, 0.4];
    let run = |dt: f64| -> Result<(f64, f64, f64), String> {
        let traj = integrate(&pair, start, &ctrl, dt, t_end).map_err(|e| e.to_string())?;
        let slip = no_slip_residual(&traj, &pair).map_err(|e| e.to_string())?;
        let twist = no_twist_residual(&traj, &pair, [1.0, 0.0]).map_err(|e| e.to_string())?;
        let (l1, l2) = contact_arclengths(&traj, &pair).map_err(|e| e.to_string())?;
        Ok((slip, twist, (l1 - l2).abs()))
    };
    let (s1, t1, d1) = run(0.05)?;
    let (s2, t2, d2) = run(0.025)?;
    let (rs, rt) = (s1 / s2, t1 / t2);
    check((rs - 16.0).abs() <= 3.0, || format!("no-slip ratio {rs:.2}"))?;
    check((rt - 16.0).abs() <= 3.0, || format!("no-twist ratio {rt:.2}"))?;
    check(d1 < 1e-6 && d2 < 1e-6, || format!("|L1 − L2| = {d1:.3e}, {d2:.3e}"))?;
    let traj = integrate(&pair, [FRAC_PI_2, 0.0, 0.0, 0.0, 0.0], &ControlCurve::constant(0.0, 1.0), 1e-2, PI).map_err(|e| e.to_string())?;
    let (l1, l2) = contact_arclengths(&traj, &pair).map_err(|e| e.to_string())?;
    check((l1 - PI).abs() < 1e-6 && (l2 - PI).abs() < 1e-6, || format!("great circle L1={l1} L2={l2}"))?;
    Ok(format!("ratios slip {rs:.2} twist {rt:.2}, |L1 − L2| ≤ {:.2e}, great circle π", d1.max(d2)))
}

/// Every verdict case above, with the grid it runs on.
fn verdict_cases() -> Result<Vec<(SurfaceFamily, SurfaceFamily, Vec<[f64; 2]>)>, String> {
    let p = |a, b, c| SurfaceFamily::profile(a, b, c).map_err(|e| e.to_string());
    let mut cases = vec![
        (sphere(1.0), sphere(3.0)),
        (hyperbolic(1.0), hyperbolic(3.0)),
        (sphere(1.0), SurfaceFamily::Plane),
        (sphere(1.0), sphere(2.0)),
        (hyperbolic(1.0), SurfaceFamily::Plane),
        (p(0.5, 2.0, 0.0)?, hyperbolic(1.5)),
        (p(0.3, 1.0, 0.0)?, SurfaceFamily::Plane),
        (SurfaceFamily::g2(Epsilon::Plus), sphere(1.0)),
    ];
    cases.extend(Epsilon::ALL.iter().map(|&e| (SurfaceFamily::g2(e), SurfaceFamily::Plane)));
    let mut out: Vec<_> = cases.into_iter().map(|(a, b)| (a, b, default_grid(&a, 40))).collect();
    out.push((p(1.0, -5.0, 0.0)?, SurfaceFamily::Plane, grid(0.5, 1.9, 40)));
    Ok(out)
}

fn homothety() -> Outcome {
    let mut checked = 0;
    for (s1, s2, grid) in verdict_cases()? {
        let lambda = s2.constant_curvature().ok_or("non-constant second surface")?;
        let base = g2(&s1, lambda, &grid)?;
        for s0 in [0.5, 2.0, 10.0] {
            let t1 = scale_surface(&s1, s0).map_err(|e| e.to_string())?;
            let t2 = scale_surface(&s2, s0).map_err(|e| e.to_string())?;
            let l2 = t2.constant_curvature().ok_or("non-constant second surface")?;
            let moved: Vec<[f64; 2]> = grid.iter().map(|&q| scale_chart_point(&s1, s0, q)).collect();
            let r = g2(&t1, l2, &moved)?;
            check(r.is_g2() == base.is_g2(), || format!("{s1} / {s2} ×{s0}: verdict changed"))?;
            for (a, b) in base.rows.iter().zip(&r.rows) {
                check(a.tag == b.tag, || format!("{s1} / {s2} ×{s0} at {:?}: {} vs {}", a.point, a.tag, b.tag))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} scaled pairs, verdicts and tags unchanged"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("constant-curvature factorization", Duration::from_secs(1), constant_factorization),
        ("9:1 ratio", Duration::from_secs(1), nine_to_one),
        ("three G2 surfaces", Duration::from_secs(5), three_g2_surfaces),
        ("ODE sufficiency", Duration::from_secs(5), ode_sufficiency),
        ("brackets and growth", Duration::from_secs(10), brackets_and_growth),
        ("Weyl oracle concordance", Duration::from_secs(120), weyl_oracle),
        ("embedding identities", Duration::from_secs(10), embedding_identities),
        ("rolling constraints", Duration::from_secs(10), rolling_constraints),
        ("homothety invariance", Duration::from_secs(5), homothety),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = run();
        let dt = t0.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if dt <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; took {dt:.2?}, budget {budget:?}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!("{} criterion {}: {name} ({dt:.2?}): {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
