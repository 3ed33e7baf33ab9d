use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rolling_twistor::cartan::quartic_at;
use rolling_twistor::distribution::{derived_frame, numeric_rank, Vec5};
use rolling_twistor::oracle::{
    cartan_from_weyl, compare_projective, curvature, dual_frame, metric_components, null_defect, oracle_residual, signature,
    theta_coframe, DEFAULT_STEP,
};
use rolling_twistor::surfaces::{Epsilon, SurfaceFamily};
use rolling_twistor::{CartanQuartic, RollingPair};

fn points(pair: &RollingPair, n: usize, seed: u64) -> Vec<Vec5> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = pair.s1.default_range();
    let (c, d) = pair.s2.default_range();
    (0..n)
        .map(|_| [rng.gen_range(a..b), rng.gen_range(0.0..6.28), rng.gen_range(c..d), rng.gen_range(0.0..6.28), rng.gen_range(0.0..6.28)])
        .collect()
}

#[test]
fn oracle_is_proportional_to_the_closed_form() {
    let pairs = [
        RollingPair::new(SurfaceFamily::Sphere { radius: 1.0 }, SurfaceFamily::Plane),
        RollingPair::new(SurfaceFamily::Sphere { radius: 1.0 }, SurfaceFamily::Sphere { radius: 2.0 }),
        RollingPair::new(SurfaceFamily::Hyperbolic { radius: 1.0 }, SurfaceFamily::Plane),
        RollingPair::new(SurfaceFamily::profile(0.5, 2.0, 0.0).unwrap(), SurfaceFamily::Hyperbolic { radius: 1.5 }),
    ];
    for pair in pairs {
        for p in points(&pair, 3, 21) {
            let o = cartan_from_weyl(&pair, &p, DEFAULT_STEP).unwrap();
            let c = quartic_at(&pair, &p).unwrap();
            let r = oracle_residual(&o, &c);
            println!("{} / {}: residual {r:.3e} weyl {:.3e} noise {:.3e}", pair.s1, pair.s2, o.weyl_norm, o.weyl_noise);
            assert!(r < 1e-3, "{pair:?} at {p:?}: {r}");
            assert!(compare_projective(&o.quartic, &CartanQuartic::new(c.coeffs).with_tolerance(0.0), 1e-3));
        }
    }
}

#[test]
fn g2_pairs_are_conformally_flat() {
    let pairs = [
        RollingPair::new(SurfaceFamily::Sphere { radius: 1.0 }, SurfaceFamily::Sphere { radius: 3.0 }),
        RollingPair::new(SurfaceFamily::g2(Epsilon::Plus), SurfaceFamily::Plane),
        RollingPair::new(SurfaceFamily::g2(Epsilon::Zero), SurfaceFamily::Plane),
        // every non-flat profile rolling on a plane is a G2 pair
        RollingPair::new(SurfaceFamily::profile(0.3, 1.0, 0.0).unwrap(), SurfaceFamily::Plane),
    ];
    for pair in pairs {
        for p in points(&pair, 3, 22) {
            let o = cartan_from_weyl(&pair, &p, DEFAULT_STEP).unwrap();
            println!("{} / {}: weyl {:.3e} noise {:.3e} coeffs {:?}", pair.s1, pair.s2, o.weyl_norm, o.weyl_noise, o.quartic.coeffs);
            assert!(o.conformally_flat(), "{pair:?} at {p:?}");
            assert!(o.coefficients_vanish());
        }
    }
}

#[test]
fn curvature_symmetries_and_traces() {
    let pair = RollingPair::new(SurfaceFamily::Sphere { radius: 1.0 }, SurfaceFamily::Plane);
    for p in points(&pair, 3, 23) {
        let metric = |q: &Vec5| metric_components(&pair, q);
        let est = curvature(&metric, &p, DEFAULT_STEP).unwrap();
        let b = &est.bundle;
        let scale = b.riemann_norm();
        println!("sym {:.3e} trace {:.3e} scale {scale:.3e}", b.riemann_symmetry_defect(), b.weyl_trace_defect());
        assert!(b.riemann_symmetry_defect() < 1e-4 * scale);
        assert!(b.weyl_trace_defect() < 1e-4 * scale);
        assert!(b.weyl_norm() > 100.0 * est.weyl_noise);
    }
}

#[test]
fn coframe_identities() {
    let pair = RollingPair::new(SurfaceFamily::g2(Epsilon::Minus), SurfaceFamily::Sphere { radius: 2.0 });
    for p in points(&pair, 10, 24) {
        let t = theta_coframe(&pair, &p).unwrap();
        let y = dual_frame(&t).unwrap();
        assert!((t * y - nalgebra::Matrix5::identity()).abs().max() < 1e-12 * t.abs().max() * y.abs().max());
        assert_eq!(signature(&metric_components(&pair, &p).unwrap()), (3, 2));
        assert!(null_defect(&pair, &p).unwrap() < 1e-9);
        // Span(Y₄, Y₅) is the rolling distribution
        let f = derived_frame(&pair, &p).unwrap();
        let col = |i: usize| -> Vec5 { std::array::from_fn(|r| y[(r, i)]) };
        assert_eq!(numeric_rank(&[f.fields[0], f.fields[1], col(3), col(4)]).unwrap(), 2);
    }
}
