//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `--nocapture`) and failing the build on regression.

mod common;

use std::time::{Duration, Instant};

use common::{c, partition_shape, random_dir, random_point, rng, test_domains, C};

use orbitlab_core::catalog;
use orbitlab_core::dsl::parse_map;
use orbitlab_core::dynamics::{
    backward_step, classify_type, denjoy_wolff, divergence_rate, MapType,
};
use orbitlab_core::geometry::{
    ball_automorphism, cayley_transform, CayleyDirection, DomainModel, DomainPoint, TangentVector,
};
use orbitlab_core::holomap::backward_orbit;
use orbitlab_core::premodel::{default_probes, siegel_example_premodel, sigma_closed_form, verify_premodel};
use orbitlab_core::seq::ConvergenceVerdict;
use orbitlab_core::stable_set::{class_rate, equivalent, partition, tangent_bounded, Boundedness};

fn report(n: u32, desc: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("[PASS] criterion {n}: {desc}");
    } else {
        println!("[FAIL] criterion {n}: {desc}");
        for f in &failures {
            println!("       - {f}");
        }
        panic!("criterion {n} failed:\n{}", failures.join("\n"));
    }
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        failures.push(msg());
    }
}

fn check_runtime(failures: &mut Vec<String>, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    if elapsed > limit {
        failures.push(format!("runtime {elapsed:?} exceeded the {limit:?} budget"));
    }
}

#[test]
fn criterion_01_siegel_shear_rates() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let entry = catalog::get("siegel_shear", &[]).unwrap();
    let x = DomainPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)]);
    let m = 32;
    let est = backward_step(&entry.map, &x, m, 32).unwrap();
    check(&mut failures, est.verdict == ConvergenceVerdict::Converged, || {
        format!("sigma_{m} did not converge: {:?}", est.verdict)
    });
    let rate = est.limit / m as f64;
    check(&mut failures, (rate - 2.0f64.ln()).abs() < 1e-6, || {
        format!("|sigma_{m}/{m} - log 2| = {:e}", (rate - 2.0f64.ln()).abs())
    });

    let mu = class_rate(&entry.map, &x).unwrap();
    check(&mut failures, (mu - 2.0).abs() <= 1e-3, || format!("class rate mu = {mu}"));

    check_runtime(&mut failures, start, Duration::from_secs(1));
    report(1, "backward steps and class rate of the Siegel shear", failures);
}

#[test]
fn criterion_02_stable_set_dichotomy() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let map = catalog::get("siegel_shear", &[]).unwrap().map;
    let a = 2.0;
    let mut checked = 0usize;
    let mut correct = 0usize;
    for i in 0..15 {
        for j in 0..15 {
            let re_w = (i as f64 - 7.0) * 0.05;
            let im_w = (j as f64 - 7.0) * 0.05;
            let x = DomainPoint::new(vec![c(0.0, a), c(re_w, im_w)]);
            let orbit = backward_orbit(&map, &x, 60).unwrap();
            let survives = orbit.complete();
            let expected = re_w.abs() < 1e-9;
            check(&mut failures, survives == expected, || {
                format!("grid point Re w = {re_w}, Im w = {im_w}: survives = {survives}")
            });
            // classification accuracy outside the ambiguous band
            if !(0.0..1e-6).contains(&re_w.abs()) || re_w == 0.0 {
                checked += 1;
                if survives == expected {
                    correct += 1;
                }
            }
        }
    }
    check(&mut failures, checked == correct, || {
        format!("classifier accuracy {correct}/{checked}")
    });

    check_runtime(&mut failures, start, Duration::from_secs(10));
    report(2, "backward orbits on the 15x15 grid survive iff Re w = 0", failures);
}

#[test]
fn criterion_03_partition_correctness() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let map = catalog::get("siegel_shear", &[]).unwrap().map;
    let leaves = [0.0, 0.3, 0.6];
    let mut samples = Vec::new();
    for &r in &leaves {
        // points of the leaf through (i r^2, i r)
        samples.push(DomainPoint::new(vec![c(0.0, 2.0 + r * r), c(0.0, r)]));
        samples.push(DomainPoint::new(vec![c(0.0, 3.0 + r * r), c(0.0, r)]));
    }
    let p = partition(&map, &samples, 128).unwrap();
    check(&mut failures, p.classes.len() == 3, || format!("{} classes", p.classes.len()));
    check(&mut failures, p.unresolved.is_empty(), || format!("unresolved: {:?}", p.unresolved));
    check(&mut failures, p.non_stable.is_empty(), || format!("non-stable: {:?}", p.non_stable));
    for k in 0..3 {
        check(&mut failures, p.class_of[2 * k] == p.class_of[2 * k + 1], || {
            format!("leaf {k} split across classes")
        });
    }
    // zero cross-class merges
    for &(i, j, v) in &p.verdicts {
        if p.class_of[i] != p.class_of[j] {
            check(&mut failures, v != Boundedness::Bounded, || {
                format!("cross-class bounded verdict between samples {i} and {j}")
            });
        }
    }

    // applying f to every sample leaves the partition unchanged
    let mapped: Vec<DomainPoint> = samples.iter().map(|s| map.eval_value(s).unwrap()).collect();
    let q = partition(&map, &mapped, 128).unwrap();
    check(&mut failures, partition_shape(&p) == partition_shape(&q), || {
        format!("partition changed under f: {:?} vs {:?}", partition_shape(&p), partition_shape(&q))
    });

    check_runtime(&mut failures, start, Duration::from_secs(10));
    report(3, "three leaves, no cross merges, invariant under the map", failures);
}

#[test]
fn criterion_04_premodel_verification() {
    let mut failures = Vec::new();

    let f = catalog::get("siegel_shear", &[]).unwrap().map;
    for r in [0.0, 1.0, -2.0] {
        let pm = siegel_example_premodel(r);
        let probes = default_probes(&pm.z_domain);
        let rep = verify_premodel(&f, &pm, &probes, 20).unwrap();
        check(&mut failures, rep.intertwine_max < 1e-12, || {
            format!("r = {r}: intertwining residual {:e}", rep.intertwine_max)
        });
        check(&mut failures, rep.step_max < 1e-6, || {
            format!("r = {r}: step-identity residual {:e}", rep.step_max)
        });
        check(&mut failures, rep.collisions == 0, || {
            format!("r = {r}: {} collisions", rep.collisions)
        });
    }
    report(4, "example pre-models verify at r in {0, 1, -2}", failures);
}

#[test]
fn criterion_05_rate_identities() {
    let mut failures = Vec::new();

    // normal forms: divergence rate equals log mu to 1e-9
    for mu in [2.0, 3.0, 10.0] {
        let entry = catalog::get("siegel_affine", &[("mu".into(), mu)]).unwrap();
        let r = divergence_rate(&entry.map, &entry.base_point, 50).unwrap();
        check(&mut failures, (r - mu.ln()).abs() < 1e-9, || {
            format!("mu = {mu}: |divergence rate - log mu| = {:e}", (r - mu.ln()).abs())
        });
    }

    // the shear: c(tau) >= c(f) with equality gap below 1e-6
    let shear = catalog::get("siegel_shear", &[]).unwrap();
    let tau = parse_map("siegel 1 : (2*z1) inverse (z1/2)").unwrap();
    let c_tau = divergence_rate(&tau, &DomainPoint::scalar(c(0.0, 1.0)), 50).unwrap();
    let c_f = divergence_rate(&shear.map, &shear.base_point, 50).unwrap();
    check(&mut failures, c_tau >= c_f - 1e-9, || format!("c(tau) = {c_tau} < c(f) = {c_f}"));
    check(&mut failures, (c_tau - c_f).abs() < 1e-6, || {
        format!("equality gap {:e}", (c_tau - c_f).abs())
    });

    // the divergence rate is minus the log of the Denjoy-Wolff dilation
    let entry = catalog::get("disc_hyperbolic", &[("lambda".into(), 3.0)]).unwrap();
    let dw = denjoy_wolff(&entry.map, std::slice::from_ref(&entry.base_point), 512).unwrap();
    let lambda_dw = dw.dilation.expect("dilation at the Denjoy-Wolff point");
    let c_f = divergence_rate(&entry.map, &entry.base_point, 50).unwrap();
    check(&mut failures, (c_f + lambda_dw.ln()).abs() < 1e-3, || {
        format!("|c(f) + log lambda| = {:e}", (c_f + lambda_dw.ln()).abs())
    });

    report(5, "rate identities across normal forms, the shear, and the disc", failures);
}

#[test]
fn criterion_06_closed_formula_oracle() {
    let mut failures = Vec::new();

    // radial backward orbit of disc_hyperbolic(2) against the closed form
    let entry = catalog::get("disc_hyperbolic", &[("lambda".into(), 2.0)]).unwrap();
    for m in 1..=10 {
        let dynamic = backward_step(&entry.map, &entry.base_point, m, 16).unwrap().limit;
        let closed = sigma_closed_form(0.0, 2.0, m);
        check(&mut failures, (dynamic - closed).abs() < 1e-4, || {
            format!("m = {m}: dynamic {dynamic} vs closed form {closed}")
        });
    }

    // rate of the closed form at horizon m = 40
    for lambda in [2.0, 3.0, 10.0] {
        for theta in [0.0f64, 1.0, -1.0] {
            let v = sigma_closed_form(theta, lambda, 40) / 40.0;
            check(&mut failures, (v - lambda.ln()).abs() < 1e-3, || {
                format!(
                    "lambda = {lambda}, theta = {theta}: |sigma_40/40 - log lambda| = {:.4e} \
                     (the formula satisfies sigma_m = m log lambda + log 2 - log(1 + cos 2 theta) \
                     + O(lambda^-m), so the gap at theta = +-1 is (log 2 - log(1 + cos 2))/40 \
                     = 3.08e-2 and cannot meet 1e-3 before m ~ 1232)",
                    (v - lambda.ln()).abs()
                )
            });
        }
    }

    report(6, "closed backward-step formula against dynamics and its rate limit", failures);
}

#[test]
fn criterion_07_type_trichotomy() {
    let mut failures = Vec::new();

    for (name, expected) in [
        ("ball_unitary", MapType::Elliptic),
        ("halfplane_translation", MapType::Parabolic),
        ("siegel_shear", MapType::Hyperbolic),
        ("disc_hyperbolic", MapType::Hyperbolic),
    ] {
        let entry = catalog::get(name, &[]).unwrap();
        let got = classify_type(&entry.map, &entry.base_point).unwrap().map_type;
        check(&mut failures, got == expected, || {
            format!("{name}: classified {got}, expected {expected}")
        });
    }

    report(7, "elliptic / parabolic / hyperbolic trichotomy, 4 of 4", failures);
}

#[test]
fn criterion_08_geometry_property_suite() {
    let mut failures = Vec::new();
    let trials = 1000;

    // Mobius normalizer isometry on ball domains
    let mut r = rng(101);
    for q in [1usize, 2, 3] {
        let ball = DomainModel::ball(q).unwrap();
        for _ in 0..trials {
            let a = random_point(&mut r, &ball, false);
            let x = random_point(&mut r, &ball, true);
            let y = random_point(&mut r, &ball, true);
            let before = ball.distance(&x, &y).unwrap();
            let fx = ball_automorphism(&a, &x).unwrap();
            let fy = ball_automorphism(&a, &y).unwrap();
            let after = ball.distance(&fx, &fy).unwrap();
            if (after - before).abs() >= 1e-9 {
                failures.push(format!("automorphism isometry broke on B^{q}: {before} vs {after}"));
            }
        }
    }

    // Cayley isometry
    let mut r = rng(102);
    for q in [1usize, 2, 3] {
        let ball = DomainModel::ball(q).unwrap();
        let siegel = DomainModel::siegel(q).unwrap();
        for _ in 0..trials {
            let x = random_point(&mut r, &ball, true);
            let y = random_point(&mut r, &ball, true);
            let sx = cayley_transform(CayleyDirection::ToSiegel, &x).unwrap();
            let sy = cayley_transform(CayleyDirection::ToSiegel, &y).unwrap();
            let kb = ball.distance(&x, &y).unwrap();
            let ks = siegel.distance(&sx, &sy).unwrap();
            if (kb - ks).abs() >= 1e-9 {
                failures.push(format!("Cayley isometry broke on H^{q}: {kb} vs {ks}"));
            }
        }
    }

    // symmetry and the triangle inequality on every domain
    let mut r = rng(103);
    for domain in test_domains() {
        for _ in 0..trials {
            let x = random_point(&mut r, &domain, true);
            let y = random_point(&mut r, &domain, true);
            let z = random_point(&mut r, &domain, true);
            let xy = domain.distance(&x, &y).unwrap();
            let yx = domain.distance(&y, &x).unwrap();
            let yz = domain.distance(&y, &z).unwrap();
            let xz = domain.distance(&x, &z).unwrap();
            if (xy - yx).abs() >= 1e-9 {
                failures.push(format!("symmetry broke on {:?}: {xy} vs {yx}", domain.kind()));
            }
            if xz > xy + yz + 1e-9 {
                failures.push(format!(
                    "triangle inequality broke on {:?}: {xz} > {xy} + {yz}",
                    domain.kind()
                ));
            }
        }
    }

    // Schwarz-Pick contraction for the catalog maps
    let mut r = rng(104);
    for entry in common::default_entries() {
        for _ in 0..trials {
            let x = random_point(&mut r, &entry.map.domain, true);
            let y = random_point(&mut r, &entry.map.domain, true);
            let (fx, fy) = match (entry.map.eval_value(&x), entry.map.eval_value(&y)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            if !entry.map.domain.contains(&fx, 0.0).unwrap_or(false)
                || !entry.map.domain.contains(&fy, 0.0).unwrap_or(false)
            {
                continue;
            }
            let before = entry.map.domain.distance(&x, &y).unwrap();
            let after = entry.map.domain.distance(&fx, &fy).unwrap();
            if after > before + 1e-9 {
                failures.push(format!("{}: k(f x, f y) = {after} > {before}", entry.name));
            }
        }
    }

    // metric against Richardson-extrapolated distance quotients
    let mut r = rng(105);
    for domain in test_domains() {
        let mut done = 0;
        while done < trials {
            let x = random_point(&mut r, &domain, false);
            if domain.boundary_slack(&x).unwrap() < 0.1 {
                continue;
            }
            let mut v = random_dir(&mut r, domain.dimension());
            let n = orbitlab_core::geometry::norm_sq(&v).sqrt();
            if n < 1e-3 {
                continue;
            }
            for z in &mut v {
                *z /= n;
            }
            let kappa = domain.metric(&TangentVector::new(x.clone(), v.clone())).unwrap();
            let quot = |t: f64| {
                let shifted: Vec<C> =
                    x.coords().iter().zip(&v).map(|(a, b)| a + b * t).collect();
                domain.distance(&x, &DomainPoint::new(shifted)).unwrap() / t
            };
            let (t1, t2) = (1e-4, 1e-5);
            let richardson = (t1 * quot(t2) - t2 * quot(t1)) / (t1 - t2);
            if (richardson - kappa).abs() >= 1e-5 {
                failures.push(format!(
                    "metric consistency broke on {:?}: kappa {kappa} vs quotient {richardson}",
                    domain.kind()
                ));
            }
            done += 1;
        }
    }

    failures.truncate(10);
    report(8, "isometries, triangle inequality, contraction, metric consistency", failures);
}

#[test]
fn criterion_09_tangent_test() {
    let mut failures = Vec::new();

    let map = catalog::get("siegel_shear", &[]).unwrap().map;
    let base = DomainPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)]);

    let along = tangent_bounded(&map, &TangentVector::new(base.clone(), vec![c(1.0, 0.0), c(0.0, 0.0)]), 64)
        .unwrap();
    check(&mut failures, along.verdict == Boundedness::Bounded, || {
        format!("leaf direction (1,0): {} ({})", along.verdict, along.reason)
    });

    let across = tangent_bounded(&map, &TangentVector::new(base, vec![c(0.0, 0.0), c(1.0, 0.0)]), 64)
        .unwrap();
    check(&mut failures, across.verdict == Boundedness::Unbounded, || {
        format!("transverse direction (0,1): {} ({})", across.verdict, across.reason)
    });
    let crossed = across
        .series
        .iter()
        .any(|&(n, v)| n <= 40 && v > orbitlab_core::tol::DISTANCE_CAP);
    check(&mut failures, crossed, || {
        format!("transverse series never exceeded the cap by n = 40: {:?}", across.series)
    });

    report(9, "tangent directions of the shear leaf at (i, 0)", failures);
}

#[test]
fn criterion_10_two_leaves_at_one_dw_point() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let map = catalog::get("slitplane_translation", &[]).unwrap().map;
    let n_max = 1 << 12;
    let same = equivalent(&map, &DomainPoint::scalar(c(0.0, 1.0)), &DomainPoint::scalar(c(0.0, 2.0)), n_max)
        .unwrap();
    check(&mut failures, same.verdict == Boundedness::Bounded, || {
        format!("i ~ 2i: {} ({})", same.verdict, same.reason)
    });
    let cross = equivalent(&map, &DomainPoint::scalar(c(0.0, 1.0)), &DomainPoint::scalar(c(0.0, -1.0)), n_max)
        .unwrap();
    check(&mut failures, cross.verdict == Boundedness::Unbounded, || {
        format!("i ~ -i: {} ({})", cross.verdict, cross.reason)
    });

    check_runtime(&mut failures, start, Duration::from_secs(5));
    report(10, "upper and lower half-planes separate across the slit", failures);
}
