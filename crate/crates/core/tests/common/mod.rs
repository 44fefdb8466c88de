//! Shared generators for the integration suites.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use orbitlab_core::geometry::{DomainKind, DomainModel, DomainPoint};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The domains exercised by the geometry property suite.
pub fn test_domains() -> Vec<DomainModel> {
    vec![
        DomainModel::disc(),
        DomainModel::ball(2).unwrap(),
        DomainModel::ball(3).unwrap(),
        DomainModel::polydisc(2).unwrap(),
        DomainModel::siegel(1).unwrap(),
        DomainModel::siegel(2).unwrap(),
        DomainModel::slit_plane(),
    ]
}

fn random_unit(rng: &mut ChaCha8Rng, q: usize) -> Vec<C> {
    loop {
        let v: Vec<C> = (0..q)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.iter().map(|z| z / n).collect();
        }
    }
}

/// Random interior point; `deep` mixes in near-boundary samples.
pub fn random_point(rng: &mut ChaCha8Rng, domain: &DomainModel, deep: bool) -> DomainPoint {
    let q = domain.dimension();
    match domain.kind() {
        DomainKind::Disc | DomainKind::Ball => {
            let dir = random_unit(rng, q);
            let r = if deep && rng.gen_bool(0.3) {
                1.0 - 10f64.powf(rng.gen_range(-6.0..-1.0))
            } else {
                rng.gen_range(0.0..0.9)
            };
            DomainPoint::new(dir.iter().map(|z| z * r).collect())
        }
        DomainKind::Polydisc => {
            let coords: Vec<C> = (0..q)
                .map(|_| {
                    let r = if deep && rng.gen_bool(0.3) {
                        1.0 - 10f64.powf(rng.gen_range(-6.0..-1.0))
                    } else {
                        rng.gen_range(0.0..0.9)
                    };
                    C::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            DomainPoint::new(coords)
        }
        DomainKind::Siegel => {
            let w: Vec<C> = (1..q)
                .map(|_| c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)))
                .collect();
            let wnorm: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            let slack = if deep && rng.gen_bool(0.3) {
                10f64.powf(rng.gen_range(-6.0..0.0))
            } else {
                rng.gen_range(0.05..3.0)
            };
            let mut coords = vec![c(rng.gen_range(-2.0..2.0), wnorm + slack)];
            coords.extend(w);
            DomainPoint::new(coords)
        }
        DomainKind::SlitPlane => {
            let r = 10f64.powf(rng.gen_range(-1.5..1.0));
            let theta = rng.gen_range(-0.97..0.97) * std::f64::consts::PI;
            DomainPoint::scalar(C::from_polar(r, theta))
        }
    }
}

/// Random tangent direction with coordinates of order one.
pub fn random_dir(rng: &mut ChaCha8Rng, q: usize) -> Vec<C> {
    (0..q)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// All catalog entries at their default parameters.
pub fn default_entries() -> Vec<orbitlab_core::catalog::CatalogEntry> {
    orbitlab_core::catalog::NAMES
        .iter()
        .map(|n| orbitlab_core::catalog::get(n, &[]).unwrap())
        .collect()
}

/// Canonical form of a partition for comparison up to class relabeling:
/// classes as sorted member lists, sorted by first member.
pub fn partition_shape(p: &orbitlab_core::stable_set::Partition) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = p
        .classes
        .iter()
        .map(|cl| {
            let mut m = cl.members.clone();
            m.sort_unstable();
            m
        })
        .collect();
    classes.sort();
    classes
}
