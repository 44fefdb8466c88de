//! Built-in parametrized example maps with known ground truth.
//!
//! Every entry records how each truth value is obtained (closed form,
//! conjugation, or a named numerical oracle) so the integration tests can
//! hold the dynamics modules against it.

use num_complex::Complex64;
use thiserror::Error;

use crate::dsl::{parse_map, BinOp, Expr, ExprMap, MapDef, ParseError};
use crate::dynamics::MapType;
use crate::geometry::{DomainModel, DomainPoint};

type C = Complex64;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),
    #[error("unknown parameter `{name}` for entry `{entry}`")]
    UnknownParam { entry: &'static str, name: String },
    #[error("parameter `{name}` = {value} out of range [{min}, {max}]")]
    ParamOutOfRange { name: &'static str, value: f64, min: f64, max: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Declared parameter of a catalog entry.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub doc: &'static str,
}

/// Denjoy-Wolff data in ball-model coordinates.
#[derive(Debug, Clone)]
pub struct DwTruth {
    pub ball_point: Vec<C>,
    pub dilation: f64,
}

/// A boundary repelling fixed point in ball-model coordinates.
#[derive(Debug, Clone)]
pub struct RepellingTruth {
    pub ball_point: Vec<C>,
    pub dilation: f64,
}

/// Known quantities for an entry, each with a note naming its derivation
/// or oracle.
#[derive(Debug, Clone)]
pub struct CatalogTruth {
    pub map_type: MapType,
    /// `lim sigma_m / m` on the stable set (0 unless hyperbolic).
    pub rate: f64,
    pub dw: Option<DwTruth>,
    pub repelling: Option<RepellingTruth>,
    pub fixed_point: Option<Vec<C>>,
    pub stable_set: String,
    /// `(field, how the value is known)`.
    pub notes: Vec<(&'static str, String)>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub map: MapDef,
    pub truth: CatalogTruth,
    /// Resolved parameter values.
    pub params: Vec<(String, f64)>,
    /// A convenient interior base point for orbits and classification.
    pub base_point: DomainPoint,
}

pub const NAMES: &[&str] = &[
    "siegel_shear",
    "halfplane_translation",
    "slitplane_translation",
    "disc_hyperbolic",
    "disc_parabolic",
    "disc_rotation",
    "ball_unitary",
    "polydisc_product",
    "siegel_affine",
];

pub fn param_specs(name: &str) -> Result<&'static [ParamSpec], CatalogError> {
    Ok(match name {
        "siegel_shear" | "halfplane_translation" | "slitplane_translation" | "disc_parabolic"
        | "polydisc_product" => &[],
        "disc_hyperbolic" => &[ParamSpec {
            name: "lambda",
            default: 3.0,
            min: 1.0 + 1e-9,
            max: 1e6,
            doc: "multiplier at the repelling boundary fixed point +1",
        }],
        "disc_rotation" => &[ParamSpec {
            name: "theta",
            default: std::f64::consts::FRAC_PI_2,
            min: -1e6,
            max: 1e6,
            doc: "rotation angle",
        }],
        "ball_unitary" => &[
            ParamSpec {
                name: "theta1",
                default: std::f64::consts::FRAC_PI_2,
                min: -1e6,
                max: 1e6,
                doc: "phase of the first diagonal entry",
            },
            ParamSpec {
                name: "theta2",
                default: std::f64::consts::PI,
                min: -1e6,
                max: 1e6,
                doc: "phase of the second diagonal entry",
            },
        ],
        "siegel_affine" => &[
            ParamSpec { name: "mu", default: 2.0, min: 1.0, max: 1e6, doc: "dilation factor" },
            ParamSpec {
                name: "theta",
                default: 0.0,
                min: -1e6,
                max: 1e6,
                doc: "phase of the unitary entry",
            },
            ParamSpec {
                name: "a",
                default: 0.0,
                min: -1e6,
                max: 1e6,
                doc: "real horizontal translation",
            },
            ParamSpec { name: "b_re", default: 0.0, min: -1e6, max: 1e6, doc: "Re of the Heisenberg translation" },
            ParamSpec { name: "b_im", default: 0.0, min: -1e6, max: 1e6, doc: "Im of the Heisenberg translation" },
        ],
        other => return Err(CatalogError::UnknownName(other.to_string())),
    })
}

fn resolve_params(
    entry: &'static str,
    specs: &[ParamSpec],
    given: &[(String, f64)],
) -> Result<Vec<(String, f64)>, CatalogError> {
    for (name, _) in given {
        if !specs.iter().any(|s| s.name == name) {
            return Err(CatalogError::UnknownParam { entry, name: name.clone() });
        }
    }
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let value = given
            .iter()
            .find(|(n, _)| n == spec.name)
            .map(|&(_, v)| v)
            .unwrap_or(spec.default);
        if !(value >= spec.min && value <= spec.max) {
            return Err(CatalogError::ParamOutOfRange {
                name: spec.name,
                value,
                min: spec.min,
                max: spec.max,
            });
        }
        out.push((spec.name.to_string(), value));
    }
    Ok(out)
}

fn get_param(params: &[(String, f64)], name: &str) -> f64 {
    params.iter().find(|(n, _)| n == name).map(|&(_, v)| v).unwrap()
}

// expression builders for the parametrized entries
fn cst(c: C) -> Expr {
    Expr::Const(c)
}
fn re(x: f64) -> Expr {
    Expr::Const(C::new(x, 0.0))
}
fn var(k: usize) -> Expr {
    Expr::Var(k)
}
fn add(a: Expr, b: Expr) -> Expr {
    Expr::Bin(BinOp::Add, Box::new(a), Box::new(b))
}
fn sub(a: Expr, b: Expr) -> Expr {
    Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b))
}
fn mul(a: Expr, b: Expr) -> Expr {
    Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b))
}
fn div(a: Expr, b: Expr) -> Expr {
    Expr::Bin(BinOp::Div, Box::new(a), Box::new(b))
}

/// Disc automorphism `(z - c)/(1 - c z)` (real `c`), inverse with `-c`.
fn disc_moebius(c_val: f64) -> MapDef {
    let fwd = ExprMap::new(1, vec![div(sub(var(1), re(c_val)), sub(re(1.0), mul(re(c_val), var(1))))]).unwrap();
    let inv = ExprMap::new(1, vec![div(add(var(1), re(c_val)), add(re(1.0), mul(re(c_val), var(1))))]).unwrap();
    MapDef::new(DomainModel::disc(), fwd, Some(inv))
}

fn rotation_component(theta: f64, k: usize) -> (Expr, Expr) {
    let u = C::from_polar(1.0, theta);
    (mul(cst(u), var(k)), mul(cst(u.conj()), var(k)))
}

pub fn get(name: &str, given: &[(String, f64)]) -> Result<CatalogEntry, CatalogError> {
    let static_name = NAMES
        .iter()
        .find(|n| **n == name)
        .copied()
        .ok_or_else(|| CatalogError::UnknownName(name.to_string()))?;
    let specs = param_specs(static_name)?;
    let params = resolve_params(static_name, specs, given)?;

    let entry = match static_name {
        "siegel_shear" => {
            let map =
                parse_map("siegel 2 : (2*z1 + i*z2^2, z2) inverse ((z1 - i*z2^2)/2, z2)")?
                    .with_name("siegel_shear");
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type: MapType::Hyperbolic,
                    rate: 2.0f64.ln(),
                    dw: Some(DwTruth {
                        ball_point: vec![C::new(1.0, 0.0), C::new(0.0, 0.0)],
                        dilation: 0.5,
                    }),
                    repelling: Some(RepellingTruth {
                        ball_point: vec![C::new(-1.0, 0.0), C::new(0.0, 0.0)],
                        dilation: 2.0,
                    }),
                    fixed_point: None,
                    stable_set: "{Re w = 0}; leaves {w = i r} through (i r^2, i r)".into(),
                    notes: vec![
                        ("rate", "backward step is the constant log 2 on every leaf: the inverse halves Im z1 and the leaf is dilation-invariant".into()),
                        ("repelling dilation", "radial quotient oracle at the Cayley image of the origin".into()),
                        ("stable_set", "n-fold composition keeps w and multiplies the slack by 2^-n; membership in the limit forces w purely imaginary".into()),
                    ],
                },
                params,
                base_point: DomainPoint::new(vec![C::new(0.0, 1.0), C::new(0.0, 0.0)]),
            }
        }
        "halfplane_translation" => {
            let map = parse_map("siegel 1 : (z1 + 1) inverse (z1 - 1)")?
                .with_name("halfplane_translation");
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type: MapType::Parabolic,
                    rate: 0.0,
                    dw: Some(DwTruth { ball_point: vec![C::new(1.0, 0.0)], dilation: 1.0 }),
                    repelling: None,
                    fixed_point: None,
                    stable_set: "the whole half-plane (one leaf)".into(),
                    notes: vec![(
                        "type",
                        "sigma_m = k(i, m + i) grows like 2 log m: unbounded with vanishing rate".into(),
                    )],
                },
                params,
                base_point: DomainPoint::scalar(C::new(0.0, 1.0)),
            }
        }
        "slitplane_translation" => {
            let map = parse_map("slitplane 1 : (z1 + 1) inverse (z1 - 1)")?
                .with_name("slitplane_translation");
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type: MapType::Parabolic,
                    rate: 0.0,
                    dw: Some(DwTruth { ball_point: vec![C::new(1.0, 0.0)], dilation: 1.0 }),
                    repelling: None,
                    fixed_point: None,
                    stable_set: "two leaves at one Denjoy-Wolff point: the upper and lower half-planes".into(),
                    notes: vec![(
                        "stable_set",
                        "backward translates of +-i stay in opposite half-planes; their distance in the shifted slit plane grows, checked against the sqrt -> half-plane -> disc chart oracle".into(),
                    )],
                },
                params,
                base_point: DomainPoint::scalar(C::new(0.0, 1.0)),
            }
        }
        "disc_hyperbolic" => {
            let lambda = get_param(&params, "lambda");
            let c_val = (lambda - 1.0) / (lambda + 1.0);
            let map = disc_moebius(c_val)
                .with_name("disc_hyperbolic")
                .with_params(params.clone());
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type: MapType::Hyperbolic,
                    rate: lambda.ln(),
                    dw: Some(DwTruth { ball_point: vec![C::new(-1.0, 0.0)], dilation: 1.0 / lambda }),
                    repelling: Some(RepellingTruth {
                        ball_point: vec![C::new(1.0, 0.0)],
                        dilation: lambda,
                    }),
                    fixed_point: None,
                    stable_set: "the whole disc (an automorphism)".into(),
                    notes: vec![
                        ("rate", "conjugate to w -> w/lambda on the half-plane; sigma_m = m log lambda on the axis".into()),
                        ("repelling dilation", "boundary derivative (1 + c)/(1 - c) = lambda at +1".into()),
                    ],
                },
                params,
                base_point: DomainPoint::scalar(C::new(0.0, 0.0)),
            }
        }
        "disc_parabolic" => {
            let map = parse_map(
                "disc 1 : ((1 + (2*i - 1)*z1)/(1 + 2*i - z1)) inverse (((1 + 2*i)*z1 - 1)/(z1 - 1 + 2*i))",
            )?
            .with_name("disc_parabolic");
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type: MapType::Parabolic,
                    rate: 0.0,
                    dw: Some(DwTruth { ball_point: vec![C::new(1.0, 0.0)], dilation: 1.0 }),
                    repelling: None,
                    fixed_point: None,
                    stable_set: "the whole disc (an automorphism)".into(),
                    notes: vec![(
                        "type",
                        "conjugate of w -> w + 1 on the upper half-plane through the Cayley chart fixing +1".into(),
                    )],
                },
                params,
                base_point: DomainPoint::scalar(C::new(0.0, 0.0)),
            }
        }
        "disc_rotation" => {
            let theta = get_param(&params, "theta");
            let (f, i) = rotation_component(theta, 1);
            let map = MapDef::new(
                DomainModel::disc(),
                ExprMap::new(1, vec![f]).unwrap(),
                Some(ExprMap::new(1, vec![i]).unwrap()),
            )
            .with_name("disc_rotation")
            .with_params(params.clone());
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type: MapType::Elliptic,
                    rate: 0.0,
                    dw: None,
                    repelling: None,
                    fixed_point: Some(vec![C::new(0.0, 0.0)]),
                    stable_set: "the whole disc (a rotation)".into(),
                    notes: vec![("type", "orbits lie on circles around the fixed origin".into())],
                },
                params,
                base_point: DomainPoint::scalar(C::new(0.5, 0.0)),
            }
        }
        "ball_unitary" => {
            let t1 = get_param(&params, "theta1");
            let t2 = get_param(&params, "theta2");
            let (f1, i1) = rotation_component(t1, 1);
            let (f2, i2) = rotation_component(t2, 2);
            let map = MapDef::new(
                DomainModel::ball(2).unwrap(),
                ExprMap::new(2, vec![f1, f2]).unwrap(),
                Some(ExprMap::new(2, vec![i1, i2]).unwrap()),
            )
            .with_name("ball_unitary")
            .with_params(params.clone());
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type: MapType::Elliptic,
                    rate: 0.0,
                    dw: None,
                    repelling: None,
                    fixed_point: Some(vec![C::new(0.0, 0.0), C::new(0.0, 0.0)]),
                    stable_set: "the whole ball (a unitary)".into(),
                    notes: vec![("type", "orbits lie on a compact torus; sigma_m is bounded by 2 k(0, x)".into())],
                },
                params,
                base_point: DomainPoint::new(vec![C::new(0.3, 0.0), C::new(0.2, 0.0)]),
            }
        }
        "polydisc_product" => {
            // hyperbolic automorphism (lambda = 2) in the first coordinate,
            // quarter rotation in the second
            let c_val = 1.0 / 3.0;
            let f1 = div(sub(var(1), re(c_val)), sub(re(1.0), mul(re(c_val), var(1))));
            let i1 = div(add(var(1), re(c_val)), add(re(1.0), mul(re(c_val), var(1))));
            let (f2, i2) = rotation_component(std::f64::consts::FRAC_PI_2, 2);
            let map = MapDef::new(
                DomainModel::polydisc(2).unwrap(),
                ExprMap::new(2, vec![f1, f2]).unwrap(),
                Some(ExprMap::new(2, vec![i1, i2]).unwrap()),
            )
            .with_name("polydisc_product");
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type: MapType::Hyperbolic,
                    rate: 2.0f64.ln(),
                    dw: None,
                    repelling: None,
                    fixed_point: None,
                    stable_set: "the whole polydisc (a product of automorphisms)".into(),
                    notes: vec![(
                        "rate",
                        "polydisc distance is the max over coordinates, so the rate is the max of the coordinate rates: max(log 2, 0)".into(),
                    )],
                },
                params,
                base_point: DomainPoint::new(vec![C::new(0.0, 0.0), C::new(0.3, 0.0)]),
            }
        }
        "siegel_affine" => {
            let mu = get_param(&params, "mu");
            let theta = get_param(&params, "theta");
            let a = get_param(&params, "a");
            let beta = C::new(get_param(&params, "b_re"), get_param(&params, "b_im"));
            let u = C::from_polar(1.0, theta);
            let root = mu.sqrt();

            // f = (Heisenberg translation by (a, beta)) o (dilation by mu, u)
            let c0 = C::new(a, beta.norm_sqr());
            let c1 = C::new(0.0, 2.0) * u * beta.conj() / root;
            let fwd = ExprMap::new(
                2,
                vec![
                    add(add(div(var(1), re(mu)), mul(cst(c1), var(2))), cst(c0)),
                    add(mul(cst(u / root), var(2)), cst(beta)),
                ],
            )
            .unwrap();
            // f^{-1} = dilation^{-1} o translation^{-1}
            let d0 = C::new(mu, 0.0) * (C::new(-a, beta.norm_sqr()));
            let d1 = C::new(0.0, -2.0) * C::new(mu, 0.0) * beta.conj();
            let inv = ExprMap::new(
                2,
                vec![
                    add(add(mul(re(mu), var(1)), mul(cst(d1), var(2))), cst(d0)),
                    sub(mul(cst(root * u.conj()), var(2)), cst(root * u.conj() * beta)),
                ],
            )
            .unwrap();
            let map = MapDef::new(DomainModel::siegel(2).unwrap(), fwd, Some(inv))
                .with_name("siegel_affine")
                .with_params(params.clone());

            let translation = a != 0.0 || beta != C::new(0.0, 0.0);
            let (map_type, rate) = if mu > 1.0 {
                (MapType::Hyperbolic, mu.ln())
            } else if translation {
                (MapType::Parabolic, 0.0)
            } else {
                (MapType::Elliptic, 0.0)
            };
            // forward orbits of the pure dilation sink to the origin of the
            // boundary (ball point (-1, 0)); pure translations escape to
            // infinity (ball point (1, 0)); the mixed case has a finite
            // off-axis Denjoy-Wolff point that is not recorded here
            let dw = if mu > 1.0 && !translation {
                Some(DwTruth {
                    ball_point: vec![C::new(-1.0, 0.0), C::new(0.0, 0.0)],
                    dilation: 1.0 / mu,
                })
            } else if mu == 1.0 && translation {
                Some(DwTruth {
                    ball_point: vec![C::new(1.0, 0.0), C::new(0.0, 0.0)],
                    dilation: 1.0,
                })
            } else {
                None
            };
            CatalogEntry {
                name: static_name,
                map,
                truth: CatalogTruth {
                    map_type,
                    rate,
                    dw,
                    repelling: if mu > 1.0 && !translation {
                        Some(RepellingTruth {
                            ball_point: vec![C::new(1.0, 0.0), C::new(0.0, 0.0)],
                            dilation: mu,
                        })
                    } else {
                        None
                    },
                    fixed_point: if mu > 1.0 || translation { None } else { Some(vec![C::new(0.0, 1.0), C::new(0.0, 0.0)]) },
                    stable_set: "the whole half-space (an automorphism)".into(),
                    notes: vec![(
                        "rate",
                        "normal-form dilation: sigma_m = m log mu on the vertical axis".into(),
                    )],
                },
                params,
                base_point: DomainPoint::new(vec![C::new(0.0, 1.0), C::new(0.0, 0.0)]),
            }
        }
        _ => unreachable!(),
    };
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holomap::inverse_round_trip;
    use approx::assert_relative_eq;

    #[test]
    fn every_entry_instantiates_and_round_trips() {
        for name in NAMES {
            let entry = get(name, &[]).unwrap();
            assert!(entry.map.domain.contains(&entry.base_point, 0.0).unwrap(), "{name}");
            let rt = inverse_round_trip(&entry.map).unwrap();
            assert!(rt < 1e-12, "{name}: round trip {rt}");
        }
    }

    #[test]
    fn unknown_names_and_params_error() {
        assert!(matches!(get("nope", &[]), Err(CatalogError::UnknownName(_))));
        assert!(matches!(
            get("disc_hyperbolic", &[("mu".into(), 2.0)]),
            Err(CatalogError::UnknownParam { .. })
        ));
        assert!(matches!(
            get("disc_hyperbolic", &[("lambda".into(), 0.5)]),
            Err(CatalogError::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn disc_hyperbolic_multiplier() {
        // f'(1) = lambda at the repelling point
        let entry = get("disc_hyperbolic", &[("lambda".into(), 3.0)]).unwrap();
        let h = 1e-7;
        let p = DomainPoint::scalar(C::new(1.0 - h, 0.0));
        let fp = entry.map.eval_value(&p).unwrap();
        let deriv = (1.0 - fp[0].re) / h;
        assert_relative_eq!(deriv, 3.0, epsilon = 1e-5);
    }

    #[test]
    fn siegel_affine_defaults_to_the_normal_form() {
        let entry = get("siegel_affine", &[("mu".into(), 4.0)]).unwrap();
        let out = entry
            .map
            .eval_value(&DomainPoint::new(vec![C::new(0.0, 2.0), C::new(0.5, 0.0)]))
            .unwrap();
        assert!((out[0] - C::new(0.0, 0.5)).norm() < 1e-15);
        assert!((out[1] - C::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn siegel_affine_with_translation_stays_inside() {
        let entry = get(
            "siegel_affine",
            &[("mu".into(), 1.0), ("a".into(), 1.0), ("b_re".into(), 0.3), ("b_im".into(), 0.1)],
        )
        .unwrap();
        assert_eq!(entry.truth.map_type, MapType::Parabolic);
        // Heisenberg translations preserve the boundary slack exactly
        let p = DomainPoint::new(vec![C::new(0.2, 0.5), C::new(0.1, -0.2)]);
        let slack0 = entry.map.domain.boundary_slack(&p).unwrap();
        let fp = entry.map.eval_value(&p).unwrap();
        let slack1 = entry.map.domain.boundary_slack(&fp).unwrap();
        assert_relative_eq!(slack0, slack1, epsilon = 1e-12);
    }
}
