//! Config files: TOML keyed like the flags, with an optional `[premodel]`
//! table. A file that is not valid TOML is taken as a bare map-grammar
//! string.

use anyhow::{anyhow, bail, Context, Result};
use orbitlab_core::dsl::{parse_expr_tuple, ExprMap, MapDef};
use orbitlab_core::geometry::{DomainKind, DomainModel};
use orbitlab_core::premodel::PreModel;

#[derive(Debug, Default)]
pub struct FileConfig {
    pub map: Option<String>,
    pub catalog: Option<String>,
    pub params: Option<String>,
    pub point: Option<String>,
    pub starts: Vec<String>,
    pub dir: Option<String>,
    pub zeta: Option<String>,
    pub samples: Option<String>,
    pub n_max: Option<usize>,
    pub m_max: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub theta: Option<f64>,
    pub lambda: Option<f64>,
    pub format: Option<String>,
    pub convention: Option<String>,
    pub strict: Option<bool>,
    pub premodel: Option<PreModelConfig>,
}

#[derive(Debug)]
pub struct PreModelConfig {
    pub domain: String,
    pub g: Vec<String>,
    pub tau: String,
    pub tau_inverse: Option<String>,
}

fn get_str(table: &toml::Table, key: &str) -> Result<Option<String>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => bail!("config key `{key}` must be a string, got {other}"),
    }
}

fn get_usize(table: &toml::Table, key: &str) -> Result<Option<usize>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
        Some(other) => bail!("config key `{key}` must be a nonnegative integer, got {other}"),
    }
}

fn get_f64(table: &toml::Table, key: &str) -> Result<Option<f64>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Float(x)) => Ok(Some(*x)),
        Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(other) => bail!("config key `{key}` must be a number, got {other}"),
    }
}

pub fn load(text: &str) -> Result<FileConfig> {
    let table: toml::Table = match text.parse() {
        Ok(t) => t,
        // not TOML: accept the whole file as a map-grammar string
        Err(_) => {
            return Ok(FileConfig { map: Some(text.trim().to_string()), ..Default::default() })
        }
    };
    let mut cfg = FileConfig {
        map: get_str(&table, "map")?,
        catalog: get_str(&table, "catalog")?,
        params: get_str(&table, "params")?,
        point: get_str(&table, "point")?,
        dir: get_str(&table, "dir")?,
        zeta: get_str(&table, "zeta")?,
        samples: get_str(&table, "samples")?,
        n_max: get_usize(&table, "n-max")?,
        m_max: get_usize(&table, "m-max")?,
        n: get_usize(&table, "n")?,
        m: get_usize(&table, "m")?,
        theta: get_f64(&table, "theta")?,
        lambda: get_f64(&table, "lambda")?,
        format: get_str(&table, "format")?,
        convention: get_str(&table, "convention")?,
        strict: match table.get("strict") {
            None => None,
            Some(toml::Value::Boolean(b)) => Some(*b),
            Some(other) => bail!("config key `strict` must be a boolean, got {other}"),
        },
        ..Default::default()
    };
    match table.get("start") {
        None => {}
        Some(toml::Value::String(s)) => cfg.starts.push(s.clone()),
        Some(toml::Value::Array(items)) => {
            for item in items {
                match item {
                    toml::Value::String(s) => cfg.starts.push(s.clone()),
                    other => bail!("config key `start` must hold strings, got {other}"),
                }
            }
        }
        Some(other) => bail!("config key `start` must be a string or array, got {other}"),
    }
    if let Some(toml::Value::Table(pm)) = table.get("premodel") {
        let g = match pm.get("g") {
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    toml::Value::String(s) => Ok(s.clone()),
                    other => Err(anyhow!("premodel.g entries must be strings, got {other}")),
                })
                .collect::<Result<Vec<_>>>()?,
            Some(toml::Value::String(s)) => vec![s.clone()],
            _ => bail!("premodel.g must be an array of component expressions"),
        };
        cfg.premodel = Some(PreModelConfig {
            domain: get_str(pm, "domain")?.context("premodel.domain is required")?,
            g,
            tau: get_str(pm, "tau")?.context("premodel.tau is required")?,
            tau_inverse: get_str(pm, "tau-inverse")?,
        });
    } else if table.get("premodel").is_some() {
        bail!("config key `premodel` must be a table");
    }
    Ok(cfg)
}

/// Domain spec like `siegel 1` or `ball 2`.
pub fn parse_domain(text: &str) -> Result<DomainModel> {
    let mut parts = text.split_whitespace();
    let kind = match parts.next() {
        Some("disc") => DomainKind::Disc,
        Some("ball") => DomainKind::Ball,
        Some("polydisc") => DomainKind::Polydisc,
        Some("siegel") => DomainKind::Siegel,
        Some("slitplane") => DomainKind::SlitPlane,
        other => bail!("unknown domain kind {other:?}"),
    };
    let q: usize = parts
        .next()
        .context("domain spec needs a dimension, e.g. `siegel 1`")?
        .parse()
        .context("domain dimension must be a positive integer")?;
    if parts.next().is_some() {
        bail!("trailing input in domain spec `{text}`");
    }
    DomainModel::new(kind, q).map_err(|e| anyhow!("{e}"))
}

/// Build a pre-model from its config table, checked against the ambient map.
pub fn build_premodel(pm: &PreModelConfig, ambient: &MapDef) -> Result<PreModel> {
    let z_domain = parse_domain(&pm.domain)?;
    let k = z_domain.dimension();
    let ambient_q = ambient.domain.dimension();

    let mut g_components = Vec::new();
    for text in &pm.g {
        let mut parts = parse_expr_tuple(text, k)
            .map_err(|e| anyhow!("premodel.g `{text}`: {}", e.describe()))?;
        g_components.append(&mut parts);
    }
    if g_components.len() != ambient_q {
        bail!(
            "premodel.g has {} components, the ambient domain needs {ambient_q}",
            g_components.len()
        );
    }
    let g = ExprMap::new(k, g_components).map_err(|e| anyhow!("premodel.g: {}", e.describe()))?;

    let tau_parts = parse_expr_tuple(&pm.tau, k)
        .map_err(|e| anyhow!("premodel.tau `{}`: {}", pm.tau, e.describe()))?;
    if tau_parts.len() != k {
        bail!("premodel.tau has {} components, the domain needs {k}", tau_parts.len());
    }
    let tau_fwd = ExprMap::new(k, tau_parts).map_err(|e| anyhow!("premodel.tau: {}", e.describe()))?;
    let tau_inv = match &pm.tau_inverse {
        None => None,
        Some(text) => {
            let parts = parse_expr_tuple(text, k)
                .map_err(|e| anyhow!("premodel.tau-inverse `{text}`: {}", e.describe()))?;
            if parts.len() != k {
                bail!("premodel.tau-inverse has {} components, the domain needs {k}", parts.len());
            }
            Some(ExprMap::new(k, parts).map_err(|e| anyhow!("{}", e.describe()))?)
        }
    };
    let tau = MapDef::new(z_domain, tau_fwd, tau_inv).with_name("config pre-model automorphism");
    Ok(PreModel { z_domain, g, tau, name: "config pre-model".into() })
}
