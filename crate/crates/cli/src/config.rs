//! TOML run configuration. Every section is optional; rationals are strings
//! such as `"3/4"`, so no floating-point value is ever read.

use std::sync::Arc;

use dualpair::lattice::ApartmentPoint;
use dualpair::numeric::parse_rational;
use dualpair::{
    make_field, witt_basis, DivisionKind, EpsHermSpace, Fe, Field, Involution, LieType, Mat,
    Rational, Sign, TildeModel, Twist,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("key `{key}`: {message}")]
    Key { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn key_err(key: &str, message: impl ToString) -> ConfigError {
    ConfigError::Key {
        key: key.to_string(),
        message: message.to_string(),
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub field: Option<FieldConfig>,
    pub jumps: Option<JumpsConfig>,
    pub classify: Option<ClassifyConfig>,
    pub instance: Option<InstanceConfig>,
    pub selftest: Option<SelftestConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: u32,
    #[serde(default = "one")]
    pub k: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    #[serde(default = "split")]
    pub kind: String,
    pub eps: i64,
    #[serde(default)]
    pub plus: Vec<String>,
    #[serde(default)]
    pub aniso: Vec<String>,
    #[serde(default)]
    pub aniso_units: Vec<i64>,
}

fn split() -> String {
    "split".into()
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct JumpsConfig {
    pub point: PointConfig,
    pub partner: Option<PointConfig>,
    pub m: Option<u32>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub max_rank: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    /// `formed`, `gl` or `ramified-unitary`.
    pub model: String,
    pub first: Option<String>,
    pub second: Option<String>,
    pub m: Option<u32>,
    #[serde(default)]
    pub point: Vec<String>,
    #[serde(default)]
    pub aniso: Vec<String>,
    #[serde(default)]
    pub point_p: Vec<String>,
    #[serde(default)]
    pub aniso_p: Vec<String>,
    pub twist: Option<String>,
    pub twist_p: Option<String>,
    #[serde(default)]
    pub weights: Vec<i64>,
    #[serde(default)]
    pub weights_p: Vec<i64>,
    /// Rank of the ramified unitary pair.
    pub n: Option<usize>,
    pub count: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SelftestConfig {
    pub samples: Option<u64>,
    /// `star-sign` flips the sign of the adjoint used by the moment checks.
    pub inject: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Eager checks so that bad inputs fail before any computation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(f) = &self.field {
            self.field_with(f)?;
        }
        if let Some(j) = &self.jumps {
            point(&j.point, "jumps.point")?;
            if let Some(p) = &j.partner {
                point(p, "jumps.partner")?;
            }
            if j.m == Some(0) {
                return Err(key_err("jumps.m", "must be positive"));
            }
        }
        if let Some(c) = &self.classify {
            if c.max_rank.is_some_and(|r| !(1..=3).contains(&r)) {
                return Err(key_err("classify.max_rank", "must be 1, 2 or 3"));
            }
        }
        if let Some(i) = &self.instance {
            for (key, list) in [
                ("instance.point", &i.point),
                ("instance.aniso", &i.aniso),
                ("instance.point_p", &i.point_p),
                ("instance.aniso_p", &i.aniso_p),
            ] {
                rationals(list, key)?;
            }
        }
        if let Some(s) = &self.selftest {
            if let Some(inj) = &s.inject {
                if inj != "none" && inj != "star-sign" {
                    return Err(key_err("selftest.inject", "expected `none` or `star-sign`"));
                }
            }
        }
        Ok(())
    }

    fn field_with(&self, f: &FieldConfig) -> Result<Arc<Field>, ConfigError> {
        make_field(f.p, f.k, Involution::Identity).map_err(|e| key_err("field", e))
    }

    /// The configured field, or `F_p` with `p = default_p`.
    pub fn field_or(&self, default_p: u32) -> Result<Arc<Field>, ConfigError> {
        match &self.field {
            Some(f) => self.field_with(f),
            None => make_field(default_p, 1, Involution::Identity).map_err(|e| key_err("field", e)),
        }
    }

    pub fn inject_star_sign(&self) -> bool {
        self.selftest
            .as_ref()
            .and_then(|s| s.inject.as_deref())
            .is_some_and(|s| s == "star-sign")
    }
}

pub fn rationals(list: &[String], key: &str) -> Result<Vec<Rational>, ConfigError> {
    list.iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|e| key_err(&format!("{key}[{i}]"), e)))
        .collect()
}

fn kind(s: &str, key: &str) -> Result<DivisionKind, ConfigError> {
    match s {
        "split" => Ok(DivisionKind::Split),
        "unramified" => Ok(DivisionKind::Unramified),
        "ramified" => Ok(DivisionKind::Ramified),
        _ => Err(key_err(key, "expected split, unramified or ramified")),
    }
}

fn sign(e: i64, key: &str) -> Result<Sign, ConfigError> {
    Sign::from_i64(e).ok_or_else(|| key_err(key, "expected 1 or -1"))
}

pub fn point(p: &PointConfig, key: &str) -> Result<ApartmentPoint, ConfigError> {
    let units = if p.aniso_units.is_empty() {
        vec![1; p.aniso.len()]
    } else {
        p.aniso_units.clone()
    };
    ApartmentPoint::new(
        kind(&p.kind, &format!("{key}.kind"))?,
        sign(p.eps, &format!("{key}.eps"))?,
        rationals(&p.plus, &format!("{key}.plus"))?,
        rationals(&p.aniso, &format!("{key}.aniso"))?,
        units,
    )
    .map_err(|e| key_err(key, e))
}

/// Parses `Sp4`, `O5`, `GL2`.
pub fn lie_type(s: &str, key: &str) -> Result<LieType, ConfigError> {
    let bad = || key_err(key, format!("expected GLn, Spn or On, got `{s}`"));
    let (head, n) = s
        .find(|c: char| c.is_ascii_digit())
        .map(|i| s.split_at(i))
        .ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    match head {
        "GL" | "Gl" | "gl" => Ok(LieType::Gl(n)),
        "Sp" | "sp" if n % 2 == 0 => Ok(LieType::Sp(n)),
        "O" | "o" => Ok(LieType::O(n)),
        _ => Err(bad()),
    }
}

/// The split formed space of the given type, anisotropic part `⟨1⟩` in odd
/// orthogonal dimension.
pub fn split_space(field: &Arc<Field>, t: LieType, key: &str) -> Result<EpsHermSpace, ConfigError> {
    let (dim, eps) = match t {
        LieType::Sp(n) => (n, Sign::Minus),
        LieType::O(n) => (n, Sign::Plus),
        _ => return Err(key_err(key, "formed models need Sp or O")),
    };
    let aniso = vec![Fe::ONE; dim % 2];
    witt_basis(field, DivisionKind::Split, dim, eps, dim / 2, &aniso).map_err(|e| key_err(key, e))
}

fn twist(name: Option<&str>, field: &Field, dim: usize, key: &str) -> Result<Twist, ConfigError> {
    match name.unwrap_or("identity") {
        "identity" => Ok(Twist::Identity),
        // Exchanges the two isotropic lines of a hyperbolic plane.
        "swap" if dim == 2 => Ok(Twist::Inner(Mat::from_ints(field, 2, 2, &[0, 1, 1, 0]))),
        "swap" => Err(key_err(key, "swap needs a two-dimensional space")),
        other => Err(key_err(key, format!("unknown twist `{other}`"))),
    }
}

/// The model described by an `[instance]` section.
pub fn build_model(inst: &InstanceConfig, field: &Arc<Field>) -> Result<TildeModel, ConfigError> {
    let m = inst.m.unwrap_or(2);
    match inst.model.as_str() {
        "formed" => {
            let first = lie_type(inst.first.as_deref().unwrap_or(""), "instance.first")?;
            let second = lie_type(inst.second.as_deref().unwrap_or(""), "instance.second")?;
            let v = split_space(field, first, "instance.first")?;
            let vp = split_space(field, second, "instance.second")?;
            let mk = |v: &EpsHermSpace, plus: &[String], aniso: &[String], key: &str| {
                let plus = rationals(plus, key)?;
                let aniso = rationals(aniso, &format!("{key}_aniso"))?;
                let n = aniso.len();
                ApartmentPoint::new(DivisionKind::Split, v.eps(), plus, aniso, vec![1; n])
                    .map_err(|e| key_err(key, e))
            };
            let pt = mk(&v, &inst.point, &inst.aniso, "instance.point")?;
            let ptp = mk(&vp, &inst.point_p, &inst.aniso_p, "instance.point_p")?;
            if pt.dim() != v.dim() {
                return Err(key_err(
                    "instance.point",
                    "coordinate count does not match first",
                ));
            }
            if ptp.dim() != vp.dim() {
                return Err(key_err(
                    "instance.point_p",
                    "coordinate count does not match second",
                ));
            }
            let t = twist(inst.twist.as_deref(), field, v.dim(), "instance.twist")?;
            let tp = twist(inst.twist_p.as_deref(), field, vp.dim(), "instance.twist_p")?;
            TildeModel::from_points(v, vp, &pt, &ptp, m, t, tp).map_err(|e| key_err("instance", e))
        }
        "gl" => TildeModel::gl_inner(field, m, &inst.weights, &inst.weights_p)
            .map_err(|e| key_err("instance", e)),
        "ramified-unitary" => {
            let n = inst.n.unwrap_or(1);
            TildeModel::ramified_unitary(field, Mat::identity(n), Mat::identity(n))
                .map_err(|e| key_err("instance", e))
        }
        other => Err(key_err(
            "instance.model",
            format!("expected formed, gl or ramified-unitary, got `{other}`"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_valid() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn zero_denominator_names_the_key() {
        let text = "[jumps]\npoint = { eps = -1, plus = [\"1/0\"] }\n";
        let err = RunConfig::parse(text).unwrap_err().to_string();
        assert!(err.contains("jumps.point.plus[0]"), "{err}");
    }

    #[test]
    fn unknown_keys_report_position() {
        let err = RunConfig::parse("seed = 1\nbogus = 2\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus") && err.contains("line 2"), "{err}");
    }

    #[test]
    fn lie_type_names() {
        assert_eq!(lie_type("Sp4", "k").unwrap(), LieType::Sp(4));
        assert_eq!(lie_type("O3", "k").unwrap(), LieType::O(3));
        assert_eq!(lie_type("GL2", "k").unwrap(), LieType::Gl(2));
        assert!(lie_type("Sp3", "k").is_err());
    }
}
