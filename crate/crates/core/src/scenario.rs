//! Scenario files and the serialized model.
//!
//! A scenario is the user-facing JSON description of one construction. The
//! model file records everything the build resolved (the chosen `b`, the `G`
//! ramp, the support box and the certificates) and is identified by a
//! SHA-256 hash over that resolved content only, so a scenario asking for
//! `"b": "auto"` and one fixing the same `b` hash identically.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    check_parameters, BChoice, GRamp, GridOptions, HamiltonianModel, SupportBounds,
};
use crate::ode::IntegratorConfig;
use crate::quadratic::BCertificate;
use crate::torus::{InvariantSetKind, InvariantSetSpec, TorusVectorField};
use crate::trig::TrigPoly;

/// `"auto"` or a positive number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BSpec {
    #[default]
    Auto,
    Value(f64),
}

impl From<BSpec> for BChoice {
    fn from(b: BSpec) -> Self {
        match b {
            BSpec::Auto => BChoice::Auto,
            BSpec::Value(v) => BChoice::Fixed(v),
        }
    }
}

impl Serialize for BSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BSpec::Auto => s.serialize_str("auto"),
            BSpec::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for BSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = BSpec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str(r#""auto" or a number"#)
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<BSpec, E> {
                if s == "auto" {
                    Ok(BSpec::Auto)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(s), &self))
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<BSpec, E> {
                Ok(BSpec::Value(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BSpec, E> {
                Ok(BSpec::Value(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BSpec, E> {
                Ok(BSpec::Value(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub nu: Vec<TrigPoly>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda: f64,
    #[serde(default)]
    pub b: BSpec,
    #[serde(rename = "V")]
    pub v: FieldSpec,
    pub invariant_set: InvariantSetKind,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grids: GridOptions,
}

impl ScenarioConfig {
    /// `n = 2`, `ν = (1, √2)`, full torus, `C = 0.7`, `λ = 1.5`, `b = 4`.
    pub fn default_scenario() -> Self {
        Self {
            n: 2,
            c: 0.7,
            lambda: 1.5,
            b: BSpec::Value(4.0),
            v: FieldSpec {
                nu: vec![
                    TrigPoly::constant(2, 1.0),
                    TrigPoly::constant(2, 2f64.sqrt()),
                ],
            },
            invariant_set: InvariantSetKind::FullTorus,
            integrator: IntegratorConfig::default(),
            seed: 0,
            grids: GridOptions::default(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Shape and constraint checks that do not need a build.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ConstraintViolation("n must be at least 1".into()));
        }
        if self.v.nu.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: self.v.nu.len(),
            });
        }
        if let Some(d) = self
            .v
            .nu
            .iter()
            .filter_map(|p| p.dim())
            .find(|&d| d != self.n)
        {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: d,
            });
        }
        check_parameters(self.c, self.lambda)?;
        if let BSpec::Value(b) = self.b {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::ConstraintViolation(format!(
                    "b must be a positive number or \"auto\" (got {b})"
                )));
            }
        }
        if self.grids.per_axis < 2 || self.grids.r_grid < 2 {
            return Err(Error::ConstraintViolation(
                "grid resolutions must be at least 2".into(),
            ));
        }
        self.integrator.validate()
    }

    pub fn field(&self) -> Result<TorusVectorField> {
        TorusVectorField::new(self.v.nu.clone())
    }

    pub fn invariant_set(&self) -> Result<InvariantSetSpec> {
        InvariantSetSpec::new(self.n, self.invariant_set.clone())
    }

    pub fn build(&self) -> Result<HamiltonianModel> {
        self.validate()?;
        HamiltonianModel::build(
            &self.field()?,
            self.invariant_set()?,
            self.c,
            self.lambda,
            self.b.into(),
            self.grids,
        )
    }

    /// SHA-256 of the canonical scenario JSON.
    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("scenario serializes"))
    }
}

/// Resolved content of a build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedModel {
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda: f64,
    pub b: f64,
    pub nu: Vec<TrigPoly>,
    pub invariant_set: InvariantSetKind,
    pub mu: TrigPoly,
    pub g_ramp: GRamp,
    pub support: SupportBounds,
    pub grids: GridOptions,
    pub certificate: BCertificate,
}

/// The model file written by `build`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub model_hash: String,
    pub b_source: BSpec,
    pub certified: bool,
    pub model: ResolvedModel,
}

impl ModelFile {
    pub fn new(cfg: &ScenarioConfig, m: &HamiltonianModel) -> Self {
        let model = ResolvedModel {
            n: m.n(),
            c: m.c(),
            lambda: m.lambda(),
            b: m.b(),
            nu: m.field().field().nu.clone(),
            invariant_set: m.invariant_set().kind().clone(),
            mu: m.invariant_set().mu().clone(),
            g_ramp: m.g().ramp(),
            support: m.support_bounds(),
            grids: m.grids(),
            certificate: m.certificate().clone(),
        };
        let model_hash = sha256_hex(&serde_json::to_vec(&model).expect("model serializes"));
        Self {
            model_hash,
            b_source: cfg.b,
            certified: m.certificate().passes(),
            model,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULT_JSON: &str = r#"{
        "n": 2, "C": 0.7, "lambda": 1.5, "b": "auto",
        "V": {"nu": [[{"m": [0, 0], "a": 1.0}], [{"m": [0, 0], "a": 1.4142135623730951}]]},
        "invariant_set": {"kind": "FullTorus"}
    }"#;

    #[test]
    fn parses_auto_and_numbers() {
        let cfg = ScenarioConfig::from_json(DEFAULT_JSON).unwrap();
        assert_eq!(cfg.b, BSpec::Auto);
        assert_eq!(cfg.seed, 0);
        let with_b = DEFAULT_JSON.replace(r#""auto""#, "4");
        assert_eq!(
            ScenarioConfig::from_json(&with_b).unwrap().b,
            BSpec::Value(4.0)
        );
        let bad = DEFAULT_JSON.replace(r#""auto""#, r#""big""#);
        assert!(matches!(
            ScenarioConfig::from_json(&bad),
            Err(Error::Json(_))
        ));
    }

    #[test]
    fn roundtrip() {
        let cfg = ScenarioConfig::default_scenario();
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ScenarioConfig::from_json(&s).unwrap(), cfg);
    }

    #[test]
    fn constraint_failures() {
        let mut cfg = ScenarioConfig::default_scenario();
        cfg.c = 0.8;
        assert!(matches!(cfg.validate(), Err(Error::ConstraintViolation(_))));
        let mut cfg = ScenarioConfig::default_scenario();
        cfg.lambda = 2.5;
        assert!(matches!(cfg.validate(), Err(Error::ConstraintViolation(_))));
        let mut cfg = ScenarioConfig::default_scenario();
        cfg.v.nu.pop();
        assert!(matches!(
            cfg.validate(),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn auto_and_explicit_b_hash_equal() {
        let explicit = ScenarioConfig::default_scenario();
        let mut auto = explicit.clone();
        auto.b = BSpec::Auto;
        let a = ModelFile::new(&auto, &auto.build().unwrap());
        let e = ModelFile::new(&explicit, &explicit.build().unwrap());
        assert_eq!(a.model.b, 4.0);
        assert_eq!(a.model_hash, e.model_hash);
        assert!((a.model.support.z_max - 1.596_872_0).abs() < 1e-7);
        assert!(a.certified);
    }
}
