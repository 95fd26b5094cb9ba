//! On-disk description of a ring: a small versioned JSON document from
//! which presentations are built.
//!
//! The format supports the three families directly:
//!
//! ```json
//! { "spec_version": 1, "family": "skew",
//!   "generators": ["x1", "x2"], "m": 2,
//!   "params": [ { "i": 1, "j": 2, "torsion": 1 } ] }
//! ```
//!
//! ```json
//! { "spec_version": 1, "family": "weyl", "m": 4, "q": 1,
//!   "weyl_orientation": "xy-qyx-1" }
//! ```
//!
//! ```json
//! { "spec_version": 1, "family": "tensor", "factors": [ ... ] }
//! ```
//!
//! Parameter indices `i < j` are 1-based in the file (matching the usual
//! generator numbering `x1..xn`); omitted parameters default to `1`, i.e.
//! the corresponding generators commute. A skew parameter is
//! `zeta_m^torsion * q_1^free[0] * ... * q_r^free[r-1]` where `r` is
//! `free_params`; the Weyl parameter `q = zeta_m^q` must be a nontrivial
//! root of unity. Unknown fields are rejected so that typos fail loudly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{
    ParamExponent, Ring, SkewPresentation, WeylOrientation, WeylPresentation,
};

/// The format version this build reads and writes.
pub const SPEC_VERSION: u32 = 1;

/// One commutation parameter `p_ij`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamEntry {
    /// 1-based row index, `i < j`.
    pub i: usize,
    /// 1-based column index.
    pub j: usize,
    /// Exponent of `zeta_m`.
    #[serde(default)]
    pub torsion: i64,
    /// Exponents of the free parameters `q_1..q_r`; empty means none.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub free: Vec<i64>,
}

/// One tensor factor: a skew or Weyl presentation.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    /// Torsion order: parameters live in the cyclotomic field `Q(zeta_m)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    /// Number of free (generic) parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_params: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<ParamEntry>>,
    /// Weyl parameter, as the exponent of `zeta_m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weyl_orientation: Option<String>,
}

/// The top-level document.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub spec_version: u32,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_params: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<ParamEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weyl_orientation: Option<String>,
    /// Tensor factors, present exactly when `family` is `"tensor"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorSpec>>,
}

impl RingSpec {
    pub fn from_json(text: &str) -> Result<RingSpec> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("invalid ring spec: {e}")))
    }

    /// Build the ring the document describes.
    pub fn to_ring(&self) -> Result<Ring> {
        if self.spec_version != SPEC_VERSION {
            return Err(Error::Input(format!(
                "unsupported spec_version {}; this build reads version {SPEC_VERSION}",
                self.spec_version
            )));
        }
        match self.family.as_str() {
            "tensor" => {
                for (name, set) in [
                    ("generators", self.generators.is_some()),
                    ("m", self.m.is_some()),
                    ("free_params", self.free_params.is_some()),
                    ("params", self.params.is_some()),
                    ("q", self.q.is_some()),
                    ("weyl_orientation", self.weyl_orientation.is_some()),
                ] {
                    if set {
                        return Err(Error::Input(format!(
                            "field {name:?} belongs inside \"factors\" entries, not on a \
                             tensor document"
                        )));
                    }
                }
                let factors = self.factors.as_ref().ok_or_else(|| {
                    Error::Input("a tensor document needs a \"factors\" array".into())
                })?;
                if factors.is_empty() {
                    return Err(Error::Input("\"factors\" must not be empty".into()));
                }
                let rings = factors
                    .iter()
                    .map(|f| f.to_ring())
                    .collect::<Result<Vec<_>>>()?;
                Ring::tensor(rings)
            }
            "skew" | "weyl" => {
                if self.factors.is_some() {
                    return Err(Error::Input(
                        "\"factors\" is only valid with family \"tensor\"".into(),
                    ));
                }
                FactorSpec {
                    family: self.family.clone(),
                    generators: self.generators.clone(),
                    m: self.m,
                    free_params: self.free_params,
                    params: self.params.clone(),
                    q: self.q,
                    weyl_orientation: self.weyl_orientation.clone(),
                }
                .to_ring()
            }
            other => Err(Error::Input(format!(
                "unknown family {other:?}; expected \"skew\", \"weyl\", or \"tensor\""
            ))),
        }
    }
}

impl FactorSpec {
    pub fn to_ring(&self) -> Result<Ring> {
        match self.family.as_str() {
            "skew" => self.to_skew(),
            "weyl" => self.to_weyl(),
            other => Err(Error::Input(format!(
                "unknown factor family {other:?}; expected \"skew\" or \"weyl\""
            ))),
        }
    }

    fn order(&self) -> Result<u64> {
        let m = self.m.unwrap_or(1);
        if m == 0 {
            return Err(Error::Input("\"m\" must be at least 1".into()));
        }
        Ok(m)
    }

    fn to_skew(&self) -> Result<Ring> {
        for (name, set) in [
            ("q", self.q.is_some()),
            ("weyl_orientation", self.weyl_orientation.is_some()),
        ] {
            if set {
                return Err(Error::Input(format!(
                    "field {name:?} is only valid with family \"weyl\""
                )));
            }
        }
        let generators = self
            .generators
            .clone()
            .ok_or_else(|| Error::Input("a skew factor needs \"generators\"".into()))?;
        let n = generators.len();
        let m = self.order()?;
        let free_rank = self.free_params.unwrap_or(0);
        let mut params = Vec::new();
        for entry in self.params.as_deref().unwrap_or(&[]) {
            if entry.i < 1 || entry.j <= entry.i || entry.j > n {
                return Err(Error::Input(format!(
                    "parameter indices ({}, {}) must satisfy 1 <= i < j <= {n} \
                     (1-based, upper triangle only)",
                    entry.i, entry.j
                )));
            }
            if entry.free.len() > free_rank {
                return Err(Error::Input(format!(
                    "parameter ({}, {}) uses {} free exponents but \"free_params\" is {}",
                    entry.i,
                    entry.j,
                    entry.free.len(),
                    free_rank
                )));
            }
            let mut free = entry.free.clone();
            free.resize(free_rank, 0);
            params.push((
                entry.i - 1,
                entry.j - 1,
                ParamExponent::new(m, free, entry.torsion),
            ));
        }
        let p = SkewPresentation::new(generators, m, free_rank, params)?;
        Ok(Ring::skew(p))
    }

    fn to_weyl(&self) -> Result<Ring> {
        for (name, set) in [
            ("free_params", self.free_params.is_some()),
            ("params", self.params.is_some()),
        ] {
            if set {
                return Err(Error::Input(format!(
                    "field {name:?} is only valid with family \"skew\""
                )));
            }
        }
        let m = self.order()?;
        let q = self
            .q
            .ok_or_else(|| Error::Input("a Weyl factor needs \"q\"".into()))?;
        let orientation = match &self.weyl_orientation {
            Some(s) => WeylOrientation::parse(s)?,
            None => WeylOrientation::XyQyx,
        };
        let (x_name, y_name) = match &self.generators {
            None => ("x".to_string(), "y".to_string()),
            Some(names) => {
                if names.len() != 2 {
                    return Err(Error::Input(format!(
                        "a Weyl factor has exactly 2 generators, got {}",
                        names.len()
                    )));
                }
                (names[0].clone(), names[1].clone())
            }
        };
        let p = WeylPresentation::new(
            x_name,
            y_name,
            ParamExponent::new(m, vec![], q),
            orientation,
        )?;
        Ok(Ring::weyl(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_round_trip() {
        let text = r#"{
            "spec_version": 1,
            "family": "skew",
            "generators": ["x1", "x2"],
            "m": 2,
            "params": [ { "i": 1, "j": 2, "torsion": 1 } ]
        }"#;
        let spec = RingSpec::from_json(text).unwrap();
        let ring = spec.to_ring().unwrap();
        assert_eq!(ring.generator_names(), &["x1", "x2"]);
        assert_eq!(ring.order(), 2);
        assert!(ring.is_torsion());
        // x2 x1 = -x1 x2.
        let p = ring.pair_param(0, 1).unwrap();
        assert_eq!(p.torsion(), 1);
    }

    #[test]
    fn weyl_defaults() {
        let text = r#"{ "spec_version": 1, "family": "weyl", "m": 4, "q": 1 }"#;
        let ring = RingSpec::from_json(text).unwrap().to_ring().unwrap();
        assert_eq!(ring.generator_names(), &["x", "y"]);
        assert!(ring.has_weyl_factor());
        assert_eq!(ring.weyl_partner(0), Some(1));
    }

    #[test]
    fn tensor_of_two_planes() {
        let text = r#"{
            "spec_version": 1,
            "family": "tensor",
            "factors": [
                { "family": "skew", "generators": ["x1", "x2"], "m": 2,
                  "params": [ { "i": 1, "j": 2, "torsion": 1 } ] },
                { "family": "skew", "generators": ["y1", "y2"], "m": 2,
                  "params": [ { "i": 1, "j": 2, "torsion": 1 } ] }
            ]
        }"#;
        let ring = RingSpec::from_json(text).unwrap().to_ring().unwrap();
        assert_eq!(ring.gen_count(), 4);
        assert!(ring.is_pure_skew());
    }

    #[test]
    fn generic_parameters_via_free_exponents() {
        let text = r#"{
            "spec_version": 1,
            "family": "skew",
            "generators": ["x1", "x2", "x3"],
            "free_params": 1,
            "params": [
                { "i": 1, "j": 2, "free": [1] },
                { "i": 1, "j": 3, "free": [-1] },
                { "i": 2, "j": 3, "free": [1] }
            ]
        }"#;
        let ring = RingSpec::from_json(text).unwrap().to_ring().unwrap();
        assert!(!ring.is_torsion());
        assert_eq!(ring.free_rank(), 1);
    }

    #[test]
    fn version_and_field_validation() {
        let wrong_version = r#"{ "spec_version": 2, "family": "weyl", "m": 2, "q": 1 }"#;
        let spec = RingSpec::from_json(wrong_version).unwrap();
        assert!(matches!(spec.to_ring(), Err(Error::Input(_))));

        let typo = r#"{ "spec_version": 1, "family": "weyl", "m": 2, "qq": 1 }"#;
        assert!(matches!(RingSpec::from_json(typo), Err(Error::Input(_))));

        let lower_triangle = r#"{
            "spec_version": 1, "family": "skew", "generators": ["a", "b"],
            "m": 2, "params": [ { "i": 2, "j": 1, "torsion": 1 } ]
        }"#;
        let spec = RingSpec::from_json(lower_triangle).unwrap();
        assert!(matches!(spec.to_ring(), Err(Error::Input(_))));

        let weyl_q_one = r#"{ "spec_version": 1, "family": "weyl", "m": 3, "q": 0 }"#;
        let spec = RingSpec::from_json(weyl_q_one).unwrap();
        assert!(matches!(spec.to_ring(), Err(Error::Presentation(_))));

        let stray = r#"{ "spec_version": 1, "family": "skew",
                         "generators": ["a", "b"], "q": 1 }"#;
        let spec = RingSpec::from_json(stray).unwrap();
        assert!(matches!(spec.to_ring(), Err(Error::Input(_))));
    }

    #[test]
    fn tensor_rejects_inline_factor_fields() {
        let text = r#"{
            "spec_version": 1, "family": "tensor", "m": 2,
            "factors": [ { "family": "weyl", "m": 2, "q": 1 } ]
        }"#;
        let spec = RingSpec::from_json(text).unwrap();
        assert!(matches!(spec.to_ring(), Err(Error::Input(_))));
    }
}
