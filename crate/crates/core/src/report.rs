//! Serializable result documents.
//!
//! Every command-line invocation and every binding call that returns JSON
//! goes through these types. The documents are deterministic: field order
//! is fixed by struct declaration, collections are emitted in a canonical
//! order, and nothing time- or host-dependent is included, so rerunning the
//! same tool version on the same input yields byte-identical output.

use serde::Serialize;

use crate::center::CenterDescription;
use crate::derivation::{TSetResult, VerificationOutcome};
use crate::discriminant::{Discriminant, EffectivenessReport};
use crate::error::{Error, Result};
use crate::lattice::LatticeIndex;
use crate::ring::{display_monomial, Monomial, Ring};

/// Version of the report format itself.
pub const REPORT_VERSION: u32 = 1;
/// Version of the tool that produced the report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TOOL_NAME: &str = "qcancel";

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo { name: TOOL_NAME, version: TOOL_VERSION }
    }
}

/// A compact, human-auditable summary of the analyzed ring.
#[derive(Clone, Debug, Serialize)]
pub struct RingSummary {
    pub generators: Vec<String>,
    /// Torsion order `m`: parameters live in `Q(zeta_m)`.
    pub torsion_order: u64,
    pub free_params: usize,
    pub pure_skew: bool,
    pub weyl_factors: usize,
    pub commutative: bool,
    pub gk_dimension: usize,
}

impl RingSummary {
    pub fn of(ring: &Ring) -> RingSummary {
        RingSummary {
            generators: ring.generator_names().to_vec(),
            torsion_order: ring.order(),
            free_params: ring.free_rank(),
            pure_skew: ring.is_pure_skew(),
            weyl_factors: (0..ring.gen_count())
                .filter(|&i| ring.weyl_partner(i).map_or(false, |j| j > i))
                .count(),
            commutative: ring.is_commutative(),
            gk_dimension: ring.gk_dimension(),
        }
    }
}

/// The envelope shared by all successful reports.
#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub report_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    /// SHA-256 of the exact input bytes, hex-encoded.
    pub input_sha256: String,
    pub ring: RingSummary,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, input_sha256: String, ring: &Ring, result: T) -> Report<T> {
        Report {
            report_version: REPORT_VERSION,
            tool: ToolInfo::default(),
            command: command.to_string(),
            input_sha256,
            ring: RingSummary::of(ring),
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// The envelope for failures, still machine-readable.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub report_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    pub error: ErrorBody,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorBody {
    /// `"input"` for malformed or unusable input, `"computation"` for
    /// honest analysis failures (budgets, unsupported cases, degeneracy).
    pub class: &'static str,
    pub message: String,
}

impl ErrorReport {
    pub fn from_error(command: &str, input_sha256: Option<String>, err: &Error) -> ErrorReport {
        ErrorReport {
            report_version: REPORT_VERSION,
            tool: ToolInfo::default(),
            command: command.to_string(),
            input_sha256,
            error: ErrorBody {
                class: if err.is_input_error() { "input" } else { "computation" },
                message: err.to_string(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

fn index_string(idx: &LatticeIndex) -> String {
    match idx {
        LatticeIndex::Finite(r) => r.to_string(),
        LatticeIndex::Infinite => "infinite".into(),
    }
}

fn monomial_string(ring: &Ring, m: &Monomial) -> String {
    display_monomial(m, ring.generator_names())
}

/// Result payload of the `center` command.
#[derive(Clone, Debug, Serialize)]
pub struct CenterPayload {
    pub trivial: bool,
    /// Hermite basis of the exponent lattice of central monomials.
    pub lattice_basis: Vec<Vec<String>>,
    pub module_rank: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rectangular_exponents: Option<Vec<u64>>,
    /// Generators `x_i^(alpha_i)` of the center in the rectangular case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub central_generators: Option<Vec<String>>,
    /// A nonconstant central monomial, when the center is nontrivial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nontrivial_witness: Option<String>,
}

pub fn center_payload(desc: &CenterDescription) -> Result<CenterPayload> {
    let ring = desc.ring();
    let witness = desc.nontrivial_witness()?;
    let central_generators = desc.rectangular_exponents().map(|alpha| {
        alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let mut exps = vec![0u32; ring.gen_count()];
                exps[i] = a as u32;
                monomial_string(ring, &Monomial(exps))
            })
            .collect()
    });
    Ok(CenterPayload {
        trivial: witness.is_none(),
        lattice_basis: desc
            .lattice()
            .basis()
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect(),
        module_rank: index_string(desc.module_rank()),
        rectangular_exponents: desc.rectangular_exponents().map(|a| a.to_vec()),
        central_generators,
        nontrivial_witness: witness.map(|m| monomial_string(ring, &m)),
    })
}

/// One obstruction set in the `tsets` command.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionEntry {
    pub generator: String,
    pub empty: bool,
    /// Exponents over the other generators, in increasing index order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_monomial: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionPayload {
    pub sets: Vec<ObstructionEntry>,
    /// All sets empty: nothing moves.
    pub rigid: bool,
}

pub fn obstruction_payload(ring: &Ring, sets: &[TSetResult]) -> ObstructionPayload {
    let entries: Vec<ObstructionEntry> = sets
        .iter()
        .map(|t| ObstructionEntry {
            generator: ring.generator_names()[t.s].clone(),
            empty: t.is_empty(),
            witness: t.witness.clone(),
            witness_monomial: t
                .witness_monomial(ring.gen_count())
                .map(|m| monomial_string(ring, &m)),
        })
        .collect();
    let rigid = entries.iter().all(|e| e.empty);
    ObstructionPayload { sets: entries, rigid }
}

/// Result payload of the `ml` command. For rings with a Weyl factor the
/// invariant is not computed; `subalgebra_generators` stays `null` and the
/// note says why.
#[derive(Clone, Debug, Serialize)]
pub struct MlPayload {
    pub supported: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subalgebra_generators: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rigid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn ml_payload(ring: &Ring) -> Result<MlPayload> {
    match crate::derivation::ml_invariant(ring) {
        Ok(ml) => Ok(MlPayload {
            supported: true,
            subalgebra_generators: Some(
                ml.fixed_generators
                    .iter()
                    .map(|&s| ring.generator_names()[s].clone())
                    .collect(),
            ),
            rigid: Some(ml.is_rigid()),
            note: None,
        }),
        Err(Error::Unsupported(msg)) => Ok(MlPayload {
            supported: false,
            subalgebra_generators: None,
            rigid: None,
            note: Some(msg),
        }),
        Err(e) => Err(e),
    }
}

/// Result payload of the `discriminant` command.
#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantPayload {
    /// Canonical representative: leading coefficient one.
    pub normalized: String,
    /// Scalar such that `raw = unit * normalized`.
    pub unit: String,
    pub module_rank: String,
}

pub fn discriminant_payload(desc: &CenterDescription, d: &Discriminant) -> DiscriminantPayload {
    DiscriminantPayload {
        normalized: d.normalized().to_string(),
        unit: d.unit().to_string(),
        module_rank: index_string(desc.module_rank()),
    }
}

/// Result payload of the `effectiveness` command.
#[derive(Clone, Debug, Serialize)]
pub struct EffectivenessPayload {
    pub effective: &'static str,
    pub dominating: &'static str,
    pub rule: &'static str,
    pub normalized_discriminant: String,
}

pub fn effectiveness_payload(
    report: &EffectivenessReport,
    d: &Discriminant,
) -> EffectivenessPayload {
    EffectivenessPayload {
        effective: report.effective.as_str(),
        dominating: report.dominating.as_str(),
        rule: report.rule,
        normalized_discriminant: d.normalized().to_string(),
    }
}

/// Result payload of the `witness` command.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessPayload {
    pub generator: String,
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u32>>,
    /// `D_1(x_s)` of the constructed derivation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_image: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One verification check in the `verify-witness` command.
#[derive(Clone, Debug, Serialize)]
pub struct CheckPayload {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationPayload {
    pub generator: String,
    pub witness: Vec<u32>,
    pub degree_bound: u32,
    pub index_bound: usize,
    pub passed: bool,
    pub checks: Vec<CheckPayload>,
}

pub fn verification_payload(
    generator: String,
    witness: Vec<u32>,
    degree_bound: u32,
    index_bound: usize,
    outcome: &VerificationOutcome,
) -> VerificationPayload {
    VerificationPayload {
        generator,
        witness,
        degree_bound,
        index_bound,
        passed: outcome.passed,
        checks: outcome
            .checks
            .iter()
            .map(|c| CheckPayload { name: c.name, passed: c.passed, detail: c.detail.clone() })
            .collect(),
    }
}
