//! The cancellation verdict: combine center triviality, obstruction sets,
//! and discriminant effectiveness into a single conclusion with explicit
//! supporting evidence.
//!
//! The decision routes, tried in order:
//!
//! 1. a trivial center makes the ring universally cancellative;
//! 2. empty obstruction sets for every generator (rigidity), or an
//!    effective discriminant over the center, make it strongly
//!    cancellative;
//! 3. a noncommutative ring of Gelfand-Kirillov dimension two is
//!    cancellative regardless;
//! 4. otherwise the question stays open for this input.
//!
//! Whenever two criteria are computed along independent routes they are
//! required to agree — for torsion skew rings, emptiness of `T_s` must
//! match the center-lattice projection `gcd` at coordinate `s` being
//! different from one, and discriminant effectiveness must match all
//! rectangular exponents being at least two. Disagreement is a bug in the
//! kernels, reported as [`Error::Internal`], never papered over.

use serde::Serialize;

use crate::center::{center, CenterDescription};
use crate::derivation::{all_t_sets, TSetResult};
use crate::discriminant::{classify_effectiveness, discriminant, Effectiveness};
use crate::error::{Error, Result};
use crate::lattice::LatticeIndex;
use crate::ring::Ring;

/// The conclusion of the analysis, strongest claim first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    /// `A[t_1..t_k] = B[t_1..t_k]` forces `A = B` for every `k` and every
    /// partner `B`.
    UniversallyCancellative,
    /// Cancellation holds in every number of variables for this ring.
    StronglyCancellative,
    /// Cancellation holds in one variable.
    Cancellative,
    /// No implemented criterion applies.
    OpenCase,
}

impl Conclusion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Conclusion::UniversallyCancellative => "universally-cancellative",
            Conclusion::StronglyCancellative => "strongly-cancellative",
            Conclusion::Cancellative => "cancellative",
            Conclusion::OpenCase => "open-case",
        }
    }
}

/// One piece of supporting evidence: a stable rule identifier plus a
/// self-contained statement of what was established.
#[derive(Clone, Debug, Serialize)]
pub struct Citation {
    pub rule: &'static str,
    pub statement: String,
}

/// Everything the analysis measured, independent of how the routes used it.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ConditionFindings {
    /// The center reduces to the ground field.
    pub center_is_trivial: bool,
    /// Rank of the ring as a module over its center, when finite.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module_rank: Option<String>,
    /// Exponents `alpha` when the center is the polynomial ring on
    /// `x_i^(alpha_i)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rectangular_exponents: Option<Vec<u64>>,
    /// Per-coordinate gcds of the center lattice.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinate_gcds: Option<Vec<String>>,
    /// Per-generator emptiness of the obstruction sets (skew rings only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction_sets_empty: Option<Vec<bool>>,
    /// Every obstruction set is empty: no generator moves under a locally
    /// nilpotent higher derivation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rigid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant_effective: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant_dominating: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant_rule: Option<&'static str>,
}

/// A conclusion, the evidence behind it, and everything measured on the way.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub conclusion: Conclusion,
    pub citations: Vec<Citation>,
    pub notes: Vec<String>,
    pub findings: ConditionFindings,
}

fn trivial_center_citation() -> Citation {
    Citation {
        rule: "trivial-center",
        statement: "the center reduces to the ground field, and an affine domain of \
                    finite Gelfand-Kirillov dimension whose center is the ground field \
                    cancels universally in polynomial extensions"
            .into(),
    }
}

fn rigidity_citation() -> Citation {
    Citation {
        rule: "t-set-rigidity",
        statement: "every obstruction set is empty, so no locally nilpotent higher \
                    derivation moves any generator; the rigidity invariant is the whole \
                    ring, which forces strong cancellation"
            .into(),
    }
}

fn effective_discriminant_citation() -> Citation {
    Citation {
        rule: "effective-discriminant",
        statement: "the discriminant of the ring over its center is effective, so every \
                    automorphism of a polynomial extension preserves the subalgebra and \
                    strong cancellation follows"
            .into(),
    }
}

fn gk2_citation() -> Citation {
    Citation {
        rule: "gk2-noncommutative",
        statement: "a noncommutative affine domain of Gelfand-Kirillov dimension two \
                    is cancellative"
            .into(),
    }
}

/// Decide the cancellation status of a ring.
///
/// Commutative presentations are rejected: they belong to the classical
/// theory and none of the noncommutative criteria apply. Bounded searches
/// that exhaust their budget surface as errors or as explicit notes — an
/// undetermined condition is never silently treated as settled.
pub fn verdict(ring: &Ring) -> Result<Verdict> {
    if ring.is_commutative() {
        return Err(Error::Unsupported(
            "the presentation is commutative; classical cancellation theory applies \
             and the noncommutative criteria implemented here say nothing"
                .into(),
        ));
    }

    let desc = center(ring)?;
    let mut findings = ConditionFindings {
        center_is_trivial: desc.is_trivial()?,
        module_rank: Some(match desc.module_rank() {
            LatticeIndex::Finite(r) => r.to_string(),
            LatticeIndex::Infinite => "infinite".into(),
        }),
        rectangular_exponents: desc.rectangular_exponents().map(|a| a.to_vec()),
        coordinate_gcds: Some(
            desc.lattice()
                .coordinate_gcds()
                .iter()
                .map(|g| g.to_string())
                .collect(),
        ),
        ..ConditionFindings::default()
    };
    let mut notes = Vec::new();

    if findings.center_is_trivial {
        return Ok(Verdict {
            conclusion: Conclusion::UniversallyCancellative,
            citations: vec![trivial_center_citation()],
            notes: vec![
                "the conclusion uses that the ring is an affine domain of finite \
                 Gelfand-Kirillov dimension over a field of characteristic zero"
                    .into(),
            ],
            findings,
        });
    }

    // Obstruction sets, for skew presentations.
    let mut t_sets: Option<Vec<TSetResult>> = None;
    if ring.is_pure_skew() {
        match all_t_sets(ring) {
            Ok(ts) => t_sets = Some(ts),
            Err(Error::BoundExceeded(msg)) => {
                notes.push(format!("obstruction sets left undetermined: {msg}"));
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(ts) = &t_sets {
        findings.obstruction_sets_empty = Some(ts.iter().map(|t| t.is_empty()).collect());
        findings.rigid = Some(ts.iter().all(|t| t.is_empty()));
        if ring.is_torsion() {
            cross_check_t_sets_against_lattice(ring, &desc, ts)?;
        }
        for t in ts {
            if let Some(w) = &t.witness {
                notes.push(format!(
                    "generator {} moves: exponents {:?} over the other generators give a \
                     locally nilpotent higher derivation",
                    ring.generator_names()[t.s],
                    w
                ));
            }
        }
    }

    // Discriminant over the center, when the module structure allows one.
    let mut effectiveness = None;
    if ring.is_torsion() && desc.rectangular_exponents().is_some() {
        match discriminant(&desc) {
            Ok(d) => {
                let report = classify_effectiveness(d.normalized())?;
                findings.discriminant_effective = Some(report.effective.as_str());
                findings.discriminant_dominating = Some(report.dominating.as_str());
                findings.discriminant_rule = Some(report.rule);
                if ring.is_pure_skew() {
                    cross_check_effectiveness_against_exponents(&desc, &report.effective)?;
                }
                effectiveness = Some(report);
            }
            Err(Error::BoundExceeded(msg)) => {
                notes.push(format!("discriminant left uncomputed: {msg}"));
            }
            Err(Error::DegenerateDiscriminant) => {
                notes.push("the trace pairing is degenerate; no discriminant exists".into());
            }
            Err(e) => return Err(e),
        }
    } else if !ring.is_torsion() {
        notes.push(
            "free parameters present: the discriminant is only computed at roots of unity"
                .into(),
        );
    } else {
        notes.push(
            "the center is not a polynomial ring on pure powers of the generators; \
             the free-module discriminant is not defined here"
                .into(),
        );
    }

    let mut citations = Vec::new();
    if findings.rigid == Some(true) {
        citations.push(rigidity_citation());
    }
    if effectiveness
        .as_ref()
        .map_or(false, |e| e.effective == Effectiveness::Yes)
    {
        citations.push(effective_discriminant_citation());
    }
    if !citations.is_empty() {
        return Ok(Verdict {
            conclusion: Conclusion::StronglyCancellative,
            citations,
            notes,
            findings,
        });
    }

    if ring.gk_dimension() == 2 {
        notes.push(
            "the dimension-two argument is insensitive to effectiveness; it needs only \
             that the ring is a noncommutative affine domain over a field"
                .into(),
        );
        return Ok(Verdict {
            conclusion: Conclusion::Cancellative,
            citations: vec![gk2_citation()],
            notes,
            findings,
        });
    }

    notes.push(
        "no implemented criterion resolves cancellation for this input; the question \
         remains open"
            .into(),
    );
    Ok(Verdict {
        conclusion: Conclusion::OpenCase,
        citations: Vec::new(),
        notes,
        findings,
    })
}

/// For torsion skew rings, `T_s` is empty exactly when the projection of
/// the center lattice to coordinate `s` is not all of `Z`: a witness `d`
/// in `T_s` is the same thing as a lattice vector with entry `-1` at `s`,
/// and at roots of unity the sign pattern elsewhere can always be repaired
/// by adding multiples of `m e_j`. The two sides are computed by different
/// kernels (congruence solving with a box search versus Hermite forms), so
/// agreement is a real audit.
fn cross_check_t_sets_against_lattice(
    ring: &Ring,
    desc: &CenterDescription,
    t_sets: &[TSetResult],
) -> Result<()> {
    use num_traits::One;
    let gcds = desc.lattice().coordinate_gcds();
    for t in t_sets {
        let from_lattice_empty = !gcds[t.s].is_one();
        if from_lattice_empty != t.is_empty() {
            return Err(Error::Internal(format!(
                "obstruction set {} and center-lattice projection disagree for generator {} \
                 of {}",
                if t.is_empty() { "emptiness" } else { "membership" },
                ring.generator_names()[t.s],
                ring.generator_names().join(","),
            )));
        }
    }
    Ok(())
}

/// For a rectangular skew center the discriminant is a unit times the
/// monomial with exponent `w (alpha_i - 1)` at generator `i`, so it is
/// effective exactly when every `alpha_i` is at least two. The
/// effectiveness classifier works on the computed discriminant, the
/// exponents come from the lattice; they must agree.
fn cross_check_effectiveness_against_exponents(
    desc: &CenterDescription,
    effective: &Effectiveness,
) -> Result<()> {
    let alpha = desc
        .rectangular_exponents()
        .expect("checked rectangular before computing the discriminant");
    let expected = if alpha.iter().all(|&a| a >= 2) {
        Effectiveness::Yes
    } else {
        Effectiveness::No
    };
    if *effective != expected {
        return Err(Error::Internal(format!(
            "discriminant effectiveness {:?} disagrees with rectangular exponents {:?}",
            effective, alpha
        )));
    }
    Ok(())
}
