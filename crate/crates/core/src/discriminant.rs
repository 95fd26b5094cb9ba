//! Trace-pairing discriminants and their effectiveness.
//!
//! With a rectangular center the algebra is free of finite rank `w` over
//! `Z(A)` with monomial basis `B = {x^d : d_i < alpha_i}`, and the
//! discriminant is the determinant of the pairing matrix
//! `M[u][v] = tr(b_u b_v)`, defined up to a scalar unit.
//!
//! Three determinant routes are implemented:
//!
//! * a closed form for pure skew rings, where `M` is a generalized
//!   permutation matrix (each row meets its unique partner column), so the
//!   determinant is a signed product of `w` entries and never materializes
//!   the matrix;
//! * fraction-free Bareiss elimination with exact polynomial division, for
//!   rings with Weyl factors where the pairing matrix is genuinely dense;
//! * cofactor expansion for very small matrices, kept as an independent
//!   cross-check.

use crate::center::{regular_trace, CenterDescription};
use crate::error::{Error, Result};
use crate::ring::{Monomial, NormalElement, Ring};
use crate::scalar::CycloScalar;

/// Largest module rank for which the dense pairing matrix is materialized.
const DENSE_RANK_BUDGET: u64 = 64;

/// A discriminant `d(A/Z(A))`, both as computed and normalized so its
/// lexicographically greatest monomial has coefficient one.
#[derive(Clone, Debug)]
pub struct Discriminant {
    raw: NormalElement,
    normalized: NormalElement,
    unit: CycloScalar,
}

impl Discriminant {
    pub fn raw(&self) -> &NormalElement {
        &self.raw
    }

    /// The discriminant with its leading coefficient scaled to one; this is
    /// the canonical representative modulo the unit ambiguity.
    pub fn normalized(&self) -> &NormalElement {
        &self.normalized
    }

    /// The discarded scalar: `raw = unit * normalized`.
    pub fn unit(&self) -> &CycloScalar {
        &self.unit
    }
}

/// Full pairing matrix `tr(b_u b_v)` over the central basis. Only sensible
/// for modest ranks; larger skew cases go through the closed form instead.
pub fn trace_pairing_matrix(desc: &CenterDescription) -> Result<Vec<Vec<NormalElement>>> {
    let basis = desc.central_basis()?;
    let w = basis.len() as u64;
    if w > DENSE_RANK_BUDGET {
        return Err(Error::BoundExceeded(format!(
            "dense pairing matrix of rank {w} exceeds the budget of {DENSE_RANK_BUDGET}"
        )));
    }
    let ring = desc.ring();
    let elems: Vec<NormalElement> = basis
        .iter()
        .map(|m| ring.monomial_element(m))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(basis.len());
    for bu in &elems {
        let mut row = Vec::with_capacity(basis.len());
        for bv in &elems {
            row.push(regular_trace(&bu.mul(bv)?, desc)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Leading (lexicographically greatest) term of a nonzero element.
fn leading_term(e: &NormalElement) -> Result<(Monomial, CycloScalar)> {
    e.terms()
        .next_back()
        .map(|(m, c)| (m.clone(), c.clone()))
        .ok_or(Error::ZeroPolynomial)
}

/// Exact division of elements whose monomials commute (central elements, or
/// any elements of a commutative ring). Errors if the division leaves a
/// remainder; inside Bareiss elimination that would indicate a logic error,
/// so it surfaces loudly instead of corrupting the determinant.
pub fn exact_divide(num: &NormalElement, den: &NormalElement) -> Result<NormalElement> {
    let ring = num.ring().clone();
    let (dm, dc) = leading_term(den).map_err(|_| Error::DivisionByZero)?;
    let mut rem = num.clone();
    let mut quot = ring.zero_element();
    while !rem.is_zero() {
        let (rm, rc) = leading_term(&rem)?;
        let qexp: Vec<u32> = rm
            .exponents()
            .iter()
            .zip(dm.exponents())
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<_>>()
            .ok_or_else(|| {
                Error::Internal("inexact polynomial division in determinant".into())
            })?;
        let qc = rc.div(&dc)?;
        let qterm = ring.monomial_element(&Monomial(qexp))?.scale(&qc)?;
        quot = quot.add(&qterm)?;
        rem = rem.sub(&qterm.mul(den)?)?;
    }
    Ok(quot)
}

/// Fraction-free Bareiss determinant over exactly divisible entries.
pub fn determinant_bareiss(mut m: Vec<Vec<NormalElement>>, ring: &Ring) -> Result<NormalElement> {
    let n = m.len();
    if n == 0 {
        return Ok(ring.one_element());
    }
    for row in &m {
        if row.len() != n {
            return Err(Error::Internal("determinant of a non-square matrix".into()));
        }
    }
    let mut negate = false;
    let mut prev = ring.one_element();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(ring.zero_element()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j])?.sub(&m[i][k].mul(&m[k][j])?)?;
                m[i][j] = exact_divide(&num, &prev)?;
            }
            m[i][k] = ring.zero_element();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// Cofactor-expansion determinant; exponential, kept as an independent
/// cross-check for ranks up to six.
pub fn determinant_cofactor(m: &[Vec<NormalElement>], ring: &Ring) -> Result<NormalElement> {
    let n = m.len();
    if n > 6 {
        return Err(Error::BoundExceeded(
            "cofactor expansion is limited to rank 6".into(),
        ));
    }
    if n == 0 {
        return Ok(ring.one_element());
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut det = ring.zero_element();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<NormalElement>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let sub = determinant_cofactor(&minor, ring)?;
        let term = m[0][j].mul(&sub)?;
        det = if j % 2 == 0 { det.add(&term)? } else { det.sub(&term)? };
    }
    Ok(det)
}

/// Closed-form determinant for pure skew rings: row `u` pairs only with the
/// partner `p(u) = (alpha - d_u) mod alpha`, an involution, so the matrix
/// is a generalized permutation matrix with entries
/// `tr(b_u b_p) = w * s(d_u, p_u) * x^(d_u + p_u)`.
fn skew_determinant(desc: &CenterDescription) -> Result<NormalElement> {
    let ring = desc.ring();
    let alpha = desc.rectangular_exponents().ok_or(Error::NonRectangular)?;
    let basis = desc.central_basis()?;
    let w = basis.len();
    let n = ring.gen_count();
    let w_scalar = CycloScalar::from_integer(ring.order(), w as i64);

    let mut scalar = CycloScalar::one(ring.order());
    let mut exponent = vec![0u64; n];
    let mut fixed = 0usize;
    for d in &basis {
        let partner = Monomial(
            d.exponents()
                .iter()
                .zip(alpha)
                .map(|(&di, &ai)| ((ai - di as u64) % ai) as u32)
                .collect(),
        );
        if partner == *d {
            fixed += 1;
        }
        let s = ring.commutation_scalar(d, &partner)?.evaluate()?;
        scalar = scalar.mul(&s)?.mul(&w_scalar)?;
        for (acc, (&di, &pi)) in exponent.iter_mut().zip(d.exponents().iter().zip(partner.exponents())) {
            *acc += di as u64 + pi as u64;
        }
    }
    // The partner map is an involution; its sign counts the swapped pairs.
    if (w - fixed) / 2 % 2 == 1 {
        scalar = scalar.neg();
    }
    let mono = Monomial(
        exponent
            .into_iter()
            .map(|e| {
                u32::try_from(e).map_err(|_| {
                    Error::BoundExceeded("discriminant exponent exceeds u32".into())
                })
            })
            .collect::<Result<Vec<u32>>>()?,
    );
    ring.monomial_element(&mono)?.scale(&scalar)
}

/// The discriminant of the ring over its center. Requires torsion
/// parameters (scalars must evaluate) and a rectangular center.
pub fn discriminant(desc: &CenterDescription) -> Result<Discriminant> {
    let ring = desc.ring();
    if !ring.is_torsion() {
        return Err(Error::FreeParameter(
            "the discriminant is only computed at roots of unity".into(),
        ));
    }
    if desc.rectangular_exponents().is_none() {
        return Err(Error::NonRectangular);
    }
    let raw = if ring.is_pure_skew() {
        skew_determinant(desc)?
    } else {
        let matrix = trace_pairing_matrix(desc)?;
        determinant_bareiss(matrix, ring)?
    };
    if raw.is_zero() {
        return Err(Error::DegenerateDiscriminant);
    }
    let (_, lead) = leading_term(&raw)?;
    let normalized = raw.scale(&lead.inv()?)?;
    Ok(Discriminant { raw, normalized, unit: lead })
}

/// Three-valued answer for the structural effectiveness tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Effectiveness {
    Yes,
    No,
    Unknown,
}

impl Effectiveness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Effectiveness::Yes => "yes",
            Effectiveness::No => "no",
            Effectiveness::Unknown => "unknown",
        }
    }
}

/// Classification of a normalized discriminant, with the rule that decided
/// it (used verbatim as a citation slug in reports).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectivenessReport {
    pub effective: Effectiveness,
    pub dominating: Effectiveness,
    pub rule: &'static str,
}

/// Structural effectiveness rules, applied to a normalized discriminant:
///
/// * a single monomial using every generator is dominating (hence
///   effective): substituting elements of positive degree keeps its degree
///   strictly on top;
/// * in a pure skew ring a single monomial that misses a generator is
///   neither: the equivalent lattice conditions fail;
/// * a sum whose lexicographically greatest monomial uses every generator
///   and bounds all other monomials componentwise is dominating: the
///   leading monomial still wins after any positive-degree substitution;
/// * anything else is reported unknown rather than guessed.
pub fn classify_effectiveness(normalized: &NormalElement) -> Result<EffectivenessReport> {
    let ring = normalized.ring();
    let (lead, _) = leading_term(normalized)?;
    let uses_all = lead.exponents().iter().all(|&e| e >= 1);
    if normalized.term_count() == 1 {
        if uses_all {
            return Ok(EffectivenessReport {
                effective: Effectiveness::Yes,
                dominating: Effectiveness::Yes,
                rule: "monomial-with-all-generators",
            });
        }
        if ring.is_pure_skew() {
            return Ok(EffectivenessReport {
                effective: Effectiveness::No,
                dominating: Effectiveness::No,
                rule: "monomial-missing-generator",
            });
        }
        return Ok(EffectivenessReport {
            effective: Effectiveness::Unknown,
            dominating: Effectiveness::Unknown,
            rule: "monomial-missing-generator-unclassified",
        });
    }
    let dominated = normalized.terms().all(|(m, _)| {
        m.exponents().iter().zip(lead.exponents()).all(|(&e, &l)| e <= l)
    });
    if uses_all && dominated {
        return Ok(EffectivenessReport {
            effective: Effectiveness::Yes,
            dominating: Effectiveness::Yes,
            rule: "leading-monomial-dominates",
        });
    }
    Ok(EffectivenessReport {
        effective: Effectiveness::Unknown,
        dominating: Effectiveness::Unknown,
        rule: "no-structural-rule",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::center::center;
    use crate::ring::{SkewPresentation, WeylOrientation, WeylPresentation};

    fn mono(v: &[u32]) -> Monomial {
        Monomial(v.to_vec())
    }

    #[test]
    fn quantum_plane_discriminant_is_frozen() {
        let ring = Ring::skew(SkewPresentation::uniform(2, 2, 1));
        let desc = center(&ring).unwrap();
        let d = discriminant(&desc).unwrap();
        // Raw value: -256 x1^4 x2^4.
        let expected_raw = ring
            .monomial_element(&mono(&[4, 4]))
            .unwrap()
            .scale(&CycloScalar::from_integer(2, -256))
            .unwrap();
        assert_eq!(*d.raw(), expected_raw);
        assert_eq!(*d.normalized(), ring.monomial_element(&mono(&[4, 4])).unwrap());
        assert_eq!(*d.unit(), CycloScalar::from_integer(2, -256));
        let eff = classify_effectiveness(d.normalized()).unwrap();
        assert_eq!(eff.effective, Effectiveness::Yes);
        assert_eq!(eff.dominating, Effectiveness::Yes);
    }

    #[test]
    fn skew_closed_form_matches_dense_and_cofactor_routes() {
        let ring = Ring::skew(SkewPresentation::uniform(2, 2, 1));
        let desc = center(&ring).unwrap();
        let closed = skew_determinant(&desc).unwrap();
        let matrix = trace_pairing_matrix(&desc).unwrap();
        let dense = determinant_bareiss(matrix.clone(), &ring).unwrap();
        let cof = determinant_cofactor(&matrix, &ring).unwrap();
        assert_eq!(closed, dense);
        assert_eq!(closed, cof);
    }

    #[test]
    fn skew_closed_form_matches_dense_route_at_order_three() {
        let ring = Ring::skew(SkewPresentation::uniform(2, 3, 1));
        let desc = center(&ring).unwrap();
        let closed = skew_determinant(&desc).unwrap();
        let dense = determinant_bareiss(trace_pairing_matrix(&desc).unwrap(), &ring).unwrap();
        assert_eq!(closed, dense);
        // Leading exponent w * (alpha - 1) = 9 * 2 = 18 on both generators.
        let d = discriminant(&desc).unwrap();
        assert_eq!(*d.normalized(), ring.monomial_element(&mono(&[18, 18])).unwrap());
    }

    #[test]
    fn weyl_discriminant_has_dominating_diagonal_shape() {
        let ring = Ring::weyl(WeylPresentation::standard(2, 1, WeylOrientation::XyQyx).unwrap());
        let desc = center(&ring).unwrap();
        let d = discriminant(&desc).unwrap();
        // Leading monomial x^4 y^4 (that is, n^2 (n-1) with n = 2), all
        // other terms powers of xy below it.
        let lead = leading_term(d.normalized()).unwrap().0;
        assert_eq!(lead, mono(&[4, 4]));
        for (m, _) in d.normalized().terms() {
            let e = m.exponents();
            assert_eq!(e[0], e[1], "lower terms are powers of xy");
            assert!(e[0] <= 4);
        }
        let eff = classify_effectiveness(d.normalized()).unwrap();
        assert_eq!(eff.effective, Effectiveness::Yes);
        assert_eq!(eff.dominating, Effectiveness::Yes);
        assert_eq!(eff.rule, "leading-monomial-dominates");

        // Independent cofactor evaluation of the same matrix.
        let matrix = trace_pairing_matrix(&desc).unwrap();
        let cof = determinant_cofactor(&matrix, &ring).unwrap();
        assert_eq!(*d.raw(), cof);
    }

    #[test]
    fn exact_division_and_its_failure() {
        // A commutative ring (order 1 torsion group, trivial parameters).
        let ring = Ring::skew(SkewPresentation::uniform(2, 1, 0));
        let x = ring.generator_element(0).unwrap();
        let y = ring.generator_element(1).unwrap();
        let xy = x.mul(&y).unwrap();
        // (x^2 y + x y) / (x y) = x + 1.
        let num = x.mul(&xy).unwrap().add(&xy).unwrap();
        let q = exact_divide(&num, &xy).unwrap();
        assert_eq!(q, x.add(&ring.one_element()).unwrap());
        // x / y is not exact.
        assert!(exact_divide(&x, &y).is_err());
        // Division by zero is flagged.
        assert!(matches!(
            exact_divide(&x, &ring.zero_element()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn bareiss_detects_singular_matrices() {
        let ring = Ring::skew(SkewPresentation::uniform(2, 1, 0));
        let x = ring.generator_element(0).unwrap();
        let row = vec![x.clone(), x.clone()];
        let det = determinant_bareiss(vec![row.clone(), row], &ring).unwrap();
        assert!(det.is_zero());
    }

    #[test]
    fn effectiveness_rules() {
        let ring = Ring::skew(SkewPresentation::uniform(2, 2, 1));
        // Monomial missing a generator in a skew ring: No / No.
        let d = ring.monomial_element(&mono(&[4, 0])).unwrap();
        let eff = classify_effectiveness(&d).unwrap();
        assert_eq!(eff.effective, Effectiveness::No);
        assert_eq!(eff.dominating, Effectiveness::No);
        assert_eq!(eff.rule, "monomial-missing-generator");
        // Sum without componentwise dominance: Unknown.
        let e = ring
            .monomial_element(&mono(&[3, 0]))
            .unwrap()
            .add(&ring.monomial_element(&mono(&[0, 3])).unwrap())
            .unwrap();
        let eff = classify_effectiveness(&e).unwrap();
        assert_eq!(eff.effective, Effectiveness::Unknown);
        assert_eq!(eff.rule, "no-structural-rule");
    }

    #[test]
    fn free_parameters_are_rejected() {
        let ring = Ring::skew(SkewPresentation::uniform_generic(2));
        let desc = center(&ring).unwrap();
        assert!(matches!(
            discriminant(&desc),
            Err(Error::FreeParameter(_))
        ));
    }
}
