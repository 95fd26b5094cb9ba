//! Centers of the supported algebras and the trace of the regular
//! representation.
//!
//! For every family handled here the center is spanned by the central
//! monomials, and `x^d` is central exactly when its exponent vector
//! satisfies one multiplicative condition per generator:
//!
//! * skew factor: `prod_j p_ij^(d_j) = 1` for every generator `i` of the
//!   factor (an equation in the parameter group `Z^r x Z/m`);
//! * Weyl factor: both local exponents are multiples of the order of `q`.
//!
//! The solutions form a sublattice `L` of `Z^n`; central monomials are the
//! points of `L` in the nonnegative orthant. When `L` is *rectangular*,
//! `L = alpha_1 Z e_1 + ... + alpha_n Z e_n`, the algebra is a free module
//! over its center with the monomial basis `{x^d : d_i < alpha_i}` and the
//! trace of the regular representation is computed exactly.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{CongruenceSystem, IntMatrix, IntegerLattice, LatticeIndex, SolveOutcome};
use crate::ring::{Factor, Monomial, NormalElement, ParamExponent, Ring, SkewPresentation};

/// Expand equations `prod_j params[j]^(d_j) = target` over the parameter
/// group `Z^r x Z/m` into an integer congruence system in `vars` unknowns:
/// one exact row per free coordinate and one row mod `m` for the torsion
/// part (omitted when `m = 1`, where it is vacuous).
pub(crate) fn param_system(
    vars: usize,
    equations: &[(Vec<ParamExponent>, ParamExponent)],
) -> Result<CongruenceSystem> {
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut rhs: Vec<BigInt> = Vec::new();
    let mut moduli: Vec<u64> = Vec::new();
    for (coeffs, target) in equations {
        if coeffs.len() != vars {
            return Err(Error::Internal(format!(
                "equation has {} coefficients for {} variables",
                coeffs.len(),
                vars
            )));
        }
        let order = target.order();
        let rank = target.free().len();
        for c in coeffs {
            if c.order() != order || c.free().len() != rank {
                return Err(Error::Internal(
                    "parameter equation mixes exponent groups".into(),
                ));
            }
        }
        for t in 0..rank {
            rows.push(coeffs.iter().map(|c| BigInt::from(c.free()[t])).collect());
            rhs.push(BigInt::from(target.free()[t]));
            moduli.push(0);
        }
        if order >= 2 {
            rows.push(coeffs.iter().map(|c| BigInt::from(c.torsion())).collect());
            rhs.push(BigInt::from(target.torsion()));
            moduli.push(order);
        }
    }
    let coeffs = IntMatrix::from_big_rows(rows, vars);
    CongruenceSystem::new(coeffs, rhs, moduli)
}

/// Exponent lattice of central monomials of one skew factor.
fn skew_center_lattice(p: &SkewPresentation) -> Result<IntegerLattice> {
    let k = p.gen_count();
    let identity = ParamExponent::identity(p.order(), p.free_rank());
    let equations: Vec<(Vec<ParamExponent>, ParamExponent)> = (0..k)
        .map(|i| ((0..k).map(|j| p.param(i, j)).collect(), identity.clone()))
        .collect();
    let system = param_system(k, &equations)?;
    match system.solve() {
        SolveOutcome::Solvable { kernel, .. } => Ok(kernel),
        SolveOutcome::Unsolvable => Err(Error::Internal(
            "homogeneous centrality system reported unsolvable".into(),
        )),
    }
}

/// Structure of the center of a ring.
#[derive(Clone, Debug)]
pub struct CenterDescription {
    ring: Ring,
    lattice: IntegerLattice,
    rectangular: Option<Vec<u64>>,
    index: LatticeIndex,
}

impl CenterDescription {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Lattice of integer exponent vectors satisfying the centrality
    /// conditions; central monomials are its nonnegative points.
    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    /// `Some(alpha)` when the lattice is the box lattice
    /// `alpha_1 Z x ... x alpha_n Z`; the center is then the polynomial
    /// ring on `x_i^(alpha_i)`.
    pub fn rectangular_exponents(&self) -> Option<&[u64]> {
        self.rectangular.as_deref()
    }

    /// `[Z^n : L]`; when finite this is the rank of the algebra as a free
    /// module over its center.
    pub fn module_rank(&self) -> &LatticeIndex {
        &self.index
    }

    /// Whether the center reduces to the scalars, i.e. the lattice meets
    /// the nonnegative orthant only in `0`. A "no" comes with a central
    /// monomial, a "yes" with a strictly positive functional vanishing on
    /// the lattice; failing to find either within bounds is an error, never
    /// a guess.
    pub fn is_trivial(&self) -> Result<bool> {
        Ok(self.nontrivial_witness()?.is_none())
    }

    /// A nonconstant central monomial, if one exists.
    pub fn nontrivial_witness(&self) -> Result<Option<Monomial>> {
        if self.lattice.rank() == 0 {
            return Ok(None);
        }
        if let Some(v) = self.lattice.nonneg_witness(None)? {
            let exps = v
                .iter()
                .map(|x| u32::try_from(x).map_err(|_| {
                    Error::BoundExceeded("central monomial witness exceeds u32 exponents".into())
                }))
                .collect::<Result<Vec<u32>>>()?;
            return Ok(Some(Monomial(exps)));
        }
        let complement = self.lattice.orthogonal_complement();
        if complement.strictly_positive_witness(None)?.is_some() {
            // A strictly positive vector orthogonal to the lattice forces
            // every nonnegative lattice point to vanish.
            return Ok(None);
        }
        Err(Error::BoundExceeded(
            "could not certify the center trivial or produce a central monomial".into(),
        ))
    }

    /// Monomial basis of the algebra over its center (rectangular case):
    /// all `x^d` with `d_i < alpha_i`, enumerated with the first coordinate
    /// varying fastest.
    pub fn central_basis(&self) -> Result<Vec<Monomial>> {
        let alpha = self.rectangular.as_ref().ok_or(Error::NonRectangular)?;
        let n = alpha.len();
        let mut w: u64 = 1;
        for &a in alpha {
            w = w.checked_mul(a).ok_or_else(|| {
                Error::BoundExceeded("module rank overflows u64".into())
            })?;
            if w > 1_000_000 {
                return Err(Error::BoundExceeded(format!(
                    "module rank {w}+ is beyond the enumeration budget"
                )));
            }
        }
        let mut basis = Vec::with_capacity(w as usize);
        let mut d = vec![0u32; n];
        loop {
            basis.push(Monomial(d.clone()));
            let mut k = 0;
            loop {
                if k == n {
                    return Ok(basis);
                }
                d[k] += 1;
                if (d[k] as u64) < alpha[k] {
                    break;
                }
                d[k] = 0;
                k += 1;
            }
        }
    }
}

/// Compute the center structure of a ring. Works at the exponent level, so
/// generic (free) parameters are fine.
pub fn center(ring: &Ring) -> Result<CenterDescription> {
    let mut lattice: Option<IntegerLattice> = None;
    for f in ring.factors() {
        let l = match f {
            Factor::Skew(p) => skew_center_lattice(p)?,
            Factor::Weyl(w) => {
                let nq = BigInt::from(w.q_order());
                IntegerLattice::from_generators(
                    2,
                    vec![
                        vec![nq.clone(), BigInt::zero()],
                        vec![BigInt::zero(), nq],
                    ],
                )
            }
        };
        lattice = Some(match lattice {
            None => l,
            Some(acc) => acc.direct_sum(&l),
        });
    }
    let lattice = lattice.expect("a ring has at least one factor");

    let rectangular = rectangular_exponents(&lattice)?;
    let index = lattice.index_in_ambient();
    Ok(CenterDescription { ring: ring.clone(), lattice, rectangular, index })
}

/// `Some(alpha)` iff the lattice equals `diag(alpha)`: every coordinate gcd
/// is positive and each `g_i e_i` already lies in the lattice.
fn rectangular_exponents(lattice: &IntegerLattice) -> Result<Option<Vec<u64>>> {
    let n = lattice.ambient_dim();
    let gcds = lattice.coordinate_gcds();
    if gcds.iter().any(|g| g.is_zero()) {
        return Ok(None);
    }
    for (i, g) in gcds.iter().enumerate() {
        let mut v = vec![BigInt::zero(); n];
        v[i] = g.clone();
        if !lattice.contains(&v) {
            return Ok(None);
        }
    }
    gcds.iter()
        .map(|g| {
            u64::try_from(g).map_err(|_| {
                Error::BoundExceeded("rectangular exponent exceeds u64".into())
            })
        })
        .collect::<Result<Vec<u64>>>()
        .map(Some)
}

/// Trace of left multiplication by `u` on the algebra viewed as a free
/// module over its center (rectangular case only). For a term `x^e` of
/// `u * x^d` the basis coefficient at `x^d` is the central monomial
/// `x^(e - d)` whenever `e` is congruent to `d` componentwise; the
/// decomposition is scalar-free because `x_j^(alpha_j)` commutes strictly
/// with every generator.
pub fn regular_trace(u: &NormalElement, desc: &CenterDescription) -> Result<NormalElement> {
    if !u.ring().same_ring(&desc.ring) {
        return Err(Error::RingMismatch);
    }
    let ring = u.ring();
    let alpha = desc.rectangular_exponents().ok_or(Error::NonRectangular)?;
    let mut out = ring.zero_element();
    for d in desc.central_basis()? {
        let xd = ring.monomial_element(&d)?;
        let prod = u.mul(&xd)?;
        for (e, c) in prod.terms() {
            let congruent = e
                .exponents()
                .iter()
                .zip(d.exponents())
                .zip(alpha)
                .all(|((&ei, &di), &ai)| (ei as u64) % ai == (di as u64) % ai);
            if congruent {
                // Congruence plus d_i < alpha_i forces e >= d componentwise.
                let central =
                    Monomial(e.exponents().iter().zip(d.exponents()).map(|(&ei, &di)| ei - di).collect());
                out = out.add(&ring.monomial_element(&central)?.scale(c)?)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{WeylOrientation, WeylPresentation};
    use crate::scalar::CycloScalar;

    fn mono(v: &[u32]) -> Monomial {
        Monomial(v.to_vec())
    }

    #[test]
    fn quantum_plane_center_is_rectangular() {
        let ring = Ring::skew(SkewPresentation::uniform(2, 2, 1));
        let desc = center(&ring).unwrap();
        assert_eq!(desc.rectangular_exponents(), Some(&[2u64, 2][..]));
        assert_eq!(*desc.module_rank(), LatticeIndex::Finite(BigInt::from(4)));
        assert!(!desc.is_trivial().unwrap());
        let basis = desc.central_basis().unwrap();
        assert_eq!(
            basis,
            vec![mono(&[0, 0]), mono(&[1, 0]), mono(&[0, 1]), mono(&[1, 1])],
            "first coordinate varies fastest"
        );
    }

    #[test]
    fn uniform_order_l_center_scales_quadratically() {
        for l in 2u64..=5 {
            let ring = Ring::skew(SkewPresentation::uniform(2, l, 1));
            let desc = center(&ring).unwrap();
            assert_eq!(desc.rectangular_exponents(), Some(&[l, l][..]));
            assert_eq!(*desc.module_rank(), LatticeIndex::Finite(BigInt::from(l * l)));
        }
    }

    #[test]
    fn generic_parameter_centers() {
        // Two generators, generic q: only scalars are central.
        let ring = Ring::skew(SkewPresentation::uniform_generic(2));
        let desc = center(&ring).unwrap();
        assert_eq!(desc.lattice().rank(), 0);
        assert!(desc.is_trivial().unwrap());

        // Three generators, generic q: the lattice is spanned by
        // (1, -1, 1), still with trivial positive part; certified by the
        // orthogonal functional, not by exhaustion.
        let ring = Ring::skew(SkewPresentation::uniform_generic(3));
        let desc = center(&ring).unwrap();
        assert_eq!(desc.lattice().rank(), 1);
        assert!(desc.lattice().contains(&[1.into(), BigInt::from(-1), 1.into()]));
        assert!(desc.is_trivial().unwrap());
        assert_eq!(desc.rectangular_exponents(), None);
    }

    #[test]
    fn centrality_lattice_agrees_with_element_arithmetic() {
        // A deliberately lopsided torsion ring: p12 = i, p13 = 1, p23 = i.
        let q = ParamExponent::new(4, vec![], 1);
        let one = ParamExponent::new(4, vec![], 0);
        let p = SkewPresentation::new(
            vec!["x1".into(), "x2".into(), "x3".into()],
            4,
            0,
            vec![(0, 1, q.clone()), (0, 2, one), (1, 2, q)],
        )
        .unwrap();
        let ring = Ring::skew(p);
        let desc = center(&ring).unwrap();
        // Not rectangular: (1, 0, 0) is not central but gcd_1 = 1.
        assert_eq!(desc.rectangular_exponents(), None);
        // Exhaustive cross-check against honest element arithmetic.
        for d1 in 0..4u32 {
            for d2 in 0..4u32 {
                for d3 in 0..4u32 {
                    let m = mono(&[d1, d2, d3]);
                    let in_lattice = desc
                        .lattice()
                        .contains(&[d1.into(), d2.into(), d3.into()]);
                    let elem_central =
                        ring.monomial_element(&m).unwrap().is_central().unwrap();
                    assert_eq!(in_lattice, elem_central, "disagreement at {m:?}");
                }
            }
        }
    }

    #[test]
    fn weyl_center_is_the_q_order_box() {
        let ring = Ring::weyl(WeylPresentation::standard(3, 1, WeylOrientation::XyQyx).unwrap());
        let desc = center(&ring).unwrap();
        assert_eq!(desc.rectangular_exponents(), Some(&[3u64, 3][..]));
        assert_eq!(*desc.module_rank(), LatticeIndex::Finite(BigInt::from(9)));
        let x_cubed = ring.monomial_element(&mono(&[3, 0])).unwrap();
        assert!(x_cubed.is_central().unwrap());
    }

    #[test]
    fn tensor_center_is_the_direct_sum() {
        let a = Ring::skew(SkewPresentation::uniform(2, 2, 1));
        let b = Ring::weyl(WeylPresentation::standard(3, 1, WeylOrientation::XyQyx).unwrap());
        let t = Ring::tensor(vec![a, b]).unwrap();
        let desc = center(&t).unwrap();
        assert_eq!(desc.rectangular_exponents(), Some(&[2u64, 2, 3, 3][..]));
        assert_eq!(*desc.module_rank(), LatticeIndex::Finite(BigInt::from(36)));
    }

    #[test]
    fn trace_values_on_the_minus_one_plane() {
        let ring = Ring::skew(SkewPresentation::uniform(2, 2, 1));
        let desc = center(&ring).unwrap();
        let four = CycloScalar::from_integer(2, 4);

        let tr_one = regular_trace(&ring.one_element(), &desc).unwrap();
        assert_eq!(tr_one, ring.one_element().scale(&four).unwrap());

        let x1sq = ring.monomial_element(&mono(&[2, 0])).unwrap();
        assert_eq!(
            regular_trace(&x1sq, &desc).unwrap(),
            x1sq.scale(&four).unwrap()
        );

        // Non-central monomials have trace zero.
        let x1 = ring.monomial_element(&mono(&[1, 0])).unwrap();
        assert!(regular_trace(&x1, &desc).unwrap().is_zero());

        // (x1 x2)^2 = -x1^2 x2^2, so its trace is -4 x1^2 x2^2.
        let u = ring.monomial_element(&mono(&[1, 1])).unwrap();
        let sq = u.mul(&u).unwrap();
        let expected = ring
            .monomial_element(&mono(&[2, 2]))
            .unwrap()
            .scale(&CycloScalar::from_integer(2, -4))
            .unwrap();
        assert_eq!(regular_trace(&sq, &desc).unwrap(), expected);
    }

    #[test]
    fn weyl_trace_sees_mixed_terms() {
        let ring = Ring::weyl(WeylPresentation::standard(2, 1, WeylOrientation::XyQyx).unwrap());
        let desc = center(&ring).unwrap();
        // tr(xy) = 2: only the basis vectors x and xy contribute.
        let xy = ring.monomial_element(&mono(&[1, 1])).unwrap();
        let two = ring.one_element().scale(&CycloScalar::from_integer(2, 2)).unwrap();
        assert_eq!(regular_trace(&xy, &desc).unwrap(), two);
        // tr(1) = 4.
        let four = ring.one_element().scale(&CycloScalar::from_integer(2, 4)).unwrap();
        assert_eq!(regular_trace(&ring.one_element(), &desc).unwrap(), four);
    }

    #[test]
    fn trace_is_symmetric() {
        let rings = vec![
            Ring::skew(SkewPresentation::uniform(2, 4, 1)),
            Ring::weyl(WeylPresentation::standard(2, 1, WeylOrientation::XyQyx).unwrap()),
        ];
        for ring in rings {
            let desc = center(&ring).unwrap();
            let samples = vec![
                ring.monomial_element(&mono(&[1, 0])).unwrap(),
                ring.monomial_element(&mono(&[1, 1])).unwrap(),
                ring.monomial_element(&mono(&[0, 2]))
                    .unwrap()
                    .add(&ring.one_element())
                    .unwrap(),
            ];
            for a in &samples {
                for b in &samples {
                    let ab = regular_trace(&a.mul(b).unwrap(), &desc).unwrap();
                    let ba = regular_trace(&b.mul(a).unwrap(), &desc).unwrap();
                    assert_eq!(ab, ba, "trace must be symmetric");
                }
            }
        }
    }

    #[test]
    fn trace_requires_a_rectangular_center() {
        let q = ParamExponent::new(4, vec![], 1);
        let one = ParamExponent::new(4, vec![], 0);
        let p = SkewPresentation::new(
            vec!["x1".into(), "x2".into(), "x3".into()],
            4,
            0,
            vec![(0, 1, q.clone()), (0, 2, one), (1, 2, q)],
        )
        .unwrap();
        let ring = Ring::skew(p);
        let desc = center(&ring).unwrap();
        let u = ring.one_element();
        assert!(matches!(
            regular_trace(&u, &desc),
            Err(Error::NonRectangular)
        ));
    }
}
