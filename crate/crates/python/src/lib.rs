//! Python bindings: ring construction, exact element arithmetic, and the
//! analysis passes. Analyses return the same JSON payloads the command-line
//! tool embeds in its reports, so downstream code can share one parser.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qcancel_core::center::center;
use qcancel_core::derivation::{all_t_sets, lnd_witness, verify_locally_nilpotent};
use qcancel_core::discriminant::{classify_effectiveness, discriminant};
use qcancel_core::report::{
    center_payload, discriminant_payload, effectiveness_payload, ml_payload,
    obstruction_payload, verification_payload, WitnessPayload,
};
use qcancel_core::ring::{Monomial, NormalElement, ParamExponent, Ring, SkewPresentation};
use qcancel_core::ringspec::RingSpec;
use qcancel_core::scalar::{CycloScalar, Rational};
use qcancel_core::verdict::verdict;
use qcancel_core::Error;

fn py_err(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("payloads always serialize");
    s.push('\n');
    s
}

/// A quantum-parameter algebra: a skew polynomial ring, a quantum Weyl
/// algebra, or a tensor product of such.
#[pyclass(name = "Ring", frozen)]
struct PyRing {
    inner: Ring,
}

impl PyRing {
    fn resolve(&self, generator: &str) -> PyResult<usize> {
        self.inner
            .generator_names()
            .iter()
            .position(|n| n == generator)
            .ok_or_else(|| {
                PyValueError::new_err(format!(
                    "unknown generator {generator:?}; expected one of {}",
                    self.inner.generator_names().join(", ")
                ))
            })
    }
}

#[pymethods]
impl PyRing {
    /// Build a ring from the JSON document format used by the CLI.
    #[staticmethod]
    fn from_spec_json(text: &str) -> PyResult<PyRing> {
        let ring = RingSpec::from_json(text)
            .and_then(|s| s.to_ring())
            .map_err(py_err)?;
        Ok(PyRing { inner: ring })
    }

    /// Skew polynomial ring at a root of unity: `params` lists
    /// `(i, j, torsion)` with 1-based `i < j`, meaning
    /// `x_j x_i = zeta_m^torsion x_i x_j`.
    #[staticmethod]
    fn skew(generators: Vec<String>, m: u64, params: Vec<(usize, usize, i64)>) -> PyResult<PyRing> {
        let n = generators.len();
        let mut entries = Vec::with_capacity(params.len());
        for (i, j, torsion) in params {
            if i < 1 || j <= i || j > n {
                return Err(PyValueError::new_err(format!(
                    "parameter indices ({i}, {j}) must satisfy 1 <= i < j <= {n}"
                )));
            }
            entries.push((i - 1, j - 1, ParamExponent::new(m, vec![], torsion)));
        }
        let p = SkewPresentation::new(generators, m, 0, entries).map_err(py_err)?;
        Ok(PyRing { inner: Ring::skew(p) })
    }

    /// Quantum Weyl algebra with `q = zeta_m^q_exp`; `orientation` is
    /// `"xy-qyx-1"` (default) or `"yx-qxy-1"`.
    #[staticmethod]
    #[pyo3(signature = (m, q_exp, orientation=None))]
    fn weyl(m: u64, q_exp: i64, orientation: Option<&str>) -> PyResult<PyRing> {
        use qcancel_core::ring::{WeylOrientation, WeylPresentation};
        let orientation = match orientation {
            None => WeylOrientation::XyQyx,
            Some(s) => WeylOrientation::parse(s).map_err(py_err)?,
        };
        let p = WeylPresentation::new(
            "x".into(),
            "y".into(),
            ParamExponent::new(m, vec![], q_exp),
            orientation,
        )
        .map_err(py_err)?;
        Ok(PyRing { inner: Ring::weyl(p) })
    }

    /// Tensor product over the ground field; generator names must be
    /// pairwise distinct.
    #[staticmethod]
    fn tensor(factors: Vec<PyRef<PyRing>>) -> PyResult<PyRing> {
        let rings: Vec<Ring> = factors.iter().map(|f| f.inner.clone()).collect();
        Ok(PyRing { inner: Ring::tensor(rings).map_err(py_err)? })
    }

    fn generators(&self) -> Vec<String> {
        self.inner.generator_names().to_vec()
    }

    fn torsion_order(&self) -> u64 {
        self.inner.order()
    }

    fn free_params(&self) -> usize {
        self.inner.free_rank()
    }

    fn is_pure_skew(&self) -> bool {
        self.inner.is_pure_skew()
    }

    fn is_torsion(&self) -> bool {
        self.inner.is_torsion()
    }

    fn gk_dimension(&self) -> usize {
        self.inner.gk_dimension()
    }

    fn one(&self) -> PyElement {
        PyElement { inner: self.inner.one_element() }
    }

    fn generator(&self, name: &str) -> PyResult<PyElement> {
        let i = self.resolve(name)?;
        Ok(PyElement {
            inner: self.inner.generator_element(i).map_err(py_err)?,
        })
    }

    /// The normal-form monomial with the given exponents.
    fn monomial(&self, exponents: Vec<u32>) -> PyResult<PyElement> {
        Ok(PyElement {
            inner: self
                .inner
                .monomial_element(&Monomial(exponents))
                .map_err(py_err)?,
        })
    }

    fn center_json(&self) -> PyResult<String> {
        let desc = center(&self.inner).map_err(py_err)?;
        Ok(to_json(&center_payload(&desc).map_err(py_err)?))
    }

    fn tsets_json(&self) -> PyResult<String> {
        let sets = all_t_sets(&self.inner).map_err(py_err)?;
        Ok(to_json(&obstruction_payload(&self.inner, &sets)))
    }

    fn ml_json(&self) -> PyResult<String> {
        Ok(to_json(&ml_payload(&self.inner).map_err(py_err)?))
    }

    fn discriminant_json(&self) -> PyResult<String> {
        let desc = center(&self.inner).map_err(py_err)?;
        let d = discriminant(&desc).map_err(py_err)?;
        Ok(to_json(&discriminant_payload(&desc, &d)))
    }

    fn effectiveness_json(&self) -> PyResult<String> {
        let desc = center(&self.inner).map_err(py_err)?;
        let d = discriminant(&desc).map_err(py_err)?;
        let report = classify_effectiveness(d.normalized()).map_err(py_err)?;
        Ok(to_json(&effectiveness_payload(&report, &d)))
    }

    fn witness_json(&self, generator: &str) -> PyResult<String> {
        let s = self.resolve(generator)?;
        let payload = match lnd_witness(&self.inner, s).map_err(py_err)? {
            Some(w) => WitnessPayload {
                generator: generator.to_string(),
                found: true,
                first_image: Some(
                    w.derivation
                        .component_on_generator(1, s)
                        .map_err(py_err)?
                        .to_string(),
                ),
                witness: Some(w.witness),
                note: None,
            },
            None => WitnessPayload {
                generator: generator.to_string(),
                found: false,
                witness: None,
                first_image: None,
                note: Some("the obstruction set is empty".into()),
            },
        };
        Ok(to_json(&payload))
    }

    #[pyo3(signature = (generator, degree_bound=4, index_bound=8))]
    fn verify_witness_json(
        &self,
        generator: &str,
        degree_bound: u32,
        index_bound: usize,
    ) -> PyResult<String> {
        let s = self.resolve(generator)?;
        let w = lnd_witness(&self.inner, s)
            .map_err(py_err)?
            .ok_or_else(|| {
                PyRuntimeError::new_err(format!(
                    "the obstruction set of generator {generator} is empty; nothing to verify"
                ))
            })?;
        let outcome =
            verify_locally_nilpotent(&w.derivation, degree_bound, index_bound).map_err(py_err)?;
        Ok(to_json(&verification_payload(
            generator.to_string(),
            w.witness,
            degree_bound,
            index_bound,
            &outcome,
        )))
    }

    fn verdict_json(&self) -> PyResult<String> {
        Ok(to_json(&verdict(&self.inner).map_err(py_err)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Ring({} | zeta order {}, free params {})",
            self.inner.generator_names().join(", "),
            self.inner.order(),
            self.inner.free_rank(),
        )
    }
}

/// An element in normal form: a finite sum of ordered monomials with
/// cyclotomic coefficients.
#[pyclass(name = "Element", frozen)]
struct PyElement {
    inner: NormalElement,
}

#[pymethods]
impl PyElement {
    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Total degree, or None for the zero element.
    fn degree(&self) -> Option<u64> {
        self.inner.degree().ok()
    }

    fn term_count(&self) -> usize {
        self.inner.term_count()
    }

    /// Multiply by the rational `num/den`.
    #[pyo3(signature = (num, den=1))]
    fn scale(&self, num: i64, den: i64) -> PyResult<PyElement> {
        if den == 0 {
            return Err(PyValueError::new_err("zero denominator"));
        }
        let s = CycloScalar::from_rational(
            self.inner.ring().order(),
            Rational::new(num.into(), den.into()),
        );
        Ok(PyElement { inner: self.inner.scale(&s).map_err(py_err)? })
    }

    fn __add__(&self, other: &PyElement) -> PyResult<PyElement> {
        Ok(PyElement { inner: self.inner.add(&other.inner).map_err(py_err)? })
    }

    fn __sub__(&self, other: &PyElement) -> PyResult<PyElement> {
        Ok(PyElement { inner: self.inner.sub(&other.inner).map_err(py_err)? })
    }

    fn __mul__(&self, other: &PyElement) -> PyResult<PyElement> {
        Ok(PyElement { inner: self.inner.mul(&other.inner).map_err(py_err)? })
    }

    fn __neg__(&self) -> PyElement {
        PyElement { inner: self.inner.neg() }
    }

    fn __pow__(&self, exp: u32, _modulo: Option<u32>) -> PyResult<PyElement> {
        Ok(PyElement { inner: self.inner.pow(exp).map_err(py_err)? })
    }

    fn __eq__(&self, other: &PyElement) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Element({})", self.inner)
    }
}

#[pymodule]
fn qcancel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRing>()?;
    m.add_class::<PyElement>()?;
    m.add("__version__", qcancel_core::report::TOOL_VERSION)?;
    Ok(())
}
