//! Ring presentations and exact normal-form arithmetic.
//!
//! Three presentation families are supported:
//!
//! * [`SkewPresentation`]: `k_{p_ij}[x1..xn]` with `x_j x_i = p_ij x_i x_j`
//!   for `i < j`; the derived entries are fixed by convention
//!   (`p_ii = 1`, `p_ji = p_ij^{-1}`).
//! * [`WeylPresentation`]: `k<x,y>` modulo `xy - q yx - 1` (or the flipped
//!   orientation `yx - q xy - 1`), `q` a root of unity, `q != 1`.
//! * Tensor products of the above ([`Ring::tensor`]); generators of
//!   different factors commute.
//!
//! Parameters are tracked at the exponent level as elements of the abelian
//! group `Z^r x Z/m` ([`ParamExponent`]): the torsion part is a power of a
//! fixed primitive `m`-th root of unity and the free part records exponents
//! of generic (infinite-order) parameters. Exponent-level analyses (centers,
//! obstruction sets) work for any parameters; element arithmetic needs
//! torsion-only parameters so scalars can be evaluated in `Q(zeta_m)`.
//!
//! Elements are kept in normal form: sorted monomials `x1^e1 ... xn^en`
//! (Weyl factors contribute an `x`-before-`y` segment) with nonzero
//! cyclotomic coefficients, stored in a lexicographically ordered term map.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::CycloScalar;

/// An element of the parameter exponent group `Z^r x Z/m`, written
/// multiplicatively: the value is `q_1^f_1 ... q_r^f_r * zeta_m^t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamExponent {
    order: u64,
    free: Vec<i64>,
    torsion: u64,
}

impl ParamExponent {
    pub fn new(order: u64, free: Vec<i64>, torsion: i64) -> ParamExponent {
        assert!(order >= 1, "torsion order must be positive");
        let t = torsion.rem_euclid(order as i64) as u64;
        ParamExponent { order, free, torsion: t }
    }

    pub fn identity(order: u64, free_rank: usize) -> ParamExponent {
        ParamExponent::new(order, vec![0; free_rank], 0)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn free(&self) -> &[i64] {
        &self.free
    }

    pub fn torsion(&self) -> u64 {
        self.torsion
    }

    pub fn is_identity(&self) -> bool {
        self.torsion == 0 && self.free.iter().all(|&f| f == 0)
    }

    pub fn is_torsion_only(&self) -> bool {
        self.free.iter().all(|&f| f == 0)
    }

    /// Multiplicative order of the value when it is torsion; `None` for a
    /// genuine free (infinite-order) parameter.
    pub fn multiplicative_order(&self) -> Option<u64> {
        if !self.is_torsion_only() {
            return None;
        }
        Some(self.order / self.order.gcd(&self.torsion.max(1)))
    }

    pub fn combine(&self, other: &ParamExponent) -> Result<ParamExponent> {
        if self.order != other.order || self.free.len() != other.free.len() {
            return Err(Error::OrderMismatch { left: self.order, right: other.order });
        }
        let free = self.free.iter().zip(&other.free).map(|(a, b)| a + b).collect();
        let torsion = (self.torsion + other.torsion) % self.order;
        Ok(ParamExponent { order: self.order, free, torsion: torsion.rem_euclid(self.order) })
    }

    pub fn pow(&self, k: i64) -> ParamExponent {
        let free = self.free.iter().map(|f| f * k).collect();
        let t = ((self.torsion as i128 * k as i128).rem_euclid(self.order as i128)) as u64;
        ParamExponent { order: self.order, free, torsion: t }
    }

    pub fn inverse(&self) -> ParamExponent {
        self.pow(-1)
    }

    /// Re-express in a larger torsion group `Z/m'` (with `m | m'`) and a
    /// free group of rank `total_free`, the original free coordinates
    /// landing at `free_offset`.
    pub fn embed(&self, order: u64, free_offset: usize, total_free: usize) -> Result<ParamExponent> {
        if order % self.order != 0 || free_offset + self.free.len() > total_free {
            return Err(Error::OrderMismatch { left: self.order, right: order });
        }
        let mut free = vec![0i64; total_free];
        free[free_offset..free_offset + self.free.len()].copy_from_slice(&self.free);
        let torsion = self.torsion * (order / self.order);
        Ok(ParamExponent { order, free, torsion: torsion % order })
    }

    /// Evaluate as a concrete scalar; only torsion values live in a
    /// cyclotomic field.
    pub fn evaluate(&self) -> Result<CycloScalar> {
        if !self.is_torsion_only() {
            return Err(Error::FreeParameter(format!(
                "the exponent {:?} evaluates to a generic parameter, not a root of unity",
                self.free
            )));
        }
        Ok(CycloScalar::root_power(self.order, self.torsion as i64))
    }
}

/// Skew polynomial presentation `k_{p_ij}[x1..xn]`.
#[derive(Clone, Debug)]
pub struct SkewPresentation {
    generators: Vec<String>,
    order: u64,
    free_rank: usize,
    /// `p_ij` for `i < j`, dense upper triangle in row-major pair order.
    params: Vec<ParamExponent>,
}

fn upper_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    // Position of (i, j) in the row-major enumeration of the strict upper
    // triangle of an n x n matrix.
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl SkewPresentation {
    /// Build a presentation from the strict upper triangle of parameters.
    /// Pairs may be omitted (defaulting to 1); derived entries (`i >= j`)
    /// and duplicates are rejected.
    pub fn new(
        generators: Vec<String>,
        order: u64,
        free_rank: usize,
        params: Vec<(usize, usize, ParamExponent)>,
    ) -> Result<SkewPresentation> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::Presentation("a ring needs at least one generator".into()));
        }
        if order == 0 {
            return Err(Error::Presentation("torsion order must be at least 1".into()));
        }
        validate_names(&generators)?;
        let count = n * (n - 1) / 2;
        let mut table = vec![ParamExponent::identity(order, free_rank); count];
        let mut seen = vec![false; count];
        for (i, j, p) in params {
            if i >= j || j >= n {
                return Err(Error::Presentation(format!(
                    "parameter index ({}, {}) is not a strict upper pair of {} generators; \
                     entries with i >= j are determined by convention and must be omitted",
                    i + 1,
                    j + 1,
                    n
                )));
            }
            let k = upper_index(i, j, n);
            if seen[k] {
                return Err(Error::Presentation(format!(
                    "duplicate parameter for pair ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            if p.order() != order || p.free().len() != free_rank {
                return Err(Error::Presentation(format!(
                    "parameter for pair ({}, {}) lives in the wrong exponent group",
                    i + 1,
                    j + 1
                )));
            }
            table[k] = p;
            seen[k] = true;
        }
        Ok(SkewPresentation { generators, order, free_rank, params: table })
    }

    /// `k_q[x1..xn]` with a single parameter `q = zeta_order^torsion` for
    /// every pair.
    pub fn uniform(n: usize, order: u64, torsion: i64) -> SkewPresentation {
        let generators = (1..=n).map(|i| format!("x{i}")).collect();
        let q = ParamExponent::new(order, vec![], torsion);
        let mut params = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                params.push((i, j, q.clone()));
            }
        }
        SkewPresentation::new(generators, order, 0, params).expect("uniform presentation is valid")
    }

    /// `k_q[x1..xn]` with one generic (infinite-order) parameter `q`.
    pub fn uniform_generic(n: usize) -> SkewPresentation {
        let generators = (1..=n).map(|i| format!("x{i}")).collect();
        let q = ParamExponent::new(1, vec![1], 0);
        let mut params = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                params.push((i, j, q.clone()));
            }
        }
        SkewPresentation::new(generators, 1, 1, params).expect("generic presentation is valid")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn gen_count(&self) -> usize {
        self.generators.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// `p_ij` for arbitrary `i, j`, applying the conventions `p_ii = 1`
    /// and `p_ji = p_ij^{-1}`.
    pub fn param(&self, i: usize, j: usize) -> ParamExponent {
        if i == j {
            return ParamExponent::identity(self.order, self.free_rank);
        }
        if i < j {
            self.params[upper_index(i, j, self.gen_count())].clone()
        } else {
            self.params[upper_index(j, i, self.gen_count())].inverse()
        }
    }

    fn embedded(&self, order: u64, free_offset: usize, total_free: usize) -> Result<SkewPresentation> {
        let params = self
            .params
            .iter()
            .map(|p| p.embed(order, free_offset, total_free))
            .collect::<Result<Vec<_>>>()?;
        Ok(SkewPresentation {
            generators: self.generators.clone(),
            order,
            free_rank: total_free,
            params,
        })
    }
}

/// Orientation of the quantum Weyl relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylOrientation {
    /// `xy - q yx - 1 = 0`: rewriting `yx -> q^{-1} xy - q^{-1}`.
    XyQyx,
    /// `yx - q xy - 1 = 0`: rewriting `yx -> q xy + 1`.
    YxQxy,
}

impl WeylOrientation {
    pub fn as_str(&self) -> &'static str {
        match self {
            WeylOrientation::XyQyx => "xy-qyx-1",
            WeylOrientation::YxQxy => "yx-qxy-1",
        }
    }

    pub fn parse(s: &str) -> Result<WeylOrientation> {
        match s {
            "xy-qyx-1" => Ok(WeylOrientation::XyQyx),
            "yx-qxy-1" => Ok(WeylOrientation::YxQxy),
            other => Err(Error::Input(format!(
                "unknown Weyl orientation {other:?}; expected \"xy-qyx-1\" or \"yx-qxy-1\""
            ))),
        }
    }
}

/// Quantum Weyl presentation on two generators.
#[derive(Clone, Debug)]
pub struct WeylPresentation {
    x_name: String,
    y_name: String,
    order: u64,
    q: ParamExponent,
    orientation: WeylOrientation,
}

impl WeylPresentation {
    pub fn new(
        x_name: String,
        y_name: String,
        q: ParamExponent,
        orientation: WeylOrientation,
    ) -> Result<WeylPresentation> {
        validate_names(&[x_name.clone(), y_name.clone()])?;
        if !q.is_torsion_only() {
            return Err(Error::Presentation(
                "the Weyl parameter q must be a root of unity (no free part)".into(),
            ));
        }
        if q.torsion() == 0 {
            return Err(Error::Presentation(
                "the Weyl parameter q must differ from 1".into(),
            ));
        }
        Ok(WeylPresentation { x_name, y_name, order: q.order(), q, orientation })
    }

    /// Default-named presentation with `q = zeta_order^torsion`.
    pub fn standard(order: u64, torsion: i64, orientation: WeylOrientation) -> Result<WeylPresentation> {
        WeylPresentation::new(
            "x".into(),
            "y".into(),
            ParamExponent::new(order, vec![], torsion),
            orientation,
        )
    }

    pub fn q(&self) -> &ParamExponent {
        &self.q
    }

    /// Multiplicative order of `q`; the center is generated by the
    /// generators raised to this power.
    pub fn q_order(&self) -> u64 {
        self.q.multiplicative_order().expect("q is torsion by construction")
    }

    pub fn orientation(&self) -> WeylOrientation {
        self.orientation
    }

    pub fn names(&self) -> (&str, &str) {
        (&self.x_name, &self.y_name)
    }

    fn embedded(&self, order: u64, free_offset: usize, total_free: usize) -> Result<WeylPresentation> {
        Ok(WeylPresentation {
            x_name: self.x_name.clone(),
            y_name: self.y_name.clone(),
            order,
            q: self.q.embed(order, free_offset, total_free)?,
            orientation: self.orientation,
        })
    }
}

fn validate_names(names: &[String]) -> Result<()> {
    for name in names {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Presentation(format!(
                "generator name {name:?} must be nonempty and alphanumeric"
            )));
        }
    }
    for (i, a) in names.iter().enumerate() {
        if names[i + 1..].contains(a) {
            return Err(Error::Presentation(format!("generator name {a:?} appears twice")));
        }
    }
    Ok(())
}

/// One tensor factor of a ring.
#[derive(Clone, Debug)]
pub enum Factor {
    Skew(SkewPresentation),
    Weyl(WeylPresentation),
}

impl Factor {
    pub fn gen_count(&self) -> usize {
        match self {
            Factor::Skew(p) => p.gen_count(),
            Factor::Weyl(_) => 2,
        }
    }

    pub fn generators(&self) -> Vec<String> {
        match self {
            Factor::Skew(p) => p.generators().to_vec(),
            Factor::Weyl(p) => vec![p.names().0.to_string(), p.names().1.to_string()],
        }
    }

    fn order(&self) -> u64 {
        match self {
            Factor::Skew(p) => p.order(),
            Factor::Weyl(p) => p.order,
        }
    }

    fn free_rank(&self) -> usize {
        match self {
            Factor::Skew(p) => p.free_rank(),
            Factor::Weyl(_) => 0,
        }
    }

    fn embedded(&self, order: u64, free_offset: usize, total_free: usize) -> Result<Factor> {
        Ok(match self {
            Factor::Skew(p) => Factor::Skew(p.embedded(order, free_offset, total_free)?),
            Factor::Weyl(p) => Factor::Weyl(p.embedded(order, free_offset, total_free)?),
        })
    }
}

/// Exponent vector of a normal monomial; ordering is lexicographic in the
/// generator order, which fixes every iteration order downstream.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial(vec![0; n])
    }

    pub fn generator(n: usize, i: usize) -> Monomial {
        let mut m = Monomial::one(n);
        m.0[i] = 1;
        m
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }
}

struct RingData {
    factors: Vec<Factor>,
    order: u64,
    free_rank: usize,
    gen_names: Vec<String>,
    gen_factor: Vec<usize>,
    factor_offset: Vec<usize>,
    /// Commuting-pair parameters `c[i][j]` with `x_j x_i = c[i][j] x_i x_j`
    /// (`i < j`); identity across factors, unused inside a Weyl factor.
    pairs: Vec<Vec<ParamExponent>>,
    weyl_partner: Vec<Option<usize>>,
    torsion_only: bool,
    /// Normal forms of `y^a x^b` per Weyl factor, memoized.
    weyl_cache: Mutex<HashMap<(usize, u32, u32), Arc<Vec<((u32, u32), CycloScalar)>>>>,
}

impl fmt::Debug for RingData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingData")
            .field("generators", &self.gen_names)
            .field("order", &self.order)
            .field("free_rank", &self.free_rank)
            .finish()
    }
}

/// A presented algebra; cheap to clone (shared immutable data).
#[derive(Clone, Debug)]
pub struct Ring {
    data: Arc<RingData>,
}

impl Ring {
    pub fn skew(p: SkewPresentation) -> Ring {
        Ring::from_factors(vec![Factor::Skew(p)]).expect("single skew factor is valid")
    }

    pub fn weyl(p: WeylPresentation) -> Ring {
        Ring::from_factors(vec![Factor::Weyl(p)]).expect("single Weyl factor is valid")
    }

    /// Tensor product; flattens nested tensors, unifies torsion orders to
    /// their lcm, and keeps the free parameters of distinct factors
    /// independent (the free ranks add).
    pub fn tensor(factors: Vec<Ring>) -> Result<Ring> {
        if factors.is_empty() {
            return Err(Error::Presentation("tensor product needs at least one factor".into()));
        }
        let mut flat: Vec<Factor> = Vec::new();
        for r in &factors {
            flat.extend(r.data.factors.iter().cloned());
        }
        Ring::from_factors(flat)
    }

    fn from_factors(raw: Vec<Factor>) -> Result<Ring> {
        if raw.is_empty() {
            return Err(Error::Presentation("a ring needs at least one factor".into()));
        }
        let order = raw.iter().fold(1u64, |acc, f| acc.lcm(&f.order()));
        let total_free: usize = raw.iter().map(|f| f.free_rank()).sum();
        let mut factors = Vec::with_capacity(raw.len());
        let mut free_offset = 0;
        for f in &raw {
            factors.push(f.embedded(order, free_offset, total_free)?);
            free_offset += f.free_rank();
        }

        let mut gen_names = Vec::new();
        let mut gen_factor = Vec::new();
        let mut factor_offset = Vec::new();
        for (fi, f) in factors.iter().enumerate() {
            factor_offset.push(gen_names.len());
            for name in f.generators() {
                gen_names.push(name);
                gen_factor.push(fi);
            }
        }
        validate_names(&gen_names)?;

        let n = gen_names.len();
        let mut pairs = vec![vec![ParamExponent::identity(order, total_free); n]; n];
        let mut weyl_partner = vec![None; n];
        let mut torsion_only = true;
        for (fi, f) in factors.iter().enumerate() {
            let off = factor_offset[fi];
            match f {
                Factor::Skew(p) => {
                    for i in 0..p.gen_count() {
                        for j in 0..p.gen_count() {
                            if i != j {
                                let param = p.param(i, j);
                                torsion_only &= param.is_torsion_only();
                                pairs[off + i][off + j] = param;
                            }
                        }
                    }
                }
                Factor::Weyl(_) => {
                    weyl_partner[off] = Some(off + 1);
                    weyl_partner[off + 1] = Some(off);
                }
            }
        }

        Ok(Ring {
            data: Arc::new(RingData {
                factors,
                order,
                free_rank: total_free,
                gen_names,
                gen_factor,
                factor_offset,
                pairs,
                weyl_partner,
                torsion_only,
                weyl_cache: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn same_ring(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
    }

    pub fn gen_count(&self) -> usize {
        self.data.gen_names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.data.gen_names
    }

    pub fn order(&self) -> u64 {
        self.data.order
    }

    pub fn free_rank(&self) -> usize {
        self.data.free_rank
    }

    pub fn factors(&self) -> &[Factor] {
        &self.data.factors
    }

    pub fn factor_offset(&self, fi: usize) -> usize {
        self.data.factor_offset[fi]
    }

    pub fn factor_of_generator(&self, i: usize) -> usize {
        self.data.gen_factor[i]
    }

    pub fn weyl_partner(&self, i: usize) -> Option<usize> {
        self.data.weyl_partner[i]
    }

    pub fn is_pure_skew(&self) -> bool {
        self.data.factors.iter().all(|f| matches!(f, Factor::Skew(_)))
    }

    pub fn has_weyl_factor(&self) -> bool {
        !self.is_pure_skew()
    }

    /// True when every parameter is a root of unity, so scalars evaluate.
    pub fn is_torsion(&self) -> bool {
        self.data.torsion_only
    }

    /// True when all parameters are trivial and no Weyl factor is present.
    pub fn is_commutative(&self) -> bool {
        self.is_pure_skew()
            && self.data.pairs.iter().flatten().all(|p| p.is_identity())
    }

    /// Gelfand-Kirillov dimension; for these families it equals the number
    /// of generators.
    pub fn gk_dimension(&self) -> usize {
        self.gen_count()
    }

    fn require_torsion(&self) -> Result<()> {
        if !self.is_torsion() {
            return Err(Error::FreeParameter(
                "element arithmetic requires all parameters to be roots of unity".into(),
            ));
        }
        Ok(())
    }

    /// Commutation parameter `c` with `x_j x_i = c x_i x_j` for generators
    /// in skew position (distinct and not partners in one Weyl factor).
    pub fn pair_param(&self, i: usize, j: usize) -> Result<&ParamExponent> {
        if i == j || self.data.weyl_partner[i] == Some(j) {
            return Err(Error::Unsupported(format!(
                "generators {} and {} do not commute up to a scalar",
                self.data.gen_names[i], self.data.gen_names[j]
            )));
        }
        Ok(&self.data.pairs[i][j])
    }

    /// The scalar `c` with `x^a * x^b = c * x^(a+b)` in a skew ring
    /// (including tensor products of skew factors): the product of
    /// `p_ij^(a_j * b_i)` over all `i < j`.
    pub fn commutation_scalar(&self, a: &Monomial, b: &Monomial) -> Result<ParamExponent> {
        if self.has_weyl_factor() {
            return Err(Error::Unsupported(
                "commutation scalars are defined for skew presentations only".into(),
            ));
        }
        self.check_monomial(a)?;
        self.check_monomial(b)?;
        let n = self.gen_count();
        let mut acc = ParamExponent::identity(self.data.order, self.data.free_rank);
        for i in 0..n {
            if b.0[i] == 0 {
                continue;
            }
            for j in i + 1..n {
                if a.0[j] == 0 {
                    continue;
                }
                let e = a.0[j] as i64 * b.0[i] as i64;
                acc = acc.combine(&self.data.pairs[i][j].pow(e))?;
            }
        }
        Ok(acc)
    }

    /// The scalar `c` with `x^a * x^b = c * x^b * x^a` (always defined in a
    /// skew ring); satisfies `swap(a,b) * swap(b,a) = 1`.
    pub fn swap_scalar(&self, a: &Monomial, b: &Monomial) -> Result<ParamExponent> {
        let s_ab = self.commutation_scalar(a, b)?;
        let s_ba = self.commutation_scalar(b, a)?;
        s_ab.combine(&s_ba.inverse())
    }

    fn check_monomial(&self, m: &Monomial) -> Result<()> {
        if m.0.len() != self.gen_count() {
            return Err(Error::Input(format!(
                "monomial has {} exponents, ring has {} generators",
                m.0.len(),
                self.gen_count()
            )));
        }
        Ok(())
    }

    /// Exponent-level centrality test: `x^d` is central iff for every
    /// skew-position generator `i` the product of `p_ij^(d_j)` over `j` is 1,
    /// and for every Weyl factor both local exponents are multiples of the
    /// order of `q`. Works for free parameters too.
    pub fn monomial_is_central(&self, d: &Monomial) -> Result<bool> {
        self.check_monomial(d)?;
        let n = self.gen_count();
        for i in 0..n {
            if let Some(p) = self.data.weyl_partner[i] {
                let fi = self.data.gen_factor[i];
                let nq = match &self.data.factors[fi] {
                    Factor::Weyl(w) => w.q_order(),
                    Factor::Skew(_) => unreachable!("Weyl partner inside a skew factor"),
                };
                if d.0[i] as u64 % nq != 0 || d.0[p] as u64 % nq != 0 {
                    return Ok(false);
                }
                continue;
            }
            let mut acc = ParamExponent::identity(self.data.order, self.data.free_rank);
            for j in 0..n {
                if j != i && d.0[j] != 0 {
                    acc = acc.combine(&self.data.pairs[i][j].pow(d.0[j] as i64))?;
                }
            }
            if !acc.is_identity() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    // ---- element constructors ----

    pub fn zero_element(&self) -> NormalElement {
        NormalElement { ring: self.clone(), terms: BTreeMap::new() }
    }

    pub fn one_element(&self) -> NormalElement {
        self.monomial_element(&Monomial::one(self.gen_count()))
            .expect("unit monomial is valid")
    }

    pub fn generator_element(&self, i: usize) -> Result<NormalElement> {
        if i >= self.gen_count() {
            return Err(Error::Input(format!("generator index {i} out of range")));
        }
        self.monomial_element(&Monomial::generator(self.gen_count(), i))
    }

    pub fn monomial_element(&self, m: &Monomial) -> Result<NormalElement> {
        self.check_monomial(m)?;
        let mut terms = BTreeMap::new();
        terms.insert(m.clone(), CycloScalar::one(self.data.order));
        Ok(NormalElement { ring: self.clone(), terms })
    }

    pub fn element_from_terms(
        &self,
        entries: Vec<(Monomial, CycloScalar)>,
    ) -> Result<NormalElement> {
        let mut terms: BTreeMap<Monomial, CycloScalar> = BTreeMap::new();
        for (m, c) in entries {
            self.check_monomial(&m)?;
            if c.order() != self.data.order {
                return Err(Error::OrderMismatch { left: c.order(), right: self.data.order });
            }
            let cur = match terms.remove(&m) {
                Some(prev) => prev.add(&c)?,
                None => c,
            };
            if !cur.is_zero() {
                terms.insert(m, cur);
            }
        }
        Ok(NormalElement { ring: self.clone(), terms })
    }

    /// Normal form of `y^a x^b` inside one Weyl factor, as terms
    /// `(x-exponent, y-exponent) -> coefficient`.
    ///
    /// Built from the single-generator swap `y x -> c1 x y + c0` alone: a
    /// bubble pass carries one `x` leftward through a `y`-run
    /// (`y^j x = c1 (y^(j-1) x) y + c0 y^(j-1)`), and the `b` copies of `x`
    /// are carried through one at a time.
    fn weyl_normal_yx(&self, fi: usize, a: u32, b: u32) -> Result<Arc<Vec<((u32, u32), CycloScalar)>>> {
        if let Some(hit) = self.data.weyl_cache.lock().expect("weyl cache lock").get(&(fi, a, b)) {
            return Ok(hit.clone());
        }
        let w = match &self.data.factors[fi] {
            Factor::Weyl(w) => w,
            Factor::Skew(_) => unreachable!("weyl_normal_yx on a skew factor"),
        };
        let order = self.data.order;
        let q = w.q.evaluate()?;
        // Swap rule: y x -> c1 * x y + c0.
        let (c1, c0) = match w.orientation {
            WeylOrientation::XyQyx => {
                let qi = q.inv()?;
                (qi.clone(), qi.neg())
            }
            WeylOrientation::YxQxy => (q.clone(), CycloScalar::one(order)),
        };
        // single_x[j] = normal form of y^j x, by the bubble recursion.
        // Terms are ((x-exp, y-exp), coeff).
        let mut single_x: Vec<Vec<((u32, u32), CycloScalar)>> =
            vec![vec![((1, 0), CycloScalar::one(order))]];
        for j in 1..=a {
            let mut next: BTreeMap<(u32, u32), CycloScalar> = BTreeMap::new();
            // c1 * (y^(j-1) x) * y: append one y to each term.
            for ((ex, ey), c) in &single_x[(j - 1) as usize] {
                let entry = next.entry((*ex, ey + 1)).or_insert_with(|| CycloScalar::zero(order));
                *entry = entry.add(&c.mul(&c1)?)?;
            }
            // + c0 * y^(j-1).
            let entry = next.entry((0, j - 1)).or_insert_with(|| CycloScalar::zero(order));
            *entry = entry.add(&c0)?;
            next.retain(|_, c| !c.is_zero());
            single_x.push(next.into_iter().collect());
        }
        // Carry the b copies of x through y^a one at a time.
        let mut acc: BTreeMap<(u32, u32), CycloScalar> = BTreeMap::new();
        acc.insert((0, a), CycloScalar::one(order));
        for _ in 0..b {
            let mut next: BTreeMap<(u32, u32), CycloScalar> = BTreeMap::new();
            for ((ex, ey), c) in &acc {
                for ((fx, fy), fc) in &single_x[*ey as usize] {
                    let entry = next
                        .entry((ex + fx, *fy))
                        .or_insert_with(|| CycloScalar::zero(order));
                    *entry = entry.add(&c.mul(fc)?)?;
                }
            }
            next.retain(|_, c| !c.is_zero());
            acc = next;
        }
        let result: Vec<((u32, u32), CycloScalar)> = acc.into_iter().collect();
        let arc = Arc::new(result);
        self.data
            .weyl_cache
            .lock()
            .expect("weyl cache lock")
            .insert((fi, a, b), arc.clone());
        Ok(arc)
    }

    /// Product of two normal monomials as a normal element. Factor parts
    /// commute past each other freely, so the result is the combination of
    /// per-factor local products: a scalar for each skew factor, a
    /// two-variable expansion for each Weyl factor.
    fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Result<BTreeMap<Monomial, CycloScalar>> {
        let n = self.gen_count();
        let mut coeff = CycloScalar::one(self.data.order);
        // Skew part: commutation scalar over pairs in the same skew factor.
        let mut exp = ParamExponent::identity(self.data.order, self.data.free_rank);
        for i in 0..n {
            if b.0[i] == 0 || self.data.weyl_partner[i].is_some() {
                continue;
            }
            for j in i + 1..n {
                if a.0[j] == 0 || self.data.gen_factor[j] != self.data.gen_factor[i] {
                    continue;
                }
                let e = a.0[j] as i64 * b.0[i] as i64;
                exp = exp.combine(&self.data.pairs[i][j].pow(e))?;
            }
        }
        coeff = coeff.mul(&exp.evaluate()?)?;

        let mut base = Monomial(vec![0; n]);
        for i in 0..n {
            if self.data.weyl_partner[i].is_none() {
                base.0[i] = a.0[i] + b.0[i];
            }
        }
        // Weyl part: local products x^(ax) (y^(ay) x^(bx)) y^(by), combined
        // across factors by a cartesian product of expansions.
        let mut results: Vec<(Monomial, CycloScalar)> = vec![(base, coeff)];
        for (fi, f) in self.data.factors.iter().enumerate() {
            if let Factor::Weyl(_) = f {
                let off = self.data.factor_offset[fi];
                let (ax, ay) = (a.0[off], a.0[off + 1]);
                let (bx, by) = (b.0[off], b.0[off + 1]);
                let expansion = self.weyl_normal_yx(fi, ay, bx)?;
                let mut next = Vec::with_capacity(results.len() * expansion.len());
                for (mono, c) in &results {
                    for ((ex, ey), ec) in expansion.iter() {
                        let mut m2 = mono.clone();
                        m2.0[off] = ax + ex;
                        m2.0[off + 1] = ey + by;
                        next.push((m2, c.mul(ec)?));
                    }
                }
                results = next;
            }
        }
        let mut out: BTreeMap<Monomial, CycloScalar> = BTreeMap::new();
        for (m, c) in results {
            let entry = out.entry(m).or_insert_with(|| CycloScalar::zero(self.data.order));
            *entry = entry.add(&c)?;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

/// An element in normal form: a finite sum of normal monomials with nonzero
/// cyclotomic coefficients.
#[derive(Clone, Debug)]
pub struct NormalElement {
    ring: Ring,
    terms: BTreeMap<Monomial, CycloScalar>,
}

impl PartialEq for NormalElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_ring(&other.ring) && self.terms == other.terms
    }
}
impl Eq for NormalElement {}

impl NormalElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic order; double-ended, so the
    /// leading (greatest) term is `terms().next_back()`.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &CycloScalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&CycloScalar> {
        self.terms.get(m)
    }

    /// Total degree (Weyl generators both have degree one). The zero
    /// element has no degree.
    pub fn degree(&self) -> Result<u64> {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .ok_or(Error::ZeroPolynomial)
    }

    fn check_same_ring(&self, other: &NormalElement) -> Result<()> {
        if !self.ring.same_ring(&other.ring) {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &NormalElement) -> Result<NormalElement> {
        self.check_same_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms
                .entry(m.clone())
                .or_insert_with(|| CycloScalar::zero(self.ring.order()));
            *entry = entry.add(c)?;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(NormalElement { ring: self.ring.clone(), terms })
    }

    pub fn neg(&self) -> NormalElement {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect();
        NormalElement { ring: self.ring.clone(), terms }
    }

    pub fn sub(&self, other: &NormalElement) -> Result<NormalElement> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &CycloScalar) -> Result<NormalElement> {
        if s.order() != self.ring.order() {
            return Err(Error::OrderMismatch { left: s.order(), right: self.ring.order() });
        }
        if s.is_zero() {
            return Ok(self.ring.zero_element());
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((m.clone(), c.mul(s)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(NormalElement { ring: self.ring.clone(), terms })
    }

    pub fn mul(&self, other: &NormalElement) -> Result<NormalElement> {
        self.check_same_ring(other)?;
        self.ring.require_torsion()?;
        let mut terms: BTreeMap<Monomial, CycloScalar> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca.mul(cb)?;
                for (m, pc) in self.ring.mul_monomials(ma, mb)? {
                    let entry = terms
                        .entry(m)
                        .or_insert_with(|| CycloScalar::zero(self.ring.order()));
                    *entry = entry.add(&c.mul(&pc)?)?;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(NormalElement { ring: self.ring.clone(), terms })
    }

    pub fn pow(&self, e: u32) -> Result<NormalElement> {
        let mut acc = self.ring.one_element();
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Element-level centrality: commutes with every generator.
    pub fn is_central(&self) -> Result<bool> {
        for i in 0..self.ring.gen_count() {
            let g = self.ring.generator_element(i)?;
            if g.mul(self)? != self.mul(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for NormalElement {
    /// Terms in descending lexicographic monomial order, e.g.
    /// `x1^2*x2 + (-1/2)*x2`. Composite scalars are parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.ring.generator_names();
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = display_monomial(m, names);
            let cs = c.to_string();
            if mono == "1" {
                if cs.contains(' ') {
                    write!(f, "({cs})")?;
                } else {
                    write!(f, "{cs}")?;
                }
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else if cs.contains(' ') {
                write!(f, "({cs})*{mono}")?;
            } else {
                write!(f, "{cs}*{mono}")?;
            }
        }
        Ok(())
    }
}

pub fn display_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_bigint::BigInt;

    pub(crate) fn quantum_plane_minus_one() -> Ring {
        Ring::skew(SkewPresentation::uniform(2, 2, 1))
    }

    fn mono(v: &[u32]) -> Monomial {
        Monomial(v.to_vec())
    }

    #[test]
    fn defining_relation_of_the_quantum_plane() {
        // x2 * x1 = q * x1 * x2 with q of order 4.
        let ring = Ring::skew(SkewPresentation::uniform(2, 4, 1));
        let x1 = ring.generator_element(0).unwrap();
        let x2 = ring.generator_element(1).unwrap();
        let lhs = x2.mul(&x1).unwrap();
        let q = CycloScalar::root_power(4, 1);
        let rhs = x1.mul(&x2).unwrap().scale(&q).unwrap();
        assert_eq!(lhs, rhs);
        // Exponent form of the same fact.
        let s = ring.commutation_scalar(&mono(&[0, 1]), &mono(&[1, 0])).unwrap();
        assert_eq!(s.torsion(), 1);
        let s = ring.commutation_scalar(&mono(&[1, 0]), &mono(&[0, 1])).unwrap();
        assert!(s.is_identity());
    }

    #[test]
    fn square_of_x1x2_at_minus_one() {
        // (x1 x2)^2 = -x1^2 x2^2 when x2 x1 = -x1 x2.
        let ring = quantum_plane_minus_one();
        let u = ring.monomial_element(&mono(&[1, 1])).unwrap();
        let sq = u.mul(&u).unwrap();
        let expected = ring
            .monomial_element(&mono(&[2, 2]))
            .unwrap()
            .scale(&CycloScalar::from_integer(2, -1))
            .unwrap();
        assert_eq!(sq, expected);
        let s = ring.commutation_scalar(&mono(&[1, 1]), &mono(&[1, 1])).unwrap();
        assert_eq!(s.torsion(), 1, "scalar is -1");
    }

    #[test]
    fn swap_scalars_are_antisymmetric() {
        let ring = Ring::skew(SkewPresentation::uniform(3, 6, 1));
        let a = mono(&[2, 0, 1]);
        let b = mono(&[1, 3, 0]);
        let s = ring.swap_scalar(&a, &b).unwrap();
        let t = ring.swap_scalar(&b, &a).unwrap();
        assert!(s.combine(&t).unwrap().is_identity());
    }

    #[test]
    fn weyl_single_swap_with_q_minus_one() {
        // With xy - q yx - 1 = 0 and q = -1: y x = -x y + 1.
        let ring = Ring::weyl(WeylPresentation::standard(2, 1, WeylOrientation::XyQyx).unwrap());
        let x = ring.generator_element(0).unwrap();
        let y = ring.generator_element(1).unwrap();
        let yx = y.mul(&x).unwrap();
        let expected = ring
            .element_from_terms(vec![
                (mono(&[1, 1]), CycloScalar::from_integer(2, -1)),
                (mono(&[0, 0]), CycloScalar::one(2)),
            ])
            .unwrap();
        assert_eq!(yx, expected);
    }

    #[test]
    fn weyl_flipped_orientation_swap() {
        // With yx - q xy - 1 = 0: y x = q x y + 1.
        let ring = Ring::weyl(WeylPresentation::standard(3, 1, WeylOrientation::YxQxy).unwrap());
        let x = ring.generator_element(0).unwrap();
        let y = ring.generator_element(1).unwrap();
        let yx = y.mul(&x).unwrap();
        let expected = ring
            .element_from_terms(vec![
                (mono(&[1, 1]), CycloScalar::root_power(3, 1)),
                (mono(&[0, 0]), CycloScalar::one(3)),
            ])
            .unwrap();
        assert_eq!(yx, expected);
    }

    #[test]
    fn weyl_defining_relation_holds_in_normal_form() {
        for (order, torsion) in [(2, 1), (3, 1), (4, 1), (6, 5)] {
            let ring =
                Ring::weyl(WeylPresentation::standard(order, torsion, WeylOrientation::XyQyx).unwrap());
            let x = ring.generator_element(0).unwrap();
            let y = ring.generator_element(1).unwrap();
            let q = CycloScalar::root_power(order, torsion);
            // xy - q yx - 1 = 0.
            let lhs = x
                .mul(&y)
                .unwrap()
                .sub(&y.mul(&x).unwrap().scale(&q).unwrap())
                .unwrap()
                .sub(&ring.one_element())
                .unwrap();
            assert!(lhs.is_zero(), "relation violated for q of order {order}");
        }
    }

    #[test]
    fn degree_is_additive_and_zero_has_none() {
        let ring = Ring::weyl(WeylPresentation::standard(3, 1, WeylOrientation::XyQyx).unwrap());
        let u = ring.monomial_element(&mono(&[2, 1])).unwrap();
        let v = ring.monomial_element(&mono(&[1, 3])).unwrap();
        let uv = u.mul(&v).unwrap();
        assert_eq!(uv.degree().unwrap(), u.degree().unwrap() + v.degree().unwrap());
        assert!(matches!(ring.zero_element().degree(), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn tensor_unifies_orders_and_rejects_name_collisions() {
        let a = Ring::skew(SkewPresentation::uniform(2, 2, 1));
        let b = Ring::weyl(WeylPresentation::standard(3, 1, WeylOrientation::XyQyx).unwrap());
        let t = Ring::tensor(vec![a.clone(), b]).unwrap();
        assert_eq!(t.order(), 6);
        assert_eq!(t.gen_count(), 4);
        // Cross-factor generators commute on the nose.
        let x1 = t.generator_element(0).unwrap();
        let y = t.generator_element(3).unwrap();
        assert_eq!(x1.mul(&y).unwrap(), y.mul(&x1).unwrap());
        // Same names twice collide.
        assert!(Ring::tensor(vec![a.clone(), a.clone()]).is_err());
    }

    #[test]
    fn free_parameters_reject_element_arithmetic() {
        let ring = Ring::skew(SkewPresentation::uniform_generic(2));
        let x1 = ring.generator_element(0).unwrap();
        let x2 = ring.generator_element(1).unwrap();
        assert!(matches!(x2.mul(&x1), Err(Error::FreeParameter(_))));
        // Exponent-level data still works.
        let s = ring.commutation_scalar(&mono(&[0, 1]), &mono(&[1, 0])).unwrap();
        assert_eq!(s.free(), &[1]);
    }

    #[test]
    fn monomial_centrality_matches_element_centrality() {
        let ring = quantum_plane_minus_one();
        for exps in [[0u32, 0], [1, 0], [2, 0], [1, 1], [2, 2], [2, 1], [0, 2]] {
            let m = mono(&exps);
            let expo = ring.monomial_is_central(&m).unwrap();
            let elem = ring.monomial_element(&m).unwrap().is_central().unwrap();
            assert_eq!(expo, elem, "disagreement at {exps:?}");
        }
        let weyl = Ring::weyl(WeylPresentation::standard(2, 1, WeylOrientation::XyQyx).unwrap());
        assert!(weyl.monomial_is_central(&mono(&[2, 0])).unwrap());
        assert!(weyl.monomial_is_central(&mono(&[2, 2])).unwrap());
        assert!(!weyl.monomial_is_central(&mono(&[1, 2])).unwrap());
        assert!(weyl
            .monomial_element(&mono(&[2, 2]))
            .unwrap()
            .is_central()
            .unwrap());
    }

    #[test]
    fn presentation_validation() {
        let q = ParamExponent::new(2, vec![], 1);
        // Derived entries are rejected.
        assert!(SkewPresentation::new(
            vec!["x1".into(), "x2".into()],
            2,
            0,
            vec![(1, 0, q.clone())],
        )
        .is_err());
        // Duplicates are rejected.
        assert!(SkewPresentation::new(
            vec!["x1".into(), "x2".into()],
            2,
            0,
            vec![(0, 1, q.clone()), (0, 1, q.clone())],
        )
        .is_err());
        // q = 1 is not a Weyl parameter.
        assert!(WeylPresentation::standard(2, 0, WeylOrientation::XyQyx).is_err());
        // Free parts are rejected for Weyl.
        let free_q = ParamExponent::new(2, vec![1], 1);
        assert!(WeylPresentation::new("x".into(), "y".into(), free_q, WeylOrientation::XyQyx)
            .is_err());
    }

    #[test]
    fn element_display_is_readable() {
        let ring = quantum_plane_minus_one();
        let e = ring
            .element_from_terms(vec![
                (mono(&[2, 1]), CycloScalar::one(2)),
                (
                    mono(&[0, 1]),
                    CycloScalar::from_rational(
                        2,
                        Rational::new(BigInt::from(-1), BigInt::from(2)),
                    ),
                ),
            ])
            .unwrap();
        assert_eq!(e.to_string(), "x1^2*x2 + -1/2*x2");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Deterministically derive a small element from seed bytes.
        fn element_from_seed(ring: &Ring, seed: &[u8]) -> NormalElement {
            let n = ring.gen_count();
            let mut entries = Vec::new();
            for (t, &s) in seed.iter().enumerate() {
                let exps: Vec<u32> = (0..n).map(|i| ((s as usize + i + t) % 3) as u32).collect();
                let c = CycloScalar::from_integer(ring.order(), (s % 7) as i64 - 3);
                entries.push((Monomial(exps), c));
            }
            entries.push((Monomial::one(n), CycloScalar::one(ring.order())));
            ring.element_from_terms(entries).expect("valid element")
        }

        fn rings_under_test() -> Vec<Ring> {
            vec![
                Ring::skew(SkewPresentation::uniform(2, 2, 1)),
                Ring::skew(SkewPresentation::uniform(3, 3, 1)),
                Ring::weyl(WeylPresentation::standard(2, 1, WeylOrientation::XyQyx).unwrap()),
                Ring::tensor(vec![
                    Ring::skew(SkewPresentation::uniform(2, 2, 1)),
                    Ring::weyl(WeylPresentation::standard(2, 1, WeylOrientation::XyQyx).unwrap()),
                ])
                .unwrap(),
            ]
        }

        proptest! {
            #[test]
            fn multiplication_is_associative(idx in 0usize..4, seed in proptest::array::uniform3(0u8..)) {
                let ring = rings_under_test().swap_remove(idx);
                let a = element_from_seed(&ring, &seed[0..1]);
                let b = element_from_seed(&ring, &seed[1..2]);
                let c = element_from_seed(&ring, &seed[2..3]);
                let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
                let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn multiplication_distributes(idx in 0usize..4, seed in proptest::array::uniform3(0u8..)) {
                let ring = rings_under_test().swap_remove(idx);
                let a = element_from_seed(&ring, &seed[0..1]);
                let b = element_from_seed(&ring, &seed[1..2]);
                let c = element_from_seed(&ring, &seed[2..3]);
                let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
                let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn degree_is_additive_on_monomial_products(idx in 0usize..4, exps in proptest::array::uniform4(0u32..3)) {
                let ring = rings_under_test().swap_remove(idx);
                let n = ring.gen_count();
                let a = Monomial((0..n).map(|i| exps[i % 4]).collect());
                let b = Monomial((0..n).map(|i| exps[(i + 1) % 4]).collect());
                let u = ring.monomial_element(&a).unwrap();
                let v = ring.monomial_element(&b).unwrap();
                let p = u.mul(&v).unwrap();
                // Leading terms cannot cancel, so the product of nonzero
                // monomial elements is nonzero of additive degree.
                prop_assert_eq!(p.degree().unwrap(), a.total_degree() + b.total_degree());
            }
        }
    }
}
