//! Integer linear algebra: Hermite and Smith normal forms with unimodular
//! transforms, integer lattices, and mixed congruence systems.
//!
//! Everything runs over arbitrary-precision integers; there is no modular
//! shortcut anywhere, so results are exact for any input size. Pivot
//! selection is deterministic (minimal absolute value, ties broken by the
//! lowest row and then column index), which keeps every downstream artifact
//! byte-reproducible.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense matrix of arbitrary-precision integers, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*v));
            }
        }
        m
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> IntMatrix {
        let r = rows.len();
        let mut m = IntMatrix::zeros(r, cols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        (0..self.cols).map(|c| self.get(r, c).clone()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    pub fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }

    /// row[target] -= factor * row[source]
    pub fn row_sub_mul(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(target, c) - factor * self.get(source, c);
            self.set(target, c, v);
        }
    }

    /// col[target] -= factor * col[source]
    pub fn col_sub_mul(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.get(r, target) - factor * self.get(r, source);
            self.set(r, target, v);
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination; used for
    /// unimodularity audits in tests and for lattice indices.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&r| !m.get(r, k).is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(k, k) * m.get(i, j) - m.get(i, k) * m.get(k, j))
                        .div_floor(&prev);
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1).clone()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Row-style Hermite normal form `U * M = H` with `U` unimodular: pivots
/// positive, zeros below each pivot, entries above a pivot reduced into
/// `[0, pivot)`, pivot columns strictly increasing.
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
}

/// Pivot choice shared by both normal forms: the entry of minimal absolute
/// value, ties broken by the lowest row index (then column index for the
/// Smith search).
fn select_pivot_in_col(m: &IntMatrix, col: usize, from_row: usize) -> Option<usize> {
    let mut best: Option<(BigInt, usize)> = None;
    for r in from_row..m.rows() {
        let v = m.get(r, col);
        if v.is_zero() {
            continue;
        }
        let a = v.abs();
        match &best {
            Some((cur, _)) if *cur <= a => {}
            _ => best = Some((a, r)),
        }
    }
    best.map(|(_, r)| r)
}

pub fn hermite_form(m: &IntMatrix) -> HermiteForm {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut prow = 0;
    for col in 0..h.cols() {
        if prow == h.rows() {
            break;
        }
        if select_pivot_in_col(&h, col, prow).is_none() {
            continue;
        }
        // Euclidean elimination below the pivot row.
        loop {
            let pr = match select_pivot_in_col(&h, col, prow) {
                Some(r) => r,
                None => unreachable!("column had a nonzero entry"),
            };
            h.swap_rows(prow, pr);
            u.swap_rows(prow, pr);
            if h.get(prow, col).is_negative() {
                h.negate_row(prow);
                u.negate_row(prow);
            }
            let pivot = h.get(prow, col).clone();
            let mut clean = true;
            for r in prow + 1..h.rows() {
                if h.get(r, col).is_zero() {
                    continue;
                }
                let q = h.get(r, col).div_floor(&pivot);
                h.row_sub_mul(r, prow, &q);
                u.row_sub_mul(r, prow, &q);
                if !h.get(r, col).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        // Reduce the entries above the pivot into [0, pivot).
        let pivot = h.get(prow, col).clone();
        for r in 0..prow {
            let q = h.get(r, col).div_floor(&pivot);
            h.row_sub_mul(r, prow, &q);
            u.row_sub_mul(r, prow, &q);
        }
        prow += 1;
    }
    HermiteForm { h, u, rank: prow }
}

/// Smith normal form `U * M * V = D` with both transforms unimodular,
/// `D` diagonal with nonnegative entries and `d_1 | d_2 | ...`.
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

fn select_pivot_in_block(m: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for r in from..m.rows() {
        for c in from..m.cols() {
            let v = m.get(r, c);
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            match &best {
                Some((cur, _, _)) if *cur <= a => {}
                _ => best = Some((a, r, c)),
            }
        }
    }
    best.map(|(_, r, c)| (r, c))
}

pub fn smith_form(m: &IntMatrix) -> SmithForm {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    let limit = m.rows().min(m.cols());
    let mut t = 0;
    while t < limit {
        if select_pivot_in_block(&d, t).is_none() {
            break;
        }
        loop {
            let (pr, pc) = select_pivot_in_block(&d, t).expect("block has a nonzero entry");
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);
            if d.get(t, t).is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            let pivot = d.get(t, t).clone();
            let mut clean = true;
            for r in t + 1..d.rows() {
                if d.get(r, t).is_zero() {
                    continue;
                }
                let q = d.get(r, t).div_floor(&pivot);
                d.row_sub_mul(r, t, &q);
                u.row_sub_mul(r, t, &q);
                if !d.get(r, t).is_zero() {
                    clean = false;
                }
            }
            for c in t + 1..d.cols() {
                if d.get(t, c).is_zero() {
                    continue;
                }
                let q = d.get(t, c).div_floor(&pivot);
                d.col_sub_mul(c, t, &q);
                v.col_sub_mul(c, t, &q);
                if !d.get(t, c).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Enforce the divisibility chain: fold an offending row into
            // row t and keep reducing; the pivot strictly shrinks.
            let pivot = d.get(t, t).clone();
            let offender = (t + 1..d.rows()).find(|&r| {
                (t + 1..d.cols()).any(|c| !d.get(r, c).mod_floor(&pivot).is_zero())
            });
            match offender {
                Some(r) => {
                    let one = BigInt::from(-1);
                    d.row_sub_mul(t, r, &one);
                    u.row_sub_mul(t, r, &one);
                }
                None => break,
            }
        }
        t += 1;
    }
    SmithForm { d, u, v, rank: t }
}

/// A subgroup of `Z^n`, stored by its canonical Hermite basis (zero rows
/// stripped), so equal lattices compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    ambient: usize,
    basis: Vec<Vec<BigInt>>,
}

/// Module index of a lattice inside its ambient `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

impl IntegerLattice {
    pub fn from_generators(ambient: usize, generators: Vec<Vec<BigInt>>) -> IntegerLattice {
        for g in &generators {
            assert_eq!(g.len(), ambient, "generator has wrong dimension");
        }
        let m = IntMatrix::from_big_rows(generators, ambient);
        let hf = hermite_form(&m);
        let basis = (0..hf.rank).map(|r| hf.h.row(r)).collect();
        IntegerLattice { ambient, basis }
    }

    pub fn zero(ambient: usize) -> IntegerLattice {
        IntegerLattice { ambient, basis: vec![] }
    }

    pub fn full(ambient: usize) -> IntegerLattice {
        let gens = (0..ambient)
            .map(|i| {
                let mut v = vec![BigInt::zero(); ambient];
                v[i] = BigInt::one();
                v
            })
            .collect();
        IntegerLattice::from_generators(ambient, gens)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Membership by reduction against the Hermite basis: pivot columns are
    /// strictly increasing, so a single sweep decides exactly.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector has wrong dimension");
        let mut rem: Vec<BigInt> = v.to_vec();
        for row in &self.basis {
            let pcol = row.iter().position(|x| !x.is_zero()).expect("no zero rows in basis");
            if rem[pcol].is_zero() {
                continue;
            }
            let (q, r) = rem[pcol].div_mod_floor(&row[pcol]);
            if !r.is_zero() {
                return false;
            }
            for (i, x) in row.iter().enumerate() {
                rem[i] -= &q * x;
            }
        }
        rem.iter().all(|x| x.is_zero())
    }

    /// Block direct sum: `self` on the first coordinates, `other` on the rest.
    pub fn direct_sum(&self, other: &IntegerLattice) -> IntegerLattice {
        let ambient = self.ambient + other.ambient;
        let mut gens = Vec::new();
        for row in &self.basis {
            let mut v = row.clone();
            v.extend(vec![BigInt::zero(); other.ambient]);
            gens.push(v);
        }
        for row in &other.basis {
            let mut v = vec![BigInt::zero(); self.ambient];
            v.extend(row.iter().cloned());
            gens.push(v);
        }
        IntegerLattice::from_generators(ambient, gens)
    }

    /// `[Z^n : L]`, finite exactly when the lattice has full rank; computed
    /// as the product of the nonzero Smith diagonal entries of the basis.
    pub fn index_in_ambient(&self) -> LatticeIndex {
        if self.rank() < self.ambient {
            return LatticeIndex::Infinite;
        }
        let m = IntMatrix::from_big_rows(self.basis.clone(), self.ambient);
        let sf = smith_form(&m);
        let mut idx = BigInt::one();
        for i in 0..sf.rank {
            idx *= sf.d.get(i, i);
        }
        LatticeIndex::Finite(idx)
    }

    /// Per-coordinate gcd of all lattice vectors (0 for a coordinate on
    /// which the lattice vanishes identically).
    pub fn coordinate_gcds(&self) -> Vec<BigInt> {
        let mut g = vec![BigInt::zero(); self.ambient];
        for row in &self.basis {
            for (i, x) in row.iter().enumerate() {
                g[i] = g[i].gcd(x);
            }
        }
        g
    }

    /// Search for a nonzero vector with all coordinates `>= 0`.
    ///
    /// The full-rank case always resolves instantly: a full-rank Hermite
    /// basis is entrywise nonnegative, so its first row is a witness. In
    /// rank-deficient cases the search enumerates integer combinations with
    /// coefficients bounded by `max_coeff` (default: three times the largest
    /// Hermite pivot); exhausting the bound reports "none found", which is a
    /// complete answer for every ring family handled here because their
    /// deficient lattices are one- or two-dimensional with sign-mixed
    /// generators. Blowing past the combinatorial budget is an error rather
    /// than a silent wrong answer.
    pub fn nonneg_witness(&self, max_coeff: Option<u64>) -> Result<Option<Vec<BigInt>>> {
        // Quick pass: any basis row or its negation already nonnegative.
        for row in &self.basis {
            if row.iter().all(|x| !x.is_negative()) {
                return Ok(Some(row.clone()));
            }
            if row.iter().all(|x| !x.is_positive()) {
                return Ok(Some(row.iter().map(|x| -x).collect()));
            }
        }
        self.combination_witness(max_coeff, |v| {
            v.iter().all(|x| !x.is_negative()) && v.iter().any(|x| !x.is_zero())
        })
    }

    /// Search for a vector with every coordinate `>= 1`. Used as a duality
    /// certificate: a strictly positive vector orthogonal to a lattice `L`
    /// proves that `L` meets the nonnegative orthant only in `0`.
    pub fn strictly_positive_witness(&self, max_coeff: Option<u64>) -> Result<Option<Vec<BigInt>>> {
        if self.ambient == 0 {
            return Ok(Some(Vec::new()));
        }
        for row in &self.basis {
            if row.iter().all(|x| x.is_positive()) {
                return Ok(Some(row.clone()));
            }
            if row.iter().all(|x| x.is_negative()) {
                return Ok(Some(row.iter().map(|x| -x).collect()));
            }
        }
        self.combination_witness(max_coeff, |v| v.iter().all(|x| x.is_positive()))
    }

    /// Bounded odometer over integer combinations of the basis, returning
    /// the first combination accepted by `accept`.
    fn combination_witness<F>(&self, max_coeff: Option<u64>, accept: F) -> Result<Option<Vec<BigInt>>>
    where
        F: Fn(&[BigInt]) -> bool,
    {
        let rank = self.rank();
        if rank == 0 {
            return Ok(None);
        }
        let max_pivot = self
            .basis
            .iter()
            .map(|row| row.iter().find(|x| !x.is_zero()).expect("nonzero row").abs())
            .max()
            .expect("nonempty basis");
        let bound = match max_coeff {
            Some(b) => BigInt::from(b),
            None => BigInt::from(3) * max_pivot,
        };
        let width = BigInt::from(2) * &bound + 1u8;
        let mut total = BigInt::one();
        for _ in 0..rank {
            total *= &width;
        }
        if total > BigInt::from(10_000_000u64) {
            return Err(Error::BoundExceeded(format!(
                "lattice-vector search over {total} coefficient combinations"
            )));
        }
        let b = i64::try_from(&bound).expect("bound fits i64 after budget check");
        let mut coeffs = vec![-b; rank];
        loop {
            if coeffs.iter().any(|&c| c != 0) {
                let mut v = vec![BigInt::zero(); self.ambient];
                for (c, row) in coeffs.iter().zip(&self.basis) {
                    if *c != 0 {
                        let cb = BigInt::from(*c);
                        for (i, x) in row.iter().enumerate() {
                            v[i] += &cb * x;
                        }
                    }
                }
                if accept(&v) {
                    return Ok(Some(v));
                }
            }
            // Odometer step.
            let mut k = 0;
            loop {
                if k == rank {
                    return Ok(None);
                }
                coeffs[k] += 1;
                if coeffs[k] <= b {
                    break;
                }
                coeffs[k] = -b;
                k += 1;
            }
        }
    }

    /// The lattice `{c : v . c = 0 for all v in self}`, from the Smith
    /// decomposition of the basis matrix.
    pub fn orthogonal_complement(&self) -> IntegerLattice {
        if self.rank() == 0 {
            return IntegerLattice::full(self.ambient);
        }
        let m = IntMatrix::from_big_rows(self.basis.clone(), self.ambient);
        let sf = smith_form(&m);
        // U M V = D, so M c = 0 iff D (V^-1 c) = 0: the kernel is spanned by
        // the columns of V past the rank.
        let mut gens = Vec::new();
        for c in sf.rank..self.ambient {
            let mut v = Vec::with_capacity(self.ambient);
            for r in 0..self.ambient {
                v.push(sf.v.get(r, c).clone());
            }
            gens.push(v);
        }
        IntegerLattice::from_generators(self.ambient, gens)
    }
}

/// A system of integer-linear conditions `row_i . d ~ rhs_i`, where `~` is
/// equality over `Z` when `moduli[i] == 0` and congruence mod `moduli[i]`
/// otherwise. All rows share one unknown vector `d` of length `vars()`.
#[derive(Clone, Debug)]
pub struct CongruenceSystem {
    pub coeffs: IntMatrix,
    pub rhs: Vec<BigInt>,
    pub moduli: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Unsolvable,
    Solvable {
        /// One integer solution (not necessarily nonnegative).
        particular: Vec<BigInt>,
        /// Lattice of homogeneous solutions in the original variables.
        kernel: IntegerLattice,
    },
}

impl CongruenceSystem {
    pub fn new(coeffs: IntMatrix, rhs: Vec<BigInt>, moduli: Vec<u64>) -> Result<CongruenceSystem> {
        if coeffs.rows() != rhs.len() || coeffs.rows() != moduli.len() {
            return Err(Error::Input(format!(
                "congruence system shape mismatch: {} rows, {} rhs, {} moduli",
                coeffs.rows(),
                rhs.len(),
                moduli.len()
            )));
        }
        Ok(CongruenceSystem { coeffs, rhs, moduli })
    }

    pub fn vars(&self) -> usize {
        self.coeffs.cols()
    }

    /// Decide solvability and describe the full solution set.
    ///
    /// Each modular row gains a slack column carrying its modulus, turning
    /// the system into exact equations `A' * z = b` over `Z`; Smith reduction
    /// then gives a particular solution and the homogeneous kernel, which is
    /// projected back onto the original variables.
    pub fn solve(&self) -> SolveOutcome {
        let s = self.coeffs.rows();
        let t = self.coeffs.cols();
        let slack: Vec<usize> = (0..s).filter(|&i| self.moduli[i] > 0).collect();
        let width = t + slack.len();
        let mut aug = IntMatrix::zeros(s, width);
        for r in 0..s {
            for c in 0..t {
                aug.set(r, c, self.coeffs.get(r, c).clone());
            }
        }
        for (k, &r) in slack.iter().enumerate() {
            aug.set(r, t + k, BigInt::from(self.moduli[r]));
        }
        let sf = smith_form(&aug);
        let bp = sf.u.mul_vec(&self.rhs);
        let mut y = vec![BigInt::zero(); width];
        for i in 0..s {
            if i < sf.rank {
                let (q, r) = bp[i].div_mod_floor(sf.d.get(i, i));
                if !r.is_zero() {
                    return SolveOutcome::Unsolvable;
                }
                y[i] = q;
            } else if !bp[i].is_zero() {
                return SolveOutcome::Unsolvable;
            }
        }
        let z = sf.v.mul_vec(&y);
        let particular = z[..t].to_vec();
        let kernel_gens: Vec<Vec<BigInt>> = (sf.rank..width)
            .map(|j| (0..t).map(|i| sf.v.get(i, j).clone()).collect())
            .collect();
        let kernel = IntegerLattice::from_generators(t, kernel_gens);
        SolveOutcome::Solvable { particular, kernel }
    }
}
