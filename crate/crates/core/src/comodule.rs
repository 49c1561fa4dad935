//! Finite-dimensional right comodules over the coordinate coalgebras of
//! `G_a`, `U_N`, their Frobenius kernels, and `N x N` matrices.
//!
//! A comodule of dimension `n` is stored as an `n x n` matrix of polynomials
//! `f_{ji}` with `Δ(e_i) = Σ_j e_j ⊗ f_{ji}`: column `i` describes the
//! coaction on the `i`-th basis vector.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::linalg::{Matrix, Subspace};
use crate::poly::{Monomial, MultiPoly, PolyMatrix, TensorPoly, Var, VarKind};

/// Which coordinate coalgebra a comodule lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoalgebraId {
    /// `k[T]`
    GaPoly,
    /// `k[T]/T^{p^r}`
    GaTrunc(u32),
    /// `k[x_{ij} : i < j]`
    UNPoly(usize),
    /// `k[x_{ij}]/(x_{ij}^{p^r})`
    UNTrunc(usize, u32),
    /// polynomial functions on all `N x N` matrices
    MatPoly(usize),
}

impl fmt::Display for CoalgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoalgebraId::GaPoly => write!(f, "k[G_a]"),
            CoalgebraId::GaTrunc(r) => write!(f, "k[G_a({r})]"),
            CoalgebraId::UNPoly(n) => write!(f, "k[U_{n}]"),
            CoalgebraId::UNTrunc(n, r) => write!(f, "k[U_{n}({r})]"),
            CoalgebraId::MatPoly(n) => write!(f, "k[M_{n}]"),
        }
    }
}

/// All monomials in `gens` of total degree at most `max_deg`, optionally
/// with every exponent below `exp_bound`. Returned in graded order.
pub fn monomials_up_to(gens: &[Var], max_deg: u32, exp_bound: Option<u64>) -> Vec<Monomial> {
    fn rec(
        gens: &[Var],
        idx: usize,
        left: u32,
        bound: u64,
        cur: &mut Vec<(Var, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if idx == gens.len() {
            out.push(Monomial::from_pairs(cur.iter().copied()));
            return;
        }
        let top = (left as u64).min(bound.saturating_sub(1)) as u32;
        for e in 0..=top {
            cur.push((gens[idx], e));
            rec(gens, idx + 1, left - e, bound, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        gens,
        0,
        max_deg,
        exp_bound.unwrap_or(u64::MAX),
        &mut Vec::new(),
        &mut out,
    );
    out.sort();
    out
}

impl CoalgebraId {
    pub fn check(&self) -> Result<()> {
        match *self {
            CoalgebraId::GaTrunc(0) | CoalgebraId::UNTrunc(_, 0) => {
                Err(Error::Precondition("Frobenius kernel height must be >= 1".into()))
            }
            CoalgebraId::UNPoly(n) | CoalgebraId::UNTrunc(n, _) | CoalgebraId::MatPoly(n)
                if n < 2 =>
            {
                Err(Error::Precondition(format!("N must be >= 2 (got {n})")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self, CoalgebraId::GaTrunc(_) | CoalgebraId::UNTrunc(..))
    }

    /// The polynomial coalgebra this one is a quotient of (itself if untruncated).
    pub fn untruncated(&self) -> CoalgebraId {
        match *self {
            CoalgebraId::GaTrunc(_) => CoalgebraId::GaPoly,
            CoalgebraId::UNTrunc(n, _) => CoalgebraId::UNPoly(n),
            other => other,
        }
    }

    pub fn height(&self) -> Option<u32> {
        match *self {
            CoalgebraId::GaTrunc(r) | CoalgebraId::UNTrunc(_, r) => Some(r),
            _ => None,
        }
    }

    /// `p^r` for truncated ids.
    pub fn exponent_bound(&self, field: &PrimeField) -> Option<u64> {
        self.height().map(|r| (field.p() as u64).pow(r))
    }

    /// Dimension of the dual (group) algebra for truncated ids.
    pub fn dual_algebra_dim(&self, field: &PrimeField) -> Option<u64> {
        let bound = self.exponent_bound(field)?;
        Some(bound.pow(self.generators().len() as u32))
    }

    pub fn generators(&self) -> Vec<Var> {
        match *self {
            CoalgebraId::GaPoly | CoalgebraId::GaTrunc(_) => vec![Var::T],
            CoalgebraId::UNPoly(n) | CoalgebraId::UNTrunc(n, _) => (1..=n)
                .flat_map(|i| (i + 1..=n).map(move |j| Var::x(i, j)))
                .collect(),
            CoalgebraId::MatPoly(n) => (1..=n)
                .flat_map(|i| (1..=n).map(move |j| Var::x(i, j)))
                .collect(),
        }
    }

    pub fn has_var(&self, v: Var) -> bool {
        v.copy == 0 && self.generators().contains(&v)
    }

    /// Whether `m` is a basis monomial of the coalgebra.
    pub fn contains_monomial(&self, m: &Monomial, field: &PrimeField) -> bool {
        let bound = self.exponent_bound(field);
        m.pairs()
            .iter()
            .all(|&(v, e)| self.has_var(v) && bound.is_none_or(|b| (e as u64) < b))
    }

    pub fn contains(&self, f: &MultiPoly) -> bool {
        f.terms().all(|(m, _)| self.contains_monomial(m, f.field()))
    }

    /// Value of each generator at the identity.
    pub fn counit_point(&self, field: &PrimeField) -> BTreeMap<Var, Scalar> {
        let _ = field;
        self.generators()
            .into_iter()
            .map(|v| {
                let val = match (self, v.kind) {
                    (CoalgebraId::MatPoly(_), VarKind::X) if v.i == v.j => 1,
                    _ => 0,
                };
                (v, val)
            })
            .collect()
    }

    pub fn counit(&self, f: &MultiPoly) -> Result<Scalar> {
        f.eval_at(&self.counit_point(f.field()))
    }

    /// Drops monomials that vanish in the truncated quotient (any copy).
    pub fn reduce(&self, f: &MultiPoly) -> MultiPoly {
        match self.exponent_bound(f.field()) {
            None => f.clone(),
            Some(b) => f.retain_terms(|m| m.pairs().iter().all(|&(_, e)| (e as u64) < b)),
        }
    }

    fn generator_coproduct(&self, v: Var, field: &PrimeField) -> MultiPoly {
        let x = |i: usize, j: usize, c: u8| MultiPoly::var(field, Var::x(i, j).with_copy(c));
        match *self {
            CoalgebraId::GaPoly | CoalgebraId::GaTrunc(_) => {
                MultiPoly::var(field, Var::T).add(&MultiPoly::var(field, Var::T.primed()))
            }
            CoalgebraId::UNPoly(_) | CoalgebraId::UNTrunc(..) => {
                let (i, j) = (v.i as usize, v.j as usize);
                let mut out = x(i, j, 0).add(&x(i, j, 1));
                for t in i + 1..j {
                    out = out.add(&x(i, t, 0).mul(&x(t, j, 1)));
                }
                out
            }
            CoalgebraId::MatPoly(n) => {
                let (i, j) = (v.i as usize, v.j as usize);
                (1..=n).fold(MultiPoly::zero(field), |acc, t| {
                    acc.add(&x(i, t, 0).mul(&x(t, j, 1)))
                })
            }
        }
    }

    /// `Δ(f)` in `C ⊗ C`; `f` must lie in the coalgebra.
    pub fn coproduct(&self, f: &MultiPoly) -> Result<TensorPoly> {
        let field = f.field();
        if let Some(v) = f.variables().into_iter().find(|&v| !self.has_var(v)) {
            return Err(Error::ForeignVariable {
                var: v.to_string(),
                context: self.to_string(),
            });
        }
        let assignment: BTreeMap<Var, MultiPoly> = self
            .generators()
            .into_iter()
            .map(|v| (v, self.generator_coproduct(v, field)))
            .collect();
        let image = f.substitute_partial(&assignment);
        TensorPoly::from_raw(self.reduce(&image))
    }

    /// Antipode on a polynomial (not available for matrix functions).
    pub fn antipode(&self, f: &MultiPoly) -> Result<MultiPoly> {
        let field = f.field();
        let assignment: BTreeMap<Var, MultiPoly> = match *self {
            CoalgebraId::GaPoly | CoalgebraId::GaTrunc(_) => {
                [(Var::T, MultiPoly::var(field, Var::T).neg())].into()
            }
            CoalgebraId::UNPoly(n) | CoalgebraId::UNTrunc(n, _) => {
                // inverse of the generic unipotent matrix I + X is sum_k (-X)^k
                let neg_x = PolyMatrix::from_fn(field, n, n, |i, j| {
                    if i < j {
                        MultiPoly::var(field, Var::x(i + 1, j + 1)).neg()
                    } else {
                        MultiPoly::zero(field)
                    }
                });
                let mut inv = PolyMatrix::identity(field, n);
                let mut power = PolyMatrix::identity(field, n);
                for _ in 1..n {
                    power = power.mul(&neg_x);
                    inv = inv.add(&power);
                }
                (1..=n)
                    .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
                    .map(|(i, j)| (Var::x(i, j), inv.get(i - 1, j - 1).clone()))
                    .collect()
            }
            CoalgebraId::MatPoly(_) => {
                return Err(Error::UnsupportedCoalgebra(format!("{self} has no antipode")))
            }
        };
        Ok(self.reduce(&f.substitute(&assignment)?))
    }

    /// Full monomial basis of a truncated coalgebra.
    pub fn truncated_basis(&self, field: &PrimeField) -> Result<Vec<Monomial>> {
        let bound = self
            .exponent_bound(field)
            .ok_or_else(|| Error::UnsupportedCoalgebra(format!("{self} is infinite-dimensional")))?;
        let gens = self.generators();
        let dim = self.dual_algebra_dim(field).unwrap_or(u64::MAX);
        if dim > 1_000_000 {
            return Err(Error::GuardExceeded(format!("dim {self} = {dim} > 10^6")));
        }
        let max_deg = (bound - 1) as u32 * gens.len() as u32;
        Ok(monomials_up_to(&gens, max_deg, Some(bound)))
    }
}

/// Why a coaction matrix fails to define a comodule. Basis indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    OutsideCoalgebra { basis: usize, row: usize, entry: String },
    Counit { basis: usize, row: usize },
    Coassociativity { basis: usize, row: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutsideCoalgebra { basis, row, entry } => write!(
                f,
                "coalgebra violation at basis {basis}: entry {row} ({entry}) is not in the coalgebra"
            ),
            Violation::Counit { basis, row } => {
                write!(f, "counit violation at basis {basis} (component {row})")
            }
            Violation::Coassociativity { basis, row } => {
                write!(f, "coassociativity violation at basis {basis} (component {row})")
            }
        }
    }
}

/// A finitely supported linear functional on the monomial basis of a coalgebra.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Functional(BTreeMap<Monomial, Scalar>);

impl Functional {
    pub fn new(values: BTreeMap<Monomial, Scalar>) -> Self {
        Functional(values.into_iter().filter(|&(_, c)| c != 0).collect())
    }

    /// The functional dual to a single monomial.
    pub fn dual_basis(m: Monomial) -> Self {
        Functional([(m, 1)].into())
    }

    /// The counit, restricted to the given monomials.
    pub fn counit_on(coalg: CoalgebraId, field: &PrimeField, monomials: &[Monomial]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for m in monomials {
            let v = coalg.counit(&MultiPoly::term(field, m.clone(), 1))?;
            values.insert(m.clone(), v);
        }
        Ok(Functional::new(values))
    }

    pub fn values(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.0
    }

    pub fn apply(&self, f: &MultiPoly) -> Scalar {
        let field = f.field();
        self.0.iter().fold(0, |acc, (m, &c)| {
            field.add(acc, field.mul(c, f.coefficient(m)))
        })
    }

    pub fn max_degree(&self) -> u32 {
        self.0.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Convolution product `(φ * ψ)(f) = (φ ⊗ ψ)(Δ f)`.
    pub fn convolve(&self, other: &Functional, coalg: CoalgebraId, field: &PrimeField) -> Result<Self> {
        let bound = self.max_degree() + other.max_degree();
        let candidates = monomials_up_to(&coalg.generators(), bound, coalg.exponent_bound(field));
        let mut values = BTreeMap::new();
        for m in candidates {
            let delta = coalg.coproduct(&MultiPoly::term(field, m.clone(), 1))?;
            let v = delta.split_terms().into_iter().fold(0, |acc, (c, l, r)| {
                let a = self.0.get(&l).copied().unwrap_or(0);
                let b = other.0.get(&r).copied().unwrap_or(0);
                field.add(acc, field.mul(c, field.mul(a, b)))
            });
            values.insert(m, v);
        }
        Ok(Functional::new(values))
    }
}

/// A subspace of a coalgebra, expressed in coordinates on a finite list of monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraSubspace {
    pub ambient: Vec<Monomial>,
    pub space: Subspace,
}

impl CoalgebraSubspace {
    /// The span of the given monomials.
    pub fn monomial_span(field: &PrimeField, monomials: Vec<Monomial>) -> Self {
        let n = monomials.len();
        CoalgebraSubspace {
            ambient: monomials,
            space: Subspace::full(field, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Coordinates of `f` on the ambient monomials, or `None` if `f` uses
    /// a monomial outside the ambient list.
    pub fn coordinates_of(&self, f: &MultiPoly) -> Option<Vec<Scalar>> {
        let index: BTreeMap<&Monomial, usize> =
            self.ambient.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![0; self.ambient.len()];
        for (m, c) in f.terms() {
            v[*index.get(m)?] = c;
        }
        Some(v)
    }

    pub fn contains(&self, f: &MultiPoly) -> bool {
        self.coordinates_of(f).is_some_and(|v| self.space.contains(&v))
    }

    /// Basis elements as polynomials.
    pub fn basis_polys(&self, field: &PrimeField) -> Vec<MultiPoly> {
        self.space
            .basis_vectors()
            .into_iter()
            .map(|v| {
                v.iter()
                    .zip(&self.ambient)
                    .fold(MultiPoly::zero(field), |acc, (&c, m)| {
                        acc.add(&MultiPoly::term(field, m.clone(), c))
                    })
            })
            .collect()
    }
}

/// Jordan type of a p-nilpotent operator: block sizes, largest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanType(pub Vec<usize>);

impl JordanType {
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Free over `k[t]/t^p` iff every block has size `p`.
    pub fn is_free(&self, p: u32) -> bool {
        self.0.iter().all(|&b| b == p as usize)
    }
}

impl fmt::Display for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Jordan block sizes of `theta`, from the ranks of its powers.
pub fn jordan_type(theta: &Matrix) -> Result<JordanType> {
    if !theta.is_square() {
        return Err(Error::DimensionMismatch("theta must be square".into()));
    }
    if !theta.is_p_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let n = theta.rows();
    let mut ranks = vec![n];
    let mut power = Matrix::identity(theta.field(), n);
    while *ranks.last().unwrap() > 0 {
        power = power.mul(theta);
        ranks.push(power.rank());
    }
    // blocks of size >= k: ranks[k-1] - ranks[k]
    let mut parts = Vec::new();
    for k in (1..ranks.len()).rev() {
        let at_least_k = ranks[k - 1] - ranks[k];
        let at_least_next = if k + 1 < ranks.len() { ranks[k] - ranks[k + 1] } else { 0 };
        parts.extend(std::iter::repeat_n(k, at_least_k - at_least_next));
    }
    Ok(JordanType(parts))
}

/// Outcome of the local-algebra freeness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFreeness {
    pub free: bool,
    pub dim_module: usize,
    pub dim_algebra: u64,
    pub top_dim: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Comodule {
    field: PrimeField,
    coalgebra: CoalgebraId,
    coaction: PolyMatrix,
}

impl Comodule {
    /// Wraps a coaction matrix without checking the comodule laws.
    pub fn new(coalgebra: CoalgebraId, coaction: PolyMatrix) -> Result<Self> {
        coalgebra.check()?;
        if coaction.rows() != coaction.cols() {
            return Err(Error::DimensionMismatch("coaction matrix must be square".into()));
        }
        Ok(Comodule {
            field: coaction.field().clone(),
            coalgebra,
            coaction,
        })
    }

    /// Like [`Comodule::new`], then runs [`Comodule::validate`].
    pub fn validated(coalgebra: CoalgebraId, coaction: PolyMatrix) -> Result<Self> {
        let m = Self::new(coalgebra, coaction)?;
        m.validate().map_err(Error::NotComodule)?;
        Ok(m)
    }

    pub fn trivial(field: &PrimeField, coalgebra: CoalgebraId, dim: usize) -> Self {
        Comodule {
            field: field.clone(),
            coalgebra,
            coaction: PolyMatrix::identity(field, dim),
        }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn coalgebra(&self) -> CoalgebraId {
        self.coalgebra
    }

    pub fn dim(&self) -> usize {
        self.coaction.rows()
    }

    pub fn coaction(&self) -> &PolyMatrix {
        &self.coaction
    }

    /// `f_{ji}`: the coefficient of `e_j` in `Δ(e_i)` (0-based).
    pub fn entry(&self, j: usize, i: usize) -> &MultiPoly {
        self.coaction.get(j, i)
    }

    pub fn max_coaction_degree(&self) -> u32 {
        self.coaction.max_total_degree()
    }

    /// Checks membership, the counit law and coassociativity, in that order.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.dim();
        let c = self.coalgebra;
        for i in 0..n {
            for j in 0..n {
                if !c.contains(self.entry(j, i)) {
                    return Err(Violation::OutsideCoalgebra {
                        basis: i + 1,
                        row: j + 1,
                        entry: self.entry(j, i).to_string(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let expected = u32::from(i == j);
                if c.counit(self.entry(j, i)).ok() != Some(expected) {
                    return Err(Violation::Counit { basis: i + 1, row: j + 1 });
                }
            }
        }
        let left: Vec<MultiPoly> = self.coaction.entries().iter().map(|f| f.to_copy(0)).collect();
        let right: Vec<MultiPoly> = self.coaction.entries().iter().map(|f| f.to_copy(1)).collect();
        for i in 0..n {
            for k in 0..n {
                let lhs = c
                    .coproduct(self.entry(k, i))
                    .map_err(|_| Violation::Coassociativity { basis: i + 1, row: k + 1 })?;
                let rhs = (0..n).fold(MultiPoly::zero(&self.field), |acc, j| {
                    let a = &left[k * n + j];
                    let b = &right[j * n + i];
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        acc.add(&a.mul(b))
                    }
                });
                if lhs.as_poly() != &c.reduce(&rhs) {
                    return Err(Violation::Coassociativity { basis: i + 1, row: k + 1 });
                }
            }
        }
        Ok(())
    }

    /// Every monomial occurring in some coaction entry.
    pub fn monomial_support(&self) -> BTreeSet<Monomial> {
        self.coaction
            .entries()
            .iter()
            .flat_map(|f| f.terms().map(|(m, _)| m.clone()))
            .collect()
    }

    /// Matrix of the functional dual to `m`: entry `(j, i)` is the coefficient of `m` in `f_{ji}`.
    pub fn coefficient_matrix(&self, m: &Monomial) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(&self.field, n, n, |j, i| self.entry(j, i).coefficient(m))
    }

    /// Matrix of `v ↦ (1 ⊗ φ) Δ(v)` in the standard basis.
    pub fn dual_action(&self, phi: &Functional) -> Result<Matrix> {
        if let Some(m) = phi
            .values()
            .keys()
            .find(|m| !self.coalgebra.contains_monomial(m, &self.field))
        {
            return Err(Error::ForeignVariable {
                var: m.to_string(),
                context: self.coalgebra.to_string(),
            });
        }
        let n = self.dim();
        Ok(Matrix::from_fn(&self.field, n, n, |j, i| phi.apply(self.entry(j, i))))
    }

    /// The coaction components `g_j` of `Δ(v) = Σ_j e_j ⊗ g_j`.
    pub fn coaction_of(&self, v: &[Scalar]) -> Vec<MultiPoly> {
        let n = self.dim();
        (0..n)
            .map(|j| {
                (0..n).fold(MultiPoly::zero(&self.field), |acc, i| {
                    if v[i] == 0 {
                        acc
                    } else {
                        acc.add(&self.entry(j, i).scale(v[i]))
                    }
                })
            })
            .collect()
    }

    /// `{m : Δ(m) ∈ M ⊗ B}`.
    pub fn coideal_preimage(&self, b: &CoalgebraSubspace) -> Result<Subspace> {
        if b.space.ambient_dim() != b.ambient.len() {
            return Err(Error::DimensionMismatch(
                "subspace coordinates do not match its ambient monomial list".into(),
            ));
        }
        if let Some(m) = b
            .ambient
            .iter()
            .find(|m| !self.coalgebra.contains_monomial(m, &self.field))
        {
            return Err(Error::ForeignVariable {
                var: m.to_string(),
                context: self.coalgebra.to_string(),
            });
        }
        // extend the ambient by whatever else the coaction uses
        let mut ambient = b.ambient.clone();
        let known: BTreeSet<Monomial> = ambient.iter().cloned().collect();
        let extra: Vec<Monomial> = self
            .monomial_support()
            .into_iter()
            .filter(|m| !known.contains(m))
            .collect();
        let base = ambient.len();
        ambient.extend(extra.iter().cloned());
        let index: BTreeMap<&Monomial, usize> =
            ambient.iter().enumerate().map(|(i, m)| (m, i)).collect();

        // functionals cutting out B inside the extended ambient
        let ann = b.space.annihilator();
        let mut cuts: Vec<Vec<Scalar>> = (0..ann.rows())
            .map(|r| {
                let mut v = ann.row(r).to_vec();
                v.resize(ambient.len(), 0);
                v
            })
            .collect();
        for k in 0..extra.len() {
            let mut v = vec![0; ambient.len()];
            v[base + k] = 1;
            cuts.push(v);
        }

        let n = self.dim();
        let mut rows = Vec::new();
        for j in 0..n {
            let coords: Vec<Vec<Scalar>> = (0..n)
                .map(|i| {
                    let mut v = vec![0; ambient.len()];
                    for (m, c) in self.entry(j, i).terms() {
                        v[index[m]] = c;
                    }
                    v
                })
                .collect();
            for cut in &cuts {
                let row: Vec<Scalar> = coords
                    .iter()
                    .map(|v| {
                        v.iter().zip(cut).fold(0, |acc, (&a, &b)| {
                            self.field.add(acc, self.field.mul(a, b))
                        })
                    })
                    .collect();
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
        let mut m = Matrix::zeros(&self.field, rows.len(), n);
        for (r, row) in rows.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, x);
            }
        }
        Ok(Subspace::kernel(&m))
    }

    /// Whether a subspace is a subcomodule (stable under every coefficient matrix).
    pub fn is_coaction_stable(&self, sub: &Subspace) -> bool {
        self.monomial_support()
            .iter()
            .all(|m| sub.is_invariant_under(&self.coefficient_matrix(m)))
    }

    /// `dim M / rad(A) M` for a comodule over a Frobenius kernel.
    pub fn radical_quotient_dim(&self) -> Result<usize> {
        if !self.coalgebra.is_truncated() {
            return Err(Error::UnsupportedCoalgebra(format!(
                "{} is not a Frobenius kernel coalgebra",
                self.coalgebra
            )));
        }
        let blocks: Vec<Matrix> = self
            .monomial_support()
            .iter()
            .filter(|m| !m.is_one())
            .map(|m| self.coefficient_matrix(m))
            .collect();
        let rank = Matrix::hstack(&blocks).map_or(0, |m| m.rank());
        Ok(self.dim() - rank)
    }

    pub fn local_freeness(&self) -> Result<LocalFreeness> {
        let top_dim = self.radical_quotient_dim()?;
        let dim_algebra = self
            .coalgebra
            .dual_algebra_dim(&self.field)
            .expect("truncated coalgebra");
        Ok(LocalFreeness {
            free: self.dim() as u64 == dim_algebra * top_dim as u64,
            dim_module: self.dim(),
            dim_algebra,
            top_dim,
        })
    }

    /// Same coaction read in a quotient coalgebra (or the identity change).
    pub fn restrict_to(&self, target: CoalgebraId) -> Result<Comodule> {
        target.check()?;
        if target.untruncated() != self.coalgebra.untruncated() {
            return Err(Error::UnsupportedCoalgebra(format!(
                "cannot restrict {} to {target}",
                self.coalgebra
            )));
        }
        Ok(Comodule {
            field: self.field.clone(),
            coalgebra: target,
            coaction: self.coaction.map(|f| target.reduce(f)),
        })
    }

    pub fn direct_sum(&self, other: &Comodule) -> Result<Comodule> {
        self.same_coalgebra(other)?;
        let (a, b) = (self.dim(), other.dim());
        let coaction = PolyMatrix::from_fn(&self.field, a + b, a + b, |j, i| match (j < a, i < a) {
            (true, true) => self.entry(j, i).clone(),
            (false, false) => other.entry(j - a, i - a).clone(),
            _ => MultiPoly::zero(&self.field),
        });
        Comodule::new(self.coalgebra, coaction)
    }

    /// Tensor product; basis `e_i ⊗ e'_k` indexed by `i * dim(other) + k`.
    pub fn tensor(&self, other: &Comodule) -> Result<Comodule> {
        self.same_coalgebra(other)?;
        let nb = other.dim();
        let n = self.dim() * nb;
        let c = self.coalgebra;
        let coaction = PolyMatrix::from_fn(&self.field, n, n, |row, col| {
            let (j, l) = (row / nb, row % nb);
            let (i, k) = (col / nb, col % nb);
            c.reduce(&self.entry(j, i).mul(other.entry(l, k)))
        });
        Comodule::new(c, coaction)
    }

    /// Contragredient: `Δ(e*_i) = Σ_j e*_j ⊗ S(f_{ij})`.
    pub fn dual(&self) -> Result<Comodule> {
        let n = self.dim();
        let c = self.coalgebra;
        let mut coaction = PolyMatrix::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                coaction.set(j, i, c.antipode(self.entry(i, j))?);
            }
        }
        Comodule::new(c, coaction)
    }

    /// Symmetric square in the monomial basis `e_a e_b`, `a <= b`, lexicographic.
    pub fn sym_square(&self) -> Result<Comodule> {
        let n = self.dim();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
        let index: BTreeMap<(usize, usize), usize> =
            pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let c = self.coalgebra;
        let mut coaction = PolyMatrix::zeros(&self.field, pairs.len(), pairs.len());
        for (col, &(a, b)) in pairs.iter().enumerate() {
            for j in 0..n {
                for k in 0..n {
                    let term = self.entry(j, a).mul(self.entry(k, b));
                    if term.is_zero() {
                        continue;
                    }
                    let row = index[&(j.min(k), j.max(k))];
                    let cur = coaction.get(row, col).add(&term);
                    coaction.set(row, col, c.reduce(&cur));
                }
            }
        }
        Comodule::new(c, coaction)
    }

    /// Change of basis: the new `i`-th basis vector is column `i` of `g`.
    pub fn change_basis(&self, g: &Matrix) -> Result<Comodule> {
        let inv = g
            .inverse()
            .ok_or_else(|| Error::Precondition("change of basis must be invertible".into()))?;
        let coaction = PolyMatrix::from_matrix(&inv)
            .mul(&self.coaction)
            .mul(&PolyMatrix::from_matrix(g));
        Comodule::new(self.coalgebra, coaction)
    }

    /// The subcomodule spanned by `sub`, in its echelon basis.
    pub fn subcomodule(&self, sub: &Subspace) -> Result<Comodule> {
        let basis = sub.basis_vectors();
        let k = basis.len();
        let mut coaction = PolyMatrix::zeros(&self.field, k, k);
        for (col, v) in basis.iter().enumerate() {
            let comps = self.coaction_of(v);
            let monos: BTreeSet<Monomial> = comps
                .iter()
                .flat_map(|g| g.terms().map(|(m, _)| m.clone()))
                .collect();
            for m in monos {
                let vec: Vec<Scalar> = comps.iter().map(|g| g.coefficient(&m)).collect();
                let coords = sub.coordinates(&vec).ok_or_else(|| {
                    Error::Precondition("subspace is not coaction-stable".into())
                })?;
                for (row, &c) in coords.iter().enumerate() {
                    if c != 0 {
                        let cur = coaction.get(row, col).add(&MultiPoly::term(&self.field, m.clone(), c));
                        coaction.set(row, col, cur);
                    }
                }
            }
        }
        Comodule::new(self.coalgebra, coaction)
    }

    /// The quotient `M / sub`, with basis the images of the non-pivot standard vectors.
    pub fn quotient(&self, sub: &Subspace) -> Result<Comodule> {
        if !self.is_coaction_stable(sub) {
            return Err(Error::Precondition("subspace is not coaction-stable".into()));
        }
        let n = self.dim();
        let pivots = sub.pivots();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let f = &self.field;
        // image of e_j in the quotient, in the free-coordinate basis
        let image = |j: usize| -> Vec<Scalar> {
            let mut v = vec![0; free.len()];
            if let Some(&k) = pos.get(&j) {
                v[k] = 1;
            } else {
                let r = pivots.iter().position(|&c| c == j).unwrap();
                for (&c, &k) in &pos {
                    v[k] = f.neg(sub.basis().get(r, c));
                }
            }
            v
        };
        let images: Vec<Vec<Scalar>> = (0..n).map(image).collect();
        let q = free.len();
        let mut coaction = PolyMatrix::zeros(f, q, q);
        for (col, &i) in free.iter().enumerate() {
            for j in 0..n {
                let g = self.entry(j, i);
                if g.is_zero() {
                    continue;
                }
                for (row, &c) in images[j].iter().enumerate() {
                    if c != 0 {
                        let cur = coaction.get(row, col).add(&g.scale(c));
                        coaction.set(row, col, cur);
                    }
                }
            }
        }
        Comodule::new(self.coalgebra, coaction)
    }

    /// The regular comodule on a subcoalgebra spanned by monomials.
    pub fn regular_piece(field: &PrimeField, coalgebra: CoalgebraId, basis: &[Monomial]) -> Result<Comodule> {
        coalgebra.check()?;
        let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let n = basis.len();
        let mut coaction = PolyMatrix::zeros(field, n, n);
        for (i, m) in basis.iter().enumerate() {
            let delta = coalgebra.coproduct(&MultiPoly::term(field, m.clone(), 1))?;
            for (c, l, r) in delta.split_terms() {
                let (Some(&j), true) = (index.get(&l), index.contains_key(&r)) else {
                    return Err(Error::Precondition(format!(
                        "monomials do not span a subcoalgebra: Δ({m}) involves {l} ⊗ {r}"
                    )));
                };
                let cur = coaction.get(j, i).add(&MultiPoly::term(field, r, c));
                coaction.set(j, i, cur);
            }
        }
        Comodule::new(coalgebra, coaction)
    }

    /// Applies a map to every coaction entry, keeping the coalgebra label.
    pub fn map_entries(&self, coalgebra: CoalgebraId, f: impl Fn(&MultiPoly) -> MultiPoly) -> Result<Comodule> {
        Comodule::new(coalgebra, self.coaction.map(f))
    }

    fn same_coalgebra(&self, other: &Comodule) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        if self.coalgebra != other.coalgebra {
            return Err(Error::UnsupportedCoalgebra(format!(
                "{} vs {}",
                self.coalgebra, other.coalgebra
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::unipotent::{natural_rep, UNContext};
    use proptest::prelude::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn t_pow(k: u32) -> Monomial {
        Monomial::power(Var::T, k)
    }

    fn ga_regular(field: &PrimeField, d: u32) -> Comodule {
        let basis: Vec<Monomial> = (0..d).map(t_pow).collect();
        Comodule::regular_piece(field, CoalgebraId::GaPoly, &basis).unwrap()
    }

    #[test]
    fn trivial_validates() {
        for c in [CoalgebraId::GaPoly, CoalgebraId::UNPoly(3), CoalgebraId::MatPoly(2), CoalgebraId::GaTrunc(1)] {
            assert_eq!(Comodule::trivial(&f(3), c, 3).validate(), Ok(()));
        }
    }

    #[test]
    fn corrupted_counit_is_reported() {
        let ctx = UNContext::new(&f(3), 3).unwrap();
        let m = natural_rep(&ctx);
        assert_eq!(m.validate(), Ok(()));
        let mut coaction = m.coaction().clone();
        coaction.set(0, 1, MultiPoly::parse(&f(3), "x1_2 + 1").unwrap());
        let bad = Comodule::new(m.coalgebra(), coaction).unwrap();
        let v = bad.validate().unwrap_err();
        assert_eq!(v, Violation::Counit { basis: 2, row: 1 });
        assert!(v.to_string().starts_with("counit violation at basis 2"));
    }

    #[test]
    fn coassociativity_failure_detected() {
        let field = f(3);
        // Δ(e_2) = e_2⊗1 + e_1⊗T^2 is not coassociative at p = 3 (2 T T' cross term missing)
        let mut coaction = PolyMatrix::identity(&field, 2);
        coaction.set(0, 1, MultiPoly::parse(&field, "T^2").unwrap());
        let m = Comodule::new(CoalgebraId::GaPoly, coaction).unwrap();
        assert_eq!(m.validate(), Err(Violation::Coassociativity { basis: 2, row: 1 }));
    }

    #[test]
    fn outside_coalgebra_detected() {
        let field = f(3);
        let mut coaction = PolyMatrix::identity(&field, 2);
        coaction.set(0, 1, MultiPoly::parse(&field, "T^3").unwrap());
        let m = Comodule::new(CoalgebraId::GaTrunc(1), coaction).unwrap();
        assert!(matches!(m.validate(), Err(Violation::OutsideCoalgebra { basis: 2, .. })));
    }

    #[test]
    fn counit_acts_as_identity() {
        let field = f(5);
        let m = ga_regular(&field, 7);
        let supp: Vec<Monomial> = m.monomial_support().into_iter().collect();
        let eps = Functional::counit_on(m.coalgebra(), &field, &supp).unwrap();
        assert_eq!(m.dual_action(&eps).unwrap(), Matrix::identity(&field, 7));

        let ctx = UNContext::new(&field, 3).unwrap();
        let g = natural_rep(&ctx);
        let supp: Vec<Monomial> = g.monomial_support().into_iter().collect();
        let eps = Functional::counit_on(g.coalgebra(), &field, &supp).unwrap();
        assert_eq!(g.dual_action(&eps).unwrap(), Matrix::identity(&field, 3));
    }

    #[test]
    fn v1_is_derivative() {
        for p in [2u32, 3, 5] {
            let field = f(p);
            let m = ga_regular(&field, p);
            let a = m.dual_action(&Functional::dual_basis(t_pow(1))).unwrap();
            for i in 0..p as usize {
                for j in 0..p as usize {
                    let expected = if j + 1 == i { i as u32 % p } else { 0 };
                    assert_eq!(a.get(j, i), expected);
                }
            }
        }
    }

    #[test]
    fn v_j_matrices_are_binomials() {
        for p in [2u32, 3] {
            let field = f(p);
            let d = p * p;
            let m = ga_regular(&field, d);
            for j in 0..d {
                let a = m.dual_action(&Functional::dual_basis(t_pow(j))).unwrap();
                for n in 0..d {
                    for row in 0..d {
                        let expected = if n >= j && row == n - j {
                            oracle::reduce_mod(&oracle::binomial(n as u64, j as u64), p)
                        } else {
                            0
                        };
                        assert_eq!(a.get(row as usize, n as usize), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn foreign_functional_rejected() {
        let field = f(3);
        let m = ga_regular(&field, 3);
        let phi = Functional::dual_basis(Monomial::var(Var::x(1, 2)));
        assert!(m.dual_action(&phi).is_err());
        let trunc = m.restrict_to(CoalgebraId::GaTrunc(1)).unwrap();
        assert!(trunc.dual_action(&Functional::dual_basis(t_pow(3))).is_err());
    }

    #[test]
    fn preimage_examples() {
        let field = f(3);
        let ctx = UNContext::new(&field, 3).unwrap();
        let m = natural_rep(&ctx);
        let all: Vec<Monomial> = m.monomial_support().into_iter().collect();
        let full = CoalgebraSubspace::monomial_span(&field, all);
        assert!(m.coideal_preimage(&full).unwrap().is_full());
        let ones = CoalgebraSubspace::monomial_span(&field, vec![Monomial::one()]);
        assert_eq!(
            m.coideal_preimage(&ones).unwrap(),
            Subspace::coordinate(&field, 3, &[0])
        );
        let bad = CoalgebraSubspace::monomial_span(&field, vec![Monomial::var(Var::T)]);
        assert!(m.coideal_preimage(&bad).is_err());
    }

    #[test]
    fn radical_quotient_examples() {
        let field = f(3);
        let triv = Comodule::trivial(&field, CoalgebraId::GaTrunc(1), 4);
        assert_eq!(triv.radical_quotient_dim().unwrap(), 4);
        let reg = ga_regular(&field, 3).restrict_to(CoalgebraId::GaTrunc(1)).unwrap();
        // oracle: image of rad is spanned by the coefficient vectors of T^1, T^2
        assert_eq!(reg.radical_quotient_dim().unwrap(), 1);
        assert!(reg.local_freeness().unwrap().free);
        let one = Comodule::trivial(&field, CoalgebraId::GaTrunc(1), 1);
        let lf = one.local_freeness().unwrap();
        assert!(!lf.free);
        assert_eq!((lf.dim_module, lf.dim_algebra, lf.top_dim), (1, 3, 1));
        assert!(ga_regular(&field, 3).radical_quotient_dim().is_err());
    }

    #[test]
    fn un_piece_not_free() {
        let field = f(2);
        let basis = monomials_up_to(&CoalgebraId::UNPoly(3).generators(), 1, None);
        let m = Comodule::regular_piece(&field, CoalgebraId::UNPoly(3), &basis).unwrap();
        assert_eq!(m.dim(), 4);
        let lf = m.restrict_to(CoalgebraId::UNTrunc(3, 1)).unwrap().local_freeness().unwrap();
        assert!(!lf.free);
        assert_eq!(lf.dim_algebra, 8);
    }

    #[test]
    fn jordan_examples() {
        let field = f(3);
        assert_eq!(jordan_type(&Matrix::zeros(&field, 3, 3)).unwrap().parts(), &[1, 1, 1]);
        let reg = Matrix::from_rows(&field, &[[0, 1, 0], [0, 0, 1], [0, 0, 0]]).unwrap();
        let jt = jordan_type(&reg).unwrap();
        assert_eq!(jt.parts(), &[3]);
        assert!(jt.is_free(3));
        let e21 = Matrix::from_rows(&field, &[[0, 0], [1, 0]]).unwrap();
        assert_eq!(jordan_type(&e21).unwrap().parts(), &[2]);
        let not_nil = Matrix::identity(&field, 2);
        assert_eq!(jordan_type(&not_nil), Err(Error::NotNilpotent));
        // a 3x3 nilpotent at p = 2 has theta^2 != 0
        let f2 = PrimeField::new(2).unwrap();
        let reg2 = Matrix::from_rows(&f2, &[[0, 1, 0], [0, 0, 1], [0, 0, 0]]).unwrap();
        assert_eq!(jordan_type(&reg2), Err(Error::NotNilpotent));
    }

    #[test]
    fn sub_and_quotient() {
        let field = f(3);
        let ctx = UNContext::new(&field, 3).unwrap();
        let m = natural_rep(&ctx);
        let sub = Subspace::coordinate(&field, 3, &[0, 1]);
        let s = m.subcomodule(&sub).unwrap();
        assert_eq!(s.validate(), Ok(()));
        assert_eq!(s.dim(), 2);
        let q = m.quotient(&sub).unwrap();
        assert_eq!(q.validate(), Ok(()));
        assert_eq!(q, Comodule::trivial(&field, CoalgebraId::UNPoly(3), 1));
        assert!(m.subcomodule(&Subspace::coordinate(&field, 3, &[2])).is_err());
    }

    #[test]
    fn constructions_validate() {
        let field = f(3);
        let ctx = UNContext::new(&field, 3).unwrap();
        let m = natural_rep(&ctx);
        assert_eq!(m.dual().unwrap().validate(), Ok(()));
        assert_eq!(m.tensor(&m).unwrap().validate(), Ok(()));
        assert_eq!(m.sym_square().unwrap().validate(), Ok(()));
        let g = Matrix::from_rows(&field, &[[1, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap();
        assert_eq!(m.change_basis(&g).unwrap().validate(), Ok(()));
        let ga = ga_regular(&field, 4);
        assert_eq!(ga.dual().unwrap().validate(), Ok(()));
        assert!(Comodule::regular_piece(&field, CoalgebraId::UNPoly(3), &[Monomial::var(Var::x(1, 3))]).is_err());
    }

    fn arb_functional() -> impl Strategy<Value = Functional> {
        proptest::collection::btree_map(0u32..9, 0u32..3, 0..5)
            .prop_map(|m| Functional::new(m.into_iter().map(|(k, c)| (t_pow(k), c)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn convolution_is_composition(phi in arb_functional(), psi in arb_functional()) {
            let field = f(3);
            let c = CoalgebraId::GaTrunc(2);
            let basis = c.truncated_basis(&field).unwrap();
            let m = Comodule::regular_piece(&field, CoalgebraId::GaPoly, &basis)
                .unwrap()
                .restrict_to(c)
                .unwrap();
            let prod = phi.convolve(&psi, c, &field).unwrap();
            let lhs = m.dual_action(&phi).unwrap().mul(&m.dual_action(&psi).unwrap());
            prop_assert_eq!(lhs, m.dual_action(&prod).unwrap());
        }
    }
}
