//! Truncated exponentials of p-nilpotent matrices and the exponential-degree
//! filtration they induce on coordinate coalgebras and their comodules.
//!
//! Quantification over all p-nilpotent `B` is symbolic: when `N <= p` every
//! strictly upper triangular matrix is p-nilpotent, so a condition holds for
//! all `B` over the algebraic closure iff the corresponding polynomial in the
//! entries `b{i}_{j}` is zero. For `N > p` only sampled verdicts are offered.

use std::collections::{BTreeMap, BTreeSet};

use crate::comodule::{CoalgebraId, CoalgebraSubspace, Comodule};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::ga::{degree_filtration_family, GaUFamily};
use crate::linalg::{Matrix, Subspace};
use crate::oracle::all_strictly_upper;
use crate::poly::{Monomial, MultiPoly, PolyMatrix, Var, VarKind};
use crate::unipotent::{degree_piece, UNContext};

/// Label attached to every verdict obtained from finitely many `F_p`-points.
pub const SAMPLED_LABEL: &str = "sampled: necessary conditions only";

/// A square matrix with `B^p = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentMatrix(Matrix);

impl NilpotentMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("nilpotent matrix must be square".into()));
        }
        if !m.is_p_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        Ok(NilpotentMatrix(m))
    }

    pub fn zero(field: &PrimeField, n: usize) -> Self {
        NilpotentMatrix(Matrix::zeros(field, n, n))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn field(&self) -> &PrimeField {
        self.0.field()
    }

    pub fn scale(&self, alpha: u32) -> NilpotentMatrix {
        NilpotentMatrix(self.0.scale(alpha))
    }
}

/// The generic strictly upper triangular matrix in the variables `b{i}_{j}`; requires `N <= p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicNilpotentDomain {
    field: PrimeField,
    n: usize,
}

impl SymbolicNilpotentDomain {
    pub fn new(field: &PrimeField, n: usize) -> Result<Self> {
        if n as u64 > field.p() as u64 {
            return Err(Error::SymbolicDomainTooLarge { n, p: field.p() });
        }
        Ok(SymbolicNilpotentDomain { field: field.clone(), n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn b_vars(&self) -> Vec<Var> {
        (1..=self.n)
            .flat_map(|i| (i + 1..=self.n).map(move |j| Var::b(i, j)))
            .collect()
    }

    pub fn generic_matrix(&self) -> PolyMatrix {
        let f = &self.field;
        PolyMatrix::from_fn(f, self.n, self.n, |i, j| {
            if i < j {
                MultiPoly::var(f, Var::b(i + 1, j + 1))
            } else {
                MultiPoly::zero(f)
            }
        })
    }
}

/// `Σ_{k<p} B^k t^k / k!` for a matrix of polynomials and a polynomial parameter `t`.
pub fn exp_series(b: &PolyMatrix, t: &MultiPoly) -> PolyMatrix {
    let field = b.field();
    let n = b.rows();
    let mut out = PolyMatrix::identity(field, n);
    let mut power = PolyMatrix::identity(field, n);
    let mut t_power = MultiPoly::one(field);
    for k in 1..field.p() {
        power = power.mul(b);
        t_power = t_power.mul(t);
        let c = field.inv_factorial(k);
        let term = power.map(|e| e.mul(&t_power).scale(c));
        out = out.add(&term);
    }
    out
}

/// `exp_B(T)` as a matrix over `F_p[T]`.
pub fn truncated_exp(b: &NilpotentMatrix) -> PolyMatrix {
    let t = MultiPoly::var(b.field(), Var::T);
    exp_series(&PolyMatrix::from_matrix(b.matrix()), &t)
}

/// `exp_B(T)` for the generic `B` of the symbolic domain.
pub fn symbolic_exp(domain: &SymbolicNilpotentDomain) -> PolyMatrix {
    let t = MultiPoly::var(&domain.field, Var::T);
    exp_series(&domain.generic_matrix(), &t)
}

/// `exp_B(T) exp_B(T') = exp_B(T + T')`.
pub fn group_law_holds(b: &PolyMatrix) -> bool {
    let f = b.field();
    let s = MultiPoly::var(f, Var::T);
    let t = MultiPoly::var(f, Var::T.primed());
    exp_series(b, &s).mul(&exp_series(b, &t)) == exp_series(b, &s.add(&t))
}

/// `exp_{αB}(T) = exp_B(αT)`.
pub fn scaling_holds(b: &PolyMatrix, alpha: u32) -> bool {
    let f = b.field();
    let t = MultiPoly::var(f, Var::T);
    exp_series(&b.map(|e| e.scale(alpha)), &t) == exp_series(b, &t.scale(alpha))
}

/// `exp_A(T) exp_B(T') = exp_B(T') exp_A(T)`.
pub fn exponentials_commute(a: &PolyMatrix, b: &PolyMatrix) -> bool {
    let f = a.field();
    let ea = exp_series(a, &MultiPoly::var(f, Var::T));
    let eb = exp_series(b, &MultiPoly::var(f, Var::T.primed()));
    ea.mul(&eb) == eb.mul(&ea)
}

/// Results of checking the structure-of-exponential-type axioms on the symbolic domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpStructureReport {
    pub group_law: bool,
    pub scaling: bool,
    pub commuting_pairs: bool,
}

impl ExpStructureReport {
    pub fn holds(&self) -> bool {
        self.group_law && self.scaling && self.commuting_pairs
    }
}

/// Group law and scaling for the generic `B`; commutation for each given commuting pair.
pub fn validate_exp_structure(
    domain: &SymbolicNilpotentDomain,
    commuting_pairs: &[(NilpotentMatrix, NilpotentMatrix)],
) -> ExpStructureReport {
    let generic = domain.generic_matrix();
    let scaling = (0..domain.field.p()).all(|alpha| scaling_holds(&generic, alpha));
    let commuting_pairs = commuting_pairs.iter().all(|(a, b)| {
        !a.matrix().commutes_with(b.matrix())
            || exponentials_commute(&PolyMatrix::from_matrix(a.matrix()), &PolyMatrix::from_matrix(b.matrix()))
    });
    ExpStructureReport {
        group_law: group_law_holds(&generic),
        scaling,
        commuting_pairs,
    }
}

/// Substitutes `x{i}_{j} ↦ e[i][j]`; every variable of `f` must be a matrix coordinate within range.
pub fn pullback_along(f: &MultiPoly, e: &PolyMatrix) -> Result<MultiPoly> {
    let n = e.rows();
    let mut assignment = BTreeMap::new();
    for v in f.variables() {
        let (i, j) = (v.i as usize, v.j as usize);
        if v.kind != VarKind::X || v.copy != 0 || i > n || j > n {
            return Err(Error::ForeignVariable {
                var: v.to_string(),
                context: format!("{n} x {n} matrix coordinates"),
            });
        }
        assignment.insert(v, e.get(i - 1, j - 1).clone());
    }
    f.substitute(&assignment)
}

/// Either a concrete p-nilpotent matrix or the generic one.
#[derive(Clone, Copy, Debug)]
pub enum ExpSource<'a> {
    Numeric(&'a NilpotentMatrix),
    Symbolic(&'a SymbolicNilpotentDomain),
}

impl ExpSource<'_> {
    pub fn exp(&self) -> PolyMatrix {
        match self {
            ExpSource::Numeric(b) => truncated_exp(b),
            ExpSource::Symbolic(d) => symbolic_exp(d),
        }
    }
}

pub fn exp_pullback(f: &MultiPoly, source: ExpSource<'_>) -> Result<MultiPoly> {
    pullback_along(f, &source.exp())
}

/// T-degree of the symbolic pullback: the least `d` with `f` in the `d`-th exponential piece.
pub fn coalg_exp_degree(f: &MultiPoly, domain: &SymbolicNilpotentDomain) -> Result<u32> {
    Ok(exp_pullback(f, ExpSource::Symbolic(domain))?.degree_in(Var::T))
}

/// Splits a pulled-back polynomial into its `(b-monomial, T^j)` coefficients with `j > d`.
fn high_t_part(g: &MultiPoly, d: u32) -> impl Iterator<Item = (&Monomial, u32)> {
    g.terms().filter(move |(m, _)| m.exponent(Var::T) > d)
}

/// `{f : deg f <= dmax, exponential degree of f <= d}` on the monomial basis of degree `<= dmax`.
pub fn coalg_filtration_piece(ctx: &UNContext, d: u32, dmax: u32) -> Result<CoalgebraSubspace> {
    let domain = SymbolicNilpotentDomain::new(ctx.field(), ctx.n())?;
    let e = symbolic_exp(&domain);
    let ambient = degree_piece(ctx, dmax + 1);
    let pulled: Vec<MultiPoly> = ambient
        .iter()
        .map(|m| pullback_along(&MultiPoly::term(ctx.field(), m.clone(), 1), &e))
        .collect::<Result<_>>()?;
    let keys: BTreeSet<&Monomial> = pulled.iter().flat_map(|g| high_t_part(g, d).map(|(m, _)| m)).collect();
    let index: BTreeMap<&Monomial, usize> = keys.iter().enumerate().map(|(k, m)| (*m, k)).collect();
    let mut system = Matrix::zeros(ctx.field(), keys.len(), ambient.len());
    for (col, g) in pulled.iter().enumerate() {
        for (m, c) in high_t_part(g, d) {
            system.set(index[m], col, c);
        }
    }
    Ok(CoalgebraSubspace {
        ambient,
        space: Subspace::kernel(&system),
    })
}

/// `G_a` comodule read as a `U_2` comodule through `T ↦ x1_2`.
pub fn ga_comodule_as_u2(m: &Comodule) -> Result<Comodule> {
    if m.coalgebra() != CoalgebraId::GaPoly {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    }
    let field = m.field().clone();
    let assignment: BTreeMap<Var, MultiPoly> = [(Var::T, MultiPoly::var(&field, Var::x(1, 2)))].into();
    let coaction = m.coaction().try_map(|e| e.substitute(&assignment))?;
    Comodule::new(CoalgebraId::UNPoly(2), coaction)
}

/// The coaction matrix after applying the exponential pullback to every entry.
#[derive(Clone, Debug)]
pub struct PulledCoaction {
    field: PrimeField,
    dim: usize,
    entries: PolyMatrix,
}

impl PulledCoaction {
    pub fn symbolic(m: &Comodule) -> Result<Self> {
        let m = match m.coalgebra() {
            CoalgebraId::GaPoly => ga_comodule_as_u2(m)?,
            CoalgebraId::UNPoly(_) => m.clone(),
            other => return Err(Error::UnsupportedCoalgebra(other.to_string())),
        };
        let CoalgebraId::UNPoly(n) = m.coalgebra() else { unreachable!() };
        let domain = SymbolicNilpotentDomain::new(m.field(), n)?;
        Self::along(&m, &symbolic_exp(&domain))
    }

    /// Pullback along a fixed matrix of polynomials (e.g. a numeric exponential).
    pub fn along(m: &Comodule, e: &PolyMatrix) -> Result<Self> {
        Ok(PulledCoaction {
            field: m.field().clone(),
            dim: m.dim(),
            entries: m.coaction().try_map(|f| pullback_along(f, e))?,
        })
    }

    pub fn entries(&self) -> &PolyMatrix {
        &self.entries
    }

    pub fn max_t_degree(&self) -> u32 {
        self.entries
            .entries()
            .iter()
            .map(|g| g.degree_in(Var::T))
            .max()
            .unwrap_or(0)
    }

    /// Vectors whose pulled-back coaction has no `T^j` with `j > d`.
    pub fn piece(&self, d: u32) -> Subspace {
        let n = self.dim;
        let keys: BTreeSet<&Monomial> = self
            .entries
            .entries()
            .iter()
            .flat_map(|g| high_t_part(g, d).map(|(m, _)| m))
            .collect();
        let index: BTreeMap<&Monomial, usize> = keys.iter().enumerate().map(|(k, m)| (*m, k)).collect();
        // one row per (component j, key monomial)
        let mut system = Matrix::zeros(&self.field, n * keys.len(), n);
        for j in 0..n {
            for i in 0..n {
                for (m, c) in high_t_part(self.entries.get(j, i), d) {
                    system.set(j * keys.len() + index[m], i, c);
                }
            }
        }
        Subspace::kernel(&system)
    }

    /// Least `d` with `piece(d)` the whole module.
    pub fn first_full(&self) -> u32 {
        let (mut lo, mut hi) = (0u32, self.max_t_degree());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.piece(mid).is_full() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }
}

/// `M_{[d]}` for a comodule over `k[U_N]` with `N <= p` (or over `k[G_a]`).
pub fn module_exp_filtration(m: &Comodule, d: u32) -> Result<Subspace> {
    Ok(PulledCoaction::symbolic(m)?.piece(d))
}

/// `M_{[d]}` as the coideal preimage of the coalgebra piece of exponential degree `<= d`.
pub fn module_exp_filtration_by_preimage(m: &Comodule, d: u32) -> Result<Subspace> {
    let CoalgebraId::UNPoly(n) = m.coalgebra() else {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    };
    let ctx = UNContext::new(m.field(), n)?;
    let piece = coalg_filtration_piece(&ctx, d, m.max_coaction_degree())?;
    m.coideal_preimage(&piece)
}

/// Least `d` with `M_{[d]} = M`.
pub fn exponential_degree(m: &Comodule) -> Result<u32> {
    Ok(PulledCoaction::symbolic(m)?.first_full())
}

/// Largest T-degree among pulled-back coaction entries; equals [`exponential_degree`].
pub fn exponential_degree_direct(m: &Comodule) -> Result<u32> {
    Ok(PulledCoaction::symbolic(m)?.max_t_degree())
}

/// For `G_a`, `(E_λ)_*(v_j) = λ^j v_j`, so `M_{[d]} = ∩_{j>d} ker v_j`.
pub fn ga_exp_filtration(family: &GaUFamily, d: u32) -> Subspace {
    degree_filtration_family(family, d as u64 + 1)
}

pub fn ga_exponential_degree(family: &GaUFamily) -> u32 {
    family.occurring().last().map_or(0, |(j, _)| *j as u32)
}

/// Raises every coaction entry to the p-th power.
pub fn frobenius_twist(m: &Comodule) -> Result<Comodule> {
    if m.coalgebra().is_truncated() {
        return Err(Error::UnsupportedCoalgebra(format!(
            "twist of a comodule over {}",
            m.coalgebra()
        )));
    }
    m.map_entries(m.coalgebra(), MultiPoly::frobenius)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelateDirection {
    /// degree `< d` implies exponential degree `<= (p-1)(d-1)`
    DegreeToExp,
    /// exponential degree `<= e-1` implies degree `< d`
    ExpToDegree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelateOutcome {
    Ok,
    Counterexample { direction: RelateDirection, witness: MultiPoly },
}

/// Both filtration comparisons on the span of monomials of degree `<= dmax`.
pub fn relate_inclusions_check(ctx: &UNContext, d: u32, e: u32, dmax: u32) -> Result<RelateOutcome> {
    let domain = SymbolicNilpotentDomain::new(ctx.field(), ctx.n())?;
    if d == 0 || e == 0 {
        return Err(Error::Precondition("d and e must be positive".into()));
    }
    if (e as u64) * (ctx.n() as u64 - 1) >= d as u64 {
        return Err(Error::Precondition(format!(
            "e(N-1) = {} is not below d = {d}",
            e as u64 * (ctx.n() as u64 - 1)
        )));
    }
    let p = ctx.field().p();
    let bound = (p - 1) * (d - 1);
    for mono in degree_piece(ctx, d.min(dmax + 1)) {
        let f = MultiPoly::term(ctx.field(), mono, 1);
        if coalg_exp_degree(&f, &domain)? > bound {
            return Ok(RelateOutcome::Counterexample {
                direction: RelateDirection::DegreeToExp,
                witness: f,
            });
        }
    }
    let piece = coalg_filtration_piece(ctx, e - 1, dmax)?;
    for g in piece.basis_polys(ctx.field()) {
        if g.total_degree() >= d {
            return Ok(RelateOutcome::Counterexample {
                direction: RelateDirection::ExpToDegree,
                witness: g,
            });
        }
    }
    Ok(RelateOutcome::Ok)
}

/// `M = M_{[0]}`.
pub fn mock_trivial_check(m: &Comodule) -> Result<bool> {
    Ok(module_exp_filtration(m, 0)?.is_full())
}

pub fn ga_mock_trivial_check(family: &GaUFamily) -> bool {
    ga_exp_filtration(family, 0).is_full()
}

/// All strictly upper triangular `F_p`-points with `B^p = 0`.
pub fn nilpotent_points(field: &PrimeField, n: usize) -> Result<Vec<NilpotentMatrix>> {
    let m = n * (n - 1) / 2;
    let count = (field.p() as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if count > 100_000 {
        return Err(Error::GuardExceeded(format!("{count} points to enumerate")));
    }
    Ok(all_strictly_upper(field, n)
        .into_iter()
        .filter_map(|b| NilpotentMatrix::new(b).ok())
        .collect())
}

/// A verdict computed from finitely many points, never a proof of membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sampled<T> {
    pub value: T,
    pub points: usize,
    pub label: &'static str,
}

/// Largest T-degree of `f(exp_B(T))` over all enumerated `F_p`-points.
pub fn sampled_exp_degree(f: &MultiPoly, n: usize) -> Result<Sampled<u32>> {
    let points = nilpotent_points(f.field(), n)?;
    let mut top = 0;
    for b in &points {
        top = top.max(exp_pullback(f, ExpSource::Numeric(b))?.degree_in(Var::T));
    }
    Ok(Sampled {
        value: top,
        points: points.len(),
        label: SAMPLED_LABEL,
    })
}

/// Intersection over enumerated points of the per-point `M_{[d]}` conditions; contains the true `M_{[d]}`.
pub fn sampled_module_exp_filtration(m: &Comodule, d: u32) -> Result<Sampled<Subspace>> {
    let CoalgebraId::UNPoly(n) = m.coalgebra() else {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    };
    let points = nilpotent_points(m.field(), n)?;
    let mut space = Subspace::full(m.field(), m.dim());
    for b in &points {
        let piece = PulledCoaction::along(m, &truncated_exp(b))?.piece(d);
        space = space.intersection(&piece);
    }
    Ok(Sampled {
        value: space,
        points: points.len(),
        label: SAMPLED_LABEL,
    })
}

/// Degree counting for a polynomial representation of degree `d` of `GL_N`:
/// every entry has degree `<= d`, so each pullback along a p-nilpotent `B`
/// has T-degree `<= (p-1)d`. Returns the worst degree seen over `samples`.
pub fn schur_bound_check(m: &Comodule, d: u32, samples: &[NilpotentMatrix]) -> Result<(bool, u32)> {
    if !matches!(m.coalgebra(), CoalgebraId::MatPoly(_)) {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    }
    let bound = (m.field().p() - 1) * d;
    let degree_ok = m.max_coaction_degree() <= d;
    let mut worst = 0;
    for b in samples {
        let pulled = PulledCoaction::along(m, &truncated_exp(b))?;
        worst = worst.max(pulled.max_t_degree());
    }
    Ok((degree_ok && worst <= bound, worst))
}
