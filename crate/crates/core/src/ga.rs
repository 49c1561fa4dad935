//! Rational `G_a`-modules: the divided-power generators `u_s`, the derived
//! operators `v_j`, degree filtration, generated submodules, Frobenius
//! kernels, and the coalgebra splitting of `k[T]_{<p^r}`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::comodule::{CoalgebraId, CoalgebraSubspace, Comodule};
use crate::error::{Error, Result};
use crate::field::{binom_mod, digit_dominates, PrimeField, Scalar};
use crate::linalg::{Matrix, Subspace};
use crate::poly::{Monomial, MultiPoly, PolyMatrix, Var};

/// A `G_a`-module given by commuting p-nilpotent matrices `u_s`. Zero matrices are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaUFamily {
    field: PrimeField,
    dim: usize,
    u_mats: BTreeMap<u32, Matrix>,
}

impl GaUFamily {
    pub fn new(field: &PrimeField, dim: usize, u_mats: BTreeMap<u32, Matrix>) -> Result<Self> {
        for (s, u) in &u_mats {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::InvalidFamily(format!("u_{s} is not {dim} x {dim}")));
            }
            if u.field() != field {
                return Err(Error::FieldMismatch(field.p(), u.field().p()));
            }
            if !u.is_p_nilpotent() {
                return Err(Error::InvalidFamily(format!("u_{s}^p != 0")));
            }
        }
        for (s, a) in &u_mats {
            for (t, b) in u_mats.range(s + 1..) {
                if !a.commutes_with(b) {
                    return Err(Error::InvalidFamily(format!("u_{s} and u_{t} do not commute")));
                }
            }
        }
        Ok(GaUFamily {
            field: field.clone(),
            dim,
            u_mats: u_mats.into_iter().filter(|(_, u)| !u.is_zero()).collect(),
        })
    }

    pub fn trivial(field: &PrimeField, dim: usize) -> Self {
        GaUFamily {
            field: field.clone(),
            dim,
            u_mats: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn u_mats(&self) -> &BTreeMap<u32, Matrix> {
        &self.u_mats
    }

    pub fn u(&self, s: u32) -> Matrix {
        self.u_mats
            .get(&s)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(&self.field, self.dim, self.dim))
    }

    pub fn is_trivial(&self) -> bool {
        self.u_mats.is_empty()
    }

    /// One more than the largest `s` with `u_s != 0`.
    pub fn height(&self) -> u32 {
        self.u_mats.keys().next_back().map_or(0, |s| s + 1)
    }

    /// `v_j = Π_s u_s^{j_s} / j_s!` over the base-p digits of `j`.
    pub fn derived_v(&self, j: u64) -> Matrix {
        let digits = self.field.digits(j);
        let mut out = Matrix::identity(&self.field, self.dim);
        for (s, &d) in digits.digits().iter().enumerate() {
            if d == 0 {
                continue;
            }
            let u = self.u(s as u32);
            out = out.mul(&u.pow(d as u64)).scale(self.field.inv_factorial(d));
            if out.is_zero() {
                break;
            }
        }
        out
    }

    /// Every `j` with `v_j != 0`, ascending.
    pub fn occurring(&self) -> Vec<(u64, Matrix)> {
        let p = self.field.p() as u64;
        let mut out = vec![(0u64, Matrix::identity(&self.field, self.dim))];
        for (&s, u) in &self.u_mats {
            let base = p.pow(s);
            let mut extended = Vec::new();
            for (j, v) in &out {
                let mut power = v.clone();
                for d in 1..p {
                    power = power.mul(u);
                    if power.is_zero() {
                        break;
                    }
                    let scaled = power.scale(self.field.inv_factorial(d as u32));
                    extended.push((j + d * base, scaled));
                }
            }
            out.extend(extended);
        }
        out.retain(|(j, v)| *j == 0 || !v.is_zero());
        out.sort_by_key(|(j, _)| *j);
        out
    }

    pub fn to_comodule(&self) -> Comodule {
        family_to_comodule(self)
    }

    pub fn direct_sum(&self, other: &GaUFamily) -> Result<GaUFamily> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        let keys: std::collections::BTreeSet<u32> =
            self.u_mats.keys().chain(other.u_mats.keys()).copied().collect();
        let u_mats = keys
            .into_iter()
            .map(|s| (s, self.u(s).direct_sum(&other.u(s))))
            .collect();
        GaUFamily::new(&self.field, self.dim + other.dim, u_mats)
    }

    /// Conjugates every `u_s` by an invertible `g`: `g^{-1} u_s g`.
    pub fn conjugate(&self, g: &Matrix) -> Result<GaUFamily> {
        let inv = g
            .inverse()
            .ok_or_else(|| Error::Precondition("conjugating matrix must be invertible".into()))?;
        let u_mats = self
            .u_mats
            .iter()
            .map(|(&s, u)| (s, inv.mul(u).mul(g)))
            .collect();
        GaUFamily::new(&self.field, self.dim, u_mats)
    }
}

/// `Y_R`: basis `(v, w)` with `u_s(v) = w` for `s <= R`.
pub fn y_r_module(field: &PrimeField, r: u32) -> GaUFamily {
    let e21 = Matrix::unit(field, 2, 1, 0);
    let u_mats = (0..=r).map(|s| (s, e21.clone())).collect();
    GaUFamily::new(field, 2, u_mats).expect("E_21 is square-zero")
}

/// `v_j(f) = Σ_{n>=j} a_n C(n,j) T^{n-j}`.
pub fn v_on_poly(j: u64, f: &MultiPoly) -> Result<MultiPoly> {
    let field = f.field();
    if let Some(v) = f.variables().into_iter().find(|&v| v != Var::T) {
        return Err(Error::ForeignVariable {
            var: v.to_string(),
            context: "k[T]".into(),
        });
    }
    let mut out = MultiPoly::zero(field);
    for (m, a) in f.terms() {
        let n = m.exponent(Var::T) as u64;
        if n < j {
            continue;
        }
        let c = field.mul(a, binom_mod(n, j, field));
        out = out.add(&MultiPoly::term(field, Monomial::power(Var::T, (n - j) as u32), c));
    }
    Ok(out)
}

pub fn derived_v(family: &GaUFamily, j: u64) -> Matrix {
    family.derived_v(j)
}

/// `f_{ji} = Σ_k (v_k)_{ji} T^k`.
pub fn family_to_comodule(family: &GaUFamily) -> Comodule {
    let field = &family.field;
    let n = family.dim;
    let mut coaction = PolyMatrix::zeros(field, n, n);
    for (k, v) in family.occurring() {
        let mono = Monomial::power(Var::T, k as u32);
        for j in 0..n {
            for i in 0..n {
                let c = v.get(j, i);
                if c != 0 {
                    let cur = coaction.get(j, i).add(&MultiPoly::term(field, mono.clone(), c));
                    coaction.set(j, i, cur);
                }
            }
        }
    }
    Comodule::new(CoalgebraId::GaPoly, coaction).expect("square coaction")
}

/// Reads `u_s` off the coefficients of `T^{p^s}` and checks every other coefficient matches `v_j`.
pub fn comodule_to_family(m: &Comodule) -> Result<GaUFamily> {
    if m.coalgebra() != CoalgebraId::GaPoly {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    }
    let field = m.field();
    let p = field.p() as u64;
    let top = m.max_coaction_degree() as u64;
    let mut u_mats = BTreeMap::new();
    let mut s = 0u32;
    while p.pow(s) <= top {
        let mono = Monomial::power(Var::T, p.pow(s) as u32);
        u_mats.insert(s, m.coefficient_matrix(&mono));
        s += 1;
    }
    let family = GaUFamily::new(field, m.dim(), u_mats)?;
    for j in 0..=top {
        let direct = m.coefficient_matrix(&Monomial::power(Var::T, j as u32));
        if direct != family.derived_v(j) {
            return Err(Error::InvalidFamily(format!(
                "coefficient of T^{j} does not match the divided-power product"
            )));
        }
    }
    Ok(family)
}

/// `k[T]_{<d}` as a comodule over `k[T]`, basis `1, T, ..., T^{d-1}`.
pub fn regular_ga(field: &PrimeField, d: u32) -> Comodule {
    let basis: Vec<Monomial> = (0..d).map(|k| Monomial::power(Var::T, k)).collect();
    Comodule::regular_piece(field, CoalgebraId::GaPoly, &basis).expect("k[T]_{<d} is a subcoalgebra")
}

/// `M_{<d}` via the coideal preimage of `span{1, ..., T^{d-1}}`.
pub fn degree_filtration_ga(m: &Comodule, d: u64) -> Result<Subspace> {
    if m.coalgebra() != CoalgebraId::GaPoly {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    }
    let low: Vec<Monomial> = m
        .monomial_support()
        .into_iter()
        .filter(|mono| (mono.degree() as u64) < d)
        .collect();
    m.coideal_preimage(&CoalgebraSubspace::monomial_span(m.field(), low))
}

/// `∩_{j >= d} ker v_j`, from the family side.
pub fn degree_filtration_family(family: &GaUFamily, d: u64) -> Subspace {
    let high: Vec<Matrix> = family
        .occurring()
        .into_iter()
        .filter(|(j, _)| *j >= d)
        .map(|(_, v)| v)
        .collect();
    Subspace::kernel(&Matrix::vstack(&family.field, family.dim, &high))
}

/// Span of `v_j(s)` over all `j` and all `s ∈ S`.
pub fn generated_submodule(m: &Comodule, vectors: &[Vec<Scalar>]) -> Result<Subspace> {
    if vectors.iter().any(|v| v.len() != m.dim()) {
        return Err(Error::DimensionMismatch("vector length differs from dim M".into()));
    }
    let mats: Vec<Matrix> = m
        .monomial_support()
        .iter()
        .map(|mono| m.coefficient_matrix(mono))
        .collect();
    let images: Vec<Vec<Scalar>> = vectors
        .iter()
        .flat_map(|v| std::iter::once(v.clone()).chain(mats.iter().map(move |a| a.apply(v))))
        .collect();
    Ok(Subspace::span(m.field(), m.dim(), &images))
}

/// Exponents `m` whose base-p digits are bounded by those of `n`.
pub fn carries_basis(n: u64, field: &PrimeField) -> Vec<u64> {
    let digits = field.digits(n);
    let p = field.p() as u64;
    let mut out = vec![0u64];
    let mut place = 1u64;
    for &d in digits.digits() {
        out = out
            .iter()
            .flat_map(|&m| (0..=d as u64).map(move |k| m + k * place))
            .collect();
        place *= p;
    }
    out.sort_unstable();
    debug_assert!(out.iter().all(|&m| digit_dominates(m, n, field)));
    out
}

pub fn restrict_frobenius_ga(m: &Comodule, r: u32) -> Result<Comodule> {
    if m.coalgebra() != CoalgebraId::GaPoly {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    }
    m.restrict_to(CoalgebraId::GaTrunc(r))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RetractCheck {
    Ok,
    Mismatch { exponent: u64, reason: String },
}

impl RetractCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, RetractCheck::Ok)
    }
}

/// Compares the coalgebra `k[T]_{<p^r} ⊂ k[T]` with `k[T]/T^{p^r}` under `T^k ↦ T^k`.
pub fn retract_iso_check(r: u32, field: &PrimeField) -> RetractCheck {
    retract_iso_check_with(r, field, Some)
}

/// As [`retract_iso_check`] with a caller-chosen monomial correspondence.
pub fn retract_iso_check_with(
    r: u32,
    field: &PrimeField,
    correspondence: impl Fn(u64) -> Option<u64>,
) -> RetractCheck {
    let bound = (field.p() as u64).pow(r);
    let trunc = CoalgebraId::GaTrunc(r);
    let map_mono = |k: u64| correspondence(k).filter(|&c| c < bound);
    for n in 0..bound {
        let Some(image) = map_mono(n) else {
            return RetractCheck::Mismatch {
                exponent: n,
                reason: "correspondence leaves the truncated basis".into(),
            };
        };
        let source = MultiPoly::term(field, Monomial::power(Var::T, n as u32), 1);
        let target = MultiPoly::term(field, Monomial::power(Var::T, image as u32), 1);
        let eps_src = CoalgebraId::GaPoly.counit(&source).expect("T assigned");
        let eps_tgt = trunc.counit(&target).expect("T assigned");
        if eps_src != eps_tgt {
            return RetractCheck::Mismatch {
                exponent: n,
                reason: format!("counit {eps_src} vs {eps_tgt}"),
            };
        }
        let delta = CoalgebraId::GaPoly.coproduct(&source).expect("polynomial in T");
        let mut transported = MultiPoly::zero(field);
        for (c, left, right) in delta.split_terms() {
            let (a, b) = (left.exponent(Var::T) as u64, right.exponent(Var::T) as u64);
            if a >= bound || b >= bound {
                return RetractCheck::Mismatch {
                    exponent: n,
                    reason: "coproduct leaves k[T]_{<p^r}".into(),
                };
            }
            let (Some(ia), Some(ib)) = (map_mono(a), map_mono(b)) else {
                return RetractCheck::Mismatch {
                    exponent: n,
                    reason: "correspondence leaves the truncated basis".into(),
                };
            };
            let term = Monomial::from_pairs([(Var::T, ia as u32), (Var::T.primed(), ib as u32)]);
            transported = transported.add(&MultiPoly::term(field, term, c));
        }
        let expected = trunc.coproduct(&target).expect("polynomial in T");
        if &transported != expected.as_poly() {
            return RetractCheck::Mismatch {
                exponent: n,
                reason: "coproduct structure constants differ".into(),
            };
        }
    }
    RetractCheck::Ok
}

/// `Θ = Σ_s λ_s^{p^s} u_s` for the subgroup `t ↦ Σ λ_s t^{p^s}`.
pub fn ga_one_param_theta(family: &GaUFamily, lambdas: &[Scalar]) -> Matrix {
    let field = &family.field;
    let p = field.p() as u64;
    lambdas
        .iter()
        .enumerate()
        .fold(Matrix::zeros(field, family.dim, family.dim), |acc, (s, &l)| {
            let c = field.pow(l, p.pow(s as u32));
            if c == 0 {
                acc
            } else {
                acc.add(&family.u(s as u32).scale(c))
            }
        })
}

/// Uniformly random invertible matrix.
pub fn random_invertible(field: &PrimeField, n: usize, rng: &mut impl Rng) -> Matrix {
    loop {
        let g = Matrix::from_fn(field, n, n, |_, _| rng.gen_range(0..field.p()));
        if g.inverse().is_some() {
            return g;
        }
    }
}

/// A random family: each `u_s` is a polynomial without constant term in one
/// nilpotent operator with Jordan blocks of size at most `p`, then conjugated.
pub fn random_family(field: &PrimeField, dim: usize, max_height: u32, rng: &mut impl Rng) -> GaUFamily {
    let p = field.p() as usize;
    let mut blocks = Vec::new();
    let mut left = dim;
    while left > 0 {
        let b = rng.gen_range(1..=left.min(p));
        blocks.push(b);
        left -= b;
    }
    let mut nil = Matrix::zeros(field, dim, dim);
    let mut start = 0;
    for b in blocks {
        for k in 0..b.saturating_sub(1) {
            nil.set(start + k, start + k + 1, 1);
        }
        start += b;
    }
    let mut u_mats = BTreeMap::new();
    for s in 0..max_height {
        if rng.gen_bool(0.3) {
            continue;
        }
        let mut u = Matrix::zeros(field, dim, dim);
        let mut power = nil.clone();
        for _ in 1..p {
            let c = rng.gen_range(0..field.p());
            u = u.add(&power.scale(c));
            power = power.mul(&nil);
        }
        u_mats.insert(s, u);
    }
    let family = GaUFamily::new(field, dim, u_mats).expect("polynomials in one nilpotent commute");
    family
        .conjugate(&random_invertible(field, dim, rng))
        .expect("invertible")
}
