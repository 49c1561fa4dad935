//! The coordinate coalgebra of the unitriangular group `U_N`, its degree
//! pieces, Frobenius-kernel numerics, and the standard representations.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use crate::comodule::{monomials_up_to, CoalgebraId, CoalgebraSubspace, Comodule};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Subspace;
use crate::oracle::binomial;
use crate::poly::{Monomial, MultiPoly, PolyMatrix, TensorPoly, Var};

/// Largest Frobenius-kernel coalgebra we are willing to enumerate.
pub const KERNEL_DIM_GUARD: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UNContext {
    field: PrimeField,
    n: usize,
}

impl UNContext {
    pub fn new(field: &PrimeField, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("N must be >= 2 (got {n})")));
        }
        Ok(UNContext { field: field.clone(), n })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of `U_N`: `N(N-1)/2`.
    pub fn m(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn coalgebra(&self) -> CoalgebraId {
        CoalgebraId::UNPoly(self.n)
    }

    pub fn x_vars(&self) -> Vec<Var> {
        self.coalgebra().generators()
    }
}

pub fn x_coproduct(ctx: &UNContext, i: usize, j: usize) -> Result<TensorPoly> {
    if !(1 <= i && i < j && j <= ctx.n) {
        return Err(Error::IndexOutOfRange { i, j, n: ctx.n });
    }
    ctx.coalgebra().coproduct(&MultiPoly::var(&ctx.field, Var::x(i, j)))
}

pub fn coproduct_poly(ctx: &UNContext, f: &MultiPoly) -> Result<TensorPoly> {
    ctx.coalgebra().coproduct(f)
}

/// Monomial basis of `k[U_N]_{<d}`.
pub fn degree_piece(ctx: &UNContext, d: u32) -> Vec<Monomial> {
    if d == 0 {
        return Vec::new();
    }
    monomials_up_to(&ctx.x_vars(), d - 1, None)
}

/// `C(m + d - 1, m)`.
pub fn degree_piece_count(m: usize, d: u32) -> BigUint {
    if d == 0 {
        return BigUint::default();
    }
    binomial((m as u64) + d as u64 - 1, m as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelDims {
    pub n: usize,
    pub r: u32,
    /// `p^{rm}`
    pub dim_kernel: u64,
    /// monomials with every exponent below `p^r`
    pub enumerated_kernel: u64,
    /// `dim k[U]_{<p^r}` by enumeration
    pub dim_piece_strict: u64,
    pub injective_check: bool,
    pub surjective_check: bool,
    /// `C(m(m-1)/2 + p^r, p^r)`
    pub formula_statement: BigUint,
    /// `C(m + p^r, p^r)`
    pub formula_proof: BigUint,
    /// set when the enumerated piece dimension differs from either closed form
    pub discrepancy: bool,
    /// whether the closed forms are multiples of `p^{rm}`
    pub formula_statement_multiple: bool,
    pub formula_proof_multiple: bool,
}

pub fn frobenius_kernel_dims(ctx: &UNContext, r: u32) -> Result<KernelDims> {
    if r == 0 {
        return Err(Error::Precondition("r must be >= 1".into()));
    }
    let trunc = CoalgebraId::UNTrunc(ctx.n, r);
    let p = ctx.field.p() as u64;
    let m = ctx.m() as u32;
    let bound = p
        .checked_pow(r)
        .filter(|&b| b.checked_pow(m).is_some_and(|d| d <= KERNEL_DIM_GUARD))
        .ok_or_else(|| Error::GuardExceeded(format!("p^(rm) = {p}^({r}*{m}) > 10^6")))?;
    let dim_kernel = bound.pow(m);
    let kernel_basis = trunc.truncated_basis(&ctx.field)?;

    let piece = degree_piece(ctx, bound as u32);
    let images: BTreeSet<&Monomial> = piece
        .iter()
        .filter(|mono| trunc.contains_monomial(mono, &ctx.field))
        .collect();
    let injective_check = images.len() == piece.len();

    let top = (bound as u32) * m;
    let surjective_check = kernel_basis.iter().all(|mono| mono.degree() < top);

    let formula_statement = binomial((m * m.saturating_sub(1) / 2) as u64 + bound, bound);
    let formula_proof = binomial(m as u64 + bound, bound);
    let enumerated = BigUint::from(piece.len());
    let kernel_big = BigUint::from(dim_kernel);
    Ok(KernelDims {
        n: ctx.n,
        r,
        dim_kernel,
        enumerated_kernel: kernel_basis.len() as u64,
        dim_piece_strict: piece.len() as u64,
        injective_check,
        surjective_check,
        discrepancy: enumerated != formula_statement || enumerated != formula_proof,
        formula_statement_multiple: (&formula_statement % &kernel_big) == BigUint::default(),
        formula_proof_multiple: (&formula_proof % &kernel_big) == BigUint::default(),
        formula_statement,
        formula_proof,
    })
}

/// `M_{<d}` for a comodule over `k[U_N]`.
pub fn degree_filtration_un(m: &Comodule, d: u32) -> Result<Subspace> {
    let CoalgebraId::UNPoly(n) = m.coalgebra() else {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    };
    let ctx = UNContext::new(m.field(), n)?;
    let b = CoalgebraSubspace::monomial_span(m.field(), degree_piece(&ctx, d));
    m.coideal_preimage(&b)
}

/// Joint kernel of the coefficient matrices of every occurring monomial of degree `>= d`.
pub fn degree_filtration_by_kernels(m: &Comodule, d: u32) -> Subspace {
    let high: Vec<_> = m
        .monomial_support()
        .into_iter()
        .filter(|mono| mono.degree() >= d)
        .map(|mono| m.coefficient_matrix(&mono))
        .collect();
    let stacked = crate::linalg::Matrix::vstack(m.field(), m.dim(), &high);
    Subspace::kernel(&stacked)
}

/// `Δ(e_i) = e_i ⊗ 1 + Σ_{j<i} e_j ⊗ x_{j,i}`.
pub fn natural_rep(ctx: &UNContext) -> Comodule {
    let f = &ctx.field;
    let coaction = PolyMatrix::from_fn(f, ctx.n, ctx.n, |j, i| match j.cmp(&i) {
        std::cmp::Ordering::Less => MultiPoly::var(f, Var::x(j + 1, i + 1)),
        std::cmp::Ordering::Equal => MultiPoly::one(f),
        std::cmp::Ordering::Greater => MultiPoly::zero(f),
    });
    Comodule::new(ctx.coalgebra(), coaction).expect("square coaction")
}

pub fn sym_square_rep(ctx: &UNContext) -> Comodule {
    natural_rep(ctx).sym_square().expect("same coalgebra")
}

/// The defining representation of `GL_N`, as a comodule over all matrix functions.
pub fn gl_natural(field: &PrimeField, n: usize) -> Result<Comodule> {
    let coaction = PolyMatrix::from_fn(field, n, n, |j, i| MultiPoly::var(field, Var::x(j + 1, i + 1)));
    Comodule::new(CoalgebraId::MatPoly(n), coaction)
}

pub fn gl_sym_square(field: &PrimeField, n: usize) -> Result<Comodule> {
    gl_natural(field, n)?.sym_square()
}

/// Restriction from matrix functions to `U_N`: diagonal entries go to 1, lower entries to 0.
pub fn restrict_to_unipotent(m: &Comodule) -> Result<Comodule> {
    let CoalgebraId::MatPoly(n) = m.coalgebra() else {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    };
    let f = m.field();
    let assignment: BTreeMap<Var, MultiPoly> = CoalgebraId::MatPoly(n)
        .generators()
        .into_iter()
        .map(|v| {
            let image = match v.i.cmp(&v.j) {
                std::cmp::Ordering::Less => MultiPoly::var(f, v),
                std::cmp::Ordering::Equal => MultiPoly::one(f),
                std::cmp::Ordering::Greater => MultiPoly::zero(f),
            };
            (v, image)
        })
        .collect();
    let coaction = m.coaction().try_map(|e| e.substitute(&assignment))?;
    Comodule::new(CoalgebraId::UNPoly(n), coaction)
}

/// A coordinate substitution `x_{ij} ↦ linear form` describing a closed subgroup of `U_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRestriction {
    ctx: UNContext,
    images: BTreeMap<Var, MultiPoly>,
}

impl LinearRestriction {
    pub fn new(ctx: &UNContext, images: BTreeMap<Var, MultiPoly>) -> Result<Self> {
        let coalg = ctx.coalgebra();
        for v in ctx.x_vars() {
            let image = images
                .get(&v)
                .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
            if image.total_degree() > 1 || !coalg.contains(image) {
                return Err(Error::Precondition(format!(
                    "image of {v} must be a linear form in the x-variables"
                )));
            }
        }
        Ok(LinearRestriction { ctx: ctx.clone(), images })
    }

    pub fn apply(&self, f: &MultiPoly) -> Result<MultiPoly> {
        f.substitute(&self.images)
    }

    fn apply_tensor(&self, t: &TensorPoly) -> MultiPoly {
        let primed: BTreeMap<Var, MultiPoly> = self
            .images
            .iter()
            .map(|(v, img)| (v.primed(), img.to_copy(1)))
            .collect();
        let mut all = self.images.clone();
        all.extend(primed);
        t.as_poly().substitute_partial(&all)
    }

    /// `(σ ⊗ σ) Δ(f) = Δ(σ f)` for every monomial `f` of degree at most `max_deg`.
    pub fn is_hopf_compatible(&self, max_deg: u32) -> Result<bool> {
        let coalg = self.ctx.coalgebra();
        for mono in monomials_up_to(&self.ctx.x_vars(), max_deg, None) {
            let f = MultiPoly::term(&self.ctx.field, mono, 1);
            let lhs = self.apply_tensor(&coalg.coproduct(&f)?);
            let rhs = coalg.coproduct(&self.apply(&f)?)?;
            if &lhs != rhs.as_poly() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pushes a `U_N` coaction through the substitution.
    pub fn restrict(&self, m: &Comodule) -> Result<Comodule> {
        if m.coalgebra() != self.ctx.coalgebra() {
            return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
        }
        let coaction = m.coaction().try_map(|e| self.apply(e))?;
        Comodule::new(m.coalgebra(), coaction)
    }
}

pub fn restrict_frobenius_un(m: &Comodule, r: u32) -> Result<Comodule> {
    let CoalgebraId::UNPoly(n) = m.coalgebra() else {
        return Err(Error::UnsupportedCoalgebra(m.coalgebra().to_string()));
    };
    m.restrict_to(CoalgebraId::UNTrunc(n, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(p: u32, n: usize) -> UNContext {
        UNContext::new(&PrimeField::new(p).unwrap(), n).unwrap()
    }

    fn parse(c: &UNContext, s: &str) -> MultiPoly {
        MultiPoly::parse(c.field(), s).unwrap()
    }

    #[test]
    fn coproduct_examples() {
        let c = ctx(3, 3);
        assert_eq!(
            x_coproduct(&c, 1, 2).unwrap().into_poly(),
            parse(&c, "x1_2 + x1_2'")
        );
        assert_eq!(
            x_coproduct(&c, 1, 3).unwrap().into_poly(),
            parse(&c, "x1_3 + x1_2*x2_3' + x1_3'")
        );
        assert!(matches!(x_coproduct(&c, 2, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(x_coproduct(&c, 1, 4), Err(Error::IndexOutOfRange { .. })));
        assert_eq!(
            coproduct_poly(&c, &MultiPoly::one(c.field())).unwrap().into_poly(),
            MultiPoly::one(c.field())
        );
        assert!(matches!(
            coproduct_poly(&c, &parse(&c, "T")),
            Err(Error::ForeignVariable { .. })
        ));
    }

    #[test]
    fn product_coproduct_by_expansion() {
        let c = ctx(5, 3);
        let got = coproduct_poly(&c, &parse(&c, "x1_2*x2_3")).unwrap().into_poly();
        let expected = parse(&c, "x1_2 + x1_2'").mul(&parse(&c, "x2_3 + x2_3'"));
        assert_eq!(got, expected);
    }

    /// `(Δ ⊗ 1)Δ = (1 ⊗ Δ)Δ` on generators, written with three variable copies.
    #[test]
    fn coassociative_on_generators() {
        for n in 2..=4 {
            let c = ctx(3, n);
            let f = c.field();
            let x = |i: usize, j: usize, k: u8| MultiPoly::var(f, Var::x(i, j).with_copy(k));
            // Δ^(2)(x_ij) = Σ over chains i <= a <= b <= j, with x_ii := 1
            let y = |i: usize, j: usize, k: u8| if i == j { MultiPoly::one(f) } else { x(i, j, k) };
            for v in c.x_vars() {
                let (i, j) = (v.i as usize, v.j as usize);
                let mut expected = MultiPoly::zero(f);
                for a in i..=j {
                    for b in a..=j {
                        expected = expected.add(&y(i, a, 0).mul(&y(a, b, 1)).mul(&y(b, j, 2)));
                    }
                }
                // left route: apply Δ to the copy-0 factor of Δ(x_ij)
                let delta = x_coproduct(&c, i, j).unwrap().into_poly();
                let shift: BTreeMap<Var, MultiPoly> = c
                    .x_vars()
                    .into_iter()
                    .map(|w| (w.primed(), x(w.i as usize, w.j as usize, 2)))
                    .collect();
                let lifted = delta.substitute_partial(&shift);
                let expand: BTreeMap<Var, MultiPoly> = c
                    .x_vars()
                    .into_iter()
                    .map(|w| {
                        let d = x_coproduct(&c, w.i as usize, w.j as usize).unwrap().into_poly();
                        (w, d)
                    })
                    .collect();
                let left = lifted.substitute_partial(&expand);
                assert_eq!(left, expected, "N = {n}, x{i}_{j}");
            }
        }
    }

    #[test]
    fn degree_piece_examples() {
        let c = ctx(3, 3);
        assert_eq!(degree_piece(&c, 1), vec![Monomial::one()]);
        let two: BTreeSet<String> = degree_piece(&c, 2).iter().map(|m| m.to_string()).collect();
        let expected: BTreeSet<String> =
            ["1", "x1_2", "x1_3", "x2_3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(two, expected);
        for n in 2..=4 {
            let c = ctx(2, n);
            for d in 1..=5 {
                let piece = degree_piece(&c, d);
                assert_eq!(BigUint::from(piece.len()), degree_piece_count(c.m(), d));
                if d >= 2 {
                    assert_eq!(
                        degree_piece_count(c.m(), d),
                        degree_piece_count(c.m(), d - 1) + binomial((c.m() + d as usize - 2) as u64, (c.m() - 1) as u64)
                    );
                }
                let set: BTreeSet<&Monomial> = piece.iter().collect();
                for mono in &piece {
                    let delta = c.coalgebra().coproduct(&MultiPoly::term(c.field(), mono.clone(), 1)).unwrap();
                    for (_, l, r) in delta.split_terms() {
                        assert!(set.contains(&l) && set.contains(&r));
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_dims() {
        let k = frobenius_kernel_dims(&ctx(2, 3), 1).unwrap();
        assert_eq!(k.dim_kernel, 8);
        assert_eq!(k.enumerated_kernel, 8);
        assert_eq!(k.dim_piece_strict, 4);
        assert!(k.injective_check && k.surjective_check);
        assert_eq!(k.formula_statement, BigUint::from(10u32));
        assert_eq!(k.formula_proof, BigUint::from(10u32));
        assert!(k.discrepancy);
        let k3 = frobenius_kernel_dims(&ctx(3, 3), 1).unwrap();
        assert_eq!(k3.dim_kernel, 27);
        assert_eq!(k3.dim_piece_strict, 10);
        assert!(k3.injective_check && k3.surjective_check);
        assert!(matches!(frobenius_kernel_dims(&ctx(5, 4), 2), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn natural_rep_examples() {
        let c2 = ctx(3, 2);
        let m2 = natural_rep(&c2);
        assert_eq!(m2.entry(0, 1), &parse(&c2, "x1_2"));
        assert_eq!(m2.entry(1, 1), &MultiPoly::one(c2.field()));
        let c3 = ctx(3, 3);
        let m3 = natural_rep(&c3);
        assert_eq!(m3.entry(1, 2), &parse(&c3, "x2_3"));
        assert_eq!(m3.entry(0, 2), &parse(&c3, "x1_3"));
        for n in 2..=5 {
            assert_eq!(natural_rep(&ctx(5, n)).validate(), Ok(()));
        }
        let f = c3.field();
        assert_eq!(degree_filtration_un(&m3, 1).unwrap(), Subspace::coordinate(f, 3, &[0]));
        assert!(degree_filtration_un(&m3, 2).unwrap().is_full());
    }

    #[test]
    fn sym_square_examples() {
        let c = ctx(3, 2);
        let s = sym_square_rep(&c);
        assert_eq!(s.validate(), Ok(()));
        assert_eq!(s.dim(), 3);
        // basis e1e1, e1e2, e2e2
        assert_eq!(s.entry(0, 0), &MultiPoly::one(c.field()));
        assert_eq!(s.entry(2, 2), &MultiPoly::one(c.field()));
        assert_eq!(s.entry(1, 2), &parse(&c, "2*x1_2"));
        assert_eq!(s.entry(0, 2), &parse(&c, "x1_2^2"));
        assert!(degree_filtration_un(&s, 3).unwrap().is_full());
        assert!(!degree_filtration_un(&s, 2).unwrap().is_full());
    }

    #[test]
    fn gl_restriction_matches_unipotent() {
        let f = PrimeField::new(5).unwrap();
        for n in 2..=3 {
            let c = UNContext::new(&f, n).unwrap();
            let g = gl_natural(&f, n).unwrap();
            assert_eq!(g.validate(), Ok(()));
            assert_eq!(restrict_to_unipotent(&g).unwrap(), natural_rep(&c));
            let s = gl_sym_square(&f, n).unwrap();
            assert_eq!(s.validate(), Ok(()));
            assert_eq!(restrict_to_unipotent(&s).unwrap(), sym_square_rep(&c));
        }
    }

    #[test]
    fn block_restriction() {
        let c = ctx(3, 3);
        let f = c.field();
        let images: BTreeMap<Var, MultiPoly> = [
            (Var::x(1, 2), MultiPoly::var(f, Var::x(1, 2))),
            (Var::x(1, 3), MultiPoly::zero(f)),
            (Var::x(2, 3), MultiPoly::zero(f)),
        ]
        .into();
        let sigma = LinearRestriction::new(&c, images).unwrap();
        assert!(sigma.is_hopf_compatible(2).unwrap());
        let r = sigma.restrict(&natural_rep(&c)).unwrap();
        assert_eq!(r.validate(), Ok(()));
        assert_eq!(degree_filtration_un(&r, 1).unwrap().dim(), 2);

        // x_{13} ↦ 0 alone is not a subgroup
        let images: BTreeMap<Var, MultiPoly> = [
            (Var::x(1, 2), MultiPoly::var(f, Var::x(1, 2))),
            (Var::x(1, 3), MultiPoly::zero(f)),
            (Var::x(2, 3), MultiPoly::var(f, Var::x(2, 3))),
        ]
        .into();
        let bad = LinearRestriction::new(&c, images).unwrap();
        assert!(!bad.is_hopf_compatible(1).unwrap());
    }

    #[test]
    fn frobenius_restriction_of_natural() {
        let c = ctx(2, 3);
        let r = restrict_frobenius_un(&natural_rep(&c), 1).unwrap();
        assert_eq!(r.validate(), Ok(()));
        assert!(!r.local_freeness().unwrap().free);
    }

    fn arb_poly(c: UNContext) -> impl Strategy<Value = MultiPoly> {
        let vars = c.x_vars();
        proptest::collection::vec((proptest::collection::vec(0u32..3, vars.len()), 1u32..5), 0..5).prop_map(
            move |terms| {
                terms.into_iter().fold(MultiPoly::zero(c.field()), |acc, (exps, coeff)| {
                    let m = Monomial::from_pairs(vars.iter().copied().zip(exps));
                    acc.add(&MultiPoly::term(c.field(), m, coeff))
                })
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn coproduct_respects_degree(f in arb_poly(ctx(5, 3))) {
            let c = ctx(5, 3);
            let delta = coproduct_poly(&c, &f).unwrap();
            let (l, r) = delta.leg_degrees();
            let d = f.total_degree();
            prop_assert!(f.is_zero() || (l <= d && r <= d));
            let eps = c.coalgebra().counit_point(c.field());
            let left_counit: BTreeMap<Var, MultiPoly> = eps
                .keys()
                .map(|&v| (v, MultiPoly::zero(c.field())))
                .chain(eps.keys().map(|&v| (v.primed(), MultiPoly::var(c.field(), v))))
                .collect();
            prop_assert_eq!(delta.as_poly().substitute_partial(&left_counit), f);
        }
    }
}
