//! One-parameter subgroups, the operator `Θ` they induce on a module, and
//! the freeness, support, pullback and Frobenius-kernel checks built on it.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::comodule::{jordan_type, CoalgebraId, Comodule, JordanType, LocalFreeness};
use crate::error::{Error, Result};
use crate::exponential::{exp_series, exponentials_commute, pullback_along};
use crate::field::{PrimeField, Scalar};
use crate::ga::{comodule_to_family, ga_one_param_theta, GaUFamily};
use crate::linalg::Matrix;
use crate::oracle::all_strictly_upper;
use crate::poly::{Monomial, MultiPoly, PolyMatrix, Var};
use crate::unipotent::KERNEL_DIM_GUARD;

/// `ψ = Π_s E_{B_s} ∘ F^s`, given by scalars for `G_a` or commuting p-nilpotent matrices for `U_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OneParamSubgroup {
    Ga { field: PrimeField, lambdas: Vec<Scalar> },
    UN { n: usize, mats: Vec<Matrix> },
}

impl OneParamSubgroup {
    pub fn ga(field: &PrimeField, lambdas: Vec<Scalar>) -> Self {
        OneParamSubgroup::Ga {
            field: field.clone(),
            lambdas: lambdas.into_iter().map(|l| l % field.p()).collect(),
        }
    }

    pub fn un(n: usize, mats: Vec<Matrix>) -> Self {
        OneParamSubgroup::UN { n, mats }
    }

    pub fn height(&self) -> usize {
        match self {
            OneParamSubgroup::Ga { lambdas, .. } => lambdas.len(),
            OneParamSubgroup::UN { mats, .. } => mats.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            OneParamSubgroup::Ga { lambdas, .. } => lambdas.iter().all(|&l| l == 0),
            OneParamSubgroup::UN { mats, .. } => mats.iter().all(Matrix::is_zero),
        }
    }

    /// The same subgroup of `G_a ≅ U_2`, with `B_s = λ_s E_12`.
    pub fn ga_as_u2(&self) -> Option<OneParamSubgroup> {
        let OneParamSubgroup::Ga { field, lambdas } = self else {
            return None;
        };
        let mats = lambdas
            .iter()
            .map(|&l| Matrix::unit(field, 2, 0, 1).scale(l))
            .collect();
        Some(OneParamSubgroup::un(2, mats))
    }

    /// `Π_s exp_{B_s}(T^{p^s})`, or for `G_a` the `1 x 1` matrix `Σ λ_s T^{p^s}` shifted into `U_2`.
    pub fn parametrization(&self) -> Result<PolyMatrix> {
        let subgroup = match self {
            OneParamSubgroup::Ga { .. } => self.ga_as_u2().expect("Ga tag"),
            OneParamSubgroup::UN { .. } => self.clone(),
        };
        let OneParamSubgroup::UN { n, mats } = &subgroup else { unreachable!() };
        let field = mats
            .first()
            .map(|m| m.field().clone())
            .ok_or_else(|| Error::InvalidSubgroup("height 0".into()))?;
        let p = field.p() as u64;
        let mut out = PolyMatrix::identity(&field, *n);
        for (s, b) in mats.iter().enumerate() {
            let t = MultiPoly::var(&field, Var::T).pow(p.pow(s as u32));
            out = out.mul(&exp_series(&PolyMatrix::from_matrix(b), &t));
        }
        Ok(out)
    }
}

impl fmt::Display for OneParamSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OneParamSubgroup::Ga { lambdas, .. } => write!(f, "Ga{lambdas:?}"),
            OneParamSubgroup::UN { n, mats } => {
                let rows: Vec<Vec<Vec<Scalar>>> = mats.iter().map(Matrix::to_rows).collect();
                write!(f, "U{n}{rows:?}")
            }
        }
    }
}

/// Checks p-nilpotence, pairwise commutation, and commutation of the exponentials.
pub fn validate_1psg(psi: &OneParamSubgroup) -> Result<()> {
    let OneParamSubgroup::UN { n, mats } = psi else {
        return Ok(());
    };
    for (s, b) in mats.iter().enumerate() {
        if b.rows() != *n || b.cols() != *n {
            return Err(Error::InvalidSubgroup(format!("B_{s} is not {n} x {n}")));
        }
        if !b.is_p_nilpotent() {
            return Err(Error::InvalidSubgroup(format!("B_{s} is not p-nilpotent")));
        }
    }
    for s in 0..mats.len() {
        for t in s + 1..mats.len() {
            if !mats[s].commutes_with(&mats[t]) {
                return Err(Error::InvalidSubgroup(format!("B_{s} and B_{t} do not commute")));
            }
            let (a, b) = (PolyMatrix::from_matrix(&mats[s]), PolyMatrix::from_matrix(&mats[t]));
            if !exponentials_commute(&a, &b) {
                return Err(Error::InvalidSubgroup(format!(
                    "exp(B_{s}) and exp(B_{t}) do not commute"
                )));
            }
        }
    }
    Ok(())
}

/// A finite-dimensional rational module in either presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RationalModule {
    Comodule(Comodule),
    Family(GaUFamily),
}

impl RationalModule {
    pub fn dim(&self) -> usize {
        match self {
            RationalModule::Comodule(m) => m.dim(),
            RationalModule::Family(f) => f.dim(),
        }
    }

    pub fn field(&self) -> &PrimeField {
        match self {
            RationalModule::Comodule(m) => m.field(),
            RationalModule::Family(f) => f.field(),
        }
    }

    /// Coaction form (families become comodules over `k[T]`).
    pub fn to_comodule(&self) -> Comodule {
        match self {
            RationalModule::Comodule(m) => m.clone(),
            RationalModule::Family(f) => f.to_comodule(),
        }
    }
}

/// `Θ = Σ_s [T^{p^s}] (1 ⊗ E_{B_s}^*) Δ_M`.
pub fn theta_operator(module: &RationalModule, psi: &OneParamSubgroup) -> Result<Matrix> {
    let theta = match (module, psi) {
        (RationalModule::Family(fam), OneParamSubgroup::Ga { lambdas, .. }) => ga_one_param_theta(fam, lambdas),
        (RationalModule::Comodule(m), OneParamSubgroup::Ga { lambdas, .. }) if m.coalgebra() == CoalgebraId::GaPoly => {
            ga_one_param_theta(&comodule_to_family(m)?, lambdas)
        }
        (RationalModule::Comodule(m), OneParamSubgroup::UN { n, mats }) if m.coalgebra() == CoalgebraId::UNPoly(*n) => {
            validate_1psg(psi)?;
            let field = m.field();
            let p = field.p() as u64;
            let mut theta = Matrix::zeros(field, m.dim(), m.dim());
            for (s, b) in mats.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let e = exp_series(&PolyMatrix::from_matrix(b), &MultiPoly::var(field, Var::T));
                let mono = Monomial::power(Var::T, p.pow(s as u32) as u32);
                let coeff = Matrix::from_fn(field, m.dim(), m.dim(), |j, i| {
                    pullback_along(m.entry(j, i), &e)
                        .map(|g| g.coefficient(&mono))
                        .unwrap_or(0)
                });
                theta = theta.add(&coeff);
            }
            theta
        }
        _ => {
            return Err(Error::InvalidSubgroup(format!(
                "subgroup {psi} does not match the module's group"
            )))
        }
    };
    if !theta.is_p_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    Ok(theta)
}

/// Whether `M` is free over `k[t]/t^p` with `t` acting as `Θ`.
pub fn is_free_at(module: &RationalModule, psi: &OneParamSubgroup) -> Result<(bool, JordanType)> {
    let jt = jordan_type(&theta_operator(module, psi)?)?;
    Ok((jt.is_free(module.field().p()), jt))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportVerdict {
    pub psi: OneParamSubgroup,
    pub in_support: bool,
    pub jordan: JordanType,
}

pub fn support_sample(module: &RationalModule, samples: &[OneParamSubgroup]) -> Result<Vec<SupportVerdict>> {
    samples
        .iter()
        .map(|psi| {
            let (free, jordan) = is_free_at(module, psi)?;
            Ok(SupportVerdict {
                psi: psi.clone(),
                in_support: !free,
                jordan,
            })
        })
        .collect()
}

/// The `G_a`-module obtained by composing the coaction with `ψ^*`.
pub fn pullback_module(module: &RationalModule, psi: &OneParamSubgroup) -> Result<GaUFamily> {
    validate_1psg(psi)?;
    let m = module.to_comodule();
    let field = m.field().clone();
    let composite = match (m.coalgebra(), psi) {
        (CoalgebraId::GaPoly, OneParamSubgroup::Ga { lambdas, .. }) => {
            let p = field.p() as u64;
            let image = lambdas.iter().enumerate().fold(MultiPoly::zero(&field), |acc, (s, &l)| {
                acc.add(&MultiPoly::var(&field, Var::T).pow(p.pow(s as u32)).scale(l))
            });
            let assignment: BTreeMap<Var, MultiPoly> = [(Var::T, image)].into();
            m.coaction().try_map(|e| e.substitute(&assignment))?
        }
        (CoalgebraId::UNPoly(n), OneParamSubgroup::UN { n: k, .. }) if n == *k => {
            let param = psi.parametrization()?;
            m.coaction().try_map(|e| pullback_along(e, &param))?
        }
        _ => {
            return Err(Error::InvalidSubgroup(format!(
                "subgroup {psi} does not match the module's group"
            )))
        }
    };
    let pulled = Comodule::new(CoalgebraId::GaPoly, composite)?;
    comodule_to_family(&pulled)
}

/// Restriction to the `r`-th Frobenius kernel followed by the local freeness test.
pub fn frobenius_injectivity_check(m: &Comodule, r: u32) -> Result<LocalFreeness> {
    let target = match m.coalgebra() {
        CoalgebraId::GaPoly => CoalgebraId::GaTrunc(r),
        CoalgebraId::UNPoly(n) => CoalgebraId::UNTrunc(n, r),
        other => return Err(Error::UnsupportedCoalgebra(other.to_string())),
    };
    target.check()?;
    let dim = target.dual_algebra_dim(m.field());
    if dim.is_none_or(|d| d > KERNEL_DIM_GUARD) {
        return Err(Error::GuardExceeded(format!("dim of {target} exceeds 10^6")));
    }
    m.restrict_to(target)?.local_freeness()
}

/// A random nonzero `(λ_0, ..., λ_{r-1})`.
pub fn random_ga_subgroup(field: &PrimeField, height: usize, rng: &mut impl Rng) -> OneParamSubgroup {
    loop {
        let lambdas: Vec<Scalar> = (0..height).map(|_| rng.gen_range(0..field.p())).collect();
        if height == 0 || lambdas.iter().any(|&l| l != 0) {
            return OneParamSubgroup::ga(field, lambdas);
        }
    }
}

/// All `p^r` tuples, including zero.
pub fn exhaustive_ga_subgroups(field: &PrimeField, height: usize) -> Vec<OneParamSubgroup> {
    let p = field.p() as usize;
    (0..p.pow(height as u32))
        .map(|mut code| {
            let lambdas = (0..height)
                .map(|_| {
                    let l = (code % p) as Scalar;
                    code /= p;
                    l
                })
                .collect();
            OneParamSubgroup::ga(field, lambdas)
        })
        .collect()
}

/// Strictly upper triangular matrices commuting with every matrix in `with`, as a basis.
fn upper_centralizer(field: &PrimeField, n: usize, with: &[Matrix]) -> Vec<Matrix> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let units: Vec<Matrix> = slots.iter().map(|&(i, j)| Matrix::unit(field, n, i, j)).collect();
    let mut rows = Vec::new();
    for b in with {
        let comms: Vec<Matrix> = units.iter().map(|u| u.mul(b).sub(&b.mul(u))).collect();
        for r in 0..n {
            for c in 0..n {
                rows.push(comms.iter().map(|m| m.get(r, c)).collect::<Vec<_>>());
            }
        }
    }
    let mut system = Matrix::zeros(field, rows.len(), units.len());
    for (r, row) in rows.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            system.set(r, c, x);
        }
    }
    system
        .nullspace()
        .into_iter()
        .map(|v| {
            v.iter()
                .zip(&units)
                .fold(Matrix::zeros(field, n, n), |acc, (&c, u)| acc.add(&u.scale(c)))
        })
        .collect()
}

fn random_combination(field: &PrimeField, n: usize, basis: &[Matrix], rng: &mut impl Rng) -> Matrix {
    basis.iter().fold(Matrix::zeros(field, n, n), |acc, b| {
        acc.add(&b.scale(rng.gen_range(0..field.p())))
    })
}

/// `B_0` random strictly upper triangular; each later `B_s` drawn from the common centralizer.
pub fn random_un_subgroup(field: &PrimeField, n: usize, height: usize, rng: &mut impl Rng) -> OneParamSubgroup {
    let mut mats: Vec<Matrix> = Vec::new();
    for _ in 0..height {
        let basis = upper_centralizer(field, n, &mats);
        let mut chosen = Matrix::zeros(field, n, n);
        for _ in 0..64 {
            let candidate = random_combination(field, n, &basis, rng);
            if candidate.is_p_nilpotent() {
                chosen = candidate;
                break;
            }
        }
        mats.push(chosen);
    }
    OneParamSubgroup::un(n, mats)
}

/// All commuting p-nilpotent strictly upper triangular tuples of the given height.
pub fn exhaustive_un_subgroups(field: &PrimeField, n: usize, height: usize) -> Result<Vec<OneParamSubgroup>> {
    let points: Vec<Matrix> = all_strictly_upper(field, n)
        .into_iter()
        .filter(|b| b.is_p_nilpotent())
        .collect();
    let total = (points.len() as u64).checked_pow(height as u32).unwrap_or(u64::MAX);
    if total > 100_000 {
        return Err(Error::GuardExceeded(format!("{total} tuples to enumerate")));
    }
    let mut tuples: Vec<Vec<Matrix>> = vec![Vec::new()];
    for _ in 0..height {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                points
                    .iter()
                    .filter(|b| t.iter().all(|a| a.commutes_with(b)))
                    .map(|b| {
                        let mut next = t.clone();
                        next.push(b.clone());
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    Ok(tuples.into_iter().map(|mats| OneParamSubgroup::un(n, mats)).collect())
}

/// Where a sample pool comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplePlan {
    Random { count: usize },
    Exhaustive,
}

/// The group a module's subgroups must come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupTag {
    Ga,
    UN(usize),
}

impl GroupTag {
    pub fn of(module: &RationalModule) -> Result<GroupTag> {
        match module {
            RationalModule::Family(_) => Ok(GroupTag::Ga),
            RationalModule::Comodule(m) => match m.coalgebra() {
                CoalgebraId::GaPoly => Ok(GroupTag::Ga),
                CoalgebraId::UNPoly(n) => Ok(GroupTag::UN(n)),
                other => Err(Error::UnsupportedCoalgebra(other.to_string())),
            },
        }
    }
}

/// Smallest height whose top Frobenius power `p^{r-1}` exceeds every pulled-back T-degree.
pub fn natural_height(module: &RationalModule) -> usize {
    let p = module.field().p() as u64;
    let m = module.to_comodule();
    let bound = (p - 1) * m.max_coaction_degree().max(1) as u64;
    let mut r = 1;
    while p.pow(r as u32) <= bound {
        r += 1;
    }
    r
}

pub fn subgroup_pool(
    field: &PrimeField,
    group: GroupTag,
    height: usize,
    plan: SamplePlan,
    rng: &mut impl Rng,
) -> Result<Vec<OneParamSubgroup>> {
    match (group, plan) {
        (GroupTag::Ga, SamplePlan::Exhaustive) => {
            if (field.p() as u64).checked_pow(height as u32).is_none_or(|c| c > 100_000) {
                return Err(Error::GuardExceeded("too many subgroups to enumerate".into()));
            }
            Ok(exhaustive_ga_subgroups(field, height))
        }
        (GroupTag::Ga, SamplePlan::Random { count }) => {
            Ok((0..count).map(|_| random_ga_subgroup(field, height, rng)).collect())
        }
        (GroupTag::UN(n), SamplePlan::Exhaustive) => exhaustive_un_subgroups(field, n, height),
        (GroupTag::UN(n), SamplePlan::Random { count }) => {
            Ok((0..count).map(|_| random_un_subgroup(field, n, height, rng)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponential::{ga_comodule_as_u2, mock_trivial_check};
    use crate::ga::{random_family, regular_ga, y_r_module};
    use crate::unipotent::{natural_rep, UNContext};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn validate_examples() {
        let field = f(3);
        let e12 = Matrix::unit(&field, 3, 0, 1);
        let e13 = Matrix::unit(&field, 3, 0, 2);
        let e23 = Matrix::unit(&field, 3, 1, 2);
        assert!(validate_1psg(&OneParamSubgroup::un(3, vec![e23.clone()])).is_ok());
        assert!(validate_1psg(&OneParamSubgroup::un(3, vec![e12.clone(), e13])).is_ok());
        assert!(matches!(
            validate_1psg(&OneParamSubgroup::un(3, vec![e12, e23])),
            Err(Error::InvalidSubgroup(_))
        ));
        assert!(validate_1psg(&OneParamSubgroup::un(2, vec![Matrix::identity(&field, 2)])).is_err());
    }

    #[test]
    fn theta_examples() {
        let field = f(3);
        let ctx = UNContext::new(&field, 3).unwrap();
        let nat = RationalModule::Comodule(natural_rep(&ctx));
        let zero = OneParamSubgroup::un(3, vec![Matrix::zeros(&field, 3, 3); 2]);
        assert!(theta_operator(&nat, &zero).unwrap().is_zero());
        let b = Matrix::from_rows(&field, &[[0, 1, 0], [0, 0, 1], [0, 0, 0]]).unwrap();
        let theta = theta_operator(&nat, &OneParamSubgroup::un(3, vec![b.clone()])).unwrap();
        assert_eq!(theta, b);
        assert_eq!(jordan_type(&theta).unwrap().parts(), &[3]);

        let y = RationalModule::Family(y_r_module(&field, 2));
        let theta = theta_operator(&y, &OneParamSubgroup::ga(&field, vec![1])).unwrap();
        assert_eq!(theta, Matrix::unit(&field, 2, 1, 0));
        assert!(theta_operator(&y, &zero).is_err());
    }

    #[test]
    fn freeness_examples() {
        for p in [2u32, 3, 5] {
            let field = f(p);
            let reg = RationalModule::Comodule(regular_ga(&field, p));
            let (free, jt) = is_free_at(&reg, &OneParamSubgroup::ga(&field, vec![1])).unwrap();
            assert!(free);
            assert_eq!(jt.parts(), &[p as usize]);
            let triv = RationalModule::Family(GaUFamily::trivial(&field, 1));
            let verdicts = support_sample(&triv, &exhaustive_ga_subgroups(&field, 2)).unwrap();
            assert!(verdicts.iter().all(|v| v.in_support));
        }
        for p in [3u32, 5] {
            let field = f(p);
            let y = RationalModule::Family(y_r_module(&field, 2));
            for psi in exhaustive_ga_subgroups(&field, 3) {
                assert!(!is_free_at(&y, &psi).unwrap().0);
            }
        }
    }

    #[test]
    fn routes_through_u2_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [3u32, 5] {
            let field = f(p);
            for _ in 0..30 {
                let fam = random_family(&field, 3, 2, &mut rng);
                let u2 = RationalModule::Comodule(ga_comodule_as_u2(&fam.to_comodule()).unwrap());
                let psi = random_ga_subgroup(&field, 3, &mut rng);
                let direct = theta_operator(&RationalModule::Family(fam.clone()), &psi).unwrap();
                let via = theta_operator(&u2, &psi.ga_as_u2().unwrap()).unwrap();
                assert_eq!(direct, via);
            }
        }
    }

    #[test]
    fn scaling_covariance() {
        let field = f(5);
        let ctx = UNContext::new(&field, 3).unwrap();
        let nat = RationalModule::Comodule(natural_rep(&ctx).sym_square().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let OneParamSubgroup::UN { mats, .. } = random_un_subgroup(&field, 3, 1, &mut rng) else {
                unreachable!()
            };
            let base = theta_operator(&nat, &OneParamSubgroup::un(3, mats.clone())).unwrap();
            for alpha in 0..5 {
                let scaled = OneParamSubgroup::un(3, vec![mats[0].scale(alpha)]);
                assert_eq!(theta_operator(&nat, &scaled).unwrap(), base.scale(alpha));
            }
        }
    }

    #[test]
    fn pullback_examples() {
        let field = f(3);
        let ctx = UNContext::new(&field, 2).unwrap();
        let nat = RationalModule::Comodule(natural_rep(&ctx));
        let fam = pullback_module(&nat, &OneParamSubgroup::un(2, vec![Matrix::unit(&field, 2, 0, 1)])).unwrap();
        assert_eq!(fam.u(0), Matrix::unit(&field, 2, 0, 1));
        assert_eq!(fam.height(), 1);
        let triv = RationalModule::Comodule(Comodule::trivial(&field, CoalgebraId::UNPoly(3), 2));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let psi = random_un_subgroup(&field, 3, 2, &mut rng);
            assert!(pullback_module(&triv, &psi).unwrap().is_trivial());
        }
        assert!(mock_trivial_check(&triv.to_comodule()).unwrap());
    }

    #[test]
    fn random_subgroups_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, n) in [(2u32, 3usize), (2, 4), (3, 3), (3, 4), (5, 4)] {
            for h in 1..=3 {
                let psi = random_un_subgroup(&f(p), n, h, &mut rng);
                assert!(validate_1psg(&psi).is_ok());
                assert_eq!(psi.height(), h);
            }
        }
        let all = exhaustive_un_subgroups(&f(2), 3, 1).unwrap();
        assert_eq!(all.len(), 6);
        for psi in exhaustive_un_subgroups(&f(3), 3, 2).unwrap() {
            assert!(validate_1psg(&psi).is_ok());
        }
    }

    #[test]
    fn frobenius_checks() {
        for (p, r) in [(2u32, 1u32), (2, 2), (3, 1)] {
            let field = f(p);
            let m = regular_ga(&field, p.pow(r));
            assert!(frobenius_injectivity_check(&m, r).unwrap().free);
            let next = frobenius_injectivity_check(&m, r + 1).unwrap();
            assert!(!next.free);
            assert_eq!(next.dim_module, p.pow(r) as usize);
        }
        let field = f(2);
        let basis = crate::comodule::monomials_up_to(&CoalgebraId::UNPoly(3).generators(), 1, None);
        let m = Comodule::regular_piece(&field, CoalgebraId::UNPoly(3), &basis).unwrap();
        let lf = frobenius_injectivity_check(&m, 1).unwrap();
        assert!(!lf.free);
        assert_eq!((lf.dim_module, lf.dim_algebra), (4, 8));
        assert!(frobenius_injectivity_check(&natural_rep(&UNContext::new(&f(7), 4).unwrap()), 2).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn theta_nilpotent_and_pullback_valid(seed in proptest::prelude::any::<u64>(), big in proptest::prelude::any::<bool>()) {
            let p = if big { 5 } else { 3 };
            let field = f(p);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = RationalModule::Comodule(crate::verify::random_un_comodule(&field, 3, 2, &mut rng).unwrap());
            let psi = random_un_subgroup(&field, 3, natural_height(&m), &mut rng);
            let theta = theta_operator(&m, &psi).unwrap();
            proptest::prop_assert!(theta.pow(p as u64).is_zero());
            let fam = pullback_module(&m, &psi).unwrap();
            proptest::prop_assert_eq!(fam.dim(), m.dim());
            proptest::prop_assert_eq!(fam.to_comodule().validate(), Ok(()));
            let zero = OneParamSubgroup::un(3, vec![Matrix::zeros(&field, 3, 3); psi.height()]);
            proptest::prop_assert!(theta_operator(&m, &zero).unwrap().is_zero());
            proptest::prop_assert!(pullback_module(&m, &zero).unwrap().is_trivial());
        }
    }
}
