//! Brute-force check suites. Each suite returns one record per check, and a
//! report built from the same options and seed is byte-identical across runs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::comodule::{monomials_up_to, CoalgebraId, Comodule};
use crate::error::{Error, Result};
use crate::exponential::{
    coalg_exp_degree, exp_pullback, exponential_degree, frobenius_twist, ga_comodule_as_u2, ga_exp_filtration,
    ga_exponential_degree, module_exp_filtration, nilpotent_points, relate_inclusions_check, schur_bound_check,
    ExpSource, RelateOutcome, SymbolicNilpotentDomain,
};
use crate::field::{binom_mod, PrimeField};
use crate::ga::{
    carries_basis, degree_filtration_family, degree_filtration_ga, random_family, random_invertible,
    retract_iso_check, y_r_module, GaUFamily,
};
use crate::io::{CheckRecord, ReportFile};
use crate::linalg::Subspace;
use crate::oracle::{all_strictly_upper, max_pullback_degree, reduce_mod, span_support_of_power};
use crate::poly::{MultiPoly, Var};
use crate::support::{
    natural_height, pullback_module, subgroup_pool, support_sample, theta_operator, GroupTag, RationalModule,
    SamplePlan,
};
use crate::unipotent::{
    degree_filtration_un, frobenius_kernel_dims, gl_natural, gl_sym_square, natural_rep, restrict_to_unipotent,
    sym_square_rep, UNContext,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Carries,
    Lucas,
    Retract,
    Numerics,
    NaturalFlags,
    Notcompare,
    Schur,
    Relate,
    Yr,
    Twist,
    Freeness,
    FunctorLaws,
    MockTrivial,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Carries,
        Suite::Lucas,
        Suite::Retract,
        Suite::Numerics,
        Suite::NaturalFlags,
        Suite::Notcompare,
        Suite::Schur,
        Suite::Relate,
        Suite::Yr,
        Suite::Twist,
        Suite::Freeness,
        Suite::FunctorLaws,
        Suite::MockTrivial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Carries => "carries",
            Suite::Lucas => "lucas",
            Suite::Retract => "retract",
            Suite::Numerics => "numerics",
            Suite::NaturalFlags => "natural-flags",
            Suite::Notcompare => "notcompare",
            Suite::Schur => "schur",
            Suite::Relate => "relate",
            Suite::Yr => "yr",
            Suite::Twist => "twist",
            Suite::Freeness => "freeness",
            Suite::FunctorLaws => "functor-laws",
            Suite::MockTrivial => "mock-trivial",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// `p` and `n` narrow the suites that take them (`relate`); others ignore them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub p: Option<u32>,
    pub n: Option<usize>,
}

pub fn run_suites(suites: &[Suite], opts: &SuiteOptions) -> Result<ReportFile> {
    let mut records = Vec::new();
    for &suite in suites {
        records.extend(run_suite(suite, opts)?);
    }
    Ok(ReportFile::new(records))
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<CheckRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (suite as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    match suite {
        Suite::Carries => carries_suite(),
        Suite::Lucas => lucas_suite(),
        Suite::Retract => retract_suite(),
        Suite::Numerics => numerics_suite(),
        Suite::NaturalFlags => natural_flags_suite(),
        Suite::Notcompare => notcompare_suite(),
        Suite::Schur => schur_suite(),
        Suite::Relate => relate_suite(opts),
        Suite::Yr => yr_suite(&mut rng),
        Suite::Twist => twist_suite(&mut rng),
        Suite::Freeness => freeness_suite(&mut rng),
        Suite::FunctorLaws => functor_laws_suite(&mut rng),
        Suite::MockTrivial => mock_trivial_suite(&mut rng),
    }
}

fn field(p: u32) -> PrimeField {
    PrimeField::new(p).expect("suite primes are prime")
}

fn base_p_digits(mut n: u64, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % p);
        n /= p;
    }
    out
}

fn carries_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for p in [2u32, 3, 5] {
        let f = field(p);
        let mut mismatch = None;
        for n in 0..=300u64 {
            let basis = carries_basis(n, &f);
            let count: u64 = base_p_digits(n, p as u64).iter().map(|d| d + 1).product();
            if basis != span_support_of_power(n, &f) || basis.len() as u64 != count {
                mismatch = Some(n);
                break;
            }
        }
        let rec = CheckRecord::pass_if(format!("carries/p={p}"), "carries-basis", json!({"p": p, "n_max": 300}), mismatch.is_none());
        out.push(match mismatch {
            Some(n) => rec.with_witness(json!({"n": n, "basis": carries_basis(n, &f), "span": span_support_of_power(n, &f)})),
            None => rec,
        });
    }
    Ok(out)
}

fn lucas_suite() -> Result<Vec<CheckRecord>> {
    const N_MAX: usize = 2000;
    let primes = [2u32, 3, 5, 7];
    let fields: Vec<PrimeField> = primes.iter().map(|&p| field(p)).collect();
    let mut first_bad: Vec<Option<(usize, usize)>> = vec![None; primes.len()];
    let mut row: Vec<BigUint> = vec![BigUint::from(1u32)];
    for n in 0..=N_MAX {
        for (k, f) in fields.iter().enumerate() {
            if first_bad[k].is_some() {
                continue;
            }
            if let Some(j) = (0..=n).find(|&j| binom_mod(n as u64, j as u64, f) != reduce_mod(&row[j], f.p())) {
                first_bad[k] = Some((n, j));
            }
        }
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::from(1u32));
        next.extend(row.windows(2).map(|w| &w[0] + &w[1]));
        next.push(BigUint::from(1u32));
        row = next;
    }
    Ok(primes
        .iter()
        .zip(first_bad)
        .map(|(&p, bad)| {
            let rec = CheckRecord::pass_if(format!("lucas/p={p}"), "lucas", json!({"p": p, "n_max": N_MAX}), bad.is_none());
            match bad {
                Some((n, j)) => rec.with_witness(json!({"n": n, "j": j})),
                None => rec,
            }
        })
        .collect())
}

fn retract_suite() -> Result<Vec<CheckRecord>> {
    Ok([(2u32, 1u32), (2, 2), (3, 1), (3, 2)]
        .into_iter()
        .map(|(p, r)| {
            let outcome = retract_iso_check(r, &field(p));
            let rec = CheckRecord::pass_if(format!("retract/p={p}/r={r}"), "ga-truncation-retract", json!({"p": p, "r": r}), outcome.is_ok());
            if outcome.is_ok() {
                rec
            } else {
                rec.with_witness(json!(format!("{outcome:?}")))
            }
        })
        .collect())
}

fn numerics_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let ctx = UNContext::new(&field(p), 3)?;
        let dims = frobenius_kernel_dims(&ctx, 1)?;
        let expected = (p as u64).pow(3);
        let inputs = json!({"N": 3, "p": p, "r": 1});
        out.push(
            CheckRecord::pass_if(
                format!("numerics/p={p}/kernel-dim"),
                "frobenius-kernel-dimension",
                inputs.clone(),
                dims.enumerated_kernel == expected && dims.dim_kernel == expected,
            )
            .with_witness(json!({"enumerated": dims.enumerated_kernel, "expected": expected})),
        );
        out.push(CheckRecord::pass_if(
            format!("numerics/p={p}/injective"),
            "degree-piece-injects-into-kernel",
            inputs.clone(),
            dims.injective_check,
        ));
        out.push(CheckRecord::pass_if(
            format!("numerics/p={p}/surjective"),
            "kernel-spanned-below-top-degree",
            inputs.clone(),
            dims.surjective_check,
        ));
        let independent: u64 = (0..p as u64).map(|d| (d + 1) * (d + 2) / 2).sum();
        out.push(
            CheckRecord::pass_if(
                format!("numerics/p={p}/piece-dim"),
                "degree-piece-dimension",
                inputs,
                dims.dim_piece_strict == independent && (p != 2 || dims.discrepancy),
            )
            .with_witness(json!({
                "enumerated": dims.dim_piece_strict,
                "closed_form_statement": dims.formula_statement.to_string(),
                "closed_form_proof": dims.formula_proof.to_string(),
                "discrepancy": dims.discrepancy,
            })),
        );
    }
    Ok(out)
}

fn natural_flags_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for p in [3u32, 5] {
        let f = field(p);
        let m = natural_rep(&UNContext::new(&f, 3)?);
        let flags: Vec<Subspace> = (0..3).map(|d| module_exp_filtration(&m, d)).collect::<Result<_>>()?;
        let expected = [
            Subspace::coordinate(&f, 3, &[0]),
            Subspace::coordinate(&f, 3, &[0, 1]),
            Subspace::full(&f, 3),
        ];
        let degree = exponential_degree(&m)?;
        out.push(
            CheckRecord::pass_if(
                format!("natural-flags/p={p}"),
                "natural-exp-flags",
                json!({"N": 3, "p": p}),
                flags.iter().zip(&expected).all(|(a, b)| a == b) && degree == 2,
            )
            .with_witness(json!({"dims": flags.iter().map(Subspace::dim).collect::<Vec<_>>(), "degree": degree})),
        );
    }
    Ok(out)
}

fn notcompare_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for p in [3u32, 5] {
        let f = field(p);
        let domain = SymbolicNilpotentDomain::new(&f, 3)?;
        let g = MultiPoly::parse(&f, "2*x1_3 - x1_2*x2_3")?;
        let x13 = MultiPoly::var(&f, Var::x(1, 3));
        let (eg, ex) = (coalg_exp_degree(&g, &domain)?, coalg_exp_degree(&x13, &domain)?);
        out.push(
            CheckRecord::pass_if(
                format!("notcompare/p={p}"),
                "exp-degree-vs-degree-incomparable",
                json!({"N": 3, "p": p, "f": g.to_string()}),
                eg == 1 && g.total_degree() == 2 && ex == 2 && x13.total_degree() == 1,
            )
            .with_witness(json!({"exp_degree": eg, "exp_degree_x1_3": ex})),
        );
    }
    let f2 = field(2);
    let g = MultiPoly::parse(&f2, "x1_2*x2_3")?;
    let points = nilpotent_points(&f2, 3)?;
    let mut vanishing = 0;
    for b in &points {
        if exp_pullback(&g, ExpSource::Numeric(b))?.is_zero() {
            vanishing += 1;
        }
    }
    out.push(
        CheckRecord::pass_if(
            "notcompare/p=2",
            "small-prime-pullback-vanishing",
            json!({"N": 3, "p": 2, "f": g.to_string()}),
            vanishing == points.len() && points.len() == 6,
        )
        .with_witness(json!({
            "points_total": all_strictly_upper(&f2, 3).len(),
            "points_square_zero": points.len(),
            "vanishing": vanishing,
        })),
    );
    Ok(out)
}

fn schur_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for p in [3u32, 5] {
        let f = field(p);
        for n in [2usize, 3] {
            let mats = all_strictly_upper(&f, n);
            let samples = nilpotent_points(&f, n)?;
            for (name, gl, d) in [("natural", gl_natural(&f, n)?, 1u32), ("sym2", gl_sym_square(&f, n)?, 2)] {
                let m = restrict_to_unipotent(&gl)?;
                let degree = exponential_degree(&m)?;
                let oracle = m
                    .coaction()
                    .entries()
                    .iter()
                    .map(|g| max_pullback_degree(g, &mats))
                    .max()
                    .unwrap_or(0);
                let (gl_ok, gl_worst) = schur_bound_check(&gl, d, &samples)?;
                let bound = (p - 1) * d;
                out.push(
                    CheckRecord::pass_if(
                        format!("schur/p={p}/N={n}/{name}"),
                        "polynomial-degree-bounds-exp-degree",
                        json!({"N": n, "p": p, "rep": name, "d": d}),
                        degree <= bound && degree == oracle && gl_ok && gl_worst == oracle,
                    )
                    .with_witness(json!({"degree": degree, "oracle": oracle, "bound": bound})),
                );
            }
        }
    }
    Ok(out)
}

fn relate_suite(opts: &SuiteOptions) -> Result<Vec<CheckRecord>> {
    const DMAX: u32 = 4;
    let cases: Vec<(usize, u32, Vec<u32>)> = match (opts.n, opts.p) {
        (None, None) => vec![(2, 3, vec![2, 3, 4]), (3, 5, vec![4])],
        (n, p) => {
            let n = n.unwrap_or(3);
            let p = p.unwrap_or(5);
            let first = n as u32;
            vec![(n, p, (first..=DMAX).collect())]
        }
    };
    let mut out = Vec::new();
    for (n, p, ds) in cases {
        let ctx = UNContext::new(&PrimeField::new(p)?, n)?;
        for d in ds {
            let outcome = relate_inclusions_check(&ctx, d, 1, DMAX)?;
            let rec = CheckRecord::pass_if(
                format!("relate/N={n}/p={p}/d={d}"),
                "degree-and-exp-filtrations-interleave",
                json!({"N": n, "p": p, "d": d, "e": 1, "dmax": DMAX}),
                outcome == RelateOutcome::Ok,
            );
            out.push(match outcome {
                RelateOutcome::Ok => rec,
                RelateOutcome::Counterexample { direction, witness } => {
                    rec.with_witness(json!({"direction": format!("{direction:?}"), "f": witness.to_string()}))
                }
            });
        }
    }
    Ok(out)
}

fn yr_suite(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for p in [3u32, 5] {
        let f = field(p);
        for r in 1..=5u32 {
            let y = y_r_module(&f, r);
            let by_family = ga_exponential_degree(&y);
            let by_u2 = exponential_degree(&ga_comodule_as_u2(&y.to_comodule())?)?;
            let inputs = json!({"p": p, "R": r});
            let tag = format!("yr/p={p}/R={r}");
            out.push(
                CheckRecord::pass_if(format!("{tag}/routes-agree"), "y_r-exp-degree", inputs.clone(), by_family == by_u2)
                    .with_witness(json!({"family": by_family, "u2": by_u2})),
            );
            out.push(
                CheckRecord::pass_if(format!("{tag}/degree-is-R"), "y_r-exp-degree", inputs.clone(), by_family == r)
                    .with_witness(json!({"computed": by_family, "claimed": r, "top_divided_power": p.pow(r)})),
            );
            let module = RationalModule::Family(y);
            let pool = subgroup_pool(&f, GroupTag::Ga, r as usize + 1, SamplePlan::Random { count: 100 }, rng)?;
            let verdicts = support_sample(&module, &pool)?;
            let outside = verdicts.iter().find(|v| !v.in_support);
            let rec = CheckRecord::pass_if(format!("{tag}/support"), "y_r-full-support", inputs, outside.is_none());
            out.push(match outside {
                Some(v) => rec.with_witness(json!(v.psi.to_string())),
                None => rec,
            });
        }
    }
    Ok(out)
}

/// A random comodule over `k[U_N]` with coaction degree `<= max_deg`: a sum of
/// one or two standard pieces in a random basis.
pub fn random_un_comodule(f: &PrimeField, n: usize, max_deg: u32, rng: &mut impl Rng) -> Result<Comodule> {
    let ctx = UNContext::new(f, n)?;
    let nat = natural_rep(&ctx);
    let mut pieces = vec![Comodule::trivial(f, ctx.coalgebra(), 1), nat.clone(), nat.dual()?];
    if max_deg >= 2 {
        pieces.push(sym_square_rep(&ctx));
        let linear = monomials_up_to(&ctx.x_vars(), 1, None);
        pieces.push(Comodule::regular_piece(f, ctx.coalgebra(), &linear)?);
    }
    pieces.retain(|m| m.max_coaction_degree() <= max_deg);
    let mut m = pieces.choose(rng).expect("nonempty").clone();
    if rng.gen_bool(0.5) {
        m = m.direct_sum(pieces.choose(rng).expect("nonempty"))?;
    }
    let g = random_invertible(f, m.dim(), rng);
    m.change_basis(&g)
}

fn twist_suite(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for k in 0..30 {
        let p = if k % 2 == 0 { 3 } else { 5 };
        let m = random_un_comodule(&field(p), 3, 2, rng)?;
        let (e, et) = (exponential_degree(&m)?, exponential_degree(&frobenius_twist(&m)?)?);
        out.push(
            CheckRecord::pass_if(
                format!("twist/random/{k:02}"),
                "frobenius-twist-scales-exp-degree",
                json!({"N": 3, "p": p, "dim": m.dim()}),
                et <= p * e,
            )
            .with_witness(json!({"degree": e, "twisted": et})),
        );
    }
    let m = natural_rep(&UNContext::new(&field(3), 2)?);
    let (e, et) = (exponential_degree(&m)?, exponential_degree(&frobenius_twist(&m)?)?);
    out.push(
        CheckRecord::pass_if("twist/natural-u2", "frobenius-twist-scales-exp-degree", json!({"N": 2, "p": 3}), et == 3 * e)
            .with_witness(json!({"degree": e, "twisted": et})),
    );
    Ok(out)
}

fn regular_trunc(f: &PrimeField, r: u32) -> Result<Comodule> {
    let coalg = CoalgebraId::GaTrunc(r);
    Comodule::regular_piece(f, coalg, &coalg.truncated_basis(f)?)
}

fn freeness_suite(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (p, r) in [(2u32, 1u32), (2, 2), (3, 1)] {
        let f = field(p);
        let lf = crate::ga::regular_ga(&f, p.pow(r)).restrict_to(CoalgebraId::GaTrunc(r))?.local_freeness()?;
        out.push(CheckRecord::pass_if(
            format!("freeness/regular/p={p}/r={r}"),
            "regular-piece-free-over-kernel",
            json!({"p": p, "r": r}),
            lf.free,
        ));
    }
    let f2 = field(2);
    let linear = monomials_up_to(&CoalgebraId::UNPoly(3).generators(), 1, None);
    let piece = Comodule::regular_piece(&f2, CoalgebraId::UNPoly(3), &linear)?;
    let lf = piece.restrict_to(CoalgebraId::UNTrunc(3, 1))?.local_freeness()?;
    out.push(
        CheckRecord::pass_if("freeness/u3-linear/p=2", "degree-piece-not-free", json!({"N": 3, "p": 2, "r": 1}), !lf.free)
            .with_witness(json!({"dim_module": lf.dim_module, "dim_algebra": lf.dim_algebra, "top": lf.top_dim})),
    );
    for k in 0..50 {
        let (p, r) = *[(2u32, 1u32), (2, 2), (3, 1), (5, 1)].choose(rng).expect("nonempty");
        let f = field(p);
        let copies = rng.gen_range(1..=3);
        let mut m = regular_trunc(&f, r)?;
        for _ in 1..copies {
            m = m.direct_sum(&regular_trunc(&f, r)?)?;
        }
        let add_trivial = k % 2 == 1;
        if add_trivial {
            m = m.direct_sum(&Comodule::trivial(&f, CoalgebraId::GaTrunc(r), rng.gen_range(1..=2)))?;
        }
        let m = m.change_basis(&random_invertible(&f, m.dim(), rng))?;
        let lf = m.local_freeness()?;
        out.push(CheckRecord::pass_if(
            format!("freeness/random/{k:02}"),
            "local-freeness-detection",
            json!({"p": p, "r": r, "copies": copies, "trivial_summand": add_trivial}),
            lf.free != add_trivial,
        ));
    }
    Ok(out)
}

/// Checks idempotence, monotonicity, exhaustion, stability, and that every
/// coaction entry of piece `d` satisfies `entry_ok(d, _)`.
fn chain_violation(
    m: &Comodule,
    pieces: &[Subspace],
    filt: impl Fn(&Comodule, u32) -> Result<Subspace>,
    entry_ok: impl Fn(u32, &MultiPoly) -> Result<bool>,
) -> Result<Option<String>> {
    if !pieces.last().is_some_and(Subspace::is_full) {
        return Ok(Some("chain does not exhaust M".into()));
    }
    for (d, piece) in pieces.iter().enumerate() {
        let d = d as u32;
        if pieces.get(d as usize + 1).is_some_and(|next| !piece.is_subspace_of(next)) {
            return Ok(Some(format!("piece {d} not inside piece {}", d + 1)));
        }
        if !m.is_coaction_stable(piece) {
            return Ok(Some(format!("piece {d} not coaction-stable")));
        }
        if piece.dim() == 0 {
            continue;
        }
        let sub = m.subcomodule(piece)?;
        if !filt(&sub, d)?.is_full() {
            return Ok(Some(format!("piece {d} not idempotent")));
        }
        for g in sub.coaction().entries() {
            if !entry_ok(d, g)? {
                return Ok(Some(format!("piece {d} has entry {g} outside the coalgebra piece")));
            }
        }
    }
    Ok(None)
}

fn functor_laws_suite(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for k in 0..50 {
        let p = *[2u32, 3, 5].choose(rng).expect("nonempty");
        let f = field(p);
        let fam = random_family(&f, rng.gen_range(1..=4), 2, rng);
        let m = fam.to_comodule();
        let top = m.max_coaction_degree();
        let deg_pieces: Vec<Subspace> = (0..=top + 1).map(|d| degree_filtration_ga(&m, d as u64)).collect::<Result<_>>()?;
        let mut problem = chain_violation(
            &m,
            &deg_pieces[1..],
            |s, d| degree_filtration_ga(s, d as u64 + 1),
            |d, g| Ok(g.total_degree() <= d),
        )?;
        let by_family: Vec<Subspace> = (0..=top + 1).map(|d| degree_filtration_family(&fam, d as u64)).collect();
        if by_family != deg_pieces {
            problem.get_or_insert_with(|| "family and coideal routes disagree".into());
        }
        if problem.is_none() {
            let exp_pieces: Vec<Subspace> = (0..=top).map(|d| ga_exp_filtration(&fam, d)).collect();
            problem = chain_violation(
                &m,
                &exp_pieces,
                |s, d| Ok(ga_exp_filtration(&crate::ga::comodule_to_family(s)?, d)),
                |d, g| Ok(g.total_degree() <= d),
            )?;
        }
        out.push(functor_record(format!("functor-laws/ga/{k:02}"), json!({"p": p, "dim": m.dim()}), problem));
    }
    for k in 0..50 {
        let p = *[3u32, 5].choose(rng).expect("nonempty");
        let n = rng.gen_range(2..=3);
        let f = field(p);
        let m = random_un_comodule(&f, n, 2, rng)?;
        let top = m.max_coaction_degree();
        let deg_pieces: Vec<Subspace> = (1..=top + 1).map(|d| degree_filtration_un(&m, d)).collect::<Result<_>>()?;
        let mut problem = chain_violation(
            &m,
            &deg_pieces,
            |s, d| degree_filtration_un(s, d + 1),
            |d, g| Ok(g.total_degree() <= d),
        )?;
        if problem.is_none() {
            let domain = SymbolicNilpotentDomain::new(&f, n)?;
            let e = exponential_degree(&m)?;
            let exp_pieces: Vec<Subspace> = (0..=e).map(|d| module_exp_filtration(&m, d)).collect::<Result<_>>()?;
            problem = chain_violation(
                &m,
                &exp_pieces,
                module_exp_filtration,
                |d, g| Ok(coalg_exp_degree(g, &domain)? <= d),
            )?;
        }
        out.push(functor_record(format!("functor-laws/un/{k:02}"), json!({"N": n, "p": p, "dim": m.dim()}), problem));
    }
    Ok(out)
}

fn functor_record(check: String, inputs: serde_json::Value, problem: Option<String>) -> CheckRecord {
    let rec = CheckRecord::pass_if(check, "filtration-functor-laws", inputs, problem.is_none());
    match problem {
        Some(why) => rec.with_witness(json!(why)),
        None => rec,
    }
}

/// Modules of exponential degree zero: trivial modules in assorted presentations.
pub fn mock_trivial_examples(rng: &mut impl Rng) -> Result<Vec<RationalModule>> {
    let mut out = Vec::new();
    for k in 0..20 {
        let p = [2u32, 3, 5][k % 3];
        let f = field(p);
        let dim = rng.gen_range(1..=3);
        let m = match k % 4 {
            0 => RationalModule::Family(GaUFamily::trivial(&f, dim)),
            1 => RationalModule::Comodule(Comodule::trivial(&f, CoalgebraId::GaPoly, dim)),
            2 => RationalModule::Comodule(Comodule::trivial(&f, CoalgebraId::UNPoly(2), dim)),
            _ => {
                let t = Comodule::trivial(&f, CoalgebraId::UNPoly(3), dim);
                RationalModule::Comodule(t.change_basis(&random_invertible(&f, dim, rng))?)
            }
        };
        out.push(m);
    }
    Ok(out)
}

/// Modules that are not of exponential degree zero, including Frobenius twists.
pub fn non_mock_trivial_examples(rng: &mut impl Rng) -> Result<Vec<RationalModule>> {
    let mut out = Vec::new();
    for k in 0..20 {
        let p = [3u32, 5][k % 2];
        let f = field(p);
        let m = match k % 5 {
            0 => loop {
                let fam = random_family(&f, rng.gen_range(2..=3), 3, rng);
                if !fam.is_trivial() {
                    break RationalModule::Family(fam);
                }
            },
            1 => RationalModule::Comodule(random_un_comodule(&f, 2, 2, rng)?.direct_sum(&natural_rep(&UNContext::new(&f, 2)?))?),
            2 => RationalModule::Comodule(random_un_comodule(&f, 3, 2, rng)?.direct_sum(&natural_rep(&UNContext::new(&f, 3)?))?),
            3 => RationalModule::Comodule(frobenius_twist(&natural_rep(&UNContext::new(&f, 3)?))?),
            _ => RationalModule::Family(y_r_module(&f, rng.gen_range(1..=3))),
        };
        out.push(m);
    }
    Ok(out)
}

fn mock_trivial_suite(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    const SAMPLES: usize = 50;
    let mut out = Vec::new();
    for (k, m) in mock_trivial_examples(rng)?.into_iter().enumerate() {
        let group = GroupTag::of(&m)?;
        let pool = subgroup_pool(m.field(), group, natural_height(&m), SamplePlan::Random { count: SAMPLES }, rng)?;
        let mut bad = None;
        for psi in &pool {
            let trivial_pullback = pullback_module(&m, psi)?.is_trivial();
            if !trivial_pullback || !theta_operator(&m, psi)?.is_zero() {
                bad = Some(psi.to_string());
                break;
            }
        }
        let rec = CheckRecord::pass_if(
            format!("mock-trivial/trivial/{k:02}"),
            "mock-trivial-pullbacks",
            json!({"p": m.field().p(), "group": format!("{group:?}"), "dim": m.dim()}),
            bad.is_none(),
        );
        out.push(match bad {
            Some(psi) => rec.with_witness(json!(psi)),
            None => rec,
        });
    }
    for (k, m) in non_mock_trivial_examples(rng)?.into_iter().enumerate() {
        let group = GroupTag::of(&m)?;
        let pool = subgroup_pool(m.field(), group, natural_height(&m), SamplePlan::Random { count: SAMPLES }, rng)?;
        let mut witness = None;
        for psi in &pool {
            if !theta_operator(&m, psi)?.is_zero() {
                witness = Some(psi.to_string());
                break;
            }
        }
        let rec = CheckRecord::pass_if(
            format!("mock-trivial/witnessed/{k:02}"),
            "mock-trivial-pullbacks",
            json!({"p": m.field().p(), "group": format!("{group:?}"), "dim": m.dim()}),
            witness.is_some(),
        );
        out.push(match witness {
            Some(psi) => rec.with_witness(json!(psi)),
            None => rec,
        });
    }
    Ok(out)
}
