use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ratfilt::comodule::CoalgebraId;
use ratfilt::exponential::{
    exponential_degree, ga_exp_filtration, ga_exponential_degree, module_exp_filtration, sampled_exp_degree,
    sampled_module_exp_filtration, SAMPLED_LABEL,
};
use ratfilt::ga::{carries_basis, comodule_to_family, degree_filtration_family, degree_filtration_ga, generated_submodule, regular_ga};
use ratfilt::io::{CheckRecord, ModuleFile, ReportFile, Verdict};
use ratfilt::linalg::{Matrix, Subspace};
use ratfilt::support::{
    frobenius_injectivity_check, natural_height, pullback_module, subgroup_pool, support_sample, GroupTag,
    OneParamSubgroup, RationalModule, SamplePlan,
};
use ratfilt::unipotent::{degree_filtration_un, frobenius_kernel_dims, UNContext};
use ratfilt::verify::{run_suites, Suite, SuiteOptions};
use ratfilt::{Error, PrimeField};

#[derive(Parser)]
#[command(name = "ratfilt", version, about = "Degree and exponential-degree filtrations of rational G_a and U_N modules over F_p")]
struct Cli {
    /// Characteristic; must agree with module files when both are given.
    #[arg(long, global = true)]
    p: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FiltKind {
    Degree,
    Exp,
}

#[derive(Subcommand)]
enum Command {
    /// Exponents m with T^m in the G_a-submodule generated by T^n.
    Carries {
        n: u64,
        #[arg(value_name = "P")]
        prime: Option<u32>,
        /// Recompute from the span of the generated submodule and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Echelon basis of M_{<d} (degree) or M_{[d]} (exp).
    Filt {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: FiltKind,
        #[arg(long)]
        d: u32,
    },
    /// Smallest d with M = M_{[d]}.
    Expdeg { file: PathBuf },
    /// Freeness of Θ at sampled one-parameter subgroups.
    Support {
        file: PathBuf,
        #[arg(long, default_value_t = 50, conflicts_with = "exhaustive")]
        samples: usize,
        #[arg(long)]
        exhaustive: bool,
        /// Number of Frobenius layers in each subgroup; derived from the module if omitted.
        #[arg(long)]
        height: Option<usize>,
    },
    /// The G_a-module obtained by pulling back along a one-parameter subgroup.
    Pullback {
        file: PathBuf,
        /// G_a subgroup scalars λ_0,λ_1,...
        #[arg(long, value_delimiter = ',', conflicts_with = "b")]
        lambda: Vec<u32>,
        /// U_N subgroup matrices B_0, B_1, ... as a JSON list of integer matrices.
        #[arg(long)]
        b: Option<String>,
    },
    /// Local freeness of the restriction to the r-th Frobenius kernel.
    Frobcheck {
        file: PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// Dimension counts for the Frobenius kernels of U_N.
    Dims {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        r: u32,
    },
    /// Run check suites and emit a report; exits 3 if any check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long = "N")]
        n: Option<usize>,
    },
}

/// A falsified property, as opposed to bad input.
#[derive(Debug, thiserror::Error)]
#[error("property violation: {0}")]
struct PropertyViolation(String);

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<PropertyViolation>().is_some() {
        return 3;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::Parse(_)
            | Error::NotComodule(_)
            | Error::InvalidFamily(_)
            | Error::DimensionMismatch(_)
            | Error::NotPrime(_)
            | Error::PrimeOutOfRange { .. }
            | Error::FieldMismatch(..)
            | Error::ForeignVariable { .. }
            | Error::IndexOutOfRange { .. }
            | Error::InvalidSubgroup(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(cli: &Cli, path: &Path) -> anyhow::Result<RationalModule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = ModuleFile::parse(&text)?;
    if let Some(p) = cli.p.filter(|&p| p != file.p) {
        return Err(Error::FieldMismatch(p, file.p).into());
    }
    Ok(file.load()?)
}

fn rows_text(space: &Subspace) -> String {
    space
        .basis_vectors()
        .iter()
        .map(|row| format!("{row:?}\n"))
        .collect()
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Carries { n, prime, oracle } => {
            let p = prime.or(cli.p).ok_or_else(|| Error::Parse("carries needs a prime".into()))?;
            let field = PrimeField::new(p)?;
            let basis = carries_basis(*n, &field);
            let mut text = format!("{basis:?}\n");
            if *oracle {
                let len = *n as usize + 1;
                let m = regular_ga(&field, len as u32);
                let mut top = vec![0; len];
                top[len - 1] = 1;
                let span = generated_submodule(&m, &[top])?;
                let by_span: Vec<u64> = (0..len)
                    .filter(|&k| {
                        let mut e = vec![0; len];
                        e[k] = 1;
                        span.contains(&e)
                    })
                    .map(|k| k as u64)
                    .collect();
                if by_span != basis || span.dim() != basis.len() {
                    return Err(PropertyViolation(format!("span oracle gives {by_span:?}")).into());
                }
                text.push_str("oracle: agree\n");
            }
            emit(cli, &text)
        }
        Command::Filt { file, kind, d } => {
            let module = load(cli, file)?;
            let space = filtration(&module, *kind, *d)?;
            emit(cli, &rows_text(&space))
        }
        Command::Expdeg { file } => {
            let degree = match load(cli, file)? {
                RationalModule::Family(fam) => ga_exponential_degree(&fam),
                RationalModule::Comodule(m) if m.coalgebra() == CoalgebraId::GaPoly => {
                    ga_exponential_degree(&comodule_to_family(&m)?)
                }
                RationalModule::Comodule(m) => match exponential_degree(&m) {
                    Err(Error::SymbolicDomainTooLarge { .. }) => {
                        let CoalgebraId::UNPoly(n) = m.coalgebra() else { unreachable!() };
                        eprintln!("{SAMPLED_LABEL}");
                        let mut top = 0;
                        for g in m.coaction().entries() {
                            top = top.max(sampled_exp_degree(g, n)?.value);
                        }
                        top
                    }
                    other => other?,
                },
            };
            emit(cli, &format!("{degree}\n"))
        }
        Command::Support { file, samples, exhaustive, height } => {
            let module = load(cli, file)?;
            let height = height.unwrap_or_else(|| natural_height(&module));
            let plan = if *exhaustive {
                SamplePlan::Exhaustive
            } else {
                SamplePlan::Random { count: *samples }
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let pool = subgroup_pool(module.field(), GroupTag::of(&module)?, height, plan, &mut rng)?;
            let records = support_sample(&module, &pool)?
                .into_iter()
                .enumerate()
                .map(|(k, v)| {
                    let verdict = if v.in_support { Verdict::InSupport } else { Verdict::Free };
                    CheckRecord::new(format!("support/{k:04}"), "rank-variety-support", json!({"psi": v.psi.to_string()}), verdict)
                        .with_witness(json!({"jordan_type": v.jordan.to_string()}))
                })
                .collect();
            emit(cli, &ReportFile::new(records).to_canonical_json())
        }
        Command::Pullback { file, lambda, b } => {
            let module = load(cli, file)?;
            let psi = match (b, GroupTag::of(&module)?) {
                (None, GroupTag::Ga) => OneParamSubgroup::ga(module.field(), lambda.clone()),
                (Some(json), GroupTag::UN(n)) => {
                    let mats: Vec<Vec<Vec<i64>>> =
                        serde_json::from_str(json).map_err(|e| Error::Parse(format!("--b: {e}")))?;
                    let mats = mats
                        .iter()
                        .map(|rows| Matrix::from_rows(module.field(), rows))
                        .collect::<ratfilt::Result<Vec<_>>>()?;
                    OneParamSubgroup::un(n, mats)
                }
                (None, GroupTag::UN(_)) => bail!(Error::InvalidSubgroup("U_N modules need --b".into())),
                (Some(_), GroupTag::Ga) => bail!(Error::InvalidSubgroup("G_a modules take --lambda".into())),
            };
            let fam = pullback_module(&module, &psi)?;
            emit(cli, &ModuleFile::from_family(&fam).to_canonical_json())
        }
        Command::Frobcheck { file, r } => {
            let m = load(cli, file)?.to_comodule();
            let lf = frobenius_injectivity_check(&m, *r)?;
            let out = json!({
                "free": lf.free,
                "dim_module": lf.dim_module,
                "dim_algebra": lf.dim_algebra,
                "top_dim": lf.top_dim,
            });
            emit(cli, &format!("{}\n", serde_json::to_string_pretty(&out)?))
        }
        Command::Dims { n, r } => {
            let p = cli.p.ok_or_else(|| Error::Parse("dims needs --p".into()))?;
            let ctx = UNContext::new(&PrimeField::new(p)?, *n)?;
            let k = frobenius_kernel_dims(&ctx, *r)?;
            let out = json!({
                "N": k.n,
                "p": p,
                "r": k.r,
                "dim_kernel": k.dim_kernel,
                "enumerated_kernel": k.enumerated_kernel,
                "dim_piece_strict": k.dim_piece_strict,
                "injective_check": k.injective_check,
                "surjective_check": k.surjective_check,
                "closed_form_statement": k.formula_statement.to_string(),
                "closed_form_proof": k.formula_proof.to_string(),
                "discrepancy": k.discrepancy,
            });
            emit(cli, &format!("{}\n", serde_json::to_string_pretty(&out)?))
        }
        Command::Verify { suite, n } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let opts = SuiteOptions { seed: cli.seed, p: cli.p, n: *n };
            let report = run_suites(&suites, &opts)?;
            emit(cli, &report.to_canonical_json())?;
            let failed: Vec<&str> = report.failures().map(|r| r.check.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(PropertyViolation(format!("failing checks: {}", failed.join(", "))).into())
            }
        }
    }
}

fn filtration(module: &RationalModule, kind: FiltKind, d: u32) -> anyhow::Result<Subspace> {
    let space = match (module, kind) {
        (RationalModule::Family(fam), FiltKind::Degree) => degree_filtration_family(fam, d as u64),
        (RationalModule::Family(fam), FiltKind::Exp) => ga_exp_filtration(fam, d),
        (RationalModule::Comodule(m), _) => match (m.coalgebra(), kind) {
            (CoalgebraId::GaPoly, FiltKind::Degree) => degree_filtration_ga(m, d as u64)?,
            (CoalgebraId::GaPoly, FiltKind::Exp) => ga_exp_filtration(&comodule_to_family(m)?, d),
            (CoalgebraId::UNPoly(_), FiltKind::Degree) => degree_filtration_un(m, d)?,
            (CoalgebraId::UNPoly(_), FiltKind::Exp) => match module_exp_filtration(m, d) {
                Err(Error::SymbolicDomainTooLarge { .. }) => {
                    eprintln!("{SAMPLED_LABEL}");
                    sampled_module_exp_filtration(m, d)?.value
                }
                other => other?,
            },
            (other, _) => return Err(anyhow!(Error::UnsupportedCoalgebra(other.to_string()))),
        },
    };
    Ok(space)
}
