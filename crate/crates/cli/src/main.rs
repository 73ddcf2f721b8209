use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rankmetric::{
    check_dim, max_dim_from_env, parse_rational, read_delta_embedding, read_homomorphism, read_matrix, read_pair,
    render_rational, write_delta_embedding, write_homomorphism, write_matrix, CliError, CliResult, Report,
};
use rankmetric_core::embeddings::{amalgamate, iota, skolem_noether_conjugator};
use rankmetric_core::fraisse::{
    approximate_extension, approximate_homogeneity, back_and_forth, measured_commute_error, Probe, Side, Tower,
    TowerRule,
};
use rankmetric_core::matrix::{kassabov_generators, normalized_rank, rank_distance};
use rankmetric_core::ramsey::{
    conjugate_copy, count_copies, gl_order, monochromatic_search, ramsey_dimension, sl_order, Coloring, CountMethod,
    KMode, SearchOutcome, Strategy,
};
use rankmetric_core::stability::{relation_defect, repair};
use rankmetric_core::{Field, Matrix};

#[derive(Parser)]
#[command(name = "rankmetric", version, about = "Exact rank-metric computations over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Factorial,
    Powers,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Orbit,
    Brute,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColoringArg {
    Constant,
    Distance,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Rank and normalized rank of a matrix.
    Rank {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rank distance between two matrix blocks of one file.
    Dist {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// The shift generators a, b of M_n, optionally amplified to a (x) I_m.
    Gens {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// x (x) I_{N/m} for an m x m matrix x.
    Iota {
        #[arg(long = "to")]
        big: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relation defect of a pair of matrices as generators of M_n.
    Defect {
        #[arg(long)]
        n: usize,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Repair an approximate generator pair into a block embedding of M_n.
    Repair {
        #[arg(long)]
        n: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// Writes the embedding in DELTA format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unit carrying one embedding onto another of the same multiplicity.
    Homog {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend an embedding M_{m_k} -> M_n back into a tower.
    Extend {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, value_enum)]
        tower: RuleArg,
        #[arg(long)]
        k: usize,
        #[arg(long = "delta-prime")]
        delta_prime: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Alternating embeddings between a factorial and a powers-of-two tower.
    Backforth {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 3)]
        maps: usize,
        #[arg(long = "x-tower", value_enum, default_value = "factorial")]
        x_tower: RuleArg,
        #[arg(long = "y-tower", value_enum, default_value = "powers")]
        y_tower: RuleArg,
        /// Stages of the first tower whose generators are probes.
        #[arg(long = "x-probes", value_delimiter = ',', default_value = "0,2")]
        x_probes: Vec<usize>,
        /// Stages of the second tower whose generators are probes.
        #[arg(long = "y-probes", value_delimiter = ',', default_value = "1")]
        y_probes: Vec<usize>,
    },
    /// Exact amalgam of two unital maps out of the same M_a.
    Amalgamate {
        #[arg(long)]
        phi0: PathBuf,
        #[arg(long)]
        phi1: PathBuf,
        /// Writes psi0 then psi1 in HOM format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unit u with u phi0(x) u^{-1} = phi1(x).
    Conjugator {
        #[arg(long)]
        phi0: PathBuf,
        #[arg(long)]
        phi1: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// |SL_n(F_q)| and |GL_n(F_q)|.
    Slorder {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
    },
    /// Number of unital copies of M_a in M_b.
    Copies {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value = "orbit")]
        method: MethodArg,
    },
    /// Dimension c guaranteed by the Ramsey argument.
    RamseyBound {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        eps: String,
        /// Use k = q^{b^2} instead of the exact count.
        #[arg(long)]
        envelope: bool,
    },
    /// Search a copy of M_b in M_c on which a coloring of copies of M_a is nearly constant.
    RamseySearch {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        c: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum)]
        coloring: ColoringArg,
        /// Constant value, or the slope of the distance coloring.
        #[arg(long, default_value = "1/1")]
        value: String,
        #[arg(long, value_enum, default_value = "exhaustive")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
}

fn read(path: &Path) -> CliResult<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Writes `payload` to `out`, or appends it to the report when absent.
fn emit(out: &Option<PathBuf>, payload: &str, report: &mut Report) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, payload)?,
        None => {
            report.raw(payload);
        }
    }
    Ok(())
}

fn field(q: u64) -> CliResult<Field> {
    Ok(Field::builtin(q)?)
}

fn tower(f: &Field, rule: RuleArg, max_dim: usize) -> CliResult<Tower> {
    let mut dims = vec![1usize];
    let mut i = 1usize;
    loop {
        let next = match rule {
            RuleArg::Factorial => dims[i - 1].checked_mul(i),
            RuleArg::Powers => dims[i - 1].checked_mul(2),
        };
        match next {
            Some(d) if d <= max_dim => dims.push(d),
            _ => break,
        }
        i += 1;
    }
    let rule = match rule {
        RuleArg::Factorial => TowerRule::Factorial,
        RuleArg::Powers => TowerRule::PowersOfTwo,
    };
    Ok(Tower::make(f, rule, dims.len())?)
}

fn check_square(x: &Matrix, max_dim: usize) -> CliResult<()> {
    check_dim(x.rows().max(x.cols()), max_dim)
}

fn run(cmd: Command, max_dim: usize) -> CliResult<String> {
    let mut rep = Report::new();
    match cmd {
        Command::Rank { input } => {
            let x = read_matrix(&read(&input)?)?;
            check_square(&x, max_dim)?;
            rep.line("rank", x.rank());
            if x.is_square() {
                rep.line("normalized", normalized_rank(&x));
            }
        }
        Command::Dist { input } => {
            let (x, y) = read_pair(&read(&input)?)?;
            check_square(&x, max_dim)?;
            rep.line("distance", rank_distance(&x, &y)?);
        }
        Command::Gens { n, q, copies, out } => {
            if n == 0 || copies == 0 {
                return Err(CliError::Usage("n and copies must be positive".into()));
            }
            let big = n.checked_mul(copies).ok_or_else(|| CliError::Usage("dimension overflow".into()))?;
            check_dim(big, max_dim)?;
            let f = field(q)?;
            let (a, b) = kassabov_generators(n, &f);
            let (x, y) = (iota(big, n, &a)?, iota(big, n, &b)?);
            emit(&out, &(write_matrix(&x) + &write_matrix(&y)), &mut rep)?;
            let d = relation_defect(&x, &y, n)?;
            rep.line("defect", format!("{} {} {}", d.d_xn, d.d_yn, d.d_rel));
            rep.line("delta", render_rational(&d.delta));
        }
        Command::Iota { big, input, out } => {
            check_dim(big, max_dim)?;
            let x = read_matrix(&read(&input)?)?;
            let y = iota(big, x.rows(), &x)?;
            emit(&out, &write_matrix(&y), &mut rep)?;
        }
        Command::Defect { n, input } => {
            let (x, y) = read_pair(&read(&input)?)?;
            check_square(&x, max_dim)?;
            rep.raw(&relation_defect(&x, &y, n)?.to_string());
        }
        Command::Repair { n, input, out } => {
            let (x, y) = read_pair(&read(&input)?)?;
            check_square(&x, max_dim)?;
            let r = repair(&x, &y, n)?;
            rep.line("multiplicity", r.psi.multiplicity());
            rep.line("psi_delta", r.psi.delta());
            rep.raw(&r.certificate.to_string());
            rep.line("bound_applies", r.certificate.bound_applies(n));
            emit(&out, &write_delta_embedding(&r.psi), &mut rep)?;
        }
        Command::Homog { phi, psi, out } => {
            let phi = read_delta_embedding(&read(&phi)?)?;
            let psi = read_delta_embedding(&read(&psi)?)?;
            check_dim(phi.target_dim(), max_dim)?;
            let (beta, residual) = approximate_homogeneity(&phi, &psi)?;
            let (a, b) = kassabov_generators(phi.source_dim(), phi.field());
            let beta_inv = beta.inverse()?;
            let carried = |g: &Matrix| -> CliResult<_> {
                let moved = &(&beta * &phi.apply(g)?) * &beta_inv;
                Ok(rank_distance(&moved, &psi.apply(g)?)?)
            };
            rep.line("residual", render_rational(&residual));
            rep.line("check_a", carried(&a)?);
            rep.line("check_b", carried(&b)?);
            emit(&out, &write_matrix(&beta), &mut rep)?;
        }
        Command::Extend { phi, tower: rule, k, delta_prime, out } => {
            let phi = read_delta_embedding(&read(&phi)?)?;
            let dp = parse_rational(&delta_prime)?;
            let t = tower(phi.field(), rule, max_dim)?;
            let ext = approximate_extension(&phi, &t, k, dp)?;
            let measured = measured_commute_error(&phi, &ext, &t, k)?;
            let delta = phi.delta().to_rational();
            rep.line("stage", format!("{} -> {}", k, ext.stage));
            rep.line("dims", format!("{} -> {} -> {}", t.dim(k), phi.target_dim(), t.dim(ext.stage)));
            rep.line("psi_delta", ext.psi.delta());
            rep.line("commute_error", render_rational(&ext.commute_error));
            rep.line("measured", render_rational(&measured));
            rep.line("delta_plus_delta_prime", render_rational(&(delta + dp)));
            rep.line("within", ext.commute_error <= delta + dp && measured == ext.commute_error);
            emit(&out, &write_delta_embedding(&ext.psi), &mut rep)?;
        }
        Command::Backforth { q, maps, x_tower, y_tower, x_probes, y_probes } => {
            let f = field(q)?;
            let tx = tower(&f, x_tower, max_dim)?;
            let ty = tower(&f, y_tower, max_dim)?;
            let mut probes = Vec::new();
            for (side, t, stages) in [(Side::X, &tx, &x_probes), (Side::Y, &ty, &y_probes)] {
                for &s in stages {
                    if s >= t.len() {
                        return Err(rankmetric_core::Error::TowerPrefixTooShort("probe stage").into());
                    }
                    let (a, b) = t.generators(s)?;
                    probes.push(Probe { side, element: a });
                    probes.push(Probe { side, element: b });
                }
            }
            let cert = back_and_forth(&tx, &ty, maps, &probes)?;
            rep.line("x_dims", format!("{:?}", tx.dims()));
            rep.line("y_dims", format!("{:?}", ty.dims()));
            rep.raw(&cert.to_string());
            rep.line("within_bounds", cert.within_bounds());
            rep.line("verified", cert.verify(&tx, &ty, &probes)?);
        }
        Command::Amalgamate { phi0, phi1, out } => {
            let p0 = read_homomorphism(&read(&phi0)?)?;
            let p1 = read_homomorphism(&read(&phi1)?)?;
            let c = p0.target_dim().checked_mul(p1.target_dim());
            check_dim(c.unwrap_or(usize::MAX), max_dim)?;
            let am = amalgamate(&p0, &p1)?;
            let left = am.psi0.compose(&p0)?;
            let right = am.psi1.compose(&p1)?;
            rep.line("c", am.c);
            rep.line("commutes", left == right);
            emit(&out, &(write_homomorphism(&am.psi0) + &write_homomorphism(&am.psi1)), &mut rep)?;
        }
        Command::Conjugator { phi0, phi1, out } => {
            let p0 = read_homomorphism(&read(&phi0)?)?;
            let p1 = read_homomorphism(&read(&phi1)?)?;
            check_dim(p0.target_dim(), max_dim)?;
            let u = skolem_noether_conjugator(&p0, &p1)?;
            rep.line("conjugates", p0.conjugated(&u)? == p1);
            emit(&out, &write_matrix(&u), &mut rep)?;
        }
        Command::Slorder { n, q } => {
            rep.line("sl_order", sl_order(n, q)?);
            rep.line("gl_order", gl_order(n, q)?);
        }
        Command::Copies { a, b, q, method } => {
            let f = field(q)?;
            let methods: &[CountMethod] = match method {
                MethodArg::Orbit => &[CountMethod::OrbitStabilizer],
                MethodArg::Brute => &[CountMethod::BruteForce],
                MethodArg::Both => &[CountMethod::OrbitStabilizer, CountMethod::BruteForce],
            };
            let mut ks = Vec::new();
            for &m in methods {
                let count = count_copies(a, b, &f, m)?;
                let name = match m {
                    CountMethod::OrbitStabilizer => "orbit-stabilizer",
                    CountMethod::BruteForce => "brute-force",
                };
                let mut line = format!("k={} method={name}", count.k);
                if let Some(s) = count.stabilizer {
                    line.push_str(&format!(" stabilizer={s}"));
                }
                rep.raw(&line);
                ks.push(count.k);
            }
            if ks.len() == 2 {
                rep.line("agree", ks[0] == ks[1]);
            }
        }
        Command::RamseyBound { a, b, q, eps, envelope } => {
            let f = field(q)?;
            let eps = parse_rational(&eps)?;
            let mode = if envelope { KMode::Envelope } else { KMode::Auto };
            let r = ramsey_dimension(a, b, &f, eps, mode)?;
            let k = match r.k {
                Some(k) => k.to_string(),
                None => (q as u128)
                    .checked_pow((b * b) as u32)
                    .map_or_else(|| format!("{q}^{}", b * b), |k| k.to_string()),
            };
            rep.raw(&format!("a={a} b={b} q={q} eps={}", render_rational(&eps)));
            rep.raw(&format!("k={k} method={}", if r.envelope { "envelope" } else { "exact" }));
            rep.line("bound", format!("{} = {:.6}", r.expression(), r.bound));
            rep.raw(&format!("k={k} bound≈{:.1} c={}", r.bound, r.c));
        }
        Command::RamseySearch { a, b, c, q, eps, coloring, value, strategy, seed, trials } => {
            check_dim(c, max_dim)?;
            let f = field(q)?;
            let eps = parse_rational(&eps)?;
            let value = parse_rational(&value)?;
            let gamma = match coloring {
                ColoringArg::Constant => Coloring::Constant(value),
                ColoringArg::Distance => Coloring::DistanceToCopy {
                    target: conjugate_copy(&Matrix::identity(&f, c), a)?,
                    scale: value,
                },
            };
            let strategy = match strategy {
                StrategyArg::Exhaustive => Strategy::Exhaustive,
                StrategyArg::Random => Strategy::Random { seed, trials },
            };
            match monochromatic_search(a, b, c, &f, &gamma, eps, strategy)? {
                SearchOutcome::Found { copy, oscillation, examined } => {
                    rep.line("outcome", "found");
                    rep.line("oscillation", render_rational(&oscillation));
                    rep.line("examined", examined);
                    rep.raw("copy");
                    rep.raw(&write_matrix(&copy.to_columns().transpose()));
                }
                SearchOutcome::Exhausted { min_oscillation, best, examined } => {
                    rep.line("outcome", "exhausted");
                    rep.line("min_oscillation", render_rational(&min_oscillation));
                    rep.line("examined", examined);
                    if let Some(copy) = best {
                        rep.raw("best");
                        rep.raw(&write_matrix(&copy.to_columns().transpose()));
                    }
                }
            }
        }
    }
    Ok(rep.into_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = max_dim_from_env().and_then(|max_dim| run(cli.command, max_dim));
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(e.exit_code())
        }
    }
}

