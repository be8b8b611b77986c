use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use clap::ValueEnum;
use omegas_core::density::{beta_bounds_by_product, beta_bounds_by_r, empirical_beta, renyi_r, DensityBound};
use omegas_core::hp::format_decimal;
use omegas_core::independence::{run_certification, write_certificate, CertificationParams, LllMode};
use omegas_core::oscillation::{
    anderson_stark_bound, select_gamma_prime, ExplicitEstimate, KernelSpec, WeightedResidueSet,
};
use omegas_core::series::{compute_a_sequence, fk_tail_coefficients};
use omegas_core::sieve::{
    normalized_export, summatory, write_checkpoints_csv, write_normalized_csv, Checkpoints, SieveConfig,
};
use omegas_core::zeros::{format_zeros, generate_zeros, load_zeros, persist_zeros, validate_zeros, ZeroTable};
use omegas_core::zeta::{ResidueSet, ZetaConfig, ZetaKernel};
use omegas_core::{Line, Problem};
use rug::float::Round;
use rug::Float;

use crate::args::*;
use crate::header::{emit, read_without_header, Header};

/// A bad combination of arguments; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(pub String);

fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(Usage(msg.into()).into())
}

const ZERO_MIN_BITS: u32 = 64;
/// Double precision unless `--precision` asks for more.
const RESIDUE_BITS: u32 = 53;
const BETA_BITS: u32 = 128;

struct Ctx<'a> {
    workers: usize,
    precision: Option<u32>,
    out: Option<&'a Path>,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx = Ctx { workers: cli.workers as usize, precision: cli.precision, out: cli.out.as_deref() };
    match cli.command {
        Command::Zeros { action } => zeros(&ctx, action),
        Command::Sieve(args) => sieve(&ctx, args),
        Command::Beta(args) => beta(&ctx, args),
        Command::Residues(args) => residues(&ctx, args),
        Command::Oscillate { action } => oscillate(&ctx, action),
        Command::Certify(args) => certify(&ctx, args),
        Command::Series { action } => series(&ctx, action),
    }
}

fn kernel(ceiling: Option<f64>) -> anyhow::Result<ZetaKernel> {
    let mut config = ZetaConfig::default();
    if let Some(c) = ceiling {
        if !(c > 0.0) {
            return usage(format!("height ceiling {c} must be positive"));
        }
        config.height_ceiling = c;
    }
    Ok(ZetaKernel::new(config))
}

fn load_table(path: &Path, bits: u32) -> anyhow::Result<ZeroTable> {
    load_zeros(path, bits).with_context(|| format!("loading zeros from {}", path.display()))
}

fn zeros(ctx: &Ctx, action: ZerosCmd) -> anyhow::Result<()> {
    let min_bits = ctx.precision.unwrap_or(ZERO_MIN_BITS);
    match action {
        ZerosCmd::Load { file } => {
            let table = load_table(&file.zeros, min_bits)?;
            let header = Header::new("zeros load").config("min_precision_bits", min_bits).input(&file.zeros)?;
            let mut body = format!("count = {}\nsource = {}\n", table.count(), table.source());
            if let (Some(first), Some(last)) = (table.records().first(), table.records().last()) {
                let bits = table.min_precision_bits().unwrap_or(min_bits);
                let _ = writeln!(body, "precision_bits = {bits}");
                let _ = writeln!(body, "first = {}", format_decimal(&first.gamma, 20));
                let _ = writeln!(body, "last = {}", format_decimal(&last.gamma, 20));
            }
            emit(ctx.out, &header, body.as_bytes())
        }
        ZerosCmd::Validate { file, tolerance, count } => {
            if !(tolerance > 0.0) {
                return usage("tolerance must be positive");
            }
            let full = load_table(&file.zeros, min_bits)?;
            let table = match count {
                Some(c) if c as usize > full.count() => {
                    return usage(format!("table holds {} zeros, {c} requested", full.count()))
                }
                Some(c) => ZeroTable::new(full.first(c as usize).to_vec(), full.source())?,
                None => full,
            };
            let bits = ctx.precision.unwrap_or(RESIDUE_BITS);
            let report = validate_zeros(&table, &kernel(None)?, tolerance, bits, ctx.workers)?;
            let header = Header::new("zeros validate")
                .config("tolerance", tolerance)
                .config("count", table.count())
                .config("precision_bits", bits)
                .input(&file.zeros)?;
            let mut body = String::from("index,abs_zeta,pass\n");
            for e in &report.entries {
                let _ = writeln!(body, "{},{:e},{}", e.index, e.abs_zeta, e.pass);
            }
            emit(ctx.out, &header, body.as_bytes())?;
            if !report.passed() {
                bail!("{report}");
            }
            Ok(())
        }
        ZerosCmd::Generate { count, digits } => {
            let table = generate_zeros(&kernel(None)?, count as usize, digits, ctx.workers)?;
            let header = Header::new("zeros generate").config("count", count).config("digits", digits);
            match ctx.out {
                // the table keeps its sidecar
                Some(path) => {
                    persist_zeros(&table, path)?;
                    emit(Some(path), &header, format_zeros(&table).as_bytes())
                }
                None => emit(None, &header, format_zeros(&table).as_bytes()),
            }
        }
    }
}

fn sieve(ctx: &Ctx, args: SieveArgs) -> anyhow::Result<()> {
    if args.xmax == 0 {
        return usage("xmax must be positive");
    }
    let (checkpoints, label) = if let Some(s) = args.stride {
        (Checkpoints::Stride(s), format!("stride {s}"))
    } else if let Some(r) = args.ratio {
        (Checkpoints::Geometric(r), format!("ratio {r}"))
    } else if let Some(p) = &args.points {
        let list: Vec<String> = p.iter().map(u64::to_string).collect();
        (Checkpoints::List(p.clone()), format!("points {}", list.join(",")))
    } else if let Some(g) = args.u_grid {
        let xs: Vec<u64> = g.points().iter().map(|u| u.exp().floor() as u64).collect();
        (Checkpoints::List(xs), format!("u-grid {g}"))
    } else {
        let c = Checkpoints::default();
        let Checkpoints::Geometric(r) = c else { unreachable!() };
        (c, format!("ratio {r}"))
    };
    let mut config = SieveConfig { workers: ctx.workers, ..SieveConfig::default() };
    if let Some(t) = args.table_size {
        config.table_size = t;
    }
    if let Some(b) = args.block_size {
        config.block_size = b;
    }
    let series = summatory(args.func, args.xmax, &checkpoints, &config)?;
    let header = Header::new("sieve")
        .config("func", args.func)
        .config("xmax", args.xmax)
        .config("checkpoints", label)
        .config("normalized", args.normalized)
        .config("table_size", config.effective_table(args.xmax)?)
        .config("block_size", config.block_size);
    let mut body = Vec::new();
    if args.normalized {
        write_normalized_csv(&normalized_export(&series)?, &mut body)?;
    } else {
        write_checkpoints_csv(&series, &mut body)?;
    }
    emit(ctx.out, &header, &body)
}

fn beta(ctx: &Ctx, args: BetaArgs) -> anyhow::Result<()> {
    let bits = ctx.precision.unwrap_or(BETA_BITS);
    let header = Header::new("beta").config("mode", value_name(args.mode)).config("precision_bits", bits);
    let mut body = String::new();
    let digits = 20;
    match args.mode {
        BetaMode::ByR => {
            let b = beta_bounds_by_r(&args.caps, bits)?;
            let caps: Vec<String> = args.caps.iter().map(u64::to_string).collect();
            let header = header.config("caps", caps.join(","));
            write_bracket(&mut body, &b);
            return emit(ctx.out, &header, body.as_bytes());
        }
        BetaMode::ByProduct => {
            let b = beta_bounds_by_product(args.bound, bits, ctx.workers)?;
            let header = header.config("B", args.bound);
            write_bracket(&mut body, &b);
            return emit(ctx.out, &header, body.as_bytes());
        }
        BetaMode::Renyi => {
            let z = Float::with_val(bits, args.z);
            let r = renyi_r(&z, args.prime_bound)?;
            let header = header.config("z", args.z).config("prime_bound", args.prime_bound);
            let _ = writeln!(body, "R = {}", format_decimal(&r.value, digits));
            if args.z == -1.0 {
                let beta = Float::with_val(bits, &r.value + 1u32) / 2u32;
                let _ = writeln!(body, "beta = {}", format_decimal(&beta, digits));
            }
            let _ = writeln!(body, "tail_estimate = {:e}\nerror_bound = {:e}", r.tail_estimate, r.error_bound);
            emit(ctx.out, &header, body.as_bytes())
        }
        BetaMode::Empirical => {
            let config = SieveConfig { workers: ctx.workers, ..SieveConfig::default() };
            let e = empirical_beta(args.x, &config)?;
            let header = header.config("x", args.x);
            let _ = writeln!(body, "count = {}\nfraction = {}", e.count, e.fraction);
            emit(ctx.out, &header, body.as_bytes())
        }
    }
}

/// Endpoints rounded outward so the printed bracket still holds.
fn write_bracket(body: &mut String, b: &DensityBound) {
    let lower = b.lower.to_string_radix_round(10, Some(20), Round::Down);
    let upper = b.upper.to_string_radix_round(10, Some(20), Round::Up);
    let _ = writeln!(body, "lower = {lower}\nupper = {upper}\nsets = {}\nconfiguration = {}", b.sets, b.config);
}

fn residues(ctx: &Ctx, args: ResiduesArgs) -> anyhow::Result<()> {
    let table = load_table(&args.file.zeros, ZERO_MIN_BITS)?;
    let records = match (args.count, args.height) {
        (Some(c), _) if c as usize > table.count() => {
            return usage(format!("table holds {} zeros, {c} requested", table.count()))
        }
        (Some(c), _) => table.first(c as usize),
        (None, Some(h)) => table.up_to_height(h),
        (None, None) => table.records(),
    };
    let bits = ctx.precision.unwrap_or(RESIDUE_BITS);
    let set = ResidueSet::compute(
        &kernel(args.height_ceiling)?,
        records,
        args.problem,
        args.line,
        bits,
        args.prime_bound,
        ctx.workers,
    )?;
    let mut header = Header::new("residues")
        .config("problem", args.problem)
        .config("line", args.line)
        .config("count", records.len())
        .config("precision_bits", bits)
        .config("prime_bound", args.prime_bound);
    if let Some(c) = args.height_ceiling {
        header = header.config("height_ceiling", c);
    }
    let header = header.input(&args.file.zeros)?;
    let mut body = Vec::new();
    set.write_csv(&mut body)?;
    emit(ctx.out, &header, &body)
}

/// `T`, either given or `γ_{m+1} − ε`.
fn resolve_t(cutoff: &Cutoff, table: &ZeroTable) -> anyhow::Result<f64> {
    match (cutoff.t, cutoff.m) {
        (Some(t), _) if t > 0.0 => Ok(t),
        (Some(t), _) => usage(format!("T = {t} must be positive")),
        (None, Some(m)) => match table.get(m + 1) {
            Some(r) => Ok(r.gamma.to_f64() - cutoff.epsilon),
            None => usage(format!("T = γ_{} needs {} zeros, the table holds {}", m + 1, m + 1, table.count())),
        },
        (None, None) => usage("either --T or --m is required"),
    }
}

fn cutoff_label(cutoff: &Cutoff, t: f64) -> String {
    match cutoff.m {
        Some(m) => format!("{t} (γ_{} - {})", m + 1, cutoff.epsilon),
        None => t.to_string(),
    }
}

/// Residues for every zero with `γ ≤ t`, from file or computed.
fn residues_below(
    ctx: &Ctx,
    source: &ResidueSource,
    table: &ZeroTable,
    problem: Problem,
    line: Line,
    t: f64,
    file: Option<&Path>,
    header: Header,
) -> anyhow::Result<(ResidueSet, Header)> {
    let bits = ctx.precision.unwrap_or(RESIDUE_BITS);
    match file {
        Some(path) => {
            let text = read_without_header(path)?;
            let set = ResidueSet::read_csv(text.as_bytes()).with_context(|| format!("reading {}", path.display()))?;
            Ok((set, header.input(path)?))
        }
        None => {
            let records = table.up_to_height(t);
            if records.len() == table.count() && table.count() > 0 {
                let top = table.records()[table.count() - 1].gamma.to_f64();
                if top < t {
                    return usage(format!("zero table ends at {top}, below T = {t}"));
                }
            }
            let set = ResidueSet::compute(
                &kernel(source.height_ceiling)?,
                records,
                problem,
                line,
                bits,
                source.prime_bound,
                ctx.workers,
            )?;
            let label = if line == Line::Half { "residues" } else { "quarter_residues" };
            let header = header
                .config(&format!("{label}_precision_bits"), bits)
                .config(&format!("{label}_prime_bound"), source.prime_bound);
            Ok((set, header))
        }
    }
}

fn oscillate(ctx: &Ctx, action: OscillateCmd) -> anyhow::Result<()> {
    match action {
        OscillateCmd::Bstar { problem, kernel: kind, cutoff, u, u_grid, source } => {
            let table = load_table(&source.file.zeros, ZERO_MIN_BITS)?;
            let t = resolve_t(&cutoff, &table)?;
            let us = match u_grid {
                Some(g) => g.points(),
                None => u,
            };
            let header = Header::new("oscillate bstar")
                .config("problem", problem)
                .config("kernel", kind.as_str())
                .config("T", cutoff_label(&cutoff, t))
                .input(&source.file.zeros)?;
            let (set, header) =
                residues_below(ctx, &source, &table, problem, Line::Half, t, source.residues.as_deref(), header)?;
            let weighted = WeightedResidueSet::build(problem, KernelSpec::new(kind, t)?, &table, &set)?;
            let header = header.config("terms", weighted.len());
            let mut body = String::from("u,bstar\n");
            for u in us {
                let _ = writeln!(body, "{u},{}", weighted.b_star(u));
            }
            emit(ctx.out, &header, body.as_bytes())
        }
        OscillateCmd::Estimate { problem, cutoff, u_grid, quarter, quarter_residues, source } => {
            if quarter && problem != Problem::Omega {
                return usage("--quarter applies to problem h only");
            }
            let table = load_table(&source.file.zeros, ZERO_MIN_BITS)?;
            let t = resolve_t(&cutoff, &table)?;
            let header = Header::new("oscillate estimate")
                .config("problem", problem)
                .config("T", cutoff_label(&cutoff, t))
                .config("u_grid", u_grid)
                .config("quarter", quarter)
                .input(&source.file.zeros)?;
            let (half, header) =
                residues_below(ctx, &source, &table, problem, Line::Half, t, source.residues.as_deref(), header)?;
            let (q, header) = if quarter {
                let (q, h) =
                    residues_below(ctx, &source, &table, problem, Line::Quarter, t, quarter_residues.as_deref(), header)?;
                (Some(q), h)
            } else {
                (None, header)
            };
            let est = ExplicitEstimate::new(problem, t, &table, &half, q.as_ref())?;
            let header = header.config("terms", est.terms());
            let mut body = String::from("u,estimate\n");
            for u in u_grid.points() {
                let _ = writeln!(body, "{u},{}", est.eval(u));
            }
            emit(ctx.out, &header, body.as_bytes())
        }
        OscillateCmd::Bound { problem, kernel: kind, cutoff, big_n, indices, select, source } => {
            if big_n == 0 {
                return usage("N must be positive");
            }
            let table = load_table(&source.file.zeros, ZERO_MIN_BITS)?;
            let t = resolve_t(&cutoff, &table)?;
            let header = Header::new("oscillate bound")
                .config("problem", problem)
                .config("kernel", kind.as_str())
                .config("T", cutoff_label(&cutoff, t))
                .config("N", big_n)
                .input(&source.file.zeros)?;
            let (set, header) =
                residues_below(ctx, &source, &table, problem, Line::Half, t, source.residues.as_deref(), header)?;
            let weighted = WeightedResidueSet::build(problem, KernelSpec::new(kind, t)?, &table, &set)?;
            let (chosen, header) = match (indices, select) {
                (Some(spec), _) => {
                    let idx = parse_indices(&spec).map_err(Usage)?;
                    let header = header.config("indices", &spec);
                    (weighted.restrict(&idx)?, header)
                }
                (None, Some(n)) => {
                    let idx = select_gamma_prime(&weighted, n)?;
                    (weighted.restrict(&idx)?, header.config("select", n))
                }
                (None, None) => (weighted, header),
            };
            let (hi, lo) = anderson_stark_bound(&chosen, big_n)?;
            let mut idx: Vec<usize> = chosen.entries.iter().map(|e| e.index).collect();
            idx.sort_unstable();
            let idx: Vec<String> = idx.iter().map(usize::to_string).collect();
            let body = format!(
                "ordinates = {}\nweighted_mass = {}\nlimsup_lower_bound = {hi}\nliminf_upper_bound = {lo}\nindices = {}\n",
                chosen.len(),
                chosen.weighted_mass(),
                idx.join(","),
            );
            emit(ctx.out, &header, body.as_bytes())
        }
    }
}

fn certify(ctx: &Ctx, args: CertifyArgs) -> anyhow::Result<()> {
    let table = load_table(&args.source.file.zeros, ZERO_MIN_BITS)?;
    if table.count() < args.m + 1 {
        return usage(format!("m = {} needs {} zeros, the table holds {}", args.m, args.m + 1, table.count()));
    }
    let epsilon = match Float::parse(&args.epsilon).map(|p| Float::with_val(128, p)) {
        Ok(e) if e > 0 => e,
        _ => return usage(format!("epsilon '{}' must be a positive decimal", args.epsilon)),
    };
    let mut params = CertificationParams::new(args.problem, args.n, args.m, args.b, args.delta);
    params.epsilon = epsilon.clone();
    params.mode = match args.lll {
        LllArg::Exact => LllMode::Exact,
        LllArg::Hybrid => LllMode::Hybrid,
    };
    params.workers = ctx.workers;
    params.resume_dir = args.resume.clone();
    let header = Header::new("certify")
        .config("problem", args.problem)
        .config("n", args.n)
        .config("m", args.m)
        .config("b", args.b)
        .config("delta", args.delta)
        .config("epsilon", &args.epsilon)
        .config("lll", value_name(args.lll))
        .input(&args.source.file.zeros)?;
    let t = table.records()[args.m].gamma.to_f64() - epsilon.to_f64();
    let (set, header) = residues_below(
        ctx,
        &args.source,
        &table,
        args.problem,
        Line::Half,
        t,
        args.source.residues.as_deref(),
        header,
    )?;
    let cert = run_certification(&params, &table, &set)?;
    emit(ctx.out, &header, write_certificate(&cert).as_bytes())
}

fn series(ctx: &Ctx, action: SeriesCmd) -> anyhow::Result<()> {
    match action {
        SeriesCmd::ASequence { order } => {
            if order == 0 {
                return usage("order must be positive");
            }
            let header = Header::new("series a-sequence").config("order", order);
            let mut body = String::from("k,a_k\n");
            for (k, a) in compute_a_sequence(order).iter().enumerate() {
                let _ = writeln!(body, "{},{a}", k + 1);
            }
            emit(ctx.out, &header, body.as_bytes())
        }
        SeriesCmd::FkTail { k, order } => {
            let s = fk_tail_coefficients(k, order).map_err(|e| Usage(e.to_string()))?;
            let header = Header::new("series fk-tail").config("k", k).config("order", order);
            let mut body = String::from("degree,coefficient\n");
            for (d, c) in s.coefficients().iter().enumerate() {
                let _ = writeln!(body, "{d},{c}");
            }
            emit(ctx.out, &header, body.as_bytes())
        }
    }
}
