//! Command-line driver for the operator laboratory.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure (NaN in a
//! computed field), 4 strict-mode verdict failure.

mod config;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use fiolab::decomp::{
    appendix_scaling_probe, build_lp, build_second_decomposition, schur_bounds, LittlewoodPaley,
    ParamBox, SchurParams,
};
use fiolab::exec::ReductionMode;
use fiolab::experiment::{
    band_commutation_matrix, build_probes, fit_slope, measured_band_width, run_r0_control,
    run_sharpness, ExperimentReport,
};
use fiolab::phase::{
    check_homogeneity, check_nondegeneracy, euler_gradient_equivalence, fibration_data,
    hessian_x_rank, Sample, DEFAULT_RANK_TOL,
};
use fiolab::spectral::{flp_norm_with, forward_ft};
use fiolab::Error;

use config::{PhaseKindName, Reduction, RunConfig};
use report::{fmt_float, write_csv, write_sweep_svg, CheckEntry, CheckReportFile, SweepReportFile};

#[derive(Parser)]
#[command(
    name = "fiolab",
    version,
    about = "Fourier integral operators on discrete Fourier-Lebesgue spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Tf for the configured input and write the samples.
    Apply(ApplyArgs),
    /// Fourier-Lebesgue norms of the configured input.
    Norm(CommonArgs),
    /// Build the dyadic partition and the transverse covering; write the census.
    Decompose(CommonArgs),
    /// Schur row/column integrals of kernel pieces across scales.
    Schur(CommonArgs),
    /// Operator norm-ratio sweep against the threshold prediction.
    Sharpness(CommonArgs),
    /// Band-commutation matrix of the dyadic pieces.
    Commutation(CommonArgs),
    /// Structural hypothesis checks for the configured phase and symbol.
    CheckPhase(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Exit with code 4 when a verdict fails.
    #[arg(long)]
    strict: bool,
    /// Override the configured random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Force deterministic sequential reductions.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct ApplyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Compare the output against the closed-form expectation (identity or
    /// translation), when the phase admits one.
    #[arg(long)]
    check: bool,
}

enum CmdError {
    Config(String),
    Numeric(String),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> CmdError {
        match e {
            Error::NumericFailure(msg) => CmdError::Numeric(msg),
            other => CmdError::Config(other.to_string()),
        }
    }
}

impl From<String> for CmdError {
    fn from(msg: String) -> CmdError {
        CmdError::Config(msg)
    }
}

struct Ctx {
    cfg: RunConfig,
    strict: bool,
    mode: ReductionMode,
}

fn load_ctx(args: &CommonArgs) -> Result<Ctx, CmdError> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.deterministic {
        cfg.reduction = Reduction::Deterministic;
    }
    let mode = cfg.reduction.into();
    Ok(Ctx {
        cfg,
        strict: args.strict,
        mode,
    })
}

fn reduction_name(r: Reduction) -> &'static str {
    match r {
        Reduction::Deterministic => "deterministic",
        Reduction::Parallel => "parallel",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Apply(args) => load_ctx(&args.common).and_then(|ctx| cmd_apply(&ctx, args.check)),
        Command::Norm(args) => load_ctx(args).and_then(|ctx| cmd_norm(&ctx)),
        Command::Decompose(args) => load_ctx(args).and_then(|ctx| cmd_decompose(&ctx)),
        Command::Schur(args) => load_ctx(args).and_then(|ctx| cmd_schur(&ctx)),
        Command::Sharpness(args) => load_ctx(args).and_then(|ctx| cmd_sharpness(&ctx)),
        Command::Commutation(args) => load_ctx(args).and_then(|ctx| cmd_commutation(&ctx)),
        Command::CheckPhase(args) => load_ctx(args).and_then(|ctx| cmd_check_phase(&ctx)),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(CmdError::Config(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(CmdError::Numeric(msg)) => {
            eprintln!("numeric failure: {}", msg);
            ExitCode::from(3)
        }
    }
}

/// Commands return Ok(verdict); a failed verdict exits 4 only under --strict.
fn finish(ctx: &Ctx, verdict: bool) -> Result<bool, CmdError> {
    Ok(verdict || !ctx.strict)
}

// ---------------------------------------------------------------------------
// apply
// ---------------------------------------------------------------------------

fn cmd_apply(ctx: &Ctx, check: bool) -> Result<bool, CmdError> {
    let cfg = &ctx.cfg;
    let op = cfg.operator()?;
    let f = cfg.input_function()?;
    let boundary = f.boundary_mass_fraction();
    if boundary > 1e-8 {
        eprintln!(
            "warning: input carries {:.2e} of its mass on the box boundary; enlarge the box",
            boundary
        );
    }
    let out = op.apply(&f)?;
    if !out
        .values
        .iter()
        .all(|v| v.re.is_finite() && v.im.is_finite())
    {
        return Err(CmdError::Numeric("operator output contains NaN/Inf".into()));
    }

    let grid = *op.grid();
    let d = grid.dim();
    let header: Vec<&str> = if d == 1 {
        vec!["index", "x1", "re", "im"]
    } else {
        vec!["index", "x1", "x2", "re", "im"]
    };
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            let mut row = vec![i.to_string()];
            for a in 0..d {
                row.push(fmt_float(x[a]));
            }
            row.push(fmt_float(out.values[i].re));
            row.push(fmt_float(out.values[i].im));
            row
        })
        .collect();
    write_csv(&cfg.output.csv, &header, &rows)?;

    let mut entries = vec![CheckEntry {
        name: "boundary_mass_fraction".into(),
        value: boundary,
        pass: boundary <= 1e-8,
    }];
    let mut verdict = true;
    if check {
        let expected = match cfg.phase.kind {
            PhaseKindName::Linear => f.values.clone(),
            PhaseKindName::Shifted => {
                let shift = cfg.phase.shift.clone().unwrap_or_default();
                circular_shift(&f, &shift, &grid)?
            }
            _ => {
                return Err(CmdError::Config(
                    "--check needs a linear or shifted phase".into(),
                ))
            }
        };
        let num: f64 = out
            .values
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = expected.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
        let rel = num / den.max(1e-300);
        let pass = rel < 1e-9;
        println!(
            "apply check: relative L2 error {:.3e} ({})",
            rel,
            if pass { "PASS" } else { "FAIL" }
        );
        entries.push(CheckEntry {
            name: "check_relative_l2_error".into(),
            value: rel,
            pass,
        });
        verdict = pass;
    }
    CheckReportFile {
        command: "apply".into(),
        seed: cfg.seed,
        reduction: reduction_name(cfg.reduction).into(),
        entries,
        verdict,
    }
    .save(&cfg.output.report)?;
    println!("apply: wrote {} samples to {}", grid.len(), cfg.output.csv);
    finish(ctx, verdict)
}

fn circular_shift(
    f: &fiolab::spectral::SampledFunction,
    shift: &[f64],
    grid: &fiolab::spectral::Grid,
) -> Result<Vec<num_complex::Complex64>, CmdError> {
    let d = grid.dim();
    let n = grid.points_per_axis();
    let mut cells = [0usize; 2];
    for a in 0..d {
        let c = shift[a] / grid.dx();
        if (c - c.round()).abs() > 1e-9 {
            return Err(CmdError::Config(format!(
                "--check needs the shift to sit on the grid; component {} is {} cells",
                a, c
            )));
        }
        cells[a] = c.round().rem_euclid(n as f64) as usize;
    }
    Ok((0..grid.len())
        .map(|i| {
            let mi = grid.multi_index(i);
            let shifted = [(mi[0] + cells[0]) % n, (mi[1] + cells[1]) % n];
            let idx = if d == 1 {
                shifted[0]
            } else {
                shifted[1] * n + shifted[0]
            };
            f.values[idx]
        })
        .collect())
}

// ---------------------------------------------------------------------------
// norm
// ---------------------------------------------------------------------------

fn cmd_norm(ctx: &Ctx) -> Result<bool, CmdError> {
    let cfg = &ctx.cfg;
    let f = cfg.input_function()?;
    let spec = forward_ft(&f);
    let p = cfg.experiment.p;
    let norm_p = flp_norm_with(&spec, p, 0.0, ctx.mode)?;
    let norm_2 = flp_norm_with(&spec, 2.0, 0.0, ctx.mode)?;
    let l2 = f.l2_norm();
    let parseval = (norm_2 - l2).abs() / l2.max(1e-300);

    let grid = f.grid;
    let d = grid.dim();
    let header: Vec<&str> = if d == 1 {
        vec!["index", "eta1", "abs", "re", "im"]
    } else {
        vec!["index", "eta1", "eta2", "abs", "re", "im"]
    };
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|k| {
            let eta = grid.dual_point(k);
            let mut row = vec![k.to_string()];
            for a in 0..d {
                row.push(fmt_float(eta[a]));
            }
            row.push(fmt_float(spec.values[k].norm()));
            row.push(fmt_float(spec.values[k].re));
            row.push(fmt_float(spec.values[k].im));
            row
        })
        .collect();
    write_csv(&cfg.output.csv, &header, &rows)?;

    let verdict = parseval < 1e-10;
    println!(
        "norm: FL^{} = {:.12e}, FL^2 = {:.12e}, physical L2 = {:.12e}, Parseval defect {:.3e}",
        p, norm_p, norm_2, l2, parseval
    );
    CheckReportFile {
        command: "norm".into(),
        seed: cfg.seed,
        reduction: reduction_name(cfg.reduction).into(),
        entries: vec![
            CheckEntry {
                name: format!("flp_norm_p_{}", p),
                value: norm_p,
                pass: norm_p.is_finite(),
            },
            CheckEntry {
                name: "parseval_defect".into(),
                value: parseval,
                pass: verdict,
            },
        ],
        verdict,
    }
    .save(&cfg.output.report)?;
    finish(ctx, verdict)
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

fn cmd_decompose(ctx: &Ctx) -> Result<bool, CmdError> {
    let cfg = &ctx.cfg;
    let grid = cfg.grid()?;
    let phase = cfg.phase()?;
    let symbol = cfg.symbol()?;
    let lp = build_lp(cfg.experiment.j_max, &grid)?;

    // partition-of-unity defect on dual grid points inside 2^J
    let mut lp_defect = 0.0f64;
    let bound = (1u64 << lp.max_level()) as f64;
    for k in 0..grid.len() {
        let eta = grid.dual_point(k);
        let r: f64 = eta[..grid.dim()].iter().map(|t| t * t).sum::<f64>().sqrt();
        if r <= bound {
            let sum: f64 = (0..=lp.max_level()).map(|j| lp.psi_j_radial(j, r)).sum();
            lp_defect = lp_defect.max((sum - 1.0).abs());
        }
    }

    let rank = phase.fibration_rank();
    if rank == 0 {
        return Err(CmdError::Config(
            "decompose needs a phi_product phase (fibration rank >= 1)".into(),
        ));
    }
    let support = symbol
        .window()
        .ok_or_else(|| CmdError::Config("decompose needs a windowed symbol".into()))?
        .support();
    let domain = if rank == 1 {
        ParamBox::new(&[-support], &[support])?
    } else {
        ParamBox::new(&[-support, -support], &[support, support])?
    };

    let mut rows = Vec::new();
    let mut count_ratios = Vec::new();
    let mut grad_consts = Vec::new();
    for j in cfg.experiment.j_min..=cfg.experiment.j_max {
        let sd = build_second_decomposition(j, rank, domain)?;
        let root_j = 2.0f64.powf(j as f64 / 2.0);
        // max normalized finite-difference gradient over all pieces (axis 0)
        let h = sd.spacing() * 1e-4;
        let mut grad = 0.0f64;
        for nu in 0..sd.count() {
            let c = sd.center(nu);
            for i in 0..200 {
                let t = c[0] - sd.spacing() + 2.0 * sd.spacing() * i as f64 / 199.0;
                let mut up = c;
                let mut dn = c;
                up[0] = t + h;
                dn[0] = t - h;
                let g = (sd.chi(nu, &up[..rank]) - sd.chi(nu, &dn[..rank])) / (2.0 * h);
                grad = grad.max(g.abs());
            }
        }
        let ratio = sd.count() as f64 / 2.0f64.powf(j as f64 * rank as f64 / 2.0);
        count_ratios.push(ratio);
        grad_consts.push(grad / root_j);
        rows.push(vec![
            j.to_string(),
            sd.count().to_string(),
            fmt_float(sd.spacing()),
            fmt_float(ratio),
            fmt_float(grad / root_j),
        ]);
    }
    write_csv(
        &cfg.output.csv,
        &["j", "count", "spacing", "count_ratio", "grad_over_root_j"],
        &rows,
    )?;

    let spread = |v: &[f64]| -> f64 {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(0.0f64, f64::max);
        hi / lo
    };
    let census_spread = spread(&count_ratios);
    let grad_spread = spread(&grad_consts);
    let verdict = lp_defect < 1e-12 && census_spread <= 2.0 && grad_spread <= 2.0;
    println!(
        "decompose: partition defect {:.2e}, census spread {:.3}, gradient spread {:.3}",
        lp_defect, census_spread, grad_spread
    );
    CheckReportFile {
        command: "decompose".into(),
        seed: cfg.seed,
        reduction: reduction_name(cfg.reduction).into(),
        entries: vec![
            CheckEntry {
                name: "lp_partition_defect".into(),
                value: lp_defect,
                pass: lp_defect < 1e-12,
            },
            CheckEntry {
                name: "census_spread".into(),
                value: census_spread,
                pass: census_spread <= 2.0,
            },
            CheckEntry {
                name: "gradient_spread".into(),
                value: grad_spread,
                pass: grad_spread <= 2.0,
            },
        ],
        verdict,
    }
    .save(&cfg.output.report)?;
    finish(ctx, verdict)
}

// ---------------------------------------------------------------------------
// schur
// ---------------------------------------------------------------------------

/// Transverse probe point: phi'' is bounded away from 0 here.
const TRANSVERSE_PROBE: [f64; 2] = [0.5, 0.4];

fn cmd_schur(ctx: &Ctx) -> Result<bool, CmdError> {
    let cfg = &ctx.cfg;
    let op = cfg.operator()?;
    let rank = op.phase().fibration_rank();
    if rank == 0 {
        return Err(CmdError::Config(
            "schur needs a phi_product phase in the swapped convention".into(),
        ));
    }
    let support = op
        .symbol()
        .window()
        .ok_or_else(|| CmdError::Config("schur needs a windowed symbol".into()))?
        .support();
    let lp = LittlewoodPaley::free(cfg.experiment.j_max);
    let domain = if rank == 1 {
        ParamBox::new(&[-support], &[support])?
    } else {
        ParamBox::new(&[-support, -support], &[support, support])?
    };
    let params = SchurParams::default();

    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    for j in cfg.experiment.j_min..=cfg.experiment.j_max {
        let sd = build_second_decomposition(j, rank, domain)?;
        let nu = sd.nearest_center(&TRANSVERSE_PROBE[..rank]);
        let bounds = schur_bounds(&op, &lp, &sd, nu, &params)?;
        let (inc, rem) = appendix_scaling_probe(&op, &lp, &sd, nu, &params)?;
        rows.push(vec![
            j.to_string(),
            nu.to_string(),
            fmt_float(bounds.row_integral),
            fmt_float(bounds.col_integral),
            fmt_float(inc),
            fmt_float(rem),
        ]);
        pairs.push((j as f64, bounds.row_integral));
    }
    write_csv(
        &cfg.output.csv,
        &[
            "j",
            "nu",
            "row_integral",
            "col_integral",
            "increment_sup",
            "remainder_sup",
        ],
        &rows,
    )?;

    let (slope, intercept, residual) = fit_slope(&pairs)?;
    let predicted = -(rank as f64) / 2.0;
    let tolerance = cfg.experiment.tolerance;
    let verdict = (slope - predicted).abs() <= tolerance;
    let report = ExperimentReport {
        config: format!(
            "schur d={} r={} m={} j={}..{}",
            cfg.dimension, rank, cfg.symbol.order, cfg.experiment.j_min, cfg.experiment.j_max
        ),
        scales: (cfg.experiment.j_min..=cfg.experiment.j_max).collect(),
        ratios: pairs.iter().map(|p| p.1).collect(),
        slope,
        intercept,
        residual,
        predicted,
        tolerance,
        verdict,
    };
    println!(
        "schur: row-integral slope {:.4} (predicted {:.4}) -> {}",
        slope,
        predicted,
        if verdict { "PASS" } else { "FAIL" }
    );
    SweepReportFile::new(&report, cfg.seed, reduction_name(cfg.reduction))
        .save(&cfg.output.report)?;
    if let Some(svg) = &cfg.output.svg {
        write_sweep_svg(svg, &report)?;
    }
    finish(ctx, verdict)
}

// ---------------------------------------------------------------------------
// sharpness
// ---------------------------------------------------------------------------

fn cmd_sharpness(ctx: &Ctx) -> Result<bool, CmdError> {
    let cfg = &ctx.cfg;
    let op = cfg.operator()?;
    let family = cfg.family()?;
    let p = cfg.experiment.p;
    let tolerance = cfg.experiment.tolerance;
    let report = if op.phase().fibration_rank() > 0 {
        run_sharpness(&op, p, &family, tolerance)?
    } else {
        run_r0_control(&op, p, &family, tolerance)?
    };

    let rows: Vec<Vec<String>> = report
        .scales
        .iter()
        .zip(&report.ratios)
        .map(|(&j, &rho)| vec![j.to_string(), fmt_float(rho), fmt_float(rho.log2())])
        .collect();
    write_csv(&cfg.output.csv, &["j", "ratio", "log2_ratio"], &rows)?;
    SweepReportFile::new(&report, cfg.seed, reduction_name(cfg.reduction))
        .save(&cfg.output.report)?;
    if let Some(svg) = &cfg.output.svg {
        write_sweep_svg(svg, &report)?;
    }
    println!(
        "sharpness: slope {:.4} (predicted {:.4}, tolerance {:.2}) -> {}",
        report.slope,
        report.predicted,
        report.tolerance,
        if report.verdict { "PASS" } else { "FAIL" }
    );
    finish(ctx, report.verdict)
}

// ---------------------------------------------------------------------------
// commutation
// ---------------------------------------------------------------------------

fn cmd_commutation(ctx: &Ctx) -> Result<bool, CmdError> {
    let cfg = &ctx.cfg;
    let op = cfg.operator()?;
    let grid = *op.grid();
    let levels = cfg.experiment.j_max;
    let lp = build_lp(levels, &grid)?;
    let probes = build_probes(grid, 3, grid.dual_radius() / 2.0, cfg.seed);
    let matrix = band_commutation_matrix(&op, &lp, levels, &probes)?;

    let mut rows = Vec::new();
    for (i, row) in matrix.iter().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            rows.push(vec![(i + 1).to_string(), (l + 1).to_string(), fmt_float(v)]);
        }
    }
    write_csv(&cfg.output.csv, &["k", "j", "value"], &rows)?;

    let diag = (0..matrix.len())
        .map(|i| matrix[i][i])
        .fold(0.0f64, f64::max);
    let n0 = measured_band_width(&matrix, 1e-3);
    let mut off_band_max = 0.0f64;
    for (i, row) in matrix.iter().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            if i.abs_diff(l) as u32 > 3 {
                off_band_max = off_band_max.max(v / diag);
            }
        }
    }
    let verdict = n0 <= 3 && off_band_max <= 1e-3;
    println!(
        "commutation: band width {} (diag max {:.3e}, beyond-3 max {:.3e} relative) -> {}",
        n0,
        diag,
        off_band_max,
        if verdict { "PASS" } else { "FAIL" }
    );
    CheckReportFile {
        command: "commutation".into(),
        seed: cfg.seed,
        reduction: reduction_name(cfg.reduction).into(),
        entries: vec![
            CheckEntry {
                name: "band_width".into(),
                value: n0 as f64,
                pass: n0 <= 3,
            },
            CheckEntry {
                name: "diag_max".into(),
                value: diag,
                pass: diag.is_finite(),
            },
            CheckEntry {
                name: "off_band_max_relative".into(),
                value: off_band_max,
                pass: off_band_max <= 1e-3,
            },
        ],
        verdict,
    }
    .save(&cfg.output.report)?;
    finish(ctx, verdict)
}

// ---------------------------------------------------------------------------
// check-phase
// ---------------------------------------------------------------------------

fn cmd_check_phase(ctx: &Ctx) -> Result<bool, CmdError> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    let cfg = &ctx.cfg;
    let phase = cfg.phase()?;
    let grid = cfg.grid()?;
    let d = phase.dim();
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let radius = grid.dual_radius() / 2.0;
    let samples: Vec<Sample> = (0..200)
        .map(|_| {
            let mut x = [0.0; 2];
            let mut eta = [0.0; 2];
            loop {
                for a in 0..d {
                    x[a] = rng.gen_range(-1.5..1.5);
                    eta[a] = rng.gen_range(-radius..radius);
                }
                if eta[..d].iter().map(|t| t * t).sum::<f64>().sqrt() >= 0.5 {
                    break;
                }
            }
            (x, eta)
        })
        .collect();

    let homogeneity = check_homogeneity(&phase, &samples)?;
    let min_det = check_nondegeneracy(&phase, &samples);
    let fib = fibration_data(&phase)?;
    let (equiv_lo, equiv_hi) = euler_gradient_equivalence(&phase, &samples)?;
    let max_rank = samples
        .iter()
        .map(|(x, eta)| hessian_x_rank(&phase, &x[..d], &eta[..d], DEFAULT_RANK_TOL))
        .max()
        .unwrap_or(0);

    let entries = vec![
        CheckEntry {
            name: "homogeneity_defect".into(),
            value: homogeneity,
            pass: homogeneity < 1e-10,
        },
        CheckEntry {
            name: "min_mixed_hessian_det".into(),
            value: min_det,
            pass: min_det > 0.0,
        },
        CheckEntry {
            name: "fibration_rank".into(),
            value: fib.rank as f64,
            pass: true,
        },
        CheckEntry {
            name: "max_hessian_rank".into(),
            value: max_rank as f64,
            pass: max_rank <= fib.rank,
        },
        CheckEntry {
            name: "gradient_equivalence_min".into(),
            value: equiv_lo,
            pass: equiv_lo > 0.0,
        },
        CheckEntry {
            name: "gradient_equivalence_max".into(),
            value: equiv_hi,
            pass: equiv_hi.is_finite(),
        },
    ];
    let verdict = entries.iter().all(|e| e.pass);
    for e in &entries {
        println!(
            "check-phase {}: {:.6e} ({})",
            e.name,
            e.value,
            if e.pass { "PASS" } else { "FAIL" }
        );
    }
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|e| {
            vec![
                e.name.clone(),
                fmt_float(e.value),
                (if e.pass { "1" } else { "0" }).to_string(),
            ]
        })
        .collect();
    write_csv(&cfg.output.csv, &["check", "value", "pass"], &rows)?;
    CheckReportFile {
        command: "check-phase".into(),
        seed: cfg.seed,
        reduction: reduction_name(cfg.reduction).into(),
        entries,
        verdict,
    }
    .save(&cfg.output.report)?;
    finish(ctx, verdict)
}
