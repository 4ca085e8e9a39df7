//! Command-line front end.
//!
//! Exit codes: `0` for answers that need no action (stable, polystable,
//! indeterminate, nothing to destabilize), `10` when a destabilization
//! certificate was produced, `2` for configuration problems (unreadable or
//! invalid input, bad flag values, missing experimental opt-in), `1` for
//! internal failures such as an exhausted search schedule.
//!
//! All report and CSV bytes depend only on the input and version; progress
//! and timing go to stderr.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_traits::Signed;

use crate::blowup::{build_chain, weight_identities};
use crate::config::load_surface;
use crate::fractions::{dual_expand, hj_expand, Weight};
use crate::futaki::{destabilize, FutakiError, Futs2Family};
use crate::lattice::SurfaceLattice;
use crate::rational::{parse_rat, render_decimal, render_rat, Rat};
use crate::report::{Report, SlopeEntry, VerdictReport};
use crate::scan::{rows_to_csv, scan_rows, ScanSpec};
use crate::surface::{
    central_fiber, classify_stability, normalize_to_splus, par_slope, ParabolicSurface,
    StabilityVerdict,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DESTABILIZED: u8 = 10;

#[derive(Debug, Parser)]
#[command(
    name = "parablow",
    version,
    about = "Exact stability verdicts for parabolic ruled surfaces"
)]
pub struct Cli {
    /// Worker threads for grid scans (fallback: PARABLOW_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print both continued-fraction expansions of a weight p/q.
    Hj {
        /// Weight as a reduced fraction in (0, 1), e.g. 2/5.
        weight: String,
    },
    /// Print the exceptional chain table for every marked fiber.
    Blowup {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the parabolic slope of every section.
    Slope {
        #[arg(long)]
        config: PathBuf,
    },
    /// Classify stability; an unstable witness triggers the certificate search.
    Verdict {
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV grid of the Futaki invariant over (tau-, tau+).
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Samples per axis.
        #[arg(long, default_value_t = 16)]
        grid: u32,
        /// Scale of the base Kähler class, as p/q.
        #[arg(long, default_value = "1000")]
        c_base: String,
        /// Open upper bound for both parameters, as p/q in (0, 1).
        #[arg(long, default_value = "1/16")]
        tau_max: String,
        /// Section whose chain family is scanned; default: smallest slope.
        #[arg(long)]
        section: Option<String>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search the Kähler schedule for a negative-invariant certificate.
    Destabilize {
        #[arg(long)]
        config: PathBuf,
        /// Section to destabilize along; default: smallest slope.
        #[arg(long)]
        section: Option<String>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> u8 {
    configure_threads(cli.threads);
    match cli.command {
        Command::Hj { weight } => cmd_hj(&weight),
        Command::Blowup { config } => cmd_blowup(&config),
        Command::Slope { config } => cmd_slope(&config),
        Command::Verdict { config, out } => cmd_verdict(&config, out.as_deref()),
        Command::Scan {
            config,
            grid,
            c_base,
            tau_max,
            section,
            out,
        } => cmd_scan(
            &config,
            grid,
            &c_base,
            &tau_max,
            section.as_deref(),
            out.as_deref(),
        ),
        Command::Destabilize {
            config,
            section,
            out,
        } => cmd_destabilize(&config, section.as_deref(), out.as_deref()),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(requested: Option<usize>) {
    let n = requested.or_else(|| {
        std::env::var("PARABLOW_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    });
    if let Some(n) = n.filter(|&n| n > 0) {
        // A failure here means a pool already exists (e.g. in tests); the
        // default pool is just as correct.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_requested: Option<usize>) {}

fn fail(code: u8, message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    code
}

/// Configuration problems exit 2; exhausted searches and other internal
/// conditions exit 1.
fn futaki_exit(err: &FutakiError) -> u8 {
    match err {
        FutakiError::MultiPointRequiresFlag { .. }
        | FutakiError::OutOfRange(_)
        | FutakiError::ProfileInvalid(_)
        | FutakiError::Surface(_) => EXIT_CONFIG,
        _ => EXIT_INTERNAL,
    }
}

fn emit(out: Option<&std::path::Path>, content: &str) -> Result<(), std::io::Error> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_hj(text: &str) -> u8 {
    match Weight::parse(text) {
        Ok(weight) => {
            println!("e-: {}, e+: {}", hj_expand(weight), dual_expand(weight));
            EXIT_OK
        }
        Err(err) => fail(EXIT_CONFIG, err),
    }
}

fn cmd_blowup(config: &std::path::Path) -> u8 {
    let surface = match load_surface(config) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_CONFIG, err),
    };
    if surface.marked.is_empty() {
        println!("no blowups");
        return EXIT_OK;
    }
    let mut lattice = SurfaceLattice::new(surface.genus, 0, 0);
    for point in &surface.marked {
        let (chain, _) = build_chain(point.weight, &mut lattice);
        println!(
            "fiber {}: weight {}, E0 at index {}",
            point.fiber, point.weight, chain.e0_index
        );
        println!("  idx  self_int     w     v  class");
        for (idx, node) in chain.nodes.iter().enumerate() {
            let marker = if idx == chain.e0_index { "*" } else { " " };
            println!(
                "  {idx:>3}{marker} {:>8}  {:>4}  {:>4}  {}",
                node.self_int, node.w, node.v, node.cls
            );
        }
        let sums = weight_identities(&chain);
        let alpha = point.weight.as_rat();
        let left_ok = sums.left_sum == alpha;
        let right_ok = alpha.clone() + &sums.right_sum == crate::rational::rint(1);
        println!(
            "  weight sums: left {} vs alpha {} [{}]; right {} vs 1-alpha {} [{}]",
            render_rat(&sums.left_sum),
            render_rat(&alpha),
            if left_ok { "ok" } else { "MISMATCH" },
            render_rat(&sums.right_sum),
            render_rat(&(crate::rational::rint(1) - &alpha)),
            if right_ok { "ok" } else { "MISMATCH" },
        );
    }
    EXIT_OK
}

fn cmd_slope(config: &std::path::Path) -> u8 {
    let surface = match load_surface(config) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_CONFIG, err),
    };
    if surface.sections.is_empty() {
        println!("no sections");
        return EXIT_OK;
    }
    for section in &surface.sections {
        let slope = par_slope(&surface, &section.id).expect("listed sections resolve");
        println!(
            "{}: {} ({})",
            section.id,
            render_rat(&slope),
            render_decimal(&slope, 12)
        );
    }
    EXIT_OK
}

fn slope_entries(surface: &ParabolicSurface) -> Vec<SlopeEntry> {
    surface
        .sections
        .iter()
        .map(|s| {
            let slope = par_slope(surface, &s.id).expect("listed sections resolve");
            SlopeEntry::new(&s.id, &slope)
        })
        .collect()
}

fn cmd_verdict(config: &std::path::Path, out: Option<&std::path::Path>) -> u8 {
    let surface = match load_surface(config) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_CONFIG, err),
    };
    let verdict = classify_stability(&surface);
    let mut report = Report::new("verdict");
    report.slopes = slope_entries(&surface);
    report.verdict = Some(VerdictReport::from(&verdict));

    let exit = if let StabilityVerdict::UnstableWitness { section, .. } = &verdict {
        match destabilize(&surface, section) {
            Ok(cert) => {
                report.certificate = Some((&cert).into());
                EXIT_DESTABILIZED
            }
            Err(err) => return fail(futaki_exit(&err), err),
        }
    } else {
        EXIT_OK
    };

    match emit(out, &(report.to_json() + "\n")) {
        Ok(()) => exit,
        Err(err) => fail(EXIT_INTERNAL, err),
    }
}

/// Explicit section flag, else the smallest slope (first such section on ties).
fn choose_section(surface: &ParabolicSurface, flag: Option<&str>) -> Result<String, String> {
    if let Some(id) = flag {
        return match surface.section(id) {
            Ok(_) => Ok(id.to_string()),
            Err(err) => Err(err.to_string()),
        };
    }
    let mut best: Option<(String, Rat)> = None;
    for section in &surface.sections {
        let slope = par_slope(surface, &section.id).expect("listed sections resolve");
        if best.as_ref().is_none_or(|(_, b)| slope < *b) {
            best = Some((section.id.clone(), slope));
        }
    }
    best.map(|(id, _)| id)
        .ok_or_else(|| "configuration has no sections".to_string())
}

fn cmd_scan(
    config: &std::path::Path,
    grid: u32,
    c_base_text: &str,
    tau_max_text: &str,
    section: Option<&str>,
    out: Option<&std::path::Path>,
) -> u8 {
    let surface = match load_surface(config) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_CONFIG, err),
    };
    let c_base = match parse_rat(c_base_text) {
        Ok(v) if v.is_positive() => v,
        Ok(_) => return fail(EXIT_CONFIG, "--c-base must be positive"),
        Err(err) => return fail(EXIT_CONFIG, format!("--c-base: {err}")),
    };
    let tau_max = match parse_rat(tau_max_text) {
        Ok(v) => v,
        Err(err) => return fail(EXIT_CONFIG, format!("--tau-max: {err}")),
    };
    let section = match choose_section(&surface, section) {
        Ok(id) => id,
        Err(err) => return fail(EXIT_CONFIG, err),
    };
    let model = match central_fiber(&surface, &section) {
        Ok(m) => m,
        Err(err) => return fail(EXIT_CONFIG, err),
    };
    let (model, _steps) = normalize_to_splus(&model);
    if model.points.len() > 1 && !surface.experimental_multi_point {
        return fail(
            EXIT_CONFIG,
            FutakiError::MultiPointRequiresFlag {
                points: model.points.len(),
            },
        );
    }
    let family = match Futs2Family::new(&model, &c_base) {
        Ok(f) => f,
        Err(err) => return fail(futaki_exit(&err), err),
    };
    let spec = ScanSpec {
        grid,
        tau_max,
        c_base,
    };
    let started = Instant::now();
    let rows = match scan_rows(&family, &spec) {
        Ok(rows) => rows,
        Err(err) => return fail(futaki_exit(&err), err),
    };
    eprintln!(
        "scanned {} cells for section {} in {:.3?}",
        rows.len(),
        section,
        started.elapsed()
    );
    match emit(out, &rows_to_csv(&rows)) {
        Ok(()) => EXIT_OK,
        Err(err) => fail(EXIT_INTERNAL, err),
    }
}

fn cmd_destabilize(
    config: &std::path::Path,
    section: Option<&str>,
    out: Option<&std::path::Path>,
) -> u8 {
    let surface = match load_surface(config) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_CONFIG, err),
    };
    let section = match choose_section(&surface, section) {
        Ok(id) => id,
        Err(err) => return fail(EXIT_CONFIG, err),
    };
    let started = Instant::now();
    match destabilize(&surface, &section) {
        Ok(cert) => {
            eprintln!(
                "found certificate for section {section} in {:.3?}",
                started.elapsed()
            );
            let mut report = Report::new("destabilize");
            report.slopes = vec![SlopeEntry::new(&cert.section, &cert.slope)];
            report.certificate = Some((&cert).into());
            match emit(out, &(report.to_json() + "\n")) {
                Ok(()) => EXIT_DESTABILIZED,
                Err(err) => fail(EXIT_INTERNAL, err),
            }
        }
        Err(FutakiError::NotDestabilizing(slope)) => {
            println!("section {section} has positive slope {slope}; nothing to destabilize");
            EXIT_OK
        }
        Err(err) => fail(futaki_exit(&err), err),
    }
}
