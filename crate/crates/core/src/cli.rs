//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the input or arguments are invalid, 2
//! when an internal invariant fails (always a defect).

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::enumeration::{
    build_oracle_matching, check_identities, count_table, enumerate_labelings, enumerate_quadrangulations,
    enumerate_quadrangulations_by_flags, enumerate_unicellular, labeled_count, CountTable,
};
use crate::error::{MapError, Result};
use crate::format::{parse_emap, parse_kmap, parse_umap, print_emap, print_kmap, print_umap, KMap, SourceLine};
use crate::forward::phi;
use crate::genfun::{pp_count, q_coefficients, sphere_count};
use crate::multipoint::{ab_default_marks, ab_forward, lambda_multi, phi_multi, DelayedSources};
use crate::reverse::lambda;
use crate::sampler::{
    experiment_scaling, replicate_rng, sample_well_labeled, scaling_summary, stats, LabeledSampler, SampleMode,
    ScalingRow, SCALING_CSV_HEADER,
};
use crate::surface::{canonical_code, Flag, SurfaceType, Vertex};

#[derive(Debug, Parser)]
#[command(name = "quadmaps", version, about = "Quadrangulations and labeled one-face maps on arbitrary surfaces")]
pub struct Cli {
    /// Worker threads for enumeration and sampling; output order does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Suite {
    Counts,
    Identities,
    Roundtrip,
    Flags,
    Oracle,
    Gf,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rooted bipartite quadrangulation (.emap) to its well-labeled one-face map (.umap).
    Forward {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Well-labeled one-face map (.umap) to its quadrangulation (.emap).
    Reverse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quadrangulation with marked delayed sources to a multi-rooted labeled map (.kmap).
    MiermontForward {
        #[arg(long = "in")]
        input: PathBuf,
        /// `.kmap` file holding a `sources` block.
        #[arg(long)]
        sources: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multi-rooted well-labeled map (.kmap) to its quadrangulation and sources.
    MiermontReverse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the recovered sources as a `.kmap` sources block.
        #[arg(long)]
        sources_out: Option<PathBuf>,
    },
    /// Pointed quadrangulation to its pointed labeled map through the extremal vertices.
    Ab {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        point: usize,
        /// One flag per extremal vertex, in face order; canonical flags when omitted.
        #[arg(long, value_delimiter = ',')]
        marks: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every rooted one-face map with `n` edges on the surface, optionally every (well-)labeling.
    Enumerate {
        #[arg(long)]
        surface: SurfaceType,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        labeled: bool,
        #[arg(long)]
        well_labeled: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count tables as CSV for n = 1..=nmax.
    Counts {
        #[arg(long)]
        surface: SurfaceType,
        #[arg(long)]
        nmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coefficients of the quadrangulation series as CSV.
    Gf {
        #[arg(long)]
        surface: SurfaceType,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rooted quadrangulations of the projective plane as CSV.
    Pp {
        #[arg(long)]
        nmax: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform labeled one-face maps: statistics as CSV, or the maps themselves.
    Sample {
        #[arg(long)]
        surface: SurfaceType,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Print `.umap` documents instead of statistics.
        #[arg(long)]
        maps: bool,
        /// Print uniform quadrangulations (`.emap`) obtained by rejection.
        #[arg(long, conflicts_with = "maps")]
        quadrangulations: bool,
        /// Labeled draws allowed per quadrangulation.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radius statistics across sizes as CSV.
    Scaling {
        #[arg(long)]
        surface: SurfaceType,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        replicates: usize,
        #[arg(long)]
        seed: u64,
        /// Print per-size median and interquartile range instead of every replicate.
        #[arg(long)]
        summary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive self-checks at small sizes.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> CmdResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    // output is buffered so that the command can run inside a worker pool
    let mut buffer = Vec::new();
    let result = match cli.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build() {
            Ok(pool) => pool.install(|| execute(cli.command, &mut buffer)),
            Err(e) => Err(Failure::Input(format!("thread pool: {e}"))),
        },
        None => execute(cli.command, &mut buffer),
    };
    let result = result.and_then(|()| stdout.write_all(&buffer).map_err(|e| Failure::Input(format!("stdout: {e}"))));
    match result {
        Ok(()) => 0,
        Err(Failure::Input(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            1
        }
        Err(Failure::Internal(m)) => {
            let _ = writeln!(stderr, "internal error: {m}");
            2
        }
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> CmdResult<()> {
    match cmd {
        Command::Forward { input, out } => {
            let q = parse_emap(&read(&input)?)?;
            emit(&out, stdout, &print_umap(&phi(&q)?))
        }
        Command::Reverse { input, out } => {
            let u = parse_umap(&read(&input)?)?;
            u.check_well_labeled()?;
            emit(&out, stdout, &print_emap(&lambda(&u)?))
        }
        Command::MiermontForward { input, sources, out } => {
            let q = parse_emap(&read(&input)?)?;
            let k = parse_kmap(&read(&sources)?)?;
            if k.sources.is_empty() {
                return Err(Failure::Input(format!("{}: no sources block", sources.display())));
            }
            let corners: Vec<Flag> = k.sources.iter().map(|s| Flag(s.corner)).collect();
            if let Some(s) = k.sources.iter().find(|s| s.corner >= q.flag_count()) {
                return Err(MapError::IndexOutOfRange { index: s.corner, bound: q.flag_count() }.into());
            }
            let delays: Vec<i64> = k.sources.iter().map(|s| s.delay).collect();
            let ds = DelayedSources::marked(&q, &corners, &delays);
            if let Some((j, s)) = k.sources.iter().enumerate().find(|(j, s)| ds.vertices[*j].0 != s.vertex) {
                return Err(MapError::SourcesInvalid(format!(
                    "source {}: corner {} is not at vertex {}",
                    j + 1,
                    s.corner,
                    s.vertex
                ))
                .into());
            }
            let m = phi_multi(&q, &ds)?;
            emit(&out, stdout, &print_kmap(&KMap { map: Some(m), point: None, sources: Vec::new() }))
        }
        Command::MiermontReverse { input, out, sources_out } => {
            let k = parse_kmap(&read(&input)?)?;
            let m = k.map.ok_or_else(|| Failure::Input(format!("{}: no map", input.display())))?;
            let mq = lambda_multi(&m)?;
            emit(&out, stdout, &print_emap(&mq.q))?;
            if let Some(p) = sources_out {
                let corners = mq.sources.corners.clone().unwrap_or_default();
                let sources = (0..mq.sources.len())
                    .map(|j| SourceLine {
                        vertex: mq.sources.vertices[j].0,
                        delay: mq.sources.delays[j],
                        corner: corners[j].0,
                    })
                    .collect();
                emit(&Some(p), stdout, &print_kmap(&KMap { map: None, point: None, sources }))?;
            }
            Ok(())
        }
        Command::Ab { input, point, marks, out } => {
            let q = parse_emap(&read(&input)?)?;
            if point >= q.vertex_count() {
                return Err(MapError::IndexOutOfRange { index: point, bound: q.vertex_count() }.into());
            }
            let marks: Vec<Flag> = match marks {
                Some(m) => m.into_iter().map(Flag).collect(),
                None => ab_default_marks(&q, Vertex(point)),
            };
            let p = ab_forward(&q, Vertex(point), &marks)?;
            emit(&out, stdout, &print_kmap(&KMap { map: Some(p.map), point: Some(p.point.0), sources: Vec::new() }))
        }
        Command::Enumerate { surface, n, labeled, well_labeled, out } => {
            let maps = enumerate_unicellular(n, Some(surface));
            let docs: Vec<String> = if labeled || well_labeled {
                maps.par_iter()
                    .flat_map_iter(|u| enumerate_labelings(u, well_labeled).into_iter().map(|m| print_umap(&m)))
                    .collect()
            } else {
                maps.iter().map(print_umap).collect()
            };
            emit(&out, stdout, &docs.join("\n"))
        }
        Command::Counts { surface, nmax, out } => {
            let mut text = format!("{}\n", CountTable::CSV_HEADER);
            for n in 1..=nmax {
                let t = count_table(surface, n)?;
                check_identities(&t).map_err(Failure::Internal)?;
                text.push_str(&t.csv_row());
                text.push('\n');
            }
            emit(&out, stdout, &text)
        }
        Command::Gf { surface, order, out } => {
            let coeffs = q_coefficients(surface, order)?;
            let mut text = String::from("n,coeff,coeff_over_vertices\n");
            for (n, c) in coeffs.iter().enumerate().skip(1) {
                let v = n as i64 + 2 - surface.h2 as i64;
                let ratio = if v > 0 { (c / v).to_string() } else { String::new() };
                text.push_str(&format!("{n},{c},{ratio}\n"));
            }
            emit(&out, stdout, &text)
        }
        Command::Pp { nmax, out } => {
            let mut text = String::from("n,count\n");
            for n in 1..=nmax {
                text.push_str(&format!("{n},{}\n", pp_count(n)));
            }
            emit(&out, stdout, &text)
        }
        Command::Sample { surface, n, seed, replicates, mode, maps, quadrangulations, budget, out } => {
            let mode = match mode {
                ModeArg::Auto => SampleMode::Auto,
                ModeArg::Exact => SampleMode::Exact,
                ModeArg::Float => SampleMode::Float,
            };
            let sampler = LabeledSampler::new(surface, n, mode)?;
            let docs: Vec<String> = (0..replicates as u64)
                .into_par_iter()
                .map(|r| -> Result<String> {
                    let mut rng = replicate_rng(seed, r);
                    if quadrangulations {
                        let (u, _) = sample_well_labeled(&sampler, budget, &mut rng)?;
                        return Ok(print_emap(&lambda(&u)?));
                    }
                    let u = sampler.sample(&mut rng)?;
                    if maps {
                        return Ok(print_umap(&u));
                    }
                    let row = ScalingRow { surface, n, seed, replicate: r as usize, stats: stats(&u)?, mode: sampler.mode() };
                    Ok(row.csv_row() + "\n")
                })
                .collect::<Result<_>>()?;
            let text = if maps || quadrangulations { docs.join("\n") } else { format!("{SCALING_CSV_HEADER}\n{}", docs.concat()) };
            emit(&out, stdout, &text)
        }
        Command::Scaling { surface, sizes, replicates, seed, summary, out } => {
            let rows = experiment_scaling(surface, &sizes, replicates, seed)?;
            let text = if summary {
                let mut t = String::from("n,median_norm_radius,iqr\n");
                for s in scaling_summary(&rows) {
                    t.push_str(&format!("{},{:.6},{:.6}\n", s.n, s.median, s.iqr));
                }
                t
            } else {
                let mut t = format!("{SCALING_CSV_HEADER}\n");
                for r in &rows {
                    t.push_str(&r.csv_row());
                    t.push('\n');
                }
                t
            };
            emit(&out, stdout, &text)
        }
        Command::Verify { suite } => verify(suite, stdout),
    }
}

const SURFACES_SMALL: [SurfaceType; 4] =
    [SurfaceType::SPHERE, SurfaceType::PROJECTIVE_PLANE, SurfaceType::TORUS, SurfaceType::KLEIN_BOTTLE];

type Check = std::result::Result<(), String>;

fn check_counts() -> Check {
    for n in 1..=5usize {
        let got = enumerate_quadrangulations(n, SurfaceType::SPHERE).map_err(|e| e.to_string())?.len();
        if num_bigint::BigInt::from(got) != sphere_count(n as u64) {
            return Err(format!("sphere n={n}: {got} quadrangulations, formula {}", sphere_count(n as u64)));
        }
        let got = enumerate_quadrangulations(n, SurfaceType::PROJECTIVE_PLANE).map_err(|e| e.to_string())?.len();
        if num_bigint::BigInt::from(got) != pp_count(n as u64) {
            return Err(format!("projective plane n={n}: {got} quadrangulations, formula {}", pp_count(n as u64)));
        }
    }
    Ok(())
}

fn check_identities_small() -> Check {
    for s in SURFACES_SMALL {
        for n in 1..=4 {
            check_identities(&count_table(s, n).map_err(|e| e.to_string())?)?;
        }
    }
    Ok(())
}

fn check_roundtrip() -> Check {
    for s in SURFACES_SMALL {
        for n in 1..=3 {
            for u in enumerate_unicellular(n, Some(s)) {
                for w in enumerate_labelings(&u, true) {
                    let q = lambda(&w).map_err(|e| e.to_string())?;
                    let back = phi(&q).map_err(|e| e.to_string())?;
                    if back != w {
                        return Err(format!("{s} n={n}: reverse then forward changed\n{}", print_umap(&w)));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_flags() -> Check {
    for s in SURFACES_SMALL {
        for n in 1..=2 {
            let a: HashSet<Vec<u8>> =
                enumerate_quadrangulations(n, s).map_err(|e| e.to_string())?.iter().map(canonical_code).collect();
            let b: HashSet<Vec<u8>> =
                enumerate_quadrangulations_by_flags(n, s).map_err(|e| e.to_string())?.iter().map(canonical_code).collect();
            if a != b {
                return Err(format!("{s} n={n}: {} images of the reverse construction, {} from flag systems", a.len(), b.len()));
            }
        }
    }
    Ok(())
}

fn check_oracle() -> Check {
    for n in 1..=3 {
        for d in 1..=2 * n {
            let m = build_oracle_matching(SurfaceType::SPHERE, n, d).map_err(|e| e.to_string())?;
            if !m.is_regular() {
                return Err(format!("sphere n={n} d={d}: incidence graph is not {}-regular", 2 * d));
            }
            m.verify().map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

fn check_gf() -> Check {
    for s in [SurfaceType::KLEIN_BOTTLE, SurfaceType::TORUS] {
        let q = q_coefficients(s, 5).map_err(|e| e.to_string())?;
        for (n, c) in q.iter().enumerate().skip(1) {
            let want = num_bigint::BigInt::from(2 * labeled_count(s, n));
            if *c != want {
                return Err(format!("{s} n={n}: series gives {c}, enumeration {want}"));
            }
        }
    }
    Ok(())
}

fn verify(suite: Suite, stdout: &mut dyn Write) -> CmdResult<()> {
    let all: [(Suite, &str, fn() -> Check); 6] = [
        (Suite::Counts, "counts", check_counts),
        (Suite::Identities, "identities", check_identities_small),
        (Suite::Roundtrip, "roundtrip", check_roundtrip),
        (Suite::Flags, "flags", check_flags),
        (Suite::Oracle, "oracle", check_oracle),
        (Suite::Gf, "gf", check_gf),
    ];
    let mut failed = Vec::new();
    for (s, name, f) in all {
        if suite != Suite::All && suite != s {
            continue;
        }
        let line = match f() {
            Ok(()) => format!("PASS {name}\n"),
            Err(m) => {
                failed.push(name);
                format!("FAIL {name}: {m}\n")
            }
        };
        stdout.write_all(line.as_bytes()).map_err(|e| Failure::Input(format!("stdout: {e}")))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Internal(format!("failed suites: {}", failed.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("quadmaps").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn pp_table() {
        let (code, out, _) = run_capture(&["pp", "--nmax", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,count\n1,1\n2,10\n3,98\n");
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&["sample", "--surface", "N1", "--n", "5"]).0, 1);
        assert_eq!(run_capture(&["counts", "--surface", "S0.5", "--nmax", "2"]).0, 1);
        assert_eq!(run_capture(&["bogus"]).0, 1);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn missing_file_exits_one() {
        let (code, _, err) = run_capture(&["forward", "--in", "/nonexistent/q.emap"]);
        assert_eq!(code, 1);
        assert!(err.contains("error"));
    }

    #[test]
    fn counts_csv() {
        let (code, out, _) = run_capture(&["counts", "--surface", "S0", "--nmax", "2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], CountTable::CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[2].ends_with(",9,9"));
    }

    #[test]
    fn sample_is_deterministic_across_jobs() {
        let a = run_capture(&["sample", "--surface", "N1", "--n", "20", "--seed", "7", "--replicates", "8"]);
        let b = run_capture(&["--jobs", "1", "sample", "--surface", "N1", "--n", "20", "--seed", "7", "--replicates", "8"]);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        assert_eq!(a.1.lines().count(), 9);
    }
}
