mod matrix_file;
mod report;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use toric_fibers::fiber::{enumerate_fiber, fiber_configuration, DEFAULT_CAP};
use toric_fibers::graphs::{all_ones_row, complete_bipartite_config, complete_graph_config};
use toric_fibers::graver::{graver_basis_with, graver_complexity_with, GraverOptions, Strategy, DEFAULT_BUDGET};
use toric_fibers::lowerbound::{build_zstar, build_zstar_literal, remark_configuration, remark_move_5x5, zstar_bound};
use toric_fibers::markov::{
    certify_indispensable_lift, markov_complexity_at_with, markov_degree_with, minimal_markov_basis_with,
    CertifyMode, DegreeHistogram, FiberSource, IndispensabilityCertificate, MarkovOptions, Verdict,
};
use toric_fibers::transport::{connect, verify_script, TableMultiset};
use toric_fibers::{Configuration, Error, IntMatrix, LiftedMove, Move};

use report::{digest, Report, Resources, SCHEMA};

#[derive(Parser)]
#[command(name = "toric", version, about = "Graver bases, fibers, Markov bases and Lawrence liftings")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest fiber enumerated before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Vector and iteration limit for completion procedures.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Certificate mode for indispensability of lifted moves.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the matrix or script output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Read the input matrix from this file instead of stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Forcing,
    Auto,
}

impl From<Mode> for CertifyMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => CertifyMode::Exact,
            Mode::Forcing => CertifyMode::Forcing,
            Mode::Auto => CertifyMode::Auto,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Toric,
    Graver,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraverStrategy {
    Staged,
    Completion,
}

#[derive(Subcommand)]
enum Command {
    /// Print a generated configuration.
    #[command(subcommand)]
    Gen(Gen),
    /// Graver basis of the input configuration, one move per line.
    Graver {
        /// List both signs of every element.
        #[arg(long)]
        signed: bool,
        #[arg(long, value_enum, default_value_t = GraverStrategy::Staged)]
        strategy: GraverStrategy,
    },
    /// Largest 1-norm in the Graver basis of the Graver basis.
    GraverComplexity,
    /// Elements of the fiber over `b`, one per line.
    Fiber {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<i64>,
    },
    /// The configuration whose columns are the elements of a fiber. Reads
    /// fiber elements as rows, or a configuration together with `--b`.
    FiberConfig {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Option<Vec<i64>>,
    },
    /// Markov degree of the input configuration.
    MarkovDegree {
        #[arg(long, value_enum, default_value_t = Source::Toric)]
        source: Source,
    },
    /// A minimal Markov basis, one move per line.
    MinimalMarkov {
        #[arg(long, value_enum, default_value_t = Source::Toric)]
        source: Source,
    },
    /// Largest type in a minimal Markov basis of the N-th Lawrence lifting.
    McAt {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Source::Toric)]
        source: Source,
    },
    /// Certify that a lifted move over the input configuration is
    /// indispensable.
    CertifyLift {
        /// Matrix file with one slice per row.
        #[arg(long)]
        lift: PathBuf,
    },
    /// The lower-bound lifted move for complete bipartite graphs.
    Zstar {
        /// Row count; read from a bipartite configuration on the input when
        /// omitted.
        #[arg(long = "i")]
        rows: Option<usize>,
        #[arg(long = "j")]
        cols: Option<usize>,
        #[arg(long)]
        certify: bool,
        /// Keep both middle slices for odd column counts.
        #[arg(long)]
        literal: bool,
    },
    /// The 32-slice move on 5 x 5 tables and its forcing certificate.
    #[command(name = "remark-5x5")]
    Remark5x5,
    /// Connect two multisets of transportation tables by moves of degree at
    /// most three.
    TransportConnect {
        /// Matrix file with one flattened table per row.
        #[arg(long, requires = "to")]
        from: Option<PathBuf>,
        #[arg(long, requires = "from")]
        to: Option<PathBuf>,
        #[arg(long = "i")]
        rows: Option<usize>,
        #[arg(long = "j")]
        cols: Option<usize>,
        /// Draw a random pair in a common fiber from `--seed`.
        #[arg(long, conflicts_with_all = ["from", "to"])]
        random: bool,
        /// Multiset size for `--random`.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Largest margin entry for `--random`.
        #[arg(long, default_value_t = 4)]
        max_margin: i64,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Incidence matrix of the complete graph.
    KComplete {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        loops: bool,
    },
    /// Incidence matrix of the complete bipartite graph.
    KBipartite {
        #[arg(long = "i")]
        rows: usize,
        #[arg(long = "j")]
        cols: usize,
    },
    /// A single row of ones.
    Ones {
        #[arg(long)]
        n: usize,
    },
}

struct Outcome {
    /// Matrix file or script text.
    data: Option<String>,
    report: Report,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 2,
            Failure::Core(e) => match e {
                Error::BudgetExceeded { .. } | Error::FiberTooLarge { .. } | Error::Overflow(_) => 3,
                Error::InternalInvariant(_) | Error::ConstructionInconsistent(_) => 1,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Core(
                e @ Error::BudgetExceeded {
                    lower_bound: Some(lb),
                    ..
                },
            ) => format!("{} (best lower bound {})", e, lb),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

struct Input {
    bytes: Vec<u8>,
}

impl Input {
    fn read(path: Option<&Path>) -> Run<Self> {
        let mut bytes = Vec::new();
        match path {
            Some(p) => {
                bytes = std::fs::read(p).map_err(|e| Failure::Io(format!("{}: {}", p.display(), e)))?;
            }
            None => {
                std::io::stdin()
                    .read_to_end(&mut bytes)
                    .map_err(|e| Failure::Io(format!("stdin: {}", e)))?;
            }
        }
        Ok(Input { bytes })
    }

    fn text(&self) -> Run<&str> {
        std::str::from_utf8(&self.bytes).map_err(|_| Failure::Core(Error::Parse("input is not UTF-8".into())))
    }

    fn matrix(&self) -> Run<IntMatrix> {
        Ok(matrix_file::parse(self.text()?)?)
    }

    fn configuration(&self) -> Run<Configuration> {
        Ok(Configuration::validate(self.matrix()?)?)
    }
}

fn read_matrix_file(path: &Path) -> Run<(Vec<u8>, IntMatrix)> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {}", path.display(), e)))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Failure::Core(Error::Parse(format!("{} is not UTF-8", path.display()))))?;
    let m = matrix_file::parse(text)?;
    Ok((bytes, m))
}

struct Ctx<'a> {
    global: &'a Global,
}

impl Ctx<'_> {
    fn input(&self) -> Run<Input> {
        Input::read(self.global.input.as_deref())
    }

    fn markov(&self, source: Source) -> MarkovOptions {
        MarkovOptions {
            cap: self.global.cap,
            budget: self.global.budget,
            source: match source {
                Source::Toric => FiberSource::ToricGenerators,
                Source::Graver => FiberSource::Graver,
            },
            ..Default::default()
        }
    }

    fn report(&self, command: &str, input_digest: String, parameters: Value, results: Value) -> Report {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            input_digest,
            parameters,
            results,
            resources: Resources {
                cap: self.global.cap,
                budget: self.global.budget,
            },
            verdict: None,
            summary: Vec::new(),
        }
    }
}

fn moves_matrix(moves: &[Move], cols: usize) -> Run<IntMatrix> {
    let rows: Vec<Vec<i64>> = moves.iter().map(|m| m.as_slice().to_vec()).collect();
    Ok(matrix_file::from_rows(&rows, cols)?)
}

fn histogram_text(h: &DegreeHistogram) -> String {
    let parts: Vec<String> = h.iter().map(|(d, n)| format!("{}: {}", d, n)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Certified => "certified",
        Verdict::Refuted => "refuted",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn certificate_summary(cert: &IndispensabilityCertificate, slices: usize) -> String {
    match cert.verdict {
        Verdict::Certified => format!("MC \u{2265} {}, certified, N={}", slices, slices),
        v => format!("{}, N={}", verdict_name(v), slices),
    }
}

fn lift_matrix(m: &LiftedMove) -> Run<IntMatrix> {
    Ok(matrix_file::from_rows(m.slices(), m.base_cols())?)
}

fn generated(ctx: &Ctx, gen: &Gen) -> Run<Outcome> {
    let (name, params, cfg) = match *gen {
        Gen::KComplete { n, loops } => (
            "k-complete",
            json!({ "n": n, "loops": loops }),
            complete_graph_config(n, loops).cfg,
        ),
        Gen::KBipartite { rows, cols } => (
            "k-bipartite",
            json!({ "i": rows, "j": cols }),
            complete_bipartite_config(rows, cols).cfg,
        ),
        Gen::Ones { n } => ("ones", json!({ "n": n }), all_ones_row(n)),
    };
    let command = format!("gen {}", name);
    let digest_src = format!("{} {}", command, params);
    let m = cfg.matrix();
    let mut report = ctx.report(
        &command,
        digest(digest_src.as_bytes()),
        params,
        json!({ "rows": m.rows(), "cols": m.cols(), "matrix": matrix_rows(m) }),
    );
    report.summary.push(format!("matrix: {} x {}", m.rows(), m.cols()));
    Ok(Outcome {
        data: Some(matrix_file::render(m)),
        report,
    })
}

fn matrix_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn run(ctx: &Ctx, command: &Command) -> Run<Outcome> {
    match command {
        Command::Gen(g) => generated(ctx, g),
        Command::Graver { signed, strategy } => {
            let input = ctx.input()?;
            let cfg = input.configuration()?;
            let opts = GraverOptions {
                budget: ctx.global.budget,
                strategy: match strategy {
                    GraverStrategy::Staged => Strategy::Staged,
                    GraverStrategy::Completion => Strategy::Completion,
                },
            };
            let g = graver_basis_with(&cfg, opts)?;
            let listed: Vec<Move> = if *signed {
                g.iter().flat_map(|m| [m.clone(), m.negated()]).collect()
            } else {
                g.moves().to_vec()
            };
            let out = moves_matrix(&listed, cfg.cols())?;
            let mut report = ctx.report(
                "graver",
                digest(&input.bytes),
                json!({ "signed": signed, "strategy": if *strategy == GraverStrategy::Staged { "staged" } else { "completion" } }),
                json!({
                    "elements": g.len(),
                    "signed_elements": g.signed_len(),
                    "max_degree": g.max_degree(),
                    "max_one_norm": g.max_one_norm(),
                    "moves": matrix_rows(&out),
                }),
            );
            report.summary.push(format!("elements up to sign: {}", g.len()));
            report.summary.push(format!("signed elements: {}", g.signed_len()));
            report.summary.push(format!("max degree: {}", g.max_degree()));
            Ok(Outcome {
                data: Some(matrix_file::render(&out)),
                report,
            })
        }
        Command::GraverComplexity => {
            let input = ctx.input()?;
            let cfg = input.configuration()?;
            let gc = graver_complexity_with(
                &cfg,
                GraverOptions {
                    budget: ctx.global.budget,
                    ..Default::default()
                },
            )?;
            let mut report = ctx.report(
                "graver-complexity",
                digest(&input.bytes),
                json!({}),
                json!({
                    "graver_complexity": gc.value,
                    "graver_size": gc.graver_size,
                    "graver_of_graver_size": gc.graver_of_graver_size,
                }),
            );
            report.summary.push(format!("GC = {}", gc.value));
            report.summary.push(format!("Graver basis size: {}", gc.graver_size));
            Ok(Outcome { data: None, report })
        }
        Command::Fiber { b } => {
            let input = ctx.input()?;
            let cfg = input.configuration()?;
            let f = enumerate_fiber(&cfg, b, ctx.global.cap)?;
            let out = matrix_file::from_rows(&f.elements, cfg.cols())?;
            let mut report = ctx.report(
                "fiber",
                digest(&input.bytes),
                json!({ "b": b }),
                json!({
                    "size": f.len(),
                    "total_degree": f.total_degree,
                    "elements": f.elements,
                }),
            );
            report.summary.push(format!("fiber size: {}", f.len()));
            Ok(Outcome {
                data: Some(matrix_file::render(&out)),
                report,
            })
        }
        Command::FiberConfig { b } => {
            let input = ctx.input()?;
            let m = input.matrix()?;
            let ab = match b {
                Some(b) => {
                    let cfg = Configuration::validate(m)?;
                    fiber_configuration(&cfg, b, ctx.global.cap)?.config.matrix().clone()
                }
                None => Configuration::validate(m.transpose())?.matrix().clone(),
            };
            let mut report = ctx.report(
                "fiber-config",
                digest(&input.bytes),
                json!({ "b": b }),
                json!({ "rows": ab.rows(), "cols": ab.cols(), "matrix": matrix_rows(&ab) }),
            );
            report.summary.push(format!("fiber configuration: {} x {}", ab.rows(), ab.cols()));
            Ok(Outcome {
                data: Some(matrix_file::render(&ab)),
                report,
            })
        }
        Command::MarkovDegree { source } => {
            let input = ctx.input()?;
            let cfg = input.configuration()?;
            let md = markov_degree_with(&cfg, ctx.markov(*source))?;
            let mut report = ctx.report(
                "markov-degree",
                digest(&input.bytes),
                json!({ "source": source_name(*source) }),
                json!({ "markov_degree": md }),
            );
            report.summary.push(format!("Markov degree: {}", md));
            Ok(Outcome { data: None, report })
        }
        Command::MinimalMarkov { source } => {
            let input = ctx.input()?;
            let cfg = input.configuration()?;
            let mb = minimal_markov_basis_with(&cfg, ctx.markov(*source))?;
            let out = moves_matrix(mb.basis.moves(), cfg.cols())?;
            let mut report = ctx.report(
                "minimal-markov",
                digest(&input.bytes),
                json!({ "source": source_name(*source) }),
                json!({
                    "size": mb.basis.len(),
                    "histogram": mb.histogram,
                    "moves": matrix_rows(&out),
                }),
            );
            report.summary.push(format!("minimal Markov basis size: {}", mb.basis.len()));
            report.summary.push(format!("histogram {}", histogram_text(&mb.histogram)));
            Ok(Outcome {
                data: Some(matrix_file::render(&out)),
                report,
            })
        }
        Command::McAt { n, source } => {
            let input = ctx.input()?;
            let cfg = input.configuration()?;
            let mc = markov_complexity_at_with(&cfg, *n, ctx.markov(*source))?;
            let mut report = ctx.report(
                "mc-at",
                digest(&input.bytes),
                json!({ "n": n, "source": source_name(*source) }),
                json!({ "copies": n, "largest_type": mc }),
            );
            report.summary.push(format!("largest type in a minimal Markov basis at N={}: {}", n, mc));
            Ok(Outcome { data: None, report })
        }
        Command::CertifyLift { lift } => {
            let input = ctx.input()?;
            let cfg = input.configuration()?;
            let (lift_bytes, slices) = read_matrix_file(lift)?;
            let m = LiftedMove::new(slices.cols(), matrix_rows(&slices))?;
            let cert = certify_indispensable_lift(&cfg, &m, ctx.global.mode.into())?;
            let mut both = input.bytes.clone();
            both.extend_from_slice(&lift_bytes);
            let mut report = ctx.report(
                "certify-lift",
                digest(&both),
                json!({ "mode": mode_name(ctx.global.mode) }),
                json!({ "slices": m.num_slices(), "certificate": cert }),
            );
            report.summary.push(certificate_summary(&cert, m.num_slices()));
            report.verdict = Some(verdict_name(cert.verdict).into());
            Ok(Outcome { data: None, report })
        }
        Command::Zstar {
            rows,
            cols,
            certify,
            literal,
        } => zstar(ctx, *rows, *cols, *certify, *literal),
        Command::Remark5x5 => {
            let m = remark_move_5x5()?;
            let cfg = remark_configuration();
            let cert = certify_indispensable_lift(&cfg, &m, ctx.global.mode.into())?;
            let out = lift_matrix(&m)?;
            let mut report = ctx.report(
                "remark-5x5",
                digest(b"remark-5x5"),
                json!({ "mode": mode_name(ctx.global.mode) }),
                json!({ "slices": m.num_slices(), "certificate": cert, "move": matrix_rows(&out) }),
            );
            report.summary.push(certificate_summary(&cert, m.num_slices()));
            report.summary.push(format!("certificate mode: {:?}", cert.mode).to_lowercase());
            report.verdict = Some(verdict_name(cert.verdict).into());
            Ok(Outcome {
                data: Some(matrix_file::render(&out)),
                report,
            })
        }
        Command::TransportConnect {
            from,
            to,
            rows,
            cols,
            random,
            n,
            max_margin,
        } => transport(ctx, from.as_deref(), to.as_deref(), *rows, *cols, *random, *n, *max_margin),
    }
}

fn source_name(s: Source) -> &'static str {
    match s {
        Source::Toric => "toric",
        Source::Graver => "graver",
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Forcing => "forcing",
        Mode::Auto => "auto",
    }
}

/// Finds `(I, J)` with `m` equal to the incidence matrix of `K_{I,J}`.
fn bipartite_shape(m: &IntMatrix) -> Option<(usize, usize)> {
    (1..m.rows()).map(|i| (i, m.rows() - i)).find(|&(i, j)| {
        i * j == m.cols() && complete_bipartite_config(i, j).cfg.matrix() == m
    })
}

fn zstar(ctx: &Ctx, rows: Option<usize>, cols: Option<usize>, certify: bool, literal: bool) -> Run<Outcome> {
    let (i, j, input_digest) = match (rows, cols) {
        (Some(i), Some(j)) => (i, j, digest(format!("zstar {} {}", i, j).as_bytes())),
        (None, None) => {
            let input = ctx.input()?;
            let m = input.matrix()?;
            let (i, j) = bipartite_shape(&m).ok_or_else(|| {
                Failure::Core(Error::PreconditionViolated(
                    "input is not the incidence matrix of a complete bipartite graph".into(),
                ))
            })?;
            (i, j, digest(&input.bytes))
        }
        _ => {
            return Err(Failure::Core(Error::PreconditionViolated(
                "give both --i and --j, or neither".into(),
            )))
        }
    };
    let m = if literal { build_zstar_literal(i, j)? } else { build_zstar(i, j)? };
    let n = m.num_slices();
    let bound = zstar_bound(i, j);
    let out = lift_matrix(&m)?;
    let mut results = json!({
        "i": i,
        "j": j,
        "slices": n,
        "bound": bound.to_string(),
        "zero_sum": m.slice_sum().iter().all(|&x| x == 0),
        "move": matrix_rows(&out),
    });
    let mut summary = vec![format!("N={}, bound (I-2)(J^2-1)/4 + J - 1 = {}", n, bound)];
    let mut verdict = None;
    if certify {
        let cfg = complete_bipartite_config(i, j).cfg;
        let cert = certify_indispensable_lift(&cfg, &m, ctx.global.mode.into())?;
        summary.push(certificate_summary(&cert, n));
        verdict = Some(verdict_name(cert.verdict).to_string());
        results["certificate"] = serde_json::to_value(&cert).expect("certificate serializes");
        if cert.verdict == Verdict::Certified {
            results["mc_lower_bound"] = json!(n);
        }
    }
    let mut report = ctx.report(
        "zstar",
        input_digest,
        json!({ "i": i, "j": j, "certify": certify, "literal": literal, "mode": mode_name(ctx.global.mode) }),
        results,
    );
    report.summary = summary;
    report.verdict = verdict;
    Ok(Outcome {
        data: Some(matrix_file::render(&out)),
        report,
    })
}

fn margins(rows: usize, cols: usize, g: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let r = (0..rows).map(|i| g[i * cols..(i + 1) * cols].iter().sum()).collect();
    let c = (0..cols).map(|j| (0..rows).map(|i| g[i * cols + j]).sum()).collect();
    (r, c)
}

fn multiset_from(rows: usize, cols: usize, m: &IntMatrix, what: &str) -> Run<TableMultiset> {
    if m.cols() != rows * cols || m.rows() == 0 {
        return Err(Failure::Core(Error::DimensionMismatch(format!(
            "{} needs at least one row of {} entries",
            what,
            rows * cols
        ))));
    }
    let members = matrix_rows(m);
    if members.iter().flatten().any(|&x| x < 0) {
        return Err(Failure::Core(Error::PreconditionViolated(format!("{} has a negative entry", what))));
    }
    let (r, c) = margins(rows, cols, &members[0]);
    let ms = TableMultiset::new(rows, cols, r, c, members)?;
    if !ms.is_proper() {
        return Err(Failure::Core(Error::PreconditionViolated(format!(
            "tables in {} do not share their margins",
            what
        ))));
    }
    Ok(ms)
}

/// A random table with the given margins, filled one unit at a time.
fn random_table(rng: &mut ChaCha8Rng, r: &[i64], c: &[i64]) -> Vec<i64> {
    let mut rr = r.to_vec();
    let mut cc = c.to_vec();
    let mut g = vec![0i64; r.len() * c.len()];
    while rr.iter().any(|&x| x > 0) {
        let rows: Vec<usize> = (0..r.len()).filter(|&i| rr[i] > 0).collect();
        let cols: Vec<usize> = (0..c.len()).filter(|&j| cc[j] > 0).collect();
        let i = rows[rng.gen_range(0..rows.len())];
        let j = cols[rng.gen_range(0..cols.len())];
        g[i * c.len() + j] += 1;
        rr[i] -= 1;
        cc[j] -= 1;
    }
    g
}

/// Two multisets in a common fiber: random tables, then random basic
/// exchanges between pairs of members.
fn random_pair(rng: &mut ChaCha8Rng, rows: usize, cols: usize, n: usize, cap: i64) -> Run<(TableMultiset, TableMultiset)> {
    let mut r = vec![0i64; rows];
    let mut c = vec![0i64; cols];
    let total = rng.gen_range(1..=cap.max(1) * rows.min(cols) as i64);
    for _ in 0..total {
        let open_r: Vec<usize> = (0..rows).filter(|&i| r[i] < cap).collect();
        let open_c: Vec<usize> = (0..cols).filter(|&j| c[j] < cap).collect();
        if open_r.is_empty() || open_c.is_empty() {
            break;
        }
        r[open_r[rng.gen_range(0..open_r.len())]] += 1;
        c[open_c[rng.gen_range(0..open_c.len())]] += 1;
    }
    let p: Vec<Vec<i64>> = (0..n).map(|_| random_table(rng, &r, &c)).collect();
    let mut q = p.clone();
    for _ in 0..20 * n {
        let k1 = rng.gen_range(0..n);
        let k2 = rng.gen_range(0..n);
        let (i1, i2) = (rng.gen_range(0..rows), rng.gen_range(0..rows));
        let (j1, j2) = (rng.gen_range(0..cols), rng.gen_range(0..cols));
        if i1 == i2 || j1 == j2 {
            continue;
        }
        let at = |i: usize, j: usize| i * cols + j;
        if q[k1][at(i1, j2)] == 0 || q[k1][at(i2, j1)] == 0 || q[k2][at(i1, j1)] == 0 || q[k2][at(i2, j2)] == 0 {
            continue;
        }
        if k1 == k2 {
            continue;
        }
        q[k1][at(i1, j1)] += 1;
        q[k1][at(i2, j2)] += 1;
        q[k1][at(i1, j2)] -= 1;
        q[k1][at(i2, j1)] -= 1;
        q[k2][at(i1, j1)] -= 1;
        q[k2][at(i2, j2)] -= 1;
        q[k2][at(i1, j2)] += 1;
        q[k2][at(i2, j1)] += 1;
    }
    Ok((
        TableMultiset::new(rows, cols, r.clone(), c.clone(), p)?,
        TableMultiset::new(rows, cols, r, c, q)?,
    ))
}

#[allow(clippy::too_many_arguments)]
fn transport(
    ctx: &Ctx,
    from: Option<&Path>,
    to: Option<&Path>,
    rows: Option<usize>,
    cols: Option<usize>,
    random: bool,
    n: usize,
    max_margin: i64,
) -> Run<Outcome> {
    let invalid = |m: &str| Failure::Core(Error::PreconditionViolated(m.into()));
    let (p, q, input_digest, params) = match (from, to, random) {
        (Some(f), Some(t), false) => {
            let (i, j) = rows.zip(cols).ok_or_else(|| invalid("--from/--to need --i and --j"))?;
            let (fb, fm) = read_matrix_file(f)?;
            let (tb, tm) = read_matrix_file(t)?;
            let p = multiset_from(i, j, &fm, "--from")?;
            let q = multiset_from(i, j, &tm, "--to")?;
            let mut both = fb;
            both.extend_from_slice(&tb);
            (p, q, digest(&both), json!({ "i": i, "j": j }))
        }
        (None, None, true) => {
            let i = rows.unwrap_or(3);
            let j = cols.unwrap_or(3);
            if i == 0 || j == 0 || n == 0 || max_margin < 1 {
                return Err(invalid("--random needs positive --i, --j, --n and --max-margin"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.global.seed);
            let (p, q) = random_pair(&mut rng, i, j, n, max_margin)?;
            let params = json!({ "i": i, "j": j, "n": n, "max_margin": max_margin, "seed": ctx.global.seed });
            (p, q, digest(format!("transport-connect {}", params).as_bytes()), params)
        }
        _ => return Err(invalid("give --from and --to, or --random")),
    };
    let script = connect(&p, &q)?;
    verify_script(&p, &q, &script)?;
    let mut report = ctx.report(
        "transport-connect",
        input_digest,
        params,
        json!({
            "members": p.len(),
            "margins": { "rows": p.r, "cols": p.c },
            "from": p.members,
            "to": q.members,
            "steps": script.steps.len(),
            "max_degree": script.max_degree(),
            "swap_operations": script.swap_operations,
            "verified": true,
            "script": script.steps,
        }),
    );
    report.summary.push(format!("members: {}", p.len()));
    report.summary.push(format!("steps: {}", script.steps.len()));
    report.summary.push(format!("max step degree: {}", script.max_degree()));
    report.summary.push("script verified".into());
    Ok(Outcome {
        data: Some(script.to_text()),
        report,
    })
}

fn emit(global: &Global, outcome: &Outcome) -> std::io::Result<()> {
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    let rendered = match global.format {
        Format::Text => outcome.report.to_text(),
        Format::Json => outcome.report.to_json(),
    };
    match (&global.out, &outcome.data) {
        (Some(path), Some(data)) => {
            std::fs::write(path, data)?;
            stdout.write_all(rendered.as_bytes())?;
        }
        (None, Some(data)) if global.format == Format::Text => {
            stdout.write_all(data.as_bytes())?;
            stderr.write_all(rendered.as_bytes())?;
        }
        _ => stdout.write_all(rendered.as_bytes())?,
    }
    stdout.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
        {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    }
    let ctx = Ctx { global: &cli.global };
    match run(&ctx, &cli.command) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.global, &outcome) {
                eprintln!("error: {}", e);
                return ExitCode::from(2);
            }
            if outcome.report.verdict.as_deref() == Some("inconclusive") {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
