use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hgcolor::hypergraph::io::{read_coloring, read_hypergraph, write_coloring, write_hypergraph};
use hgcolor::nibble::{estimate_keep, KeepGadget, MtLimits};
use hgcolor::pipeline::{color_girth5, color_random, ColorConfig, ColorReport};
use hgcolor::randgen::{self, check_poisson, degree_stats, sparse_subset_check, GenParams, ThresholdMode};
use hgcolor::schedule::{check_bounds, BoundFamily, run_to_stop, Mode, ScheduleParams};
use hgcolor::{hypergraph, Exec, Hypergraph, ListAssignment};

#[derive(Parser)]
#[command(name = "hgcolor", version, about = "List coloring of k-uniform hypergraphs")]
struct Cli {
    /// Directory for artifacts and manifests.
    #[arg(long, global = true, env = "HGCOLOR_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Sample a random k-uniform hypergraph.
    Generate(GenerateArgs),
    /// Girth-reducibility decomposition with its certificates.
    Decompose(DecomposeArgs),
    /// Color a girth-5 hypergraph from lists of the degree-derived size.
    ColorGirth5(ColorGirth5Args),
    /// Decompose, color U greedily, and run the nibble on the rest.
    ColorRandom(ColorRandomArgs),
    /// Check a coloring against lists [0, q).
    Verify(VerifyArgs),
    /// Tabulate the L/T schedule and its bound checks.
    Schedule(ScheduleArgs),
    /// Monte Carlo survival probability on an equalized star.
    EstimateKeep(EstimateKeepArgs),
    /// Degree distribution and sparse-subset statistics.
    Stats(StatsArgs),
    /// Re-run a manifest and compare output hashes.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModelArg {
    Binomial,
    FixedCount,
    /// Random greedy girth-5 construction with ⌈dn/k⌉ target edges.
    Girth5Greedy,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Theory,
    Practical,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ThresholdArg {
    Definition,
    Proof,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ExecArg {
    Sequential,
    Parallel,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Theory => Mode::Theory,
            ModeArg::Practical => Mode::Practical,
        }
    }
}

impl From<ThresholdArg> for ThresholdMode {
    fn from(m: ThresholdArg) -> Self {
        match m {
            ThresholdArg::Definition => ThresholdMode::Definition,
            ThresholdArg::Proof => ThresholdMode::Proof,
        }
    }
}

impl From<ExecArg> for Exec {
    fn from(e: ExecArg) -> Self {
        match e {
            ExecArg::Sequential => Exec::Sequential,
            ExecArg::Parallel => Exec::Parallel,
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct GenerateArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Expected degree; p = d / C(n, k−1).
    #[arg(long)]
    d: f64,
    #[arg(long, value_enum, default_value = "binomial")]
    model: ModelArg,
    /// Degree cap for the girth-5 construction.
    #[arg(long, default_value_t = usize::MAX)]
    max_degree: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "hypergraph.txt")]
    out: String,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, value_enum, default_value = "definition")]
    threshold: ThresholdArg,
    #[arg(long, default_value = "decomposition.json")]
    out: String,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct NibbleArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "practical")]
    mode: ModeArg,
    /// Activation probability (practical mode).
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Resampling budget per nibble round.
    #[arg(long, default_value_t = 5_000)]
    mt_budget: u64,
    /// Resampling budget of the final phase.
    #[arg(long, default_value_t = 1_000_000)]
    final_budget: u64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Override the list size q.
    #[arg(long)]
    q: Option<usize>,
    /// Also write the per-iteration trace.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value = "coloring")]
    out_prefix: String,
}

impl NibbleArgs {
    fn config(&self, epsilon: f64) -> ColorConfig {
        ColorConfig {
            mode: self.mode.into(),
            epsilon,
            alpha: self.alpha,
            seed: self.seed,
            mt: MtLimits { budget: Some(self.mt_budget), ..MtLimits::default() },
            final_budget: Some(self.final_budget),
            max_iters: self.max_iters,
            q: self.q,
            ..ColorConfig::default()
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct ColorGirth5Args {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[command(flatten)]
    #[serde(flatten)]
    nibble: NibbleArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct ColorRandomArgs {
    /// Hypergraph file; without it one is generated from --k --n --d --gen-seed.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    gen_seed: Option<u64>,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, value_enum, default_value = "definition")]
    threshold: ThresholdArg,
    #[command(flatten)]
    #[serde(flatten)]
    nibble: NibbleArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    coloring: PathBuf,
    #[arg(long)]
    q: usize,
    #[arg(long, default_value = "verify.json")]
    out: String,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct ScheduleArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    delta_max: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "theory")]
    mode: ModeArg,
    /// α in practical mode.
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Round L down and T up before each step.
    #[arg(long)]
    rounding: bool,
    #[arg(long, default_value = "schedule")]
    out_prefix: String,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct EstimateKeepArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Conflict targets T_1,...,T_{k−1}, comma separated.
    #[arg(long, value_delimiter = ',')]
    t: Vec<u64>,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Real petals of the star (capped by T_{k−1}).
    #[arg(long, default_value_t = 4)]
    star_edges: usize,
    #[arg(long, value_enum, default_value = "parallel")]
    exec: ExecArg,
    #[arg(long, default_value = "keep.json")]
    out: String,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Model degree d; defaults to the measured average degree.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 15)]
    c_max: usize,
    #[arg(long, default_value_t = 4.0)]
    tol_sigma: f64,
    /// Sparse-subset search trials (0 skips the search).
    #[arg(long, default_value_t = 0)]
    subset_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "stats.json")]
    out: String,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    version: String,
    command: Command,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    exit_code: u8,
}

struct Outcome {
    artifacts: Vec<(String, Vec<u8>)>,
    inputs: Vec<PathBuf>,
    exit_code: u8,
    summary: String,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn load(path: &Path) -> Result<Hypergraph> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_hypergraph(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

fn color_artifacts(prefix: &str, rep: &ColorReport, trace: bool) -> Result<Vec<(String, Vec<u8>)>> {
    let mut col = Vec::new();
    write_coloring(&rep.coloring, &mut col)?;
    let summary = serde_json::json!({
        "q": rep.q,
        "verify": rep.verify,
        "halt": rep.run.halt,
        "iterations": rep.run.iterations.len(),
        "final_resamples": rep.run.final_resamples,
        "certificate": rep.run.certificate,
        "forbidden_total": rep.forbidden_total,
        "decomposition": rep.decomposition.as_ref().map(|d| serde_json::json!({
            "U": d.u.len(),
            "initial": d.initial_size,
            "girth_reducible": d.girth_reducible,
            "kappa_u": d.certificates.kappa_u,
            "max_boundary": d.certificates.max_boundary,
        })),
        "stats": rep.run.iterations,
    });
    let mut out = vec![(format!("{prefix}.txt"), col), (format!("{prefix}.report.json"), json(&summary)?)];
    if trace {
        let mut t = rep.run.trace_lines().join("\n");
        t.push('\n');
        out.push((format!("{prefix}.trace.txt"), t.into_bytes()));
    }
    Ok(out)
}

fn color_summary(rep: &ColorReport) -> String {
    format!(
        "q={} proper={} monochromatic={} halt={} iterations={} final_resamples={}",
        rep.q,
        rep.verify.proper,
        rep.verify.monochromatic_edges.len(),
        rep.run.halt,
        rep.run.iterations.len(),
        rep.run.final_resamples
    )
}

fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Generate(a) => {
            let h = match a.model {
                ModelArg::Binomial => randgen::generate(&GenParams::new(a.k, a.n, a.d, randgen::Model::Binomial, a.seed))?,
                ModelArg::FixedCount => {
                    randgen::generate(&GenParams::new(a.k, a.n, a.d, randgen::Model::FixedCount, a.seed))?
                }
                ModelArg::Girth5Greedy => {
                    let target = (a.d * a.n as f64 / a.k as f64).ceil() as usize;
                    randgen::girth5_greedy(a.k, a.n, target, a.max_degree, 50 * target as u64 + 1000, a.seed)?
                }
            };
            let mut buf = Vec::new();
            write_hypergraph(&h, &mut buf)?;
            Ok(Outcome {
                summary: format!("n={} m={} avg_degree={:.4} max_degree={}", h.n(), h.m(), h.avg_degree(), h.max_degree()),
                artifacts: vec![(a.out.clone(), buf)],
                inputs: Vec::new(),
                exit_code: 0,
            })
        }
        Command::Decompose(a) => {
            let h = load(&a.input)?;
            let dec = randgen::decompose(&h, a.delta, a.threshold.into())?;
            let c = &dec.certificates;
            Ok(Outcome {
                summary: format!(
                    "|U|={} size_bound={:.1} clause_a={} clause_b_definition={} clause_b_lemma={} clause_c={} girth_reducible={}",
                    dec.u.len(),
                    dec.thresholds.size_bound,
                    c.clause_a,
                    c.clause_b_definition,
                    c.clause_b_lemma,
                    c.clause_c,
                    dec.girth_reducible
                ),
                artifacts: vec![(a.out.clone(), json(&dec)?)],
                inputs: vec![a.input.clone()],
                exit_code: 0,
            })
        }
        Command::ColorGirth5(a) => {
            let h = load(&a.input)?;
            let rep = color_girth5(&h, &a.nibble.config(a.epsilon))?;
            Ok(Outcome {
                summary: color_summary(&rep),
                artifacts: color_artifacts(&a.nibble.out_prefix, &rep, a.nibble.trace)?,
                inputs: vec![a.input.clone()],
                exit_code: if rep.verify.proper { 0 } else { 1 },
            })
        }
        Command::ColorRandom(a) => {
            let (h, inputs) = match (&a.input, a.k, a.n, a.d, a.gen_seed) {
                (Some(p), ..) => (load(p)?, vec![p.clone()]),
                (None, Some(k), Some(n), Some(d), Some(s)) => {
                    (randgen::generate(&GenParams::new(k, n, d, randgen::Model::Binomial, s))?, Vec::new())
                }
                _ => bail!("give --input, or all of --k --n --d --gen-seed"),
            };
            let mut cfg = a.nibble.config(4.0 * a.delta);
            cfg.threshold_mode = a.threshold.into();
            let rep = color_random(&h, a.delta, &cfg)?;
            Ok(Outcome {
                summary: color_summary(&rep),
                artifacts: color_artifacts(&a.nibble.out_prefix, &rep, a.nibble.trace)?,
                inputs,
                exit_code: if rep.verify.proper { 0 } else { 1 },
            })
        }
        Command::Verify(a) => {
            let h = load(&a.input)?;
            let f = fs::File::open(&a.coloring).with_context(|| format!("opening {}", a.coloring.display()))?;
            let col = read_coloring(BufReader::new(f), h.n())?;
            let rep = hypergraph::verify(&h, &ListAssignment::uniform(h.n(), a.q), &col);
            Ok(Outcome {
                summary: serde_json::to_string(&rep)?,
                artifacts: vec![(a.out.clone(), json(&rep)?)],
                inputs: vec![a.input.clone(), a.coloring.clone()],
                exit_code: if rep.proper { 0 } else { 1 },
            })
        }
        Command::Schedule(a) => {
            let mut params = match a.mode {
                ModeArg::Theory => ScheduleParams::theory(a.k, a.delta_max, a.epsilon)?,
                ModeArg::Practical => ScheduleParams::practical(a.k, a.delta_max, a.epsilon, a.alpha)?,
            };
            params.rounding = a.rounding;
            let traj = run_to_stop(&params, a.max_iters.unwrap_or_else(|| params.default_max_iters()))?;
            let bounds = check_bounds(&traj, &params);
            let mut summary = format!("records={} i_star={:?} halt={}", traj.records.len(), traj.i_star, traj.halt_reason);
            for f in [
                BoundFamily::RatioBound,
                BoundFamily::KeepBand,
                BoundFamily::PrimedRatioDecay,
                BoundFamily::PrimedListGap,
                BoundFamily::PrimedConflictGap,
            ] {
                summary.push_str(&format!(" {f:?}={}/{}", bounds.passes(f), bounds.applicable(f)));
            }
            Ok(Outcome {
                summary,
                artifacts: vec![
                    (format!("{}.csv", a.out_prefix), traj.to_csv().into_bytes()),
                    (format!("{}.bounds.json", a.out_prefix), json(&bounds)?),
                ],
                inputs: Vec::new(),
                exit_code: 0,
            })
        }
        Command::EstimateKeep(a) => {
            let g = KeepGadget { k: a.k, l: a.l, t: a.t.clone(), alpha: a.alpha, star_edges: a.star_edges };
            let est = estimate_keep(&g, a.trials, a.seed, a.exec.into())?;
            Ok(Outcome {
                summary: format!(
                    "analytic={:.6} estimate={:.6} se={:.2e} z={:.3} list_z={:.3}",
                    est.analytic, est.estimate, est.std_error, est.z, est.list_z
                ),
                artifacts: vec![(a.out.clone(), json(&est)?)],
                inputs: Vec::new(),
                exit_code: 0,
            })
        }
        Command::Stats(a) => {
            let h = load(&a.input)?;
            let d = a.d.unwrap_or_else(|| h.avg_degree());
            let stats = degree_stats(&h, d);
            let poisson = check_poisson(&stats, a.c_max, a.tol_sigma, a.delta);
            let subsets = (a.subset_trials > 0).then(|| sparse_subset_check(&h, a.subset_trials, a.seed));
            let summary = format!(
                "poisson_bands={} mid_range={}/{:.1} over_degree={}/{:.1}{}",
                poisson.bands_pass,
                poisson.mid_range,
                poisson.mid_range_bound,
                poisson.over_degree,
                poisson.over_degree_bound,
                subsets.as_ref().map_or(String::new(), |s| format!(
                    " subset_max_ratio={:.3} bound={:.3} pass={}",
                    s.max_ratio, s.bound, s.pass
                ))
            );
            let body = serde_json::json!({ "degrees": stats, "poisson": poisson, "subsets": subsets });
            Ok(Outcome { summary, artifacts: vec![(a.out.clone(), json(&body)?)], inputs: vec![a.input.clone()], exit_code: 0 })
        }
        Command::Replay(_) => bail!("replay manifests cannot be nested"),
    }
}

fn manifest_name(cmd: &Command) -> String {
    let tag = serde_json::to_value(cmd).ok().and_then(|v| v["command"].as_str().map(str::to_owned));
    format!("{}.manifest.json", tag.unwrap_or_else(|| "run".into()))
}

fn execute(cmd: &Command, out_dir: &Path) -> Result<(u8, BTreeMap<String, String>)> {
    let outcome = run(cmd)?;
    println!("{}", outcome.summary);
    if outcome.artifacts.is_empty() {
        return Ok((outcome.exit_code, BTreeMap::new()));
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut outputs = BTreeMap::new();
    for (name, bytes) in &outcome.artifacts {
        let path = out_dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        outputs.insert(name.clone(), sha256(bytes));
    }
    let mut inputs = BTreeMap::new();
    for p in &outcome.inputs {
        let bytes = fs::read(p).with_context(|| format!("hashing {}", p.display()))?;
        inputs.insert(p.display().to_string(), sha256(&bytes));
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        command: cmd.clone(),
        inputs,
        outputs: outputs.clone(),
        exit_code: outcome.exit_code,
    };
    let path = out_dir.join(manifest_name(cmd));
    fs::write(&path, json(&manifest)?).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("manifest: {}", path.display());
    Ok((outcome.exit_code, outputs))
}

fn replay(a: &ReplayArgs, out_dir: &Path) -> Result<u8> {
    let text = fs::read_to_string(&a.manifest).with_context(|| format!("reading {}", a.manifest.display()))?;
    let m: Manifest = serde_json::from_str(&text).context("parsing manifest")?;
    for (path, want) in &m.inputs {
        let got = sha256(&fs::read(path).with_context(|| format!("hashing input {path}"))?);
        if &got != want {
            bail!("input {path} changed: manifest {want}, now {got}");
        }
    }
    let (code, outputs) = execute(&m.command, out_dir)?;
    let mut same = code == m.exit_code;
    for (name, want) in &m.outputs {
        match outputs.get(name) {
            Some(got) if got == want => println!("identical {name}"),
            Some(got) => {
                println!("differs   {name}: {want} -> {got}");
                same = false;
            }
            None => {
                println!("missing   {name}");
                same = false;
            }
        }
    }
    Ok(if same { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Replay(a) => replay(a, &cli.out_dir),
        cmd => execute(cmd, &cli.out_dir).map(|(code, _)| code),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
