use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hitsymp::action_angle::{
    closed_form_g, commutativity_defect, darboux_complete, demo_chart, fiber_isotropy_defect,
    omega_preservation_defect, verify_darboux,
};
use hitsymp::bonahon_dreyer::{admissible_triples, double_ratio, rotation_check, triple_ratio, FlagTuple};
use hitsymp::cohomology::{
    coboundary_space_basis, cocycle_space_basis, gram_matrix, omega_g, omega_k, parabolic_space_basis,
};
use hitsymp::decomposition::{
    bending_flow, build_cut_system, moment_check, verify_decomposition, BendingParameter, CutKind, MomentOptions,
};
use hitsymp::harness::{child_rng, io, run_suite, Collector, Report, Suite, SuiteConfig, SCHEMA_VERSION};
use hitsymp::representation::{
    genus2_seed, length_invariants, one_holed_torus_representation, pants_representation, random_traceless,
    spectral_generators, ConstructionParams, Representation,
};
use hitsymp::word_algebra::{reduce_word, SurfacePresentation};

#[derive(Parser)]
#[command(name = "hitsymp", version, about = "Symplectic pairings on SL(n,R) surface-group representations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for all random choices.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random trials (suite-specific default when omitted).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Matrix size for generated representations.
    #[arg(long, global = true, default_value_t = 3)]
    n: usize,
    /// Override a tolerance, e.g. `--tol bd.swap=1e-8`; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Write the JSON result to this file.
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Seeded verification suites.
    #[command(subcommand)]
    Suite(SuiteCmd),
    /// Representation files.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Cocycle spaces.
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Gram matrices of the symplectic pairings.
    #[command(subcommand)]
    Pair(PairCmd),
    /// Cut systems: decomposition checks and bending.
    #[command(subcommand)]
    Cut(CutCmd),
    /// Moment-map checks along random paths.
    #[command(subcommand)]
    Moment(MomentCmd),
    /// Flag invariants of a flag-tuple file.
    #[command(subcommand)]
    Bd(BdCmd),
    /// Action-angle charts.
    #[command(subcommand)]
    Aa(AaCmd),
}

#[derive(Subcommand)]
enum SuiteCmd {
    Run {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        name: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Surface {
    Genus2,
    Pants,
    Torus,
}

#[derive(Args)]
struct RepSource {
    /// Representation file; a seeded genus-2 point is generated when omitted.
    #[arg(long)]
    rep: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RepCmd {
    /// Write a seeded representation file.
    Generate {
        #[arg(long, value_enum, default_value = "genus2")]
        surface: Surface,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a representation and report its relator residual.
    Check(RepSource),
    /// Length invariants of a word: signed generator codes (`1 -2`) or names
    /// (`x1 Y1`, `x1 y1^-1`), where upper case or `^-1` means the inverse.
    Invariants {
        #[command(flatten)]
        source: RepSource,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
}

#[derive(Subcommand)]
enum CocycleCmd {
    /// Dimensions of the cocycle, coboundary and parabolic spaces.
    Basis(RepSource),
}

#[derive(Subcommand)]
enum PairCmd {
    OmegaG(RepSource),
    OmegaK(RepSource),
}

#[derive(Subcommand)]
enum CutCmd {
    /// Decomposition defects for random parabolic pairs.
    Verify {
        #[arg(long)]
        kind: CutKind,
        #[command(flatten)]
        source: RepSource,
    },
    /// Bend along a cut by the `j`-th spectral generator and report length drift.
    Bend {
        #[arg(long)]
        kind: CutKind,
        #[arg(long, default_value_t = 0)]
        cut: usize,
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        source: RepSource,
        /// Also write the bent representation.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MomentCmd {
    Check {
        #[arg(long)]
        kind: CutKind,
        #[arg(long, default_value_t = 0)]
        cut: usize,
        #[arg(long, default_value_t = 0)]
        j: usize,
    },
}

#[derive(Subcommand)]
enum BdCmd {
    /// Triple ratios of the first three flags (all admissible indices by default).
    Triple {
        #[arg(long)]
        flags: PathBuf,
        #[arg(long, num_args = 3, value_names = ["I", "J", "K"])]
        index: Option<Vec<usize>>,
    },
    /// Double ratios of four flags.
    Double {
        #[arg(long)]
        flags: PathBuf,
    },
    /// Rotation condition of the first three flags.
    Rotation {
        #[arg(long)]
        flags: PathBuf,
    },
}

#[derive(Subcommand)]
enum AaCmd {
    /// Darboux completion on a grid, against the closed form.
    Demo {
        #[arg(long)]
        chart: String,
        /// Grid points per coordinate in [-1, 1].
        #[arg(long, default_value_t = 3)]
        grid: usize,
    },
    /// Sign-matched comparison of the form with the completed coordinates.
    Verify {
        #[arg(long)]
        chart: String,
    },
}

/// What a command produced: a JSON document and whether every check passed.
struct Outcome {
    json: Value,
    text: String,
    pass: bool,
}

impl Outcome {
    fn report(r: Report) -> Self {
        Outcome {
            text: r.to_string(),
            pass: r.passed(),
            json: serde_json::to_value(&r).expect("report serializes"),
        }
    }

    fn data(json: Value) -> Self {
        let text = serde_json::to_string_pretty(&json).expect("values serialize");
        Outcome { json, text, pass: true }
    }
}

fn config(g: &Global) -> Result<SuiteConfig> {
    let mut cfg = SuiteConfig::with_seed(g.seed);
    cfg.trials = g.trials;
    cfg.n = g.n;
    for t in &g.tol {
        cfg.set_tolerance(t)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load(source: &RepSource, cfg: &SuiteConfig) -> Result<Arc<Representation>> {
    let rep = match &source.rep {
        Some(path) => io::read_representation(path).with_context(|| format!("reading {}", path.display()))?,
        None => generate(Surface::Genus2, cfg)?,
    };
    Ok(Arc::new(rep))
}

fn generate(surface: Surface, cfg: &SuiteConfig) -> Result<Representation> {
    let mut rng = child_rng(cfg.seed, "cli.rep");
    let p = ConstructionParams::default();
    Ok(match surface {
        Surface::Genus2 => genus2_seed(cfg.n, &mut rng, &p)?.representation()?,
        Surface::Pants => pants_representation(cfg.n, &mut rng, &p)?,
        Surface::Torus => one_holed_torus_representation(cfg.n, &mut rng, &p)?,
    })
}

fn letter_code(p: &SurfacePresentation, token: &str) -> Result<i64> {
    if let Ok(code) = token.parse::<i64>() {
        return Ok(code);
    }
    let (name, inverse) = match token.strip_suffix("^-1") {
        Some(base) => (base.to_string(), true),
        None if token.starts_with(|c: char| c.is_ascii_uppercase()) => (token.to_ascii_lowercase(), true),
        None => (token.to_string(), false),
    };
    let index = p
        .generator_index(&name)
        .with_context(|| format!("unknown generator {token:?}; expected one of {:?}", p.generator_names()))?;
    let code = index as i64 + 1;
    Ok(if inverse { -code } else { code })
}

fn matrix_json(m: &nalgebra::DMatrix<f64>) -> Value {
    json!(m.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn run(cmd: &Command, cfg: &SuiteConfig) -> Result<Outcome> {
    Ok(match cmd {
        Command::Suite(SuiteCmd::Run { name }) => Outcome::report(run_suite(name.parse()?, cfg)?),
        Command::Rep(RepCmd::Generate { surface, out }) => {
            let rep = generate(*surface, cfg)?;
            io::write_representation(out, &rep)?;
            Outcome::data(io::representation_to_value(&rep))
        }
        Command::Rep(RepCmd::Check(source)) => {
            let rep = load(source, cfg)?;
            let mut col = Collector::new(cfg);
            let r = rep.relator_residual();
            col.check("rep.relator", r, 0.0, r);
            Outcome::report(col.finish("rep check"))
        }
        Command::Rep(RepCmd::Invariants { source, word }) => {
            let rep = load(source, cfg)?;
            let codes = word
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| letter_code(rep.presentation(), s))
                .collect::<Result<Vec<_>>>()?;
            let w = reduce_word(&codes, rep.rank())?;
            let li = length_invariants(&rep.evaluate(&w))?;
            Outcome::data(json!({ "schema": SCHEMA_VERSION, "word": w, "invariants": li }))
        }
        Command::Cocycle(CocycleCmd::Basis(source)) => {
            let rep = load(source, cfg)?;
            let z = cocycle_space_basis(&rep)?;
            let b = coboundary_space_basis(&rep)?;
            let per = rep.presentation().peripheral_words();
            let par = parabolic_space_basis(&rep, &per)?;
            Outcome::data(json!({
                "schema": SCHEMA_VERSION,
                "cocycles": z.dim(),
                "coboundaries": b.dim(),
                "h1": z.dim() - b.dim(),
                "parabolic": par.dim(),
                "h1_parabolic": par.dim() - b.dim(),
                "gaps": [z.report.sv_gap, b.report.sv_gap, par.report.sv_gap],
            }))
        }
        Command::Pair(which) => {
            let (name, source) = match which {
                PairCmd::OmegaG(s) => ("omega-g", s),
                PairCmd::OmegaK(s) => ("omega-k", s),
            };
            let rep = load(source, cfg)?;
            let per = rep.presentation().peripheral_words();
            let gram = if name == "omega-g" {
                gram_matrix(&cocycle_space_basis(&rep)?.basis, omega_g)?
            } else {
                gram_matrix(&parabolic_space_basis(&rep, &per)?.basis, |a, b| omega_k(a, b, &per))?
            };
            Outcome::data(json!({
                "schema": SCHEMA_VERSION,
                "form": name,
                "rank": gram.rank.rank,
                "gap": gram.rank.sv_gap,
                "antisymmetry": (&gram.gram + gram.gram.transpose()).amax(),
                "gram": matrix_json(&gram.gram),
            }))
        }
        Command::Cut(CutCmd::Verify { kind, source }) => {
            let rep = load(source, cfg)?;
            let cs = build_cut_system(*kind);
            let space = parabolic_space_basis(&rep, &cs.peripheral_cut_words())?;
            let mut rng = child_rng(cfg.seed, "cli.cut");
            let tol = cfg.tolerance("decomposition.defect");
            let mut trials = Vec::new();
            let mut pass = true;
            for _ in 0..cfg.trials.unwrap_or(10) {
                let coeffs = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect() };
                let a = space.combine(&coeffs(&mut rng));
                let b = space.combine(&coeffs(&mut rng));
                let r = verify_decomposition(&a.scaled(1.0 / a.norm()), &b.scaled(1.0 / b.norm()), &cs)?;
                pass &= r.defect <= tol;
                trials.push(json!({ "lhs": r.lhs, "rhs": r.rhs_terms.iter().sum::<f64>(), "defect": r.defect }));
            }
            let json = json!({
                "schema": SCHEMA_VERSION,
                "kind": kind,
                "seed": cfg.seed,
                "trials": trials,
                "tolerances": { "decomposition.defect": tol },
                "pass": pass,
            });
            let mut out = Outcome::data(json);
            out.pass = pass;
            out
        }
        Command::Cut(CutCmd::Bend { kind, cut, j, t, source, out }) => {
            let rep = load(source, cfg)?;
            let cs = build_cut_system(*kind);
            let Some(curve) = cs.cuts.get(*cut) else {
                bail!("{kind} has {} cuts", cs.cuts.len());
            };
            let gens = spectral_generators(&rep.evaluate(&curve.word))?;
            let Some(x) = gens.get(*j) else {
                bail!("spectral index {j} out of range");
            };
            let x = x / x.norm();
            let bent = bending_flow(&rep, &cs, &BendingParameter { cut: *cut, x, t: *t })?;
            if let Some(path) = out {
                io::write_representation(path, &bent)?;
            }
            let mut col = Collector::new(cfg);
            for (k, c) in cs.cuts.iter().enumerate() {
                let before = length_invariants(&rep.evaluate(&c.word))?;
                let after = length_invariants(&bent.evaluate(&c.word))?;
                let drift = before.l.iter().zip(&after.l).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                col.record(&format!("decomposition.drift.cut{k}"), "decomposition.drift", after.l[0], before.l[0], drift);
            }
            Outcome::report(col.finish("cut bend"))
        }
        Command::Moment(MomentCmd::Check { kind, cut, j }) => {
            let mut rng = child_rng(cfg.seed, "cli.moment");
            let seed = genus2_seed(cfg.n, &mut rng, &ConstructionParams::default())?;
            let rep = Arc::new(seed.representation()?);
            let cs = build_cut_system(*kind);
            if *cut >= cs.cuts.len() {
                bail!("{kind} has {} cuts", cs.cuts.len());
            }
            let mut col = Collector::new(cfg);
            for _ in 0..cfg.trials.unwrap_or(3) {
                let ya = random_traceless(cfg.n, &mut rng, 0.3);
                let yb = random_traceless(cfg.n, &mut rng, 0.3);
                let r = moment_check(&rep, &cs, *cut, *j, |t| seed.deformed(&ya, &yb, t), &MomentOptions::default())?;
                col.check("moment.defect", r.pairing, r.sign * r.derivative, r.defect);
                col.check("moment.ratio", r.convergence_ratio, 4.0, (r.convergence_ratio - 4.0).abs());
            }
            Outcome::report(col.finish("moment check"))
        }
        Command::Bd(cmd) => bd(cmd, cfg)?,
        Command::Aa(AaCmd::Demo { chart, grid }) => {
            let demo = demo_chart(chart)?;
            let dim = demo.chart.dim();
            let m = (*grid).max(1);
            let coord = |k: usize| if m == 1 { 0.0 } else { -1.0 + 2.0 * k as f64 / (m - 1) as f64 };
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for idx in 0..m.pow(dim as u32) {
                let x = DVector::from_fn(dim, |r, _| coord(idx / m.pow(r as u32) % m));
                let sol = darboux_complete(&demo.chart, &demo.section, &x)?;
                let exact = closed_form_g(chart, &x);
                if let Some(e) = &exact {
                    worst = worst.max((DVector::from_vec(sol.g.clone()) - e).amax());
                }
                rows.push(json!({
                    "x": x.as_slice(),
                    "f": demo.chart.f(&x).as_slice(),
                    "g": sol.g,
                    "closed_form": exact.map(|e| e.as_slice().to_vec()),
                    "isotropy": fiber_isotropy_defect(&demo.chart, &x)?,
                }));
            }
            let mut col = Collector::new(cfg);
            col.check("aa.darboux", worst, 0.0, worst);
            let report = col.finish("aa demo");
            let pass = report.passed();
            let json = json!({ "schema": SCHEMA_VERSION, "chart": chart, "points": rows, "report": report });
            let mut out = Outcome::data(json);
            out.pass = pass;
            out
        }
        Command::Aa(AaCmd::Verify { chart }) => {
            let demo = demo_chart(chart)?;
            let c = &demo.chart;
            let mut rng = child_rng(cfg.seed, "cli.aa");
            let probes: Vec<DVector<f64>> = (0..cfg.trials.unwrap_or(4))
                .map(|_| DVector::from_fn(c.dim(), |_, _| rng.random_range(-1.0..1.0)))
                .collect();
            let g = |p: &DVector<f64>| darboux_complete(c, &demo.section, p).map(|s| DVector::from_vec(s.g));
            let r = verify_darboux(c, &probes, g, 1e-4)?;
            let mut col = Collector::new(cfg);
            col.check("aa.verify", r.sign, r.other_deviation, r.deviation);
            for x in &probes {
                for i in 0..c.half_dim() {
                    let v = omega_preservation_defect(c, i, x, 0.7)?;
                    col.check("aa.preservation", v, 0.0, v);
                    for j in 0..c.half_dim() {
                        let v = commutativity_defect(c, i, j, x, 0.3, -0.4)?;
                        col.check("aa.commutativity", v, 0.0, v);
                    }
                }
            }
            Outcome::report(col.finish("aa verify"))
        }
    })
}

fn bd(cmd: &BdCmd, cfg: &SuiteConfig) -> Result<Outcome> {
    let path = match cmd {
        BdCmd::Triple { flags, .. } | BdCmd::Double { flags } | BdCmd::Rotation { flags } => flags,
    };
    let flags = read_flags(path)?;
    let need = if matches!(cmd, BdCmd::Double { .. }) { 4 } else { 3 };
    if flags.len() < need {
        bail!("{} holds {} flags, need {need}", path.display(), flags.len());
    }
    let n = flags[0].n();
    Ok(match cmd {
        BdCmd::Triple { index, .. } => {
            let tuple = FlagTuple::triple(flags[0].clone(), flags[1].clone(), flags[2].clone())?;
            let indices = match index {
                Some(v) => vec![(v[0], v[1], v[2])],
                None => admissible_triples(n),
            };
            let values = indices
                .iter()
                .map(|&(i, j, k)| Ok(json!({ "index": [i, j, k], "value": triple_ratio(&flags[0], &flags[1], &flags[2], i, j, k)? })))
                .collect::<Result<Vec<_>>>()?;
            Outcome::data(json!({ "schema": SCHEMA_VERSION, "min_wedge": tuple.min_wedge, "triple_ratios": values }))
        }
        BdCmd::Double { .. } => {
            let tuple = FlagTuple::quadruple(flags[0].clone(), flags[1].clone(), flags[2].clone(), flags[3].clone())?;
            let values = (1..n)
                .map(|i| Ok(json!({ "index": i, "value": double_ratio(&flags[0], &flags[1], &flags[2], &flags[3], i)? })))
                .collect::<Result<Vec<_>>>()?;
            Outcome::data(json!({ "schema": SCHEMA_VERSION, "min_wedge": tuple.min_wedge, "double_ratios": values }))
        }
        BdCmd::Rotation { .. } => {
            let v = rotation_check(&flags[0], &flags[1], &flags[2])?;
            let mut col = Collector::new(cfg);
            col.check("bd.rotation", v, 0.0, v);
            Outcome::report(col.finish("bd rotation"))
        }
    })
}

fn read_flags(path: &Path) -> Result<Vec<hitsymp::bonahon_dreyer::Flag>> {
    io::read_flags(path).with_context(|| format!("reading {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli.global).and_then(|cfg| run(&cli.command, &cfg));
    match result {
        Ok(out) => {
            let mut text = out.text.clone();
            if !text.ends_with('\n') {
                text.push('\n');
            }
            // A closed pipe (`| head`) is not an error worth a panic.
            let _ = std::io::stdout().write_all(text.as_bytes());
            if let Some(path) = &cli.global.json {
                let mut s = serde_json::to_string_pretty(&out.json).expect("values serialize");
                s.push('\n');
                if let Err(e) = std::fs::write(path, s) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::FAILURE;
                }
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
