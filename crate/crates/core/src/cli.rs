//! Command-line front end: vertex computation, the verification checks,
//! symmetric-function series and gluing.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::condense::{
    correspondence_check, k_symmetry_check, recurrence_check, small_triples, v_empty, weight_suite, Side,
};
use crate::dtvertex::dt_vertex;
use crate::error::{Error, Result};
use crate::glue::{pt_partition, WebDiagram};
use crate::partitions::{partition_lemma_suite, Partition};
use crate::ptvertex::{pt_vertex_closed, pt_vertex_dt_ratio, pt_vertex_enum, triangulate};
use crate::regions::LegTriple;
use crate::series::Series;
use crate::symfun::{hook_series_h, loop_schur, loop_schur_ssyt, skew_schur_spec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "orbivertex", version, about = "Orbifold DT/PT vertices, condensation checks and gluing")]
pub struct RunConfig {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "ORBIVERTEX_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a single vertex.
    #[command(subcommand)]
    Vertex(VertexCmd),
    /// Run a verification check.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Symmetric-function series.
    #[command(subcommand)]
    Symfun(SymfunCmd),
    /// Glued PT partition function of a web diagram.
    Glue(GlueArgs),
}

#[derive(Debug, Args)]
pub struct VertexArgs {
    #[arg(long)]
    pub n: usize,
    /// "λ;μ;ν" with comma-separated parts.
    #[arg(long, default_value = ";;")]
    pub legs: LegTriple,
    #[arg(long)]
    pub degree: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PtMethod {
    Enum,
    Closed,
    DtRatio,
    Triangulate,
}

#[derive(Debug, Subcommand)]
pub enum VertexCmd {
    Dt(VertexArgs),
    Pt {
        #[command(flatten)]
        args: VertexArgs,
        #[arg(long, value_enum, default_value_t = PtMethod::Triangulate)]
        method: PtMethod,
        /// Evaluate closed form or DT ratio outside their known range.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Dt,
    Pt,
    Both,
}

impl SideArg {
    fn sides(self) -> Vec<Side> {
        match self {
            SideArg::Dt => vec![Side::Dt],
            SideArg::Pt => vec![Side::Pt],
            SideArg::Both => vec![Side::Dt, Side::Pt],
        }
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Dt => "dt",
        Side::Pt => "pt",
    }
}

#[derive(Debug, Args)]
pub struct TripleSource {
    /// A single triple; otherwise a seeded sample of small triples.
    #[arg(long)]
    pub legs: Option<LegTriple>,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub max_total: usize,
    #[arg(long, default_value_t = 2)]
    pub max_part: usize,
}

impl TripleSource {
    fn triples(&self, seed: u64) -> Vec<LegTriple> {
        match &self.legs {
            Some(l) => vec![l.clone()],
            None => random_triples(self.count, self.max_total, self.max_part, seed),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// Condensation recurrences in cross-multiplied form.
    Recurrence {
        /// 1, 2 or 3; all three when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: Option<u8>,
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: i64,
        #[command(flatten)]
        source: TripleSource,
    },
    /// DT/PT vertex correspondence.
    Correspondence {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        legs: LegTriple,
        #[arg(long)]
        degree: i64,
    },
    /// Weight identities, frame weights, square quotients and K symmetry.
    Weights {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        max_eta: usize,
        #[arg(long, default_value_t = 3)]
        window: i64,
        #[command(flatten)]
        source: TripleSource,
    },
    /// Vacuum product formula against the enumerated empty vertex.
    Vacuum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: i64,
    },
    /// Bar-transpose symmetry of the vertices.
    Symmetry {
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: i64,
        #[command(flatten)]
        source: TripleSource,
    },
    /// Structural identities of the row/column modifications.
    PartitionLemmas {
        #[arg(long, default_value_t = 14)]
        max_size: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LoopMethod {
    Formula,
    Ssyt,
}

#[derive(Debug, Subcommand)]
pub enum SymfunCmd {
    /// Hook-length product of ν.
    Hook {
        #[arg(long)]
        nu: Partition,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: i64,
    },
    /// Loop Schur function of ν.
    LoopSchur {
        #[arg(long)]
        nu: Partition,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: i64,
        #[arg(long, value_enum, default_value_t = LoopMethod::Formula)]
        method: LoopMethod,
    },
    /// Skew Schur function `s_{ξ/η}` at the ν-alphabet.
    Skew {
        #[arg(long)]
        xi: Partition,
        #[arg(long, default_value = "")]
        eta: Partition,
        #[arg(long, default_value = "")]
        nu: Partition,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: i64,
    },
}

#[derive(Debug, Args)]
pub struct GlueArgs {
    #[arg(long)]
    pub diagram: PathBuf,
    #[arg(long)]
    pub curve_degree: usize,
    #[arg(long)]
    pub box_degree: i64,
}

/// `count` distinct triples drawn from `small_triples(max_total, max_part)`.
pub fn random_triples(count: usize, max_total: usize, max_part: usize, seed: u64) -> Vec<LegTriple> {
    sample_triples(&small_triples(max_total, max_part), count, seed)
}

/// `count` distinct members of `pool`, chosen by a seeded generator.
pub fn sample_triples(pool: &[LegTriple], count: usize, seed: u64) -> Vec<LegTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample(&mut rng, pool.len(), count.min(pool.len()))
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}

/// One line of a check report.
#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub case: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseResult {
    fn new(case: String, witness: Option<String>) -> Self {
        CaseResult { case, pass: witness.is_none(), witness, note: None }
    }
}

struct Outcome {
    json: Value,
    text: String,
    pass: Option<bool>,
}

fn series_outcome(s: &Series) -> Outcome {
    Outcome { json: serde_json::to_value(s.to_json()).expect("series json"), text: format!("{s}\n"), pass: None }
}

fn check_outcome(check: &str, cases: Vec<CaseResult>, extra: Option<Value>) -> Outcome {
    let pass = cases.iter().all(|c| c.pass);
    let width = cases.iter().map(|c| c.case.chars().count()).max().unwrap_or(0);
    let mut text = String::new();
    for c in &cases {
        let pad = width - c.case.chars().count();
        let mut line = format!("{}  {}{}", if c.pass { "pass" } else { "FAIL" }, c.case, " ".repeat(pad));
        if let Some(w) = &c.witness {
            line.push_str("  ");
            line.push_str(w);
        }
        if let Some(n) = &c.note {
            line.push_str("  ");
            line.push_str(n);
        }
        text.push_str(line.trim_end());
        text.push('\n');
    }
    let passed = cases.iter().filter(|c| c.pass).count();
    text.push_str(&format!("{check}: {passed}/{} passed\n", cases.len()));
    let mut json = json!({ "check": check, "pass": pass, "cases": cases });
    if let Some(x) = extra {
        json["details"] = x;
    }
    Outcome { json, text, pass: Some(pass) }
}

fn diff_witness(a: &Series, b: &Series, d: i64) -> Option<String> {
    a.first_difference(b, d)
        .map(|(e, l, r)| format!("coefficient of {e:?}: {l} vs {r}"))
}

fn vertex(cmd: &VertexCmd) -> Result<Outcome> {
    match cmd {
        VertexCmd::Dt(a) => Ok(series_outcome(&dt_vertex(a.n, &a.legs, a.degree))),
        VertexCmd::Pt { args: a, method, force } => match method {
            PtMethod::Enum => Ok(series_outcome(&pt_vertex_enum(a.n, &a.legs, a.degree)?)),
            PtMethod::Closed => Ok(series_outcome(&pt_vertex_closed(a.n, &a.legs, a.degree, *force)?)),
            PtMethod::DtRatio => Ok(series_outcome(&pt_vertex_dt_ratio(a.n, &a.legs, a.degree, *force)?)),
            PtMethod::Triangulate => {
                let t = triangulate(a.n, &a.legs, a.degree)?;
                let mut out = series_outcome(&t.enumerated);
                let consistent = t.consistent();
                out.json = json!({
                    "series": out.json,
                    "closed_checked": t.closed.is_some(),
                    "dt_ratio_checked": t.dt_ratio.is_some(),
                    "consistent": consistent,
                });
                if !consistent {
                    out.text.push_str("methods disagree\n");
                }
                out.pass = Some(consistent);
                Ok(out)
            }
        },
    }
}

fn check(cmd: &CheckCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        CheckCmd::Recurrence { which, side, n, degree, source } => {
            let whiches: Vec<u8> = which.map_or(vec![1, 2, 3], |w| vec![w]);
            let mut cases = Vec::new();
            for legs in source.triples(seed) {
                for &w in &whiches {
                    for s in side.sides() {
                        let witness = match recurrence_check(w, s, &legs, *n, *degree) {
                            Ok(()) => None,
                            Err(Error::RecurrenceViolated(m)) => Some(m),
                            // a random draw may lack the legs this recurrence needs
                            Err(Error::EmptyPartition) if source.legs.is_none() => continue,
                            Err(e) => return Err(e),
                        };
                        let case = format!("recurrence {w} {} legs={legs} n={n} D={degree}", side_name(s));
                        cases.push(CaseResult::new(case, witness));
                    }
                }
            }
            Ok(check_outcome("recurrence", cases, None))
        }
        CheckCmd::Correspondence { n, legs, degree } => {
            let r = correspondence_check(legs, *n, *degree)?;
            let pass = r.holds || r.corrected_holds == Some(true);
            let note = match (r.holds, r.corrected_holds) {
                (false, Some(true)) => Some("plain identity fails; O_nu-corrected identity holds".to_string()),
                _ => None,
            };
            let case = format!("correspondence legs={legs} n={n} D={degree}");
            let witness = (!pass).then(|| r.witness.clone().unwrap_or_default());
            let mut c = CaseResult::new(case, witness);
            c.note = note;
            Ok(check_outcome("correspondence", vec![c], Some(serde_json::to_value(&r).expect("report json"))))
        }
        CheckCmd::Weights { n, max_eta, window, source } => {
            let triples = source.triples(seed);
            let report = weight_suite(*max_eta, &triples, *window, *n);
            let mut cases = vec![CaseResult::new(
                format!(
                    "weight suite |eta|<={max_eta} window={window} n={n}: {} identities, {} frames, {} squares",
                    report.identities, report.frames, report.squares
                ),
                (!report.passed()).then(|| format!("{} failures, first: {:?}", report.failures.len(), report.failures[0])),
            )];
            for legs in &triples {
                // K₂ needs nonempty λ and ν
                let ok = match k_symmetry_check(legs, *n) {
                    Err(Error::EmptyPartition) => continue,
                    r => r?,
                };
                cases.push(CaseResult::new(
                    format!("K2/K3 bar-transpose symmetry legs={legs} n={n}"),
                    (!ok).then(|| "K2 and K3 not exchanged".to_string()),
                ));
            }
            Ok(check_outcome("weights", cases, Some(serde_json::to_value(&report).expect("report json"))))
        }
        CheckCmd::Vacuum { n, degree } => {
            let lhs = dt_vertex(*n, &LegTriple::vacuum(), *degree);
            let rhs = v_empty(*n, *degree)?;
            let case = format!("vacuum n={n} D={degree}");
            Ok(check_outcome("vacuum", vec![CaseResult::new(case, diff_witness(&lhs, &rhs, *degree))], None))
        }
        CheckCmd::Symmetry { side, n, degree, source } => {
            let mut cases = Vec::new();
            for legs in source.triples(seed) {
                for s in side.sides() {
                    let (lhs, rhs) = match s {
                        Side::Dt => (dt_vertex(*n, &legs, *degree), dt_vertex(*n, &legs.transpose(), *degree)),
                        Side::Pt => (pt_vertex_enum(*n, &legs, *degree)?, pt_vertex_enum(*n, &legs.transpose(), *degree)?),
                    };
                    let rhs = rhs.bar_involution(*n)?;
                    let case = format!("symmetry {} legs={legs} n={n} D={degree}", side_name(s));
                    cases.push(CaseResult::new(case, diff_witness(&lhs, &rhs, *degree)));
                }
            }
            Ok(check_outcome("symmetry", cases, None))
        }
        CheckCmd::PartitionLemmas { max_size } => {
            let reports = partition_lemma_suite(*max_size);
            let cases = reports
                .iter()
                .map(|r| {
                    CaseResult::new(
                        format!("{} ({} checked, |eta|<={max_size})", r.name, r.checked),
                        (!r.passed()).then(|| r.failures.join("; ")),
                    )
                })
                .collect();
            Ok(check_outcome("partition-lemmas", cases, None))
        }
    }
}

fn symfun(cmd: &SymfunCmd) -> Result<Outcome> {
    let s = match cmd {
        SymfunCmd::Hook { nu, n, degree } => hook_series_h(nu, *n, *degree),
        SymfunCmd::LoopSchur { nu, n, degree, method } => match method {
            LoopMethod::Formula => loop_schur(nu, *n, *degree),
            LoopMethod::Ssyt => loop_schur_ssyt(nu, *n, *degree),
        },
        SymfunCmd::Skew { xi, eta, nu, n, degree } => {
            if !xi.contains_partition(eta) {
                return Err(Error::Parse(format!("eta={eta} is not contained in xi={xi}")));
            }
            skew_schur_spec(xi, eta, nu, *n, *degree)
        }
    };
    Ok(series_outcome(&s))
}

fn glue(a: &GlueArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.diagram)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", a.diagram.display())))?;
    let diagram = WebDiagram::from_json(&text)?;
    let z = pt_partition(&diagram, a.curve_degree, a.box_degree)?;
    Ok(Outcome {
        json: serde_json::to_value(z.to_json()).expect("partition json"),
        text: z.to_string(),
        pass: None,
    })
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.command {
        Command::Vertex(c) => vertex(c),
        Command::Check(c) => check(c, cfg.seed),
        Command::Symfun(c) => symfun(c),
        Command::Glue(a) => glue(a),
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_) | Error::OutOfValidity(_) | Error::InvalidDiagram(_) | Error::InvalidPartition(_)
    )
}

/// Parse `argv`, run, and write the result to `out`. Returns the exit code:
/// 0 success, 1 failed check or computation error, 2 usage error.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cfg)) {
        Ok(o) => {
            let body = match cfg.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&o.json).expect("json")),
                Format::Text => o.text,
            };
            if out.write_all(body.as_bytes()).is_err() {
                return 1;
            }
            match o.pass {
                Some(false) => 1,
                _ => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if is_usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("orbivertex").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dt_vacuum_text() {
        let (code, out, _) = call(&["vertex", "dt", "--n", "1", "--legs", ";;", "--degree", "4"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1 + q_0 + 3*q_0^2 + 6*q_0^3 + 13*q_0^4 + O(deg 5)\n");
    }

    #[test]
    fn vacuum_and_correspondence_pass() {
        assert_eq!(call(&["check", "vacuum", "--n", "2", "--degree", "5"]).0, 0);
        let (code, out, _) = call(&["check", "correspondence", "--n", "2", "--legs", "1;1;1,1", "--degree", "4"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["vertex", "dt", "--n", "1"]).0, 2);
        assert_eq!(call(&["vertex", "dt", "--n", "1", "--legs", "1;2", "--degree", "2"]).0, 2);
        assert_eq!(call(&["vertex", "pt", "--n", "2", "--legs", "1;;1", "--degree", "2", "--method", "closed"]).0, 2);
        assert_eq!(call(&["check", "recurrence", "--which", "4", "--n", "1", "--degree", "2"]).0, 2);
    }

    #[test]
    fn json_is_deterministic() {
        let args = ["--format", "json", "check", "symmetry", "--n", "2", "--degree", "3", "--count", "3", "--seed", "7"];
        let a = call(&args);
        let b = call(&args);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        let v: Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(v["cases"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn random_triples_are_seeded() {
        assert_eq!(random_triples(5, 4, 2, 1), random_triples(5, 4, 2, 1));
        assert_ne!(random_triples(5, 4, 2, 1), random_triples(5, 4, 2, 2));
        let t = random_triples(20, 4, 2, 0);
        let mut u = t.clone();
        u.sort();
        u.dedup();
        assert_eq!(u.len(), 20);
    }
}
