use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use schofield_core::reflection::run_procedure;
use schofield_core::report::emit_report;
use schofield_core::verify::{run_suite, Suite, VerifyConfig};
use schofield_core::{DimVector, Error, EuclideanQuiver, ModuleId, SchofieldPair};

/// Exit status for malformed command lines.
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "schofield", version, about = "Schofield pairs of exceptional modules over Euclidean quivers")]
struct Cli {
    /// Preset name (`A~2,3`, `D~5`, `E~6`, `K`), inline quiver, or a file holding either.
    #[arg(long, global = true, default_value = "A~1,2")]
    quiver: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Data,
}

#[derive(Args)]
struct Target {
    /// Module id: `P(n,i)`, `I(n,i)` or `R[e]^l(t)`.
    #[arg(long, conflicts_with = "dim")]
    module: Option<String>,
    /// Dimension vector in vertex order, e.g. `(2,2,1)`.
    #[arg(long)]
    dim: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Type, δ, Cartan and Coxeter matrices.
    Info,
    /// Positive real roots below a bound.
    Roots {
        /// `<k>delta` or a dimension vector.
        #[arg(long)]
        below: String,
        /// Only exceptional roots.
        #[arg(long)]
        exceptional: bool,
    },
    /// Dimension vector of a module id.
    Dim { module: String },
    /// Module id of a dimension vector.
    Identify { dim: String },
    /// Non-homogeneous tubes and their mouths.
    Tubes,
    /// All Schofield pairs of a module.
    Pairs(Target),
    /// Pairs through the reflection procedure.
    Procedure(Target),
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Appendix-style report of every pair list.
    Emit {
        /// `N` for indices `0..=N`, or a half-open `a..b`.
        #[arg(long)]
        range: String,
    },
}

enum Failure {
    Domain(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn load_quiver(arg: &str) -> Result<EuclideanQuiver, Error> {
    let path = std::path::Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{arg}: {e}")))?;
        return EuclideanQuiver::parse(text.trim());
    }
    EuclideanQuiver::parse(arg)
}

fn resolve(eq: &EuclideanQuiver, t: &Target) -> Result<(DimVector, Option<ModuleId>), Error> {
    match (&t.module, &t.dim) {
        (Some(m), _) => {
            let id: ModuleId = m.parse()?;
            Ok((eq.dim_of(&id)?, Some(id)))
        }
        (None, Some(d)) => {
            let z: DimVector = d.parse()?;
            eq.check_vector(&z)?;
            let id = eq.identify(&z).ok();
            Ok((z, id))
        }
        (None, None) => Err(Error::Parse("give --module or --dim".into())),
    }
}

fn parse_range(s: &str) -> Result<std::ops::Range<u32>, Error> {
    let bad = || Error::Parse(format!("bad range {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(a.parse().map_err(|_| bad())?..b.parse().map_err(|_| bad())?),
        None => {
            let n: u32 = s.parse().map_err(|_| bad())?;
            Ok(0..n + 1)
        }
    }
}

fn matrix_rows(m: &schofield_core::IntMatrix) -> Vec<Vec<i64>> {
    m.to_rows()
}

fn pair_json(p: &SchofieldPair) -> Value {
    serde_json::to_value(p).expect("pair serializes")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let data = cli.format == Format::Data;
    // verification needs no quiver
    if let Command::Verify { suite, seed } = &cli.command {
        let suite: Suite = suite.parse()?;
        let report = run_suite(suite, &VerifyConfig { seed: *seed, ..Default::default() });
        let out = if data { pretty(&serde_json::to_value(&report).expect("json")) } else { report.to_text() };
        return if report.passed() { Ok(out) } else { Err(Failure::Verification(out)) };
    }
    let eq = load_quiver(&cli.quiver)?;
    let mut s = String::new();
    match &cli.command {
        Command::Verify { .. } => unreachable!(),
        Command::Info => {
            if data {
                s = pretty(&json!({
                    "type": eq.ty().to_string(),
                    "vertices": eq.n(),
                    "arrows": eq.quiver().arrows_one_based(),
                    "delta": eq.delta(),
                    "cartan": matrix_rows(eq.cartan()),
                    "coxeter": matrix_rows(eq.coxeter()),
                }));
            } else {
                let _ = writeln!(s, "type: {}", eq.ty());
                let _ = writeln!(s, "quiver: {}", eq.quiver());
                let _ = writeln!(s, "delta: {}", eq.delta());
                let _ = writeln!(s, "C:");
                for row in matrix_rows(eq.cartan()) {
                    let _ = writeln!(s, "  {}", DimVector::new(row));
                }
                let _ = writeln!(s, "Phi:");
                for row in matrix_rows(eq.coxeter()) {
                    let _ = writeln!(s, "  {}", DimVector::new(row));
                }
            }
        }
        Command::Roots { below, exceptional } => {
            let bound = match below.strip_suffix("delta") {
                Some(k) => {
                    let k: i64 = if k.is_empty() { 1 } else { k.parse().map_err(|_| Error::Parse(format!("bad bound {below:?}")))? };
                    eq.delta().scale(k)
                }
                None => below.parse()?,
            };
            let roots = if *exceptional { eq.exceptional_roots_below(&bound)? } else { eq.roots_below(&bound)? };
            let rows: Vec<(DimVector, Option<ModuleId>)> = roots
                .into_iter()
                .map(|r| {
                    let id = if eq.is_exceptional_root(&r) { eq.identify(&r).ok() } else { None };
                    (r, id)
                })
                .collect();
            if data {
                let v: Vec<Value> = rows.iter().map(|(r, id)| json!({ "dim": r, "module": id })).collect();
                s = pretty(&Value::Array(v));
            } else {
                for (r, id) in rows {
                    let _ = writeln!(s, "{r} {}", id.map_or("-".to_string(), |i| i.to_string()));
                }
            }
        }
        Command::Dim { module } => {
            let id: ModuleId = module.parse()?;
            let d = eq.dim_of(&id)?;
            s = if data { pretty(&json!({ "module": id, "dim": d })) } else { format!("{d}\n") };
        }
        Command::Identify { dim } => {
            let d: DimVector = dim.parse()?;
            let id = eq.identify(&d)?;
            s = if data { pretty(&json!({ "module": id, "dim": d })) } else { format!("{id}\n") };
        }
        Command::Tubes => {
            let tubes = eq.tubes()?;
            if data {
                s = pretty(&serde_json::to_value(tubes).expect("json"));
            } else {
                for t in tubes {
                    let mouth: Vec<String> = t.mouth.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(s, "tube {} rank {}: {}", t.label, t.rank(), mouth.join(" "));
                }
            }
        }
        Command::Pairs(target) => {
            let (z, id) = resolve(&eq, target)?;
            let pairs = eq.all_pairs(&z)?;
            if data {
                s = pretty(&json!({
                    "module": id,
                    "dim": z,
                    "pairs": pairs.iter().map(pair_json).collect::<Vec<_>>(),
                }));
            } else {
                for p in &pairs {
                    let _ = writeln!(s, "{}  x={} y={}{}", p.corpus_text(), p.x.dim, p.y.dim, if p.special { " special" } else { "" });
                }
                if pairs.is_empty() {
                    s.push_str("-\n");
                }
            }
        }
        Command::Procedure(target) => {
            let (z, _) = resolve(&eq, target)?;
            let o = run_procedure(&eq, &z)?;
            if data {
                s = pretty(&json!({
                    "target": o.target.arrows_one_based(),
                    "mode": o.forward.mode,
                    "forward": o.forward.vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
                    "reflected": o.reflected_z,
                    "target_pairs": o.target_pairs.len(),
                    "dropped": o.dropped,
                    "restored": o.restored,
                    "pairs": o.pairs.iter().map(pair_json).collect::<Vec<_>>(),
                }));
            } else {
                let _ = writeln!(s, "target: {}", o.target);
                let seq: Vec<String> = o.forward.vertices.iter().map(|v| (v + 1).to_string()).collect();
                let _ = writeln!(s, "{:?} flips: {}", o.forward.mode, if seq.is_empty() { "-".into() } else { seq.join(" ") });
                let _ = writeln!(s, "reflected: {} with {} pairs", o.reflected_z, o.target_pairs.len());
                for d in &o.dropped {
                    let _ = writeln!(s, "dropped at vertex {}: {}", d.vertex, d.pair);
                }
                for d in &o.restored {
                    let _ = writeln!(s, "restored at vertex {}: {}", d.vertex, d.pair);
                }
                for p in &o.pairs {
                    let _ = writeln!(s, "{p}");
                }
            }
        }
        Command::Emit { range } => {
            let report = emit_report(&eq, parse_range(range)?)?;
            s = if data { report.to_json() } else { report.to_text() };
        }
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(out)) => {
            print!("{out}");
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
