use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gencl::congruence::{exact_sequence_audit, gen_class_group, suborder_transport, LambdaSet, Modulus};
use gencl::lab::{vectorize, Certificate, Preset};
use gencl::quadforms::{class_group, order_from_disc, Elem, QuadIdeal, QuadOrder};
use gencl::{Error, SCHEMA_VERSION};

/// Generalized class groups of imaginary quadratic orders and their actions on
/// oriented curves with level structure.
#[derive(Parser, Debug)]
#[command(name = "gencl", version)]
struct Cli {
    /// Worker threads for internal parallelism.
    #[arg(long, env = "GENCL_WORKERS", global = true)]
    workers: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PresetName {
    Gpv,
    Eigenvector,
    Nthpower,
    Integers,
    Fullgroup,
    Suborder,
}

#[derive(clap::Args, Debug)]
struct PresetArgs {
    #[arg(long, value_enum)]
    preset: PresetName,
    /// Characteristic of the supersingular floor.
    #[arg(long)]
    p: Option<u64>,
    /// Scalar modulus `N·O`.
    #[arg(long = "N", visible_alias = "n")]
    n: Option<i64>,
    /// Split prime (eigenvector) or descent prime (suborder).
    #[arg(long)]
    f: Option<i64>,
    /// Exponent for the nthpower preset.
    #[arg(long)]
    e: Option<u32>,
    /// Field size and trace for the suborder preset.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Class group of the order of discriminant D.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// `I_O(m)/P_{O,Λ}(m)` with its Cayley table.
    Genclassgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        /// `N` for N·O, or `P:n:b:c` for the ideal Z·n + Z·(b + cω).
        #[arg(long)]
        modulus: String,
        /// one | int | pow:n | full
        #[arg(long)]
        lambda: String,
    },
    /// Cardinality audit of the exact sequence through Cl_H.
    Audit {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        lambda: String,
    },
    /// `Cl_{Z+fO} → I_O(fO)/P_{O,Z}(fO)` by extension of ideals.
    Suborder {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        f: i64,
    },
    /// Certify a preset scenario.
    Certify {
        #[command(flatten)]
        args: PresetArgs,
        /// Keep the measured runtime in the certificate (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Solve a vectorization instance.
    Vectorize {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Graphviz picture of a preset scenario.
    Graph {
        #[command(flatten)]
        args: PresetArgs,
    },
}

/// Exit status 2: bad input. Status 1: a computation or certificate failed.
enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Domain(_)
            | Error::Precondition(_)
            | Error::NotProper(_)
            | Error::NotCoprime(_) => Failure::Usage(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

fn parse_modulus(o: &QuadOrder, spec: &str) -> Result<Modulus, Failure> {
    let bad = || Failure::Usage(format!("invalid modulus {spec:?}: expected N or P:n:b:c"));
    if let Some(rest) = spec.strip_prefix("P:") {
        let parts: Vec<i64> = rest.split(':').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let [a, b, c] = parts[..] else { return Err(bad()) };
        if a <= 0 {
            return Err(bad());
        }
        let ideal = QuadIdeal::from_generators(o, &[Elem::int(a), Elem::new(b, c)])?;
        return Ok(Modulus::new(o, ideal)?);
    }
    let n: i64 = spec.trim().parse().map_err(|_| bad())?;
    if n < 1 {
        return Err(bad());
    }
    Ok(Modulus::scalar(o, n)?)
}

fn need<T>(v: Option<T>, flag: &str, preset: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for --preset {preset}")))
}

fn preset_of(a: &PresetArgs) -> Result<Preset, Failure> {
    let bound = |p: u64| {
        if p > 65_536 {
            Err(Failure::Usage(format!("p = {p} exceeds the supported bound 65536")))
        } else {
            Ok(p)
        }
    };
    Ok(match a.preset {
        PresetName::Gpv => Preset::Gpv { p: bound(need(a.p, "p", "gpv")?)?, n: need(a.n, "N", "gpv")? },
        PresetName::Eigenvector => {
            Preset::Eigenvector { p: bound(need(a.p, "p", "eigenvector")?)?, f: need(a.f, "f", "eigenvector")? }
        }
        PresetName::Nthpower => Preset::Nthpower {
            p: bound(need(a.p, "p", "nthpower")?)?,
            n: need(a.n, "N", "nthpower")?,
            e: a.e.unwrap_or(2),
        },
        PresetName::Integers => {
            Preset::Integers { p: bound(need(a.p, "p", "integers")?)?, n: need(a.n, "N", "integers")? }
        }
        PresetName::Fullgroup => {
            Preset::Fullgroup { p: bound(need(a.p, "p", "fullgroup")?)?, n: need(a.n, "N", "fullgroup")? }
        }
        PresetName::Suborder => Preset::Suborder {
            q: need(a.q, "q", "suborder")?,
            t: need(a.t, "t", "suborder")?,
            f: need(a.f, "f", "suborder")?,
        },
    })
}

/// A document and whether it reports success.
struct Output {
    body: String,
    ok: bool,
}

fn json_out(v: &Value, ok: bool) -> Output {
    Output { body: serde_json::to_string_pretty(v).expect("serializable") + "\n", ok }
}

fn certificate_text(c: &Certificate) -> String {
    let mut s = format!(
        "{} over F_{}: {} (|Cl_H| = {}, |set| = {})\n",
        c.scenario.label,
        c.scenario.q,
        if c.pass { "pass" } else { "FAIL" },
        c.group_order,
        c.set_size
    );
    for ch in &c.checks {
        s += &format!("  {:<28} {}", ch.name, if ch.ok { "ok" } else { "FAILED" });
        if let Some(ce) = &ch.counterexample {
            s += &format!(" ({ce})");
        }
        s.push('\n');
    }
    s
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.cmd {
        Cmd::Classgroup { disc } => {
            let o = order_from_disc(*disc)?;
            let cg = class_group(&o);
            let forms: Vec<Value> = cg.iter().map(|c| json!([c.form.a, c.form.b, c.form.c])).collect();
            let reps: Vec<Value> = cg.iter().map(|c| json!(c.rep)).collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "disc": disc,
                "h": cg.len(),
                "forms": forms,
                "representatives": reps,
            });
            if cli.format == Format::Text {
                let lines: Vec<String> =
                    cg.iter().map(|c| format!("  ({}, {}, {})", c.form.a, c.form.b, c.form.c)).collect();
                return Ok(Output { body: format!("h({disc}) = {}\n{}\n", cg.len(), lines.join("\n")), ok: true });
            }
            Ok(json_out(&doc, true))
        }
        Cmd::Genclassgroup { disc, modulus, lambda } => {
            let o = order_from_disc(*disc)?;
            let m = parse_modulus(&o, modulus)?;
            let l: LambdaSet = lambda.parse()?;
            let g = gen_class_group(&o, &m, l)?;
            if cli.format == Format::Text {
                return Ok(Output {
                    body: format!("|Cl_H| = {} (D = {disc}, m = {modulus}, Λ = {l})\n", g.len()),
                    ok: true,
                });
            }
            Ok(json_out(&g.to_json(), true))
        }
        Cmd::Audit { disc, modulus, lambda } => {
            let o = order_from_disc(*disc)?;
            let m = parse_modulus(&o, modulus)?;
            let l: LambdaSet = lambda.parse()?;
            let a = exact_sequence_audit(&o, &m, l)?;
            if cli.format == Format::Text {
                let (u, q, h, hc) = a.sizes;
                let verdict = if a.pass { "pass" } else { "FAIL" };
                return Ok(Output {
                    body: format!("sizes ({u}, {q}, {h}, {hc}) predicted {} {verdict}\n", a.predicted),
                    ok: a.pass,
                });
            }
            Ok(json_out(&a.to_json(), a.pass))
        }
        Cmd::Suborder { disc, f } => {
            let o = order_from_disc(*disc)?;
            let t = suborder_transport(&o, *f)?;
            let classes: Vec<Value> = t
                .sub_classes
                .iter()
                .zip(&t.image)
                .map(|(c, i)| json!({"form": [c.form.a, c.form.b, c.form.c], "rep": c.rep, "image": t.group.elements[*i]}))
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "disc": disc,
                "f": f,
                "suborder_disc": t.sub.disc,
                "h": t.sub_classes.len(),
                "group_order": t.group.len(),
                "classes": classes,
                "isomorphism": true,
            });
            if cli.format == Format::Text {
                return Ok(Output {
                    body: format!("Cl({}) ≅ I_O({f}O)/P_(O,Z)({f}O), order {}\n", t.sub.disc, t.group.len()),
                    ok: true,
                });
            }
            Ok(json_out(&doc, true))
        }
        Cmd::Certify { args, timing } => {
            let preset = preset_of(args)?;
            let run = preset.run(args.seed)?;
            let mut cert = run.certificate().clone();
            if !timing {
                cert.runtime_ms = 0;
            }
            match cli.format {
                Format::Text => Ok(Output { body: certificate_text(&cert), ok: cert.pass }),
                Format::Dot => Ok(Output { body: run.dot(), ok: cert.pass }),
                Format::Json => {
                    let mut v = cert.to_json();
                    v["preset"] = serde_json::to_value(preset).expect("serializable");
                    Ok(json_out(&v, cert.pass))
                }
            }
        }
        Cmd::Vectorize { instance } => {
            let text = std::fs::read_to_string(instance)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", instance.display())))?;
            let doc: Value =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid instance: {e}")))?;
            let preset: Preset = serde_json::from_value(doc["scenario"].clone())
                .map_err(|e| Failure::Usage(format!("invalid scenario: {e}")))?;
            let seed = doc["seed"].as_u64().unwrap_or(0);
            let engine = preset.engine(seed)?;
            let curves: Vec<_> = engine.set.iter().map(|x| x.oc.clone()).collect();
            let x1 = engine.space.from_json(&doc["x1"], &curves)?;
            let x2 = engine.space.from_json(&doc["x2"], &curves)?;
            let c = vectorize(&engine, &x1, &x2)?;
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "scenario": preset,
                "class": c,
                "representative": engine.group.elements[c],
                "verified": true,
            });
            if cli.format == Format::Text {
                let r = engine.group.elements[c];
                return Ok(Output { body: format!("class {c}: ({}, {} + {}ω)\n", r.a, r.b, r.c), ok: true });
            }
            Ok(json_out(&v, true))
        }
        Cmd::Graph { args } => {
            let preset = preset_of(args)?;
            let run = preset.run(args.seed)?;
            Ok(Output { body: run.dot(), ok: run.certificate().pass })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("gencl: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &out.body) {
                    eprintln!("gencl: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", out.body);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("gencl: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("gencl: {msg}");
            ExitCode::from(1)
        }
    }
}
