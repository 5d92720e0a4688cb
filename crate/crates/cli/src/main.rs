use std::error::Error;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};
use serde_json::{json, Value};
use skewgrowth::checks::{
    check_cancellative, check_inversion, check_lcm_reduction, check_recursion, CheckReport,
};
use skewgrowth::towers::{default_ground, enumerate_towers, export_forest, ForestFormat};
use skewgrowth::{
    parse_presentation, parse_rational, preset, DegreeKey, DivPoset, ElementSet,
    EnumerationOptions, KeyKind, MonoidDef, MonoidModel, Series,
};

type Failure = Box<dyn Error>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Growth series P
    Growth,
    /// Tower-based skew-growth series N
    Skew,
    /// Tower forest over the ground set
    Towers,
    /// Atoms (the default ground set)
    Atoms,
    /// Inversion, recursion, cancellativity and lcm checks
    Verify,
    /// Cancellativity probe only
    CancelCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Dot,
}

/// Growth and skew-growth series of cancellative monoids.
#[derive(Debug, Parser)]
#[command(name = "skewgrowth", version)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "file"])))]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Builtin monoid: free[:n][:deg=..], example3, braid3, zpos[:nmax], mp:p=..:K=..
    #[arg(long)]
    preset: Option<String>,

    /// Presentation file
    #[arg(long)]
    file: Option<PathBuf>,

    /// Degree cutoff as INT or INT/INT
    #[arg(long, value_name = "RATIONAL")]
    max_degree: Option<String>,

    /// Largest integer for zpos
    #[arg(long)]
    nmax: Option<u64>,

    /// Ground set override, comma-separated element names
    #[arg(long)]
    ground: Option<String>,

    #[arg(long, value_enum, default_value = "table")]
    format: Format,

    /// Per-degree cap on enumerated words
    #[arg(long, default_value_t = skewgrowth::model::DEFAULT_WORD_CAP)]
    word_cap: usize,

    /// Write results here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Outcome {
    text: String,
    checks_passed: bool,
}

fn usage(msg: impl Into<String>) -> Failure {
    msg.into().into()
}

fn resolve_def(cli: &Cli) -> Result<(MonoidDef, DegreeKey), Failure> {
    let (def, default_cutoff) = match (&cli.preset, &cli.file) {
        (Some(spec), _) => {
            let b = preset(spec)?;
            (b.def, b.default_cutoff)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let p = parse_presentation(&text)?;
            let cutoff = DegreeKey::integer(skewgrowth::presentation::DEFAULT_CUTOFF);
            (MonoidDef::Presented(p), cutoff)
        }
        (None, None) => return Err(usage("one of --preset or --file is required")),
    };
    let cutoff = match (def.key_kind(), &cli.max_degree, cli.nmax) {
        (KeyKind::MultInt, Some(_), _) => {
            return Err(usage(
                "use --nmax to set the cutoff of an integer-keyed model",
            ))
        }
        (KeyKind::Rational, _, Some(_)) => {
            return Err(usage("--nmax only applies to zpos; use --max-degree"))
        }
        (KeyKind::MultInt, None, Some(n)) => DegreeKey::MultInt(n),
        (KeyKind::Rational, Some(text), None) => DegreeKey::Rational(parse_rational(text)?),
        _ => default_cutoff,
    };
    if !cutoff.is_positive() {
        return Err(usage(format!("the cutoff must be positive, got {cutoff}")));
    }
    Ok((def, cutoff))
}

fn resolve_ground(cli: &Cli, model: &MonoidModel) -> Result<ElementSet, Failure> {
    let Some(text) = &cli.ground else {
        return Ok(default_ground(model));
    };
    text.split(',')
        .map(|name| {
            model
                .find(name.trim())
                .ok_or_else(|| usage(format!("unknown ground element `{}`", name.trim())))
        })
        .collect()
}

fn series_table(s: &Series) -> String {
    let mut out = format!("{:<12} {}\n", "degree", "coefficient");
    for (k, c) in s.terms() {
        out.push_str(&format!("{:<12} {}\n", k.to_string(), c));
    }
    out
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn reports_output(reports: &[CheckReport], format: Format) -> Outcome {
    let checks_passed = reports.iter().all(|r| !r.failed());
    let text = match format {
        Format::Json => pretty(&Value::Array(
            reports.iter().map(CheckReport::to_json).collect(),
        )),
        _ => reports.iter().map(|r| format!("{r}\n")).collect(),
    };
    Outcome {
        text,
        checks_passed,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if cli.format == Format::Dot && cli.command != Command::Towers {
        return Err(usage(
            "--format dot is only available for the towers command",
        ));
    }
    let (def, cutoff) = resolve_def(cli)?;
    let options = EnumerationOptions {
        word_cap: cli.word_cap,
    };
    let model = MonoidModel::enumerate(&def, &cutoff, options)?;
    let ok = |text| {
        Ok(Outcome {
            text,
            checks_passed: true,
        })
    };

    match cli.command {
        Command::Growth => {
            let p = model.growth_series();
            match cli.format {
                Format::Json => ok(pretty(&p.to_json())),
                _ => ok(series_table(&p)),
            }
        }
        Command::Atoms => {
            let atoms = model.atoms();
            match cli.format {
                Format::Json => ok(pretty(&Value::Array(
                    atoms
                        .iter()
                        .map(|&a| json!({"element": model.label(a), "degree": model.degree(a).to_json()}))
                        .collect(),
                ))),
                _ => {
                    let mut out = format!("{:<16} {}\n", "element", "degree");
                    for a in atoms {
                        out.push_str(&format!("{:<16} {}\n", model.label(a), model.degree(a)));
                    }
                    ok(out)
                }
            }
        }
        Command::Skew | Command::Towers => {
            let poset = DivPoset::build(&model);
            let ground = resolve_ground(cli, &model)?;
            let forest = enumerate_towers(&model, &poset, &ground, &cutoff)?;
            if cli.command == Command::Skew {
                let n = forest.skew_growth(&model);
                return match cli.format {
                    Format::Json => ok(pretty(&n.to_json())),
                    _ => ok(series_table(&n)),
                };
            }
            match cli.format {
                Format::Json => ok(export_forest(&forest, &model, ForestFormat::Json) + "\n"),
                Format::Dot => ok(export_forest(&forest, &model, ForestFormat::Dot)),
                Format::Table => {
                    let labels = |s: &ElementSet| {
                        let v: Vec<String> = s.iter().map(|u| model.label(u)).collect();
                        format!("{{{}}}", v.join(", "))
                    };
                    let mut out = String::from("id\tparent\theight\tsign\tstages\ttop\n");
                    for i in 0..forest.len() {
                        let t = forest.tower(i);
                        let stages: Vec<String> = t.stages().iter().map(labels).collect();
                        out.push_str(&format!(
                            "{i}\t{}\t{}\t{:+}\t{}\t{}\n",
                            forest.parent(i).map_or("-".to_string(), |p| p.to_string()),
                            t.height(),
                            t.sign(),
                            if stages.is_empty() {
                                "-".to_string()
                            } else {
                                stages.join(" ")
                            },
                            labels(t.top()),
                        ));
                    }
                    ok(out)
                }
            }
        }
        Command::Verify => {
            let poset = DivPoset::build(&model);
            let reports = vec![
                check_inversion(&model, &poset)?,
                check_recursion(&model, &poset)?,
                check_cancellative(&model),
                check_lcm_reduction(&model, &poset)?,
            ];
            Ok(reports_output(&reports, cli.format))
        }
        Command::CancelCheck => Ok(reports_output(&[check_cancellative(&model)], cli.format)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &outcome.text),
        None => std::io::stdout().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if outcome.checks_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
