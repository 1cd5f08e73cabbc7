//! `cornerkit` command-line front end.
//!
//! Every verb loads its inputs, calls one library entry point and prints the
//! library's JSON (`--json`) or a short prose summary. Exit status is 0 on
//! success, 1 when a check fails or a poset is rejected, 2 on malformed input.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cornerkit::charfun::{quotient_description, validate_charfun, CharFun, ModelSpec};
use cornerkit::checks::{check_all, CheckReport};
use cornerkit::invariants::{check_free_deck, invariants_report, restricted_aut_group_of};
use cornerkit::poset::{FaceMap, FacePoset, ProductType};
use cornerkit::recognize::recognize;
use cornerkit::shelling::{shelling_for, verify_shelling, ShellingCert};
use cornerkit::Error;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cornerkit", version, about = "Face posets of torus orbit spaces")]
struct Cli {
    /// Print the JSON report instead of prose
    #[arg(long, global = true)]
    json: bool,
    /// Seed for shuffled ids (build) or random characteristic functions (charfun)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON result to this file
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the face poset of a product type such as "Sigma(2)xDelta(1)"
    Build {
        #[arg(long = "type")]
        product_type: String,
    },
    /// Run the structural checks
    Check { poset: PathBuf },
    /// Recognize a poset as a product of Sigma and Delta factors
    Recognize { poset: PathBuf },
    /// Validate a characteristic function, or emit one when --lambda is absent
    Charfun {
        poset: PathBuf,
        #[arg(long)]
        lambda: Option<PathBuf>,
    },
    /// Describe the canonical model as a torus quotient of a sphere product
    Quotient {
        poset: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
    },
    /// Euler characteristic, h-vector, Betti numbers and rational signature
    Invariants {
        poset: PathBuf,
        /// Pad odd-degree Betti numbers with zeros
        #[arg(long)]
        full: bool,
    },
    /// Verify a shelling certificate, or build one for a recognized poset
    Shelling {
        poset: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Restricted automorphism group of a recognized poset
    Aut { poset: PathBuf },
    /// Check necessary conditions for a free deck action
    Deck {
        poset: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
        /// JSON list of face id maps
        #[arg(long)]
        gens: PathBuf,
    },
}

enum Failure {
    /// A check failed or the input was rejected.
    Rejected(String),
    Malformed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unrecognized(_)
            | Error::InvalidCharFun(_)
            | Error::SearchTooLarge { .. }
            | Error::NegativeHVector { .. } => Failure::Rejected(e.to_string()),
            _ => Failure::Malformed(e.to_string()),
        }
    }
}

struct Outcome {
    json: String,
    prose: String,
    passed: bool,
}

impl Outcome {
    fn new(value: &impl Serialize, prose: String, passed: bool) -> Self {
        Outcome { json: serde_json::to_string_pretty(value).expect("reports serialize"), prose, passed }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("cannot read {}: {e}", path.display())))
}

fn load_poset(path: &Path) -> Result<FacePoset, Failure> {
    Ok(FacePoset::from_json(&read(path)?)?)
}

fn load_spec(poset: &Path, lambda: &Path) -> Result<ModelSpec, Failure> {
    Ok(ModelSpec::new(load_poset(poset)?, CharFun::from_json(&read(lambda)?)?)?)
}

fn report_prose(report: &CheckReport) -> String {
    if report.passed {
        return "pass".into();
    }
    let lines: Vec<String> = report
        .violations
        .iter()
        .map(|v| format!("  {}: {} [{}]", v.rule, v.message, v.faces.join(", ")))
        .collect();
    format!("fail\n{}", lines.join("\n"))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Build { product_type } => {
            let t: ProductType = product_type.parse()?;
            let mut p = t.build();
            if let Some(seed) = cli.seed {
                p = p.shuffled(seed);
            }
            let json = p.to_json();
            Ok(Outcome { prose: json.clone(), json, passed: true })
        }
        Command::Check { poset } => {
            let report = check_all(&load_poset(poset)?);
            Ok(Outcome::new(&report, report_prose(&report), report.passed))
        }
        Command::Recognize { poset } => match recognize(&load_poset(poset)?) {
            Ok(r) => Ok(Outcome::new(&r, r.product_type.to_string(), true)),
            Err(rejection) => Ok(Outcome::new(&rejection, format!("rejected: {rejection}"), false)),
        },
        Command::Charfun { poset, lambda: Some(lambda) } => {
            let report = validate_charfun(&load_spec(poset, lambda)?);
            Ok(Outcome::new(&report, report_prose(&report), report.passed))
        }
        Command::Charfun { poset, lambda: None } => {
            let p = load_poset(poset)?;
            let cf = match cli.seed {
                Some(seed) => CharFun::random(&p, seed, 1),
                None => {
                    let r = recognize(&p).map_err(|e| Failure::Rejected(format!("rejected: {e}")))?;
                    CharFun::standard(&p, &r)?
                }
            };
            let json = cf.to_json();
            Ok(Outcome { prose: json.clone(), json, passed: true })
        }
        Command::Quotient { poset, lambda } => {
            let q = quotient_description(&load_spec(poset, lambda)?)?;
            let spheres: Vec<String> = q.sphere_dims.iter().map(|d| format!("S^{d}")).collect();
            let prose = format!(
                "{}: {} / T^{} ({})",
                q.product_type,
                spheres.join(" x "),
                q.torus_rank,
                if q.free { "free" } else { "not free" }
            );
            Ok(Outcome::new(&q, prose, q.free))
        }
        Command::Invariants { poset, full } => {
            let r = invariants_report(&load_poset(poset)?, *full)?;
            let mut prose = format!("euler characteristic {}\nh-vector {:?}\nbetti {:?}", r.euler_characteristic, r.h_vector.0, r.betti);
            if let (Some(t), Some(s)) = (&r.product_type, &r.signature) {
                prose.push_str(&format!("\ntype {t}\nrational homotopy ranks {:?}", s.ranks));
            }
            Ok(Outcome::new(&r, prose, true))
        }
        Command::Shelling { poset, cert: Some(cert) } => {
            let p = load_poset(poset)?;
            let report = verify_shelling(&p, &ShellingCert::from_json(&read(cert)?)?)?;
            Ok(Outcome::new(&report, report_prose(&report), report.passed))
        }
        Command::Shelling { poset, cert: None } => {
            let p = load_poset(poset)?;
            let r = recognize(&p).map_err(|e| Failure::Rejected(format!("rejected: {e}")))?;
            let c = shelling_for(&r)?;
            let passed = verify_shelling(&p, &c)?.passed;
            let json = c.to_json();
            Ok(Outcome { prose: json.clone(), json, passed })
        }
        Command::Aut { poset } => {
            let p = load_poset(poset)?;
            let r = recognize(&p).map_err(|e| Failure::Rejected(format!("rejected: {e}")))?;
            let group = restricted_aut_group_of(&p, &r)?;
            let prose = format!("{}: restricted group of order {}", r.product_type, group.order);
            Ok(Outcome::new(&group.report(&p), prose, true))
        }
        Command::Deck { poset, lambda, gens } => {
            let spec = load_spec(poset, lambda)?;
            let maps: Vec<BTreeMap<String, String>> =
                serde_json::from_str(&read(gens)?).map_err(|e| Failure::Malformed(format!("generators: {e}")))?;
            let p = spec.poset();
            let gens = maps.iter().map(|m| FaceMap::from_id_map(m, p, p)).collect::<Result<Vec<_>, _>>()?;
            let cert = check_free_deck(&spec, &gens)?;
            let prose = format!(
                "{}\ngroup order {}\n({})",
                report_prose(&cert.report),
                cert.group_order,
                cert.scope
            );
            Ok(Outcome::new(&cert, prose, cert.report.passed))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CORNERKIT_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, format!("{}\n", outcome.json)) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
                log::info!("wrote {}", path.display());
                // artifacts carry their JSON as prose; only reports get a summary
                if !cli.json && outcome.prose != outcome.json {
                    println!("{}", outcome.prose);
                }
            } else if cli.json {
                println!("{}", outcome.json);
            } else {
                println!("{}", outcome.prose);
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(Failure::Rejected(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Malformed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
