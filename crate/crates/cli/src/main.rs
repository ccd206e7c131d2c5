use anyhow::{anyhow, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use enriques_tools::{run_with, write_report, Context, Format, Scope};
use enriques_core::dynkin::{vinberg_check, GraphJson, WeightedGraph};
use enriques_core::fibrations::{audit_fibration, Ambient, FibrationConfig};
use enriques_core::nsmodel::build_ns_model;
use enriques_core::pg4::{build_plane, hyperovals, mi_base_configurations, mii_special_hyperovals, MIIFlag};
use enriques_core::quotient::{build_surface, SurfaceKind};
use serde_json::json;
use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_IO: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "enriques", version, about = "Exact models of Enriques quotients of the supersingular K3 surface in characteristic 2")]
struct Cli {
    /// Write output files here instead of printing to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification checks.
    Verify {
        #[arg(long, default_value = "all")]
        scope: Scope,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Corrupt one Gram entry before checking (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Surface models (MI, VII, MII).
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Objects in the projective plane over F4.
    Pg4 {
        #[command(subcommand)]
        action: Pg4Action,
    },
    /// Fibration arithmetic.
    Fib {
        #[command(subcommand)]
        action: FibAction,
    },
    /// Vinberg's criterion on a class graph.
    Vinberg {
        #[command(subcommand)]
        action: VinbergAction,
    },
    /// The 42-curve lattice.
    Ns {
        #[command(subcommand)]
        action: NsAction,
    },
}

#[derive(Subcommand)]
enum ModelAction {
    /// Build a descended surface model.
    Build {
        #[arg(long)]
        kind: SurfaceKind,
        #[arg(long, value_enum, default_value = "json")]
        format: ModelFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelFormat {
    Json,
    Dot,
    /// The class graph in the `vinberg check` input format.
    Graph,
}

#[derive(Subcommand)]
enum Pg4Action {
    /// Print one of the enumerated families.
    Enumerate {
        #[arg(long, value_enum)]
        what: Pg4What,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Pg4What {
    Hyperovals,
    MiBase,
    MiiSpecial,
}

#[derive(Subcommand)]
enum FibAction {
    /// Euler and Shioda-Tate audit of a fiber configuration.
    Audit {
        #[arg(long)]
        config: String,
        #[arg(long, default_value = "k3")]
        ambient: Ambient,
    },
}

#[derive(Subcommand)]
enum VinbergAction {
    /// Run the check on a graph exported by `model build --format graph`.
    Check {
        #[arg(long)]
        graph: PathBuf,
        /// n for a lattice of signature (1, n).
        #[arg(long)]
        rank: usize,
    },
}

#[derive(Subcommand)]
enum NsAction {
    /// Check the NS lattice and export the generator Gram and the 168 classes.
    Verify,
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn emit(&self, name: &str, body: &str) -> Result<()> {
        match &self.dir {
            Some(d) => {
                fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
                let p = d.join(name);
                fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
            }
            None => print!("{body}"),
        }
        Ok(())
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: Cli) -> Result<u8> {
    let out = Output { dir: cli.out.clone() };
    match cli.command {
        Command::Verify { scope, format, inject_fault } => {
            let ctx = if inject_fault { Context::with_corrupted_gram() } else { Context::new() };
            let report = run_with(scope, &ctx);
            match &cli.out {
                Some(d) => {
                    write_report(&report, d, format).with_context(|| format!("writing report to {}", d.display()))?;
                }
                None => print!("{}", format.render(&report)),
            }
            Ok(if report.all_passed() { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Model {
            action: ModelAction::Build { kind, format },
        } => {
            let model = build_surface(kind, &build_plane())?;
            let stem = format!("model-{}", kind.to_string().to_lowercase());
            match format {
                ModelFormat::Json => out.emit(&format!("{stem}.json"), &pretty(&model)?)?,
                ModelFormat::Dot => out.emit(&format!("{stem}.dot"), &model.to_dot())?,
                ModelFormat::Graph => out.emit(&format!("{stem}-graph.json"), &pretty(&GraphJson::from(&model.graph()))?)?,
            }
            Ok(0)
        }
        Command::Pg4 {
            action: Pg4Action::Enumerate { what },
        } => {
            let plane = build_plane();
            let (name, body) = match what {
                Pg4What::Hyperovals => ("hyperovals.json", pretty(&hyperovals(&plane))?),
                Pg4What::MiBase => ("mi-base.json", pretty(&mi_base_configurations(&plane))?),
                Pg4What::MiiSpecial => {
                    let flag = MIIFlag::default_for(&plane, 0);
                    let hs = mii_special_hyperovals(&plane, &flag)?;
                    ("mii-special.json", pretty(&json!({ "flag": flag, "hyperovals": hs }))?)
                }
            };
            out.emit(name, &body)?;
            Ok(0)
        }
        Command::Fib {
            action: FibAction::Audit { config, ambient },
        } => {
            let cfg = FibrationConfig::parse(&config, ambient)?;
            let report = audit_fibration(&cfg);
            let body = match &report {
                Ok(r) => json!({ "config": cfg, "passed": true, "report": r }),
                Err(e) => json!({ "config": cfg, "passed": false, "error": e.to_string() }),
            };
            out.emit("audit.json", &pretty(&body)?)?;
            Ok(if report.is_ok() { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Vinberg {
            action: VinbergAction::Check { graph, rank },
        } => {
            let text = fs::read_to_string(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let parsed: GraphJson = serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", graph.display()))?;
            let g = WeightedGraph::try_from(parsed)?;
            let report = vinberg_check(&g, rank)?;
            out.emit("vinberg.json", &pretty(&report)?)?;
            Ok(if report.verdict { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Ns { action: NsAction::Verify } => {
            let plane = build_plane();
            let ns = build_ns_model(&plane);
            let lat = ns.lattice();
            let sig = lat.signature();
            let group: Vec<String> = ns.discriminant().group().iter().map(|x| x.to_string()).collect();
            let ok = lat.rank() == 22 && lat.det() == (-4).into() && group == ["2", "2"] && (sig.positive, sig.negative) == (1, 21);
            let classes: Vec<_> = hyperovals(&plane)
                .iter()
                .map(|h| {
                    let c = ns.hyperoval_class(h);
                    json!({ "points": h.0, "coords": c.coords, "norm": ns.pair(&c.coords, &c.coords) })
                })
                .collect();
            let body = json!({
                "rank": lat.rank(),
                "det": lat.det().to_string(),
                "discriminant_group": group,
                "signature": [sig.positive, sig.negative, sig.zero],
                "passed": ok,
                "gram42": ns.gram42,
                "classes": classes,
            });
            out.emit("ns.json", &pretty(&body)?)?;
            Ok(if ok { 0 } else { EXIT_CHECK_FAILED })
        }
    }
}

fn error_code(e: &anyhow::Error) -> u8 {
    if e.chain().any(|c| c.is::<io::Error>()) {
        EXIT_IO
    } else {
        EXIT_INPUT
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;
    use std::path::Path;

    fn call(args: &[&str]) -> Result<u8> {
        let mut v = vec!["enriques"];
        v.extend_from_slice(args);
        run(Cli::try_parse_from(v)?)
    }

    fn read_json(p: &Path) -> Value {
        serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
    }

    #[test]
    fn verify_plane_passes_and_writes_text() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().to_str().unwrap();
        assert_eq!(call(&["verify", "--scope", "plane", "--out", out]).unwrap(), 0);
        let text = fs::read_to_string(d.path().join("verification.txt")).unwrap();
        assert!(text.contains("PASS ac01"));
        assert!(text.contains("[projective plane]"));
    }

    #[test]
    fn verify_mii_lists_special_hyperovals() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().to_str().unwrap();
        let code = call(&["verify", "--scope", "mii", "--format", "json", "--out", out]).unwrap();
        let j = read_json(&d.path().join("verification.json"));
        let checks = j["checks"].as_array().unwrap();
        let special = checks.iter().find(|c| c["id"] == "special-hyperovals-count").unwrap();
        assert_eq!(special["status"], "pass");
        assert_eq!(special["witness"]["count"], 12);
        let failed = checks.iter().filter(|c| c["status"] == "fail").count();
        assert_eq!(code == 0, failed == 0);
    }

    #[test]
    fn corrupted_gram_fails_with_witness() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().to_str().unwrap();
        let code = call(&["verify", "--scope", "lattices", "--inject-fault", "--format", "json", "--out", out]).unwrap();
        assert_eq!(code, EXIT_CHECK_FAILED);
        let j = read_json(&d.path().join("verification.json"));
        let ac03 = j["checks"].as_array().unwrap().iter().find(|c| c["id"] == "ac03").unwrap().clone();
        assert_eq!(ac03["status"], "fail");
        assert_ne!(ac03["witness"]["det"], "-4");
    }

    #[test]
    fn unwritable_output_is_an_io_error() {
        let d = tempfile::tempdir().unwrap();
        let file = d.path().join("plain-file");
        fs::write(&file, "x").unwrap();
        let bad = file.join("sub");
        let e = call(&["verify", "--scope", "plane", "--out", bad.to_str().unwrap()]).unwrap_err();
        assert_eq!(error_code(&e), EXIT_IO);
    }

    #[test]
    fn model_exports() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().to_str().unwrap();
        assert_eq!(call(&["model", "build", "--kind", "mi", "--out", out]).unwrap(), 0);
        let j = read_json(&d.path().join("model-mi.json"));
        assert_eq!(j["classes"].as_array().unwrap().len(), 40);
        assert_eq!(j["gram"].as_array().unwrap().len(), 40);
        assert!(j["points"].is_array() && j["ledger"].is_array());
        assert_eq!(call(&["model", "build", "--kind", "vii", "--format", "dot", "--out", out]).unwrap(), 0);
        assert!(fs::read_to_string(d.path().join("model-vii.dot")).unwrap().starts_with("graph"));
    }

    #[test]
    fn vinberg_on_exported_graph() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().to_str().unwrap();
        assert_eq!(call(&["model", "build", "--kind", "mii", "--format", "graph", "--out", out]).unwrap(), 0);
        let g = d.path().join("model-mii-graph.json");
        assert_eq!(call(&["vinberg", "check", "--graph", g.to_str().unwrap(), "--rank", "9", "--out", out]).unwrap(), 0);
        let j = read_json(&d.path().join("vinberg.json"));
        assert_eq!(j["verdict"], true);
        assert_eq!(j["max_rank"], 8);
    }

    #[test]
    fn vinberg_input_errors() {
        let d = tempfile::tempdir().unwrap();
        let missing = d.path().join("missing.json");
        let e = call(&["vinberg", "check", "--graph", missing.to_str().unwrap(), "--rank", "9"]).unwrap_err();
        assert_eq!(error_code(&e), EXIT_IO);
        let junk = d.path().join("junk.json");
        fs::write(&junk, "{\"vertices\": 3}").unwrap();
        let e = call(&["vinberg", "check", "--graph", junk.to_str().unwrap(), "--rank", "9"]).unwrap_err();
        assert_eq!(error_code(&e), EXIT_INPUT);
    }

    #[test]
    fn pg4_enumerations() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().to_str().unwrap();
        call(&["pg4", "enumerate", "--what", "hyperovals", "--out", out]).unwrap();
        assert_eq!(read_json(&d.path().join("hyperovals.json")).as_array().unwrap().len(), 168);
        call(&["pg4", "enumerate", "--what", "mii-special", "--out", out]).unwrap();
        assert_eq!(read_json(&d.path().join("mii-special.json"))["hyperovals"].as_array().unwrap().len(), 12);
        call(&["pg4", "enumerate", "--what", "mi-base", "--out", out]).unwrap();
        assert!(!read_json(&d.path().join("mi-base.json")).as_array().unwrap().is_empty());
    }

    #[test]
    fn fib_audit() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().to_str().unwrap();
        assert_eq!(call(&["fib", "audit", "--config", "I6,I6,I6,I6", "--ambient", "k3", "--out", out]).unwrap(), 0);
        let j = read_json(&d.path().join("audit.json"));
        assert_eq!(j["report"]["torsion_order_candidates"], serde_json::json!([18]));
        assert_eq!(call(&["fib", "audit", "--config", "I6,I6,I6,I6,I6", "--out", out]).unwrap(), EXIT_CHECK_FAILED);
        let e = call(&["fib", "audit", "--config", "I6,J2"]).unwrap_err();
        assert_eq!(error_code(&e), EXIT_INPUT);
    }

    #[test]
    fn ns_verify_exports() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().to_str().unwrap();
        assert_eq!(call(&["ns", "verify", "--out", out]).unwrap(), 0);
        let j = read_json(&d.path().join("ns.json"));
        assert_eq!(j["gram42"].as_array().unwrap().len(), 42);
        let classes = j["classes"].as_array().unwrap();
        assert_eq!(classes.len(), 168);
        assert!(classes.iter().all(|c| c["norm"] == -4 && c["points"].as_array().unwrap().len() == 6));
    }
}
