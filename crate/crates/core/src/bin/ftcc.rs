//! Command-line surface: catalog listing, code/circuit emission and the
//! verification drivers, all producing machine-readable JSON reports.
//!
//! Exit codes: 0 pass, 1 claim failure, 2 usage/config error, 3 budget
//! exceeded.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ftcc::circuit::{BlockLayout, Circuit};
use ftcc::code::{BaseCode, CodeFile, StabilizerCode, TypeFilter, DEFAULT_ENUM_BUDGET};
use ftcc::concat::{assemble_gate_plan, lift_gadget, overall_distance_check, ConcatCode, ConcatSpec};
use ftcc::error::FtccError;
use ftcc::ft::witness::effective_distance;
use ftcc::ft::{correctable, CorrectableOptions, LookupTables, Mode, VerifyContext};
use ftcc::gadget::{build_ckz_gadget, build_cross_code_cnot, build_permutation_h_5q, ActiveSet};
use ftcc::report::{catalog, claimed_distance, gate_kind, run_cell, run_table1};
use ftcc::sv::{logical_equiv, logical_target};

#[derive(Parser)]
#[command(name = "ftcc", version, about = "Concatenated-code construction and fault-tolerance verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArg {
    /// Write the JSON/text artifact here (atomic); stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List base codes and the named concatenated codes with qubit counts.
    Catalog {
        #[command(flatten)]
        output: OutputArg,
    },
    /// Emit a base code as a JSON code file (validated).
    BuildCode {
        /// five_qubit | steane | rm15
        #[arg(long)]
        code: Option<String>,
        /// Validate an existing JSON code file instead.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Build a named concatenated code and emit it with its qubit map.
    Concat {
        /// Catalog name, e.g. hcc-steane-1 or enucc-five_qubit-3.
        #[arg(long)]
        spec: Option<String>,
        /// JSON spec file: {scheme, c1, case, assignment_overrides?}.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Emit a gate gadget as circuit text (base-level or lifted).
    Gadget {
        /// Base code for a bare gadget (five_qubit | steane).
        #[arg(long)]
        code: Option<String>,
        /// Catalog spec name for a lifted gadget.
        #[arg(long)]
        spec: Option<String>,
        /// Gate: H | K | T | S | CZ | CCZ.
        #[arg(long)]
        gate: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Run one verification check.
    Verify {
        /// distance | gadget-equiv | effective-distance | cross-code-cnot
        #[arg(long)]
        check: String,
        #[arg(long)]
        code: Option<String>,
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        gate: Option<String>,
        /// Claimed effective distance (defaults to the published value).
        #[arg(long)]
        claimed: Option<usize>,
        /// Exhaustive weight cap for distance sweeps.
        #[arg(long, default_value_t = 4)]
        wmax: usize,
        #[arg(long, default_value_t = ftcc::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// exhaustive | sampled (advisory; t <= 2 always runs exhaustive)
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Piece count for cross-code CNOT checks.
        #[arg(long)]
        pieces: Option<usize>,
        /// Also confirm the cross-code CNOT on the dense oracle.
        #[arg(long, default_value_t = false)]
        sv: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Reproduce the full effective-distance table.
    Table1 {
        #[arg(long, default_value_t = ftcc::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[command(flatten)]
        output: OutputArg,
    },
}

fn emit(output: &OutputArg, content: &str) -> Result<(), FtccError> {
    match &output.out {
        None => {
            println!("{content}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            {
                let mut f = std::fs::File::create(&tmp)?;
                f.write_all(content.as_bytes())?;
                f.write_all(b"\n")?;
                f.sync_all()?;
            }
            std::fs::rename(&tmp, path)?;
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, FtccError> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn exit_code_for(err: &FtccError) -> i32 {
    match err {
        FtccError::BudgetExceeded(_) | FtccError::SvBudget { .. } => 3,
        _ => 2,
    }
}

fn load_code(name: &str) -> Result<StabilizerCode, FtccError> {
    if let Ok(base) = BaseCode::parse(name) {
        return Ok(StabilizerCode::base(base));
    }
    let spec = ConcatSpec::parse_name(name)?;
    Ok(ConcatCode::build(&spec)?.code)
}

fn bare_gadget(sc: &StabilizerCode, gate: &str) -> Result<(Circuit, Vec<BlockLayout>, usize), FtccError> {
    let (k, theta) = match gate {
        "T" => (0usize, std::f64::consts::FRAC_PI_4),
        "S" => (0, std::f64::consts::FRAC_PI_2),
        "CZ" => (1, std::f64::consts::PI),
        "CCZ" => (2, std::f64::consts::PI),
        other => return Err(FtccError::Usage(format!("no bare gadget builder for {other}"))),
    };
    let active = match sc.name.as_str() {
        "steane" => ActiveSet::new(vec![0, 1, 6], 6),
        "five_qubit" => ActiveSet::new(vec![0, 2, 4], 2),
        _ => {
            return Err(FtccError::Usage(
                "bare gadgets are built on steane or five_qubit".into(),
            ))
        }
    };
    let sets = vec![active; k + 1];
    let g = build_ckz_gadget(sc, k, theta, Some(&sets))?;
    let blocks: Vec<BlockLayout> = (0..=k)
        .map(|b| BlockLayout { code: sc.clone(), offset: b * sc.n })
        .collect();
    Ok((g.full, blocks, k))
}

fn run(cli: Cli) -> Result<i32, FtccError> {
    match cli.command {
        Command::Catalog { output } => {
            let entries = catalog()?;
            emit(&output, &json(&entries)?)?;
            Ok(0)
        }
        Command::BuildCode { code, file, output } => {
            let code = match (code, file) {
                (Some(name), None) => load_code(&name)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)?;
                    let file: CodeFile = serde_json::from_str(&text)?;
                    file.into_code()?
                }
                _ => {
                    return Err(FtccError::Usage(
                        "build-code takes exactly one of --code / --file".into(),
                    ))
                }
            };
            emit(&output, &json(&CodeFile::from_code(&code))?)?;
            Ok(0)
        }
        Command::Concat { spec, file, output } => {
            let spec = match (spec, file) {
                (Some(name), None) => ConcatSpec::parse_name(&name)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)?;
                    let f: ftcc::concat::ConcatSpecFile = serde_json::from_str(&text)?;
                    f.into_spec()?
                }
                _ => {
                    return Err(FtccError::Usage(
                        "concat takes exactly one of --spec / --file".into(),
                    ))
                }
            };
            let cc = ConcatCode::build(&spec)?;
            #[derive(serde::Serialize)]
            struct ConcatOut {
                scheme: String,
                case: u8,
                code: CodeFile,
                qubit_map: Vec<(usize, usize)>,
            }
            let out = ConcatOut {
                scheme: spec.scheme.as_str().into(),
                case: spec.case_tag,
                code: CodeFile::from_code(&cc.code),
                qubit_map: cc.composite.qubit_map[0].iter().map(|r| (r.start, r.end)).collect(),
            };
            emit(&output, &json(&out)?)?;
            Ok(0)
        }
        Command::Gadget { code, spec, gate, output } => {
            let circuit: Circuit = match (code, spec) {
                (Some(base), None) => {
                    let sc = load_code(&base)?;
                    if gate == "H" && sc.name == "five_qubit" {
                        build_permutation_h_5q()?.circuit
                    } else {
                        bare_gadget(&sc, &gate)?.0
                    }
                }
                (None, Some(spec_name)) => {
                    let spec = ConcatSpec::parse_name(&spec_name)?;
                    let kind = gate_kind(&gate)?;
                    let plan = assemble_gate_plan(&spec, &kind)?;
                    lift_gadget(&spec, &plan)?.circuit
                }
                _ => {
                    return Err(FtccError::Usage(
                        "gadget takes exactly one of --code / --spec".into(),
                    ))
                }
            };
            emit(&output, circuit.to_text().trim_end())?;
            Ok(0)
        }
        Command::Verify {
            check,
            code,
            spec,
            gate,
            claimed,
            wmax,
            seed,
            samples,
            mode,
            pieces,
            sv,
            output,
        } => match check.as_str() {
            "distance" => {
                let name = code.ok_or_else(|| FtccError::Usage("--code required".into()))?;
                let budget_partial = |e: FtccError| -> Result<i32, FtccError> {
                    if matches!(e, FtccError::BudgetExceeded(_)) {
                        #[derive(serde::Serialize)]
                        struct Partial {
                            toolkit_version: String,
                            code: String,
                            w_max: usize,
                            exhaustive_complete: bool,
                            error: String,
                        }
                        let p = Partial {
                            toolkit_version: ftcc::VERSION.into(),
                            code: name.clone(),
                            w_max: wmax,
                            exhaustive_complete: false,
                            error: e.to_string(),
                        };
                        emit(&output, &json(&p)?)?;
                        return Ok(3);
                    }
                    Err(e)
                };
                if let Ok(cspec) = ConcatSpec::parse_name(&name) {
                    let cc = ConcatCode::build(&cspec)?;
                    match overall_distance_check(&cc, wmax, DEFAULT_ENUM_BUDGET) {
                        Ok(report) => {
                            let pass = report.found_below.is_none();
                            emit(&output, &json(&report)?)?;
                            return Ok(if pass { 0 } else { 1 });
                        }
                        Err(e) => return budget_partial(e),
                    }
                }
                let sc = load_code(&name)?;
                match ftcc::report::run_distance(&sc, wmax, TypeFilter::Any, DEFAULT_ENUM_BUDGET) {
                    Ok(report) => {
                        let found = report.min_logical_weight;
                        emit(&output, &json(&report)?)?;
                        Ok(if sc.claimed_distance.is_none() || found == sc.claimed_distance {
                            0
                        } else {
                            1
                        })
                    }
                    Err(e) => budget_partial(e),
                }
            }
            "gadget-equiv" => {
                let name = code.ok_or_else(|| FtccError::Usage("--code required".into()))?;
                let gate = gate.ok_or_else(|| FtccError::Usage("--gate required".into()))?;
                let sc = load_code(&name)?;
                let kind = gate_kind(&gate)?;
                let (circuit, blocks, k) = if gate == "H" && sc.name == "five_qubit" {
                    let ph = build_permutation_h_5q()?;
                    (ph.circuit, vec![BlockLayout { code: sc.clone(), offset: 0 }], 0usize)
                } else {
                    bare_gadget(&sc, &gate)?
                };
                let rep = logical_equiv(&circuit, &blocks, &logical_target(&kind, k + 1))?;
                #[derive(serde::Serialize)]
                struct EquivOut {
                    toolkit_version: String,
                    code: String,
                    gate: String,
                    equivalent: bool,
                    fidelity: f64,
                    phase: f64,
                }
                let out = EquivOut {
                    toolkit_version: ftcc::VERSION.into(),
                    code: sc.name.clone(),
                    gate,
                    equivalent: rep.equivalent,
                    fidelity: rep.fidelity,
                    phase: rep.phase,
                };
                emit(&output, &json(&out)?)?;
                Ok(if rep.equivalent { 0 } else { 1 })
            }
            "effective-distance" => {
                let spec_name = spec.ok_or_else(|| FtccError::Usage("--spec required".into()))?;
                let gate = gate.ok_or_else(|| FtccError::Usage("--gate required".into()))?;
                let spec = ConcatSpec::parse_name(&spec_name)?;
                let _ = mode;
                match claimed {
                    None => {
                        let cell = run_cell(&spec, &gate, seed, samples)?;
                        let pass = !matches!(cell.outcome, ftcc::report::CellOutcome::Fail);
                        emit(&output, &json(&cell)?)?;
                        Ok(if pass { 0 } else { 1 })
                    }
                    Some(claimed) => {
                        if claimed_distance(&spec.name, &gate).is_none() {
                            return Err(FtccError::Inapplicable {
                                gate,
                                code: spec.name,
                                reason: "cell is marked inapplicable".into(),
                            });
                        }
                        let kind = gate_kind(&gate)?;
                        let plan = assemble_gate_plan(&spec, &kind)?;
                        let lifted = lift_gadget(&spec, &plan)?;
                        let ctx = VerifyContext::from_composite(&lifted.composite);
                        let tables = LookupTables::new();
                        let r = effective_distance(
                            &ctx,
                            &lifted.circuit,
                            &tables,
                            claimed,
                            seed,
                            samples,
                        )?;
                        let pass = r.pass;
                        emit(&output, &json(&r)?)?;
                        Ok(if pass { 0 } else { 1 })
                    }
                }
            }
            "cross-code-cnot" => {
                let control =
                    code.ok_or_else(|| FtccError::Usage("--code (control) required".into()))?;
                let target_name = spec
                    .or(gate)
                    .ok_or_else(|| FtccError::Usage("--spec names the target code".into()))?;
                let c = load_code(&control)?;
                let t = load_code(&target_name)?;
                let pieces = pieces.unwrap_or_else(|| ftcc::gadget::default_piece_count(&c, &t));
                let plan = build_cross_code_cnot(&c, &t, pieces)?;
                let n = c.n + t.n;
                let circuit = plan.emit(n, 0, c.n, 0, 1, true);
                let blocks = vec![
                    BlockLayout { code: c.clone(), offset: 0 },
                    BlockLayout { code: t.clone(), offset: c.n },
                ];
                let ctx = VerifyContext::from_blocks(&blocks);
                let tables = LookupTables::new();
                let rep = correctable(
                    &ctx,
                    &circuit,
                    &tables,
                    &CorrectableOptions { t: 1, mode: Mode::Exhaustive },
                )?;
                let mut sv_fidelity = None;
                let mut sv_ok = true;
                if sv {
                    let bare = plan.emit(n, 0, c.n, 0, 1, false);
                    let mut stripped = Circuit::new(n);
                    for g in bare.gates.iter().filter(|g| !g.kind.is_marker()) {
                        stripped.push(g.kind.clone(), g.supports.clone());
                    }
                    let r = logical_equiv(
                        &stripped,
                        &blocks,
                        &logical_target(&ftcc::circuit::GateKind::Cnot, 2),
                    )?;
                    sv_fidelity = Some(r.fidelity);
                    sv_ok = r.equivalent;
                }
                #[derive(serde::Serialize)]
                struct CrossOut {
                    toolkit_version: String,
                    code: String,
                    gate: String,
                    seed: u64,
                    cnots: usize,
                    pieces: usize,
                    single_fault_tolerant: bool,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    sv_fidelity: Option<f64>,
                    correctability: ftcc::ft::CorrectabilityReport,
                }
                let pass = rep.verdict.is_correctable() && sv_ok;
                let out = CrossOut {
                    toolkit_version: ftcc::VERSION.into(),
                    code: format!("{}->{}", c.name, t.name),
                    gate: "CNOT".into(),
                    seed,
                    cnots: plan.cnots.len(),
                    pieces: plan.pieces.len(),
                    single_fault_tolerant: rep.verdict.is_correctable(),
                    sv_fidelity,
                    correctability: rep,
                };
                emit(&output, &json(&out)?)?;
                Ok(if pass { 0 } else { 1 })
            }
            other => Err(FtccError::Usage(format!("unknown check {other:?}"))),
        },
        Command::Table1 { seed, samples, output } => {
            let report = run_table1(seed, samples)?;
            let pass = report.all_pass;
            emit(&output, &json(&report)?)?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}
