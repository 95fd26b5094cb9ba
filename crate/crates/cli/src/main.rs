//! `qcancel`: rigidity and cancellation analysis for quantum-parameter
//! algebras, driven by JSON ring descriptions.
//!
//! Exit codes: 0 on success, 1 when a computation fails honestly (budget
//! exhausted, unsupported case, degenerate pairing), 2 on bad input
//! (malformed spec file, invalid flags, refusing to overwrite output).

mod text;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use qcancel_core::center::center;
use qcancel_core::derivation::{all_t_sets, lnd_witness, verify_locally_nilpotent};
use qcancel_core::discriminant::{classify_effectiveness, discriminant};
use qcancel_core::report::{
    center_payload, discriminant_payload, effectiveness_payload, ml_payload,
    obstruction_payload, verification_payload, ErrorReport, Report, RingSummary,
    WitnessPayload,
};
use qcancel_core::ring::Ring;
use qcancel_core::ringspec::RingSpec;
use qcancel_core::verdict::verdict;
use qcancel_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qcancel",
    version,
    about = "Decide rigidity and cancellation properties of skew polynomial rings, \
             quantum Weyl algebras, and their tensor products",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Ring description: a JSON file with spec_version, family, and
    /// parameters.
    spec: PathBuf,
    /// Output shape: human-readable text or the JSON report document.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of stdout; refuses to replace
    /// an existing file unless --bless is also given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow --out to replace an existing file.
    #[arg(long)]
    bless: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Center of the ring: exponent lattice, module rank, rectangularity.
    Center(CommonArgs),
    /// Obstruction sets T_s for every generator of a skew ring.
    Tsets(CommonArgs),
    /// The rigidity invariant: the subalgebra untouched by every locally
    /// nilpotent higher derivation.
    Ml(CommonArgs),
    /// Discriminant of the ring over its center.
    Discriminant(CommonArgs),
    /// Structural effectiveness classification of the discriminant.
    Effectiveness(CommonArgs),
    /// Construct a locally nilpotent higher derivation moving one generator.
    Witness {
        #[command(flatten)]
        common: CommonArgs,
        /// Generator to move: a name from the ring description, or a 1-based index.
        #[arg(long)]
        generator: String,
    },
    /// Construct the witness derivation for one generator and run the full
    /// verification battery on it.
    VerifyWitness {
        #[command(flatten)]
        common: CommonArgs,
        /// Generator to move: a name from the ring description, or a 1-based index.
        #[arg(long)]
        generator: String,
        /// Probe all monomials up to this total degree.
        #[arg(long, env = "QCANCEL_DEGREE_BOUND", default_value_t = 4)]
        degree_bound: u32,
        /// Check derivation components up to this index.
        #[arg(long, env = "QCANCEL_INDEX_BOUND", default_value_t = 8)]
        index_bound: usize,
    },
    /// The cancellation verdict, with the evidence behind it.
    Verdict(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Center(_) => "center",
            Command::Tsets(_) => "tsets",
            Command::Ml(_) => "ml",
            Command::Discriminant(_) => "discriminant",
            Command::Effectiveness(_) => "effectiveness",
            Command::Witness { .. } => "witness",
            Command::VerifyWitness { .. } => "verify-witness",
            Command::Verdict(_) => "verdict",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Center(c)
            | Command::Tsets(c)
            | Command::Ml(c)
            | Command::Discriminant(c)
            | Command::Effectiveness(c)
            | Command::Verdict(c) => c,
            Command::Witness { common, .. } | Command::VerifyWitness { common, .. } => common,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_name = cli.command.name();
    let common = cli.command.common();

    let (ring, sha) = match load_ring(common) {
        Ok(pair) => pair,
        Err(e) => return fail(command_name, None, common.format, &e),
    };

    let rendered = match run(&cli.command, &ring, &sha) {
        Ok(s) => s,
        Err(e) => return fail(command_name, Some(sha), common.format, &e),
    };

    match emit(common, &rendered) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(command_name, Some(sha), common.format, &e),
    }
}

fn load_ring(common: &CommonArgs) -> Result<(Ring, String)> {
    let bytes = fs::read(&common.spec).map_err(|e| {
        Error::Input(format!("cannot read {}: {e}", common.spec.display()))
    })?;
    let sha = hex_sha256(&bytes);
    let textual = String::from_utf8(bytes)
        .map_err(|_| Error::Input(format!("{} is not UTF-8", common.spec.display())))?;
    let ring = RingSpec::from_json(&textual)?.to_ring()?;
    Ok((ring, sha))
}

fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn resolve_generator(ring: &Ring, selector: &str) -> Result<usize> {
    if let Some(i) = ring.generator_names().iter().position(|n| n == selector) {
        return Ok(i);
    }
    if let Ok(idx) = selector.parse::<usize>() {
        if idx >= 1 && idx <= ring.gen_count() {
            return Ok(idx - 1);
        }
    }
    Err(Error::Input(format!(
        "unknown generator {selector:?}; expected one of {} or an index from 1 to {}",
        ring.generator_names().join(", "),
        ring.gen_count()
    )))
}

fn run(command: &Command, ring: &Ring, sha: &str) -> Result<String> {
    let name = command.name();
    let format = command.common().format;
    let summary = RingSummary::of(ring);
    match command {
        Command::Center(_) => {
            let payload = center_payload(&center(ring)?)?;
            Ok(match format {
                Format::Json => Report::new(name, sha.into(), ring, &payload).to_json(),
                Format::Text => text::center(&summary, &payload),
            })
        }
        Command::Tsets(_) => {
            let sets = all_t_sets(ring)?;
            let payload = obstruction_payload(ring, &sets);
            Ok(match format {
                Format::Json => Report::new(name, sha.into(), ring, &payload).to_json(),
                Format::Text => text::obstructions(&summary, &payload),
            })
        }
        Command::Ml(_) => {
            let payload = ml_payload(ring)?;
            Ok(match format {
                Format::Json => Report::new(name, sha.into(), ring, &payload).to_json(),
                Format::Text => text::ml(&summary, &payload),
            })
        }
        Command::Discriminant(_) => {
            let desc = center(ring)?;
            let d = discriminant(&desc)?;
            let payload = discriminant_payload(&desc, &d);
            Ok(match format {
                Format::Json => Report::new(name, sha.into(), ring, &payload).to_json(),
                Format::Text => text::discriminant(&summary, &payload),
            })
        }
        Command::Effectiveness(_) => {
            let desc = center(ring)?;
            let d = discriminant(&desc)?;
            let report = classify_effectiveness(d.normalized())?;
            let payload = effectiveness_payload(&report, &d);
            Ok(match format {
                Format::Json => Report::new(name, sha.into(), ring, &payload).to_json(),
                Format::Text => text::effectiveness(&summary, &payload),
            })
        }
        Command::Witness { generator, .. } => {
            let s = resolve_generator(ring, generator)?;
            let gen_name = ring.generator_names()[s].clone();
            let payload = match lnd_witness(ring, s)? {
                Some(w) => WitnessPayload {
                    generator: gen_name,
                    found: true,
                    first_image: Some(
                        w.derivation
                            .component_on_generator(1, s)?
                            .to_string(),
                    ),
                    witness: Some(w.witness),
                    note: None,
                },
                None => WitnessPayload {
                    generator: gen_name,
                    found: false,
                    witness: None,
                    first_image: None,
                    note: Some(
                        "the obstruction set is empty: no locally nilpotent higher \
                         derivation moves this generator"
                            .into(),
                    ),
                },
            };
            Ok(match format {
                Format::Json => Report::new(name, sha.into(), ring, &payload).to_json(),
                Format::Text => text::witness(&summary, &payload),
            })
        }
        Command::VerifyWitness { generator, degree_bound, index_bound, .. } => {
            let s = resolve_generator(ring, generator)?;
            let w = lnd_witness(ring, s)?.ok_or_else(|| {
                Error::InvalidWitness(format!(
                    "the obstruction set of generator {} is empty; there is no witness \
                     derivation to verify",
                    ring.generator_names()[s]
                ))
            })?;
            let outcome = verify_locally_nilpotent(&w.derivation, *degree_bound, *index_bound)?;
            let payload = verification_payload(
                ring.generator_names()[s].clone(),
                w.witness,
                *degree_bound,
                *index_bound,
                &outcome,
            );
            Ok(match format {
                Format::Json => Report::new(name, sha.into(), ring, &payload).to_json(),
                Format::Text => text::verification(&summary, &payload),
            })
        }
        Command::Verdict(_) => {
            let v = verdict(ring)?;
            Ok(match format {
                Format::Json => Report::new(name, sha.into(), ring, &v).to_json(),
                Format::Text => text::verdict(&summary, &v),
            })
        }
    }
}

fn emit(common: &CommonArgs, rendered: &str) -> Result<()> {
    match &common.out {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => {
            if path.exists() && !common.bless {
                return Err(Error::Input(format!(
                    "{} already exists; pass --bless to replace it",
                    path.display()
                )));
            }
            fs::write(path, rendered).map_err(|e| {
                Error::Input(format!("cannot write {}: {e}", path.display()))
            })
        }
    }
}

fn fail(command: &str, sha: Option<String>, format: Format, err: &Error) -> ExitCode {
    match format {
        Format::Json => eprint!("{}", ErrorReport::from_error(command, sha, err).to_json()),
        Format::Text => eprintln!("error: {err}"),
    }
    if err.is_input_error() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}
