use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use virtmod::arith::RingTag;
use virtmod_cli::{
    cmd_analyze, cmd_embeds, cmd_ks, cmd_ring, cmd_snf, cmd_validate, read_input, render_validation, CliError,
};

/// Structure and virtual semisimplicity of finitely generated modules over Z, F_p[x],
/// Q[x] and matrix rings over them.
#[derive(Debug, Parser)]
#[command(name = "virtmod", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Ring for inputs that do not name one: int, qx or fpx:<p> (also Z, Q[x], F<p>[x]).
    #[arg(long, global = true)]
    ring: Option<RingTag>,
    /// Largest group order the brute-force oracle accepts.
    #[arg(long, global = true, env = "VIRTMOD_ORACLE_BOUND")]
    bound: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structure, predicate verdicts and decomposition of a module.
    Analyze { file: String },
    /// Smith normal form of a matrix or of a presentation's relations.
    Snf { file: String },
    /// Whether the first module embeds in the second.
    Embeds { left: String, right: String },
    /// Pairs up two lists of virtually simple modules with isomorphic sums.
    Ks { left: String, right: String },
    /// Report on a finite product of matrix rings.
    Ring { file: String },
    /// Compares a fast predicate with the oracle on all groups up to an order.
    Validate { predicate: String, order: usize },
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{}", text(value));
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let ring = cli.ring;
    match &cli.command {
        Command::Analyze { file } => {
            let r = cmd_analyze(&read_input(file)?, ring)?;
            emit(cli.json, &r, |r| r.render());
        }
        Command::Snf { file } => {
            let r = cmd_snf(&read_input(file)?, ring)?;
            emit(cli.json, &r, |r| r.render());
        }
        Command::Embeds { left, right } => {
            let r = cmd_embeds(&read_input(left)?, &read_input(right)?, ring)?;
            emit(cli.json, &r, |r| format!("{} embeds in {}: {}\n", r.left.text, r.right.text, r.embeds));
        }
        Command::Ks { left, right } => {
            let r = cmd_ks(&read_input(left)?, &read_input(right)?, ring)?;
            emit(cli.json, &r, |r| {
                let mut out = String::from("isomorphic sums; pairing:\n");
                for (i, j) in &r.pairing {
                    out += &format!("  left[{i}] {} <-> right[{j}] {}\n", r.left[*i].text, r.right[*j].text);
                }
                out + &format!("verified: {}\n", r.verified)
            });
        }
        Command::Ring { file } => {
            let r = cmd_ring(&read_input(file)?)?;
            emit(cli.json, &r, |r| r.render());
        }
        Command::Validate { predicate, order } => {
            let r = cmd_validate(predicate, *order, cli.bound)?;
            emit(cli.json, &r, render_validation);
            if !r.mismatches.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
