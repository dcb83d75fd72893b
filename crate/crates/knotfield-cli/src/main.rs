//! `knotfield` — command-line front end for the knotted Beltrami field
//! family on the solid toroidal annulus.
//!
//! Exit codes: 0 when every requested check passes, 1 when a mathematical
//! check fails or a written file does not survive its read-back, 2 for
//! invalid input or filesystem errors.

use std::process::exit;

use clap::{Parser, Subcommand};
use knotfield_cli::commands::{
    cmd_eval, cmd_export, cmd_fieldlines, cmd_knot, cmd_verify, cmd_zeroset,
};
use knotfield_cli::config::{
    EvalArgs, ExportArgs, FieldlinesArgs, KnotArgs, VerifyArgs, ZerosetArgs,
};

#[derive(Parser)]
#[command(
    name = "knotfield",
    version,
    about = "Beltrami fields on a toroidal annulus whose zero sets are torus knots",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Beltrami equation, divergence, metric, and transport
    /// identities over random samples and write a JSON report.
    Verify(VerifyArgs),
    /// Locate the zero set by grid scan plus refinement and certify that it
    /// is exactly the (p,q) torus knot; writes candidates CSV and a JSON
    /// report.
    Zeroset(ZerosetArgs),
    /// Integrate one field line with classical RK4 and export the curve.
    Fieldlines(FieldlinesArgs),
    /// Sample the (p,q) torus knot as a closed polyline.
    Knot(KnotArgs),
    /// Export the knot, both boundary tori, and field glyph samples for
    /// plotting.
    Export(ExportArgs),
    /// Evaluate the field, metric, and derived quantities at one point and
    /// print them as JSON.
    Eval(EvalArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version land on stdout with success; genuine parse
            // errors land on stderr with the invalid-input code.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            exit(code);
        }
    };
    let result = match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Zeroset(args) => cmd_zeroset(args),
        Command::Fieldlines(args) => cmd_fieldlines(args),
        Command::Knot(args) => cmd_knot(args),
        Command::Export(args) => cmd_export(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(true) => {}
        Ok(false) => exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code());
        }
    }
}
