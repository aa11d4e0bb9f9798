use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmds;
mod output;

use cmds::Outcome;

/// Experiments for energy- and kurtosis-bounded amplitude shaping: set
/// statistics, moment tables, design-frontier sweeps, frame-error-rate
/// Monte Carlo, bijection verification, and link-model calibration.
#[derive(Parser, Debug)]
#[command(name = "klss", version)]
struct Cli {
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact statistics of one shaping set
    Stats(cmds::stats::Args),
    /// Fourth-moment tables across blocklengths and rates
    Kurtosis(cmds::kurtosis::Args),
    /// The (e_max, k_max) design frontier at a fixed rate
    Sweep(cmds::sweep::Args),
    /// Monte-Carlo frame error rate over an SNR or launch-power grid
    Fer(cmds::fer::Args),
    /// Verify the index <-> sequence bijection
    Roundtrip(cmds::roundtrip::Args),
    /// Fit link-model sensitivities to prescribed SNR penalties
    Calibrate(cmds::calibrate::Args),
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`klss sweep ... | head`) instead of
    // panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Exit code 2 is reserved for verification failures; usage
            // errors exit 1, help/version exit 0.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    let outcome = match cli.cmd {
        Cmd::Stats(args) => cmds::stats::run(args, json),
        Cmd::Kurtosis(args) => cmds::kurtosis::run(args, json),
        Cmd::Sweep(args) => cmds::sweep::run(args, json),
        Cmd::Fer(args) => cmds::fer::run(args, json),
        Cmd::Roundtrip(args) => cmds::roundtrip::run(args, json),
        Cmd::Calibrate(args) => cmds::calibrate::run(args, json),
    };
    match outcome {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
