use std::process::ExitCode;

fn main() -> ExitCode {
    qcone_cli::cli_main()
}
