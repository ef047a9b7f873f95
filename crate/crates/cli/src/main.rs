use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

fn main() -> ExitCode {
    let report_dir = std::env::var_os(qtomo_cli::REPORT_DIR_ENV).map(PathBuf::from);
    let code = qtomo_cli::run_cli(std::env::args_os(), report_dir, &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
