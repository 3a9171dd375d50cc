use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match slitsim_cli::app::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match slitsim_cli::app::run(&cli) {
        Ok(text) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("slitsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
