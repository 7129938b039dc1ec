use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = polyrec::cli::run(std::env::args_os());
    if outcome.code == 0 {
        print!("{}", outcome.text);
    } else {
        eprint!("{}", outcome.text);
    }
    ExitCode::from(outcome.code as u8)
}
