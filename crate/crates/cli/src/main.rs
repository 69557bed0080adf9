use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = poisson_bv_calc::run(std::env::args_os());
    if code == poisson_bv_calc::EXIT_OK {
        print!("{text}");
    } else {
        let _ = std::io::stdout().flush();
        if code == poisson_bv_calc::EXIT_USAGE {
            eprint!("{text}");
        } else {
            print!("{text}");
        }
    }
    ExitCode::from(code as u8)
}
