use std::io::{stderr, stdout};

fn main() {
    let (mut out, mut err) = (stdout(), stderr());
    let code = gaplab_cli::main_with(std::env::args_os(), &mut gaplab_cli::Io {
        stdout: &mut out,
        stderr: &mut err,
    });
    std::process::exit(code);
}
