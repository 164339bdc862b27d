use std::io::Write;

use clap::Parser;
use kmilnor_cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let out = run(&cli);
    if !out.is_error {
        print!("{}", out.output);
    } else {
        let _ = std::io::stdout().flush();
        eprint!("{}", out.output);
    }
    std::process::exit(out.code);
}
