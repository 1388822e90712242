use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let out = cohact_cli::run(&args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
