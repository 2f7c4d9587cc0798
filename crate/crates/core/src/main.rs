mod cli;

use clap::Parser;

fn main() {
    let args = cli::Cli::parse();
    let code = match cli::run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code
        }
    };
    std::process::exit(code);
}
