use clap::Parser;
use swprofile_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("swprofile: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
