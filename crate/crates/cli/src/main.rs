use clap::Parser;

fn main() {
    let cli = crowdlens_cli::Cli::parse();
    if let Err(e) = crowdlens_cli::run(cli) {
        eprintln!("crowdlens: {e}");
        std::process::exit(e.exit_code());
    }
}
