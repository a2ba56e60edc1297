use clap::Parser;

fn main() {
    let cli = thermometry::cli::Cli::parse();
    if let Err(e) = thermometry::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
