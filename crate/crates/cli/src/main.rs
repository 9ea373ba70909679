use clap::Parser;

fn main() {
    let cli = troplog_cli::Cli::parse();
    let code = troplog_cli::run(
        cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
