use clap::Parser;

fn main() {
    let cli = fracfield_cli::Cli::parse();
    match fracfield_cli::run(cli) {
        Ok(summary) => println!("{summary}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.code());
        }
    }
}
