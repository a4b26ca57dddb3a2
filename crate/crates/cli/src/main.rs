use clap::Parser;

fn main() {
    let code = match sin2jp_cli::Cli::try_parse() {
        Ok(cli) => sin2jp_cli::run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                sin2jp_cli::exit::INVALID_INPUT
            } else {
                sin2jp_cli::exit::OK
            }
        }
    };
    std::process::exit(code);
}
