//! Thin binary wrapper around the library's command-line front end.

fn main() {
    std::process::exit(sqbath::cli::main_entry(std::env::args_os()));
}
