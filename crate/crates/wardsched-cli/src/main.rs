fn main() {
    eprintln!("wardsched: command-line interface not wired up yet");
    std::process::exit(2);
}
