fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(stencil_spectra::cli::run(&args));
}
