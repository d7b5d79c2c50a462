fn main() {
    std::process::exit(fsl_rt::cli::run(std::env::args_os()));
}
