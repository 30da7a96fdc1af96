fn main() {
    std::process::exit(lattice_akns_cli::run(std::env::args_os()));
}
