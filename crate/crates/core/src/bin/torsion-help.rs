fn main() {
    std::process::exit(torsion_help::cli::main());
}
