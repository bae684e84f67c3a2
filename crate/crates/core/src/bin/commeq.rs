fn main() {
    std::process::exit(commeq::cli::main());
}
