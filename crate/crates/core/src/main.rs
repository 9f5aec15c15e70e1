fn main() {
    std::process::exit(kloostat::cli::main())
}
