fn main() {
    std::process::exit(treebraid::run(std::env::args().skip(1)));
}
