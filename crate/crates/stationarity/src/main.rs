fn main() {
    std::process::exit(stationarity::cli::run());
}
