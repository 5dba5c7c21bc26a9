fn main() {
    std::process::exit(clustersync_cli::run_from_args(std::env::args_os()));
}
