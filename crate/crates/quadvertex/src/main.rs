use clap::Parser;

fn main() {
    let cli = quadvertex::cli::Cli::parse();
    if let Some(jobs) = cli.jobs {
        // results are worker-count independent; this only sizes the pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    std::process::exit(quadvertex::cli::run(&cli));
}
