use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use debfresh::config::AnalysisConfig;
use debfresh::freshness::DayConvention;
use debfresh::report;
use debfresh::{Error, VersionClass};

#[derive(Parser)]
#[command(name = "debfresh", version, about = "Version classes and technical lag of Ubuntu package indices")]
struct Cli {
    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Never touch the network; serve indices from the cache only
    #[arg(long, global = true)]
    offline: bool,
    /// Directory for output files
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Seed package for dependency closures
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Use a local or remote index for a release, e.g. 22.04=jammy-Packages.gz
    #[arg(long = "index", value_name = "RELEASE=LOCATION", global = true)]
    indices: Vec<String>,
    /// Manual rule file replacing the bundled one
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Census of version classes and signatures
    Classify { release: String },
    /// Activity labels between two releases
    Pvac { release_a: String, release_b: String },
    /// Technical lag against an upstream dataset
    Libyears {
        release: String,
        /// CSV of latest upstream releases
        #[arg(long)]
        upstream: Option<PathBuf>,
        /// CSV of upstream releases matching the packaged versions
        #[arg(long)]
        packaged: Option<PathBuf>,
        #[arg(long, value_parser = ["signed", "absolute"])]
        day_convention: Option<String>,
    },
    /// Transitive dependencies of the seed package
    Closure { release: String },
    /// Parsed snapshot as TSV
    Dump { release: String },
}

fn build_config(cli: &Cli) -> debfresh::Result<AnalysisConfig> {
    let mut config = match &cli.config {
        Some(path) => AnalysisConfig::load(path)?,
        None => AnalysisConfig::default(),
    };
    config.offline |= cli.offline;
    if let Some(v) = &cli.output {
        config.output_dir = v.clone();
    }
    if let Some(v) = &cli.cache {
        config.cache_dir = Some(v.clone());
    }
    if let Some(v) = &cli.seed {
        config.seed = Some(v.clone());
    }
    if let Some(v) = &cli.rules {
        config.rules = Some(v.clone());
    }
    for spec in &cli.indices {
        let Some((release, location)) = spec.split_once('=') else {
            return Err(Error::Config(format!("--index expects RELEASE=LOCATION, got {spec:?}")));
        };
        config.releases.entry(release.to_string()).or_default().index = Some(location.to_string());
    }
    if let Command::Libyears {
        release,
        upstream,
        packaged,
        day_convention,
    } = &cli.command
    {
        if let Some(v) = upstream {
            config.upstream = Some(v.clone());
        }
        if let Some(v) = packaged {
            config.releases.entry(release.clone()).or_default().packaged = Some(v.clone());
        }
        if let Some(v) = day_convention {
            config.day_convention = v.parse::<DayConvention>().map_err(Error::Config)?;
        }
    }
    Ok(config)
}

fn run(cli: &Cli) -> debfresh::Result<()> {
    let config = build_config(cli)?;
    match &cli.command {
        Command::Classify { release } => {
            let out = report::run_classify(&config, release)?;
            println!("packages: {} ({} non-meta)", out.census.total, out.census.non_meta_total);
            for (class, n) in &out.census.class_counts {
                println!("{class}: {n}");
            }
            if out.census.count(VersionClass::Unknown) > 0 {
                log::info!("{} Unknown versions", out.census.count(VersionClass::Unknown));
            }
        }
        Command::Pvac { release_a, release_b } => {
            let r = report::run_pvac(&config, release_a, release_b)?;
            println!("evaluable: {}", r.evaluable());
            for (level, n) in &r.counts {
                println!("{level}: {n}");
            }
        }
        Command::Libyears { release, .. } => {
            let r = report::run_libyears(&config, release)?;
            println!("libyears (version delta): {:.2}", r.libyears_version_delta);
            println!("libyears (days): {}", r.libyears_days);
            println!("coverage: {}/{}", r.evaluated, r.requested);
        }
        Command::Closure { release } => {
            for name in report::run_closure(&config, release)? {
                println!("{name}");
            }
        }
        Command::Dump { release } => {
            let snapshot = report::run_dump(&config, release)?;
            println!("{} packages", snapshot.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("debfresh: {e}");
            match e {
                Error::Config(_) | Error::UnknownPackage(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
