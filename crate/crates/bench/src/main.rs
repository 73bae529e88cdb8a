use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trustrec_bench::analysis::{compare_methods, correlate_metrics, MethodRecords};
use trustrec_bench::config::{data_root_from_env, ConfigMap, ExperimentConfig, Mode};
use trustrec_bench::error::{BenchError, Result, Stage, StageExt};
use trustrec_bench::grid::{grid_search, GridSpec};
use trustrec_bench::io::{self, Sidecar};
use trustrec_bench::methods::Method;
use trustrec_bench::pipeline::{embed, persist, prepare, run_experiment, run_prepared};
use trustrec_bench::report::{emit_report, parse_report_json, ReportFormat};
use trustrec_bench::reproduce::reproduce;

/// Trust-based cold-start recommendation benchmark.
#[derive(Parser)]
#[command(name = "trustrec", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Dataset preset (filmtrust, epinions, ciao), resolved under TRUSTREC_DATA.
    #[arg(long, global = true)]
    dataset: Option<String>,
    #[arg(long, global = true)]
    ratings: Option<String>,
    #[arg(long, global = true)]
    trust: Option<String>,
    #[arg(long, global = true)]
    method: Option<String>,
    /// Method hyperparameter (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE", global = true)]
    params: Vec<String>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// validate or test
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verb {
    /// Load ratings and trust and print load reports and counts.
    LoadCheck,
    /// Print warm/cold/validation/test counts.
    Split,
    /// Compute an embedding and write it with its metadata sidecar.
    Embed {
        /// Also dump the walk corpus (walk methods only).
        #[arg(long)]
        corpus: bool,
    },
    /// Write the recommendation dump.
    Recommend,
    /// Run one experiment and print its report row.
    Evaluate,
    /// Grid search on validation users (axes from `grid.<key>` entries).
    Grid {
        /// Axis `key=v1,v2,...` (repeatable).
        #[arg(long = "axis", value_name = "KEY=V1,V2")]
        axes: Vec<String>,
    },
    /// Significance matrix and correlations from per-user metric files.
    Compare { files: Vec<PathBuf> },
    /// Render report rows (json files) as csv, json or markdown.
    Report {
        files: Vec<PathBuf>,
        #[arg(long, default_value = "markdown")]
        format: String,
    },
    /// Full study on a dataset preset.
    Reproduce { dataset: String },
}

fn config_map(c: &Common, verb: &Verb) -> Result<ConfigMap> {
    let mut map = match &c.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::default(),
    };
    if let Verb::Reproduce { dataset } = verb {
        map.set("dataset", dataset);
    }
    let flags = [
        ("dataset", c.dataset.clone()),
        ("ratings", c.ratings.clone()),
        ("trust", c.trust.clone()),
        ("method", c.method.clone()),
        ("k", c.k.map(|v| v.to_string())),
        ("n", c.n.map(|v| v.to_string())),
        ("seed", c.seed.map(|v| v.to_string())),
        ("mode", c.mode.clone()),
        ("out", c.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            map.set(key, &v);
        }
    }
    for p in &c.params {
        map.set_pair(&format!("param.{p}"))?;
    }
    if let Verb::Grid { axes } = verb {
        for a in axes {
            map.set_pair(&format!("grid.{a}"))?;
        }
    }
    for s in &c.set {
        map.set_pair(s)?;
    }
    Ok(map)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| BenchError::data(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    cfg.out.clone().ok_or_else(|| BenchError::config("this verb needs `out` (--out DIR)"))
}

fn run(cli: Cli) -> Result<()> {
    let load_cfg = || -> Result<ExperimentConfig> {
        let map = config_map(&cli.common, &cli.verb)?;
        ExperimentConfig::from_map(&map, data_root_from_env().as_deref())
    };
    match &cli.verb {
        Verb::LoadCheck => {
            let cfg = load_cfg()?;
            let p = prepare(&cfg)?;
            let d = &p.data;
            print_json(&serde_json::json!({
                "ratings": d.ratings_report,
                "trust": d.trust_report,
                "users": d.ratings.num_users(),
                "rated_users": d.ratings.num_active_users(),
                "items": d.ratings.num_items(),
                "ratings_stored": d.ratings.num_entries(),
                "trust_arcs": d.trust.num_arcs(),
                "trust_edges_undirected": p.undirected.num_edges(),
            }))
        }
        Verb::Split => {
            let cfg = load_cfg()?;
            let s = &prepare(&cfg)?.split;
            print_json(&serde_json::json!({
                "threshold": cfg.threshold,
                "warm": s.warm_users.len(),
                "cold": s.cold_users.len(),
                "validation": s.validation_users.len(),
                "test": s.test_users.len(),
            }))
        }
        Verb::Embed { corpus } => {
            let cfg = load_cfg()?;
            let dir = out_dir(&cfg)?;
            let method = Method::parse(&cfg.method, cfg.seed)?;
            if !method.is_embedding() {
                return Err(BenchError::config(format!("`{}` is not an embedding method", cfg.method.name)));
            }
            let p = prepare(&cfg)?;
            let start = std::time::Instant::now();
            let e = embed(&p, &method).stage(Stage::Embed)?.expect("embedding method");
            let secs = start.elapsed().as_secs_f64();
            std::fs::create_dir_all(&dir).map_err(|err| BenchError::io(&dir, err))?;
            let stem = cfg.method.name.clone();
            io::write_embedding(io::create_writer(&dir.join(format!("{stem}.emb")))?, &e, p.data.users())?;
            let sidecar = serde_json::to_vec_pretty(&Sidecar::new(&e.meta, secs)).map_err(|err| BenchError::data(err.to_string()))?;
            let path = dir.join(format!("{stem}.emb.json"));
            std::fs::write(&path, sidecar).map_err(|err| BenchError::io(&path, err))?;
            if *corpus {
                if let Some(c) = method.corpus(&p.undirected) {
                    io::write_corpus(io::create_writer(&dir.join(format!("{stem}.walks.txt")))?, &c?, p.data.users())?;
                }
            }
            println!("{}", dir.join(format!("{stem}.emb")).display());
            Ok(())
        }
        Verb::Recommend => {
            let cfg = load_cfg()?;
            let p = prepare(&cfg)?;
            let out = run_prepared(&p, &cfg)?;
            match &cfg.out {
                Some(dir) => {
                    for f in persist(&out, &p, &cfg, dir).stage(Stage::Write)? {
                        println!("{}", f.display());
                    }
                }
                None => {
                    let stdout = std::io::stdout();
                    io::write_recommendations(stdout.lock(), &out.recommendations, p.data.users(), p.data.ratings.item_ids())?;
                }
            }
            Ok(())
        }
        Verb::Evaluate => {
            let out = run_experiment(&load_cfg()?)?;
            print_json(&out.row)
        }
        Verb::Grid { .. } => {
            let mut cfg = load_cfg()?;
            if cli.common.mode.is_none() && !cli.common.set.iter().any(|s| s.starts_with("mode=")) {
                cfg.mode = Mode::Validate;
            }
            let grid = GridSpec::new(cfg.grid.clone())?;
            eprintln!("grid: {} point(s)", grid.size());
            let result = grid_search(&grid, &cfg)?;
            print_json(&serde_json::json!({
                "best_index": result.best_index,
                "best": result.leaderboard[result.best_index].point,
                "leaderboard": result.leaderboard,
            }))
        }
        Verb::Compare { files } => {
            let mut all = Vec::new();
            for f in files {
                all.extend(io::read_user_records(io::open_reader(f)?, &f.display().to_string())?);
            }
            let groups = MethodRecords::group(all);
            print_json(&serde_json::json!({
                "significance": compare_methods(&groups)?,
                "correlations": correlate_metrics(&groups)?,
            }))
        }
        Verb::Report { files, format } => {
            let format: ReportFormat = format.parse()?;
            let mut rows = Vec::new();
            for f in files {
                let bytes = std::fs::read(f).map_err(|e| BenchError::io(f, e))?;
                rows.extend(parse_report_json(&bytes)?);
            }
            let bytes = emit_report(&rows, format)?;
            std::io::stdout().write_all(&bytes).map_err(|e| BenchError::io("<stdout>", e))
        }
        Verb::Reproduce { .. } => {
            let cfg = load_cfg()?;
            let study = reproduce(&cfg)?;
            let md = emit_report(&study.rows, ReportFormat::Markdown)?;
            std::io::stdout().write_all(&md).map_err(|e| BenchError::io("<stdout>", e))?;
            for o in study.outcomes.iter().filter(|o| o.error.is_some()) {
                eprintln!("{}: {}", o.method, o.error.as_deref().unwrap_or_default());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
