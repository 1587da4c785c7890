mod commands;
mod config;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::{config_err, ConfigError, ExperimentConfig, Format, Model, SweepSpec, SweepVariable, TauChoice};

#[derive(Parser, Debug)]
#[command(name = "ftlocal", version, about = "Threshold studies for the concatenated 7-qubit code with and without locality")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum)]
    model: Option<Model>,
    /// Named experiment defaults: fig3 .. fig9.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// JSON config, merged over the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps and tau scans.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Reserved. Nothing here is random, so the flag is rejected.
    #[arg(long, global = true)]
    seedless: bool,
    /// Write a gnuplot script and data file next to --out.
    #[arg(long, global = true)]
    plot: bool,
    /// Print the effective config as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[arg(long, global = true)]
    r: Option<u32>,
    /// Transit error corrections, or "optimize".
    #[arg(long, global = true)]
    tau: Option<TauChoice>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// gamma_w / gamma_else on the standard nonlocal ray.
    #[arg(long, global = true)]
    w_ratio: Option<f64>,
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"])]
    bracket: Option<Vec<f64>>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterate the map from start points along the ray.
    Flow {
        /// Start scales along the ray (comma separated or repeated).
        #[arg(long = "scale", value_delimiter = ',')]
        scales: Vec<f64>,
        /// Also solve for the unstable fixed point.
        #[arg(long)]
        fixed_point: bool,
    },
    /// Bisect the threshold along the ray.
    Threshold,
    /// Threshold and pseudothresholds of gamma_else for each gamma_w.
    ThresholdLine {
        #[arg(long = "gamma-w", value_delimiter = ',')]
        gamma_w: Vec<f64>,
    },
    /// Newton solve for the fixed point and its eigenvalues.
    FixedPoint {
        #[arg(long, value_delimiter = ',')]
        guess: Vec<f64>,
    },
    /// Scale at which one component is unchanged by a single level.
    Pseudothreshold {
        /// Location type: 1, 2, w, 1m, p (local: w1, w2, md, wd).
        #[arg(long)]
        component: Option<String>,
    },
    /// Local threshold against r, tau or epsilon.
    Sweep {
        #[arg(long, value_enum)]
        variable: Option<SweepVariable>,
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        #[arg(long = "r-values", value_delimiter = ',')]
        r_values: Vec<u32>,
    },
    /// Closed-form threshold and sparseness bound.
    Analytic {
        #[arg(long)]
        a_lc: Option<u64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        gamma0: Option<f64>,
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Location counts of the error-correction networks.
    Catalog,
}

/// Recursively overlays `patch` on `base`.
fn merge(base: &mut serde_json::Value, patch: serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(serde_json::Value::Null), v);
            }
        }
        (b, p) => *b = p,
    }
}

fn build_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    if cli.seedless {
        return Err(config_err("--seedless is reserved: no computation here uses randomness"));
    }
    let mut cfg = match &cli.preset {
        Some(p) => ExperimentConfig::preset(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let patch: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let mut value = serde_json::to_value(&cfg)?;
        merge(&mut value, patch);
        cfg = serde_json::from_value(value).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    }
    if let Some(m) = cli.model {
        cfg.model = m;
    }
    if let Some(o) = &cli.out {
        cfg.output = Some(o.clone());
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.plot |= cli.plot;
    if let Some(r) = cli.r {
        cfg.geometry.r = r;
        cfg.analytic.r = Some(u64::from(r));
    }
    if let Some(t) = cli.tau {
        cfg.geometry.tau = t;
    }
    if let Some(e) = cli.epsilon {
        cfg.geometry.epsilon = e;
    }
    if let Some(w) = cli.w_ratio {
        cfg.w_ratio = w;
    }
    if let Some(b) = &cli.bracket {
        cfg.bracket = [b[0], b[1]];
    }
    if let Some(t) = cli.rel_tol {
        cfg.rel_tol = t;
    }
    match &cli.command {
        Command::Flow { scales, fixed_point } => {
            if !scales.is_empty() {
                cfg.scales = scales.clone();
            }
            cfg.fixed_point |= fixed_point;
        }
        Command::ThresholdLine { gamma_w } if !gamma_w.is_empty() => cfg.gamma_w_grid = gamma_w.clone(),
        Command::FixedPoint { guess } if !guess.is_empty() => cfg.guess = Some(guess.clone()),
        Command::Pseudothreshold { component: Some(c) } => cfg.component = c.clone(),
        Command::Sweep { variable, grid, r_values } => {
            if let Some(v) = variable {
                let keep = cfg.sweep.as_ref().filter(|s| s.variable == *v && grid.is_empty());
                cfg.sweep = Some(match keep {
                    Some(s) => s.clone(),
                    None => SweepSpec { variable: *v, grid: grid.clone(), r_values: Vec::new() },
                });
            } else if !grid.is_empty() {
                let s = cfg.sweep.as_mut().ok_or_else(|| config_err("--grid needs --variable"))?;
                s.grid = grid.clone();
            }
            if !r_values.is_empty() {
                let s = cfg.sweep.as_mut().ok_or_else(|| config_err("--r-values needs --variable"))?;
                s.r_values = r_values.clone();
            }
        }
        Command::Analytic { a_lc, k, gamma0, levels } => {
            let a = &mut cfg.analytic;
            a.a_lc = a_lc.or(a.a_lc);
            a.k = k.unwrap_or(a.k);
            a.gamma_0 = gamma0.or(a.gamma_0);
            a.levels = levels.unwrap_or(a.levels);
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let report = match cli.command {
        Command::Flow { .. } => commands::flow(cfg)?,
        Command::Threshold => commands::threshold(cfg)?,
        Command::ThresholdLine { .. } => commands::threshold_line(cfg)?,
        Command::FixedPoint { .. } => commands::fixed_point(cfg)?,
        Command::Pseudothreshold { .. } => commands::pseudothreshold_cmd(cfg)?,
        Command::Sweep { .. } => commands::sweep(cfg)?,
        Command::Analytic { .. } => commands::analytic(cfg)?,
        Command::Catalog => commands::catalog(cfg)?,
    };
    let bytes = report.render(cfg.format)?;
    match &cfg.output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
            if cfg.plot {
                if let Some((data, script)) = report.write_plot(path)? {
                    log::info!("wrote {} and {}", data.display(), script.display());
                }
            }
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(())
}

/// 2 for configuration and domain errors, 3 for numerical failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<ftlocal::Error>() {
            return match e {
                ftlocal::Error::Domain(_) => 2,
                ftlocal::Error::Numerical(_) | ftlocal::Error::Inconsistent(_) => 3,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = build_config(&cli).and_then(|cfg| {
        if cli.dump_config {
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            return Ok(());
        }
        match cli.workers {
            Some(0) => Err(config_err("--workers must be positive")),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()?
                .install(|| run(&cli, &cfg)),
            None => run(&cli, &cfg),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
