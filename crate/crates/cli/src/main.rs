//! `tropcalc`: exact superform calculus on tropical cycles.

mod commands;
mod corpus;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use commands::Report;
use schema::{
    read, ClassSpec, ComplexSpec, CycleSpec, FormSpec, PolyhedronSpec, SymbolSpec,
    TubeSpec,
};

#[derive(Parser)]
#[command(name = "tropcalc", version, about = "Exact superform calculus on tropical cycles")]
struct Cli {
    /// Print the machine-readable value as JSON instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the balancing condition of a weighted cycle.
    CheckBalance {
        #[arg(long)]
        cycle: PathBuf,
    },
    /// Degree of a weighted zero-cycle.
    Degree {
        #[arg(long)]
        cycle: PathBuf,
    },
    /// Integrate a superform over a weighted cycle.
    Integrate {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        cycle: PathBuf,
    },
    /// Stokes residual on a polytope or on a tube piece V^I.
    Stokes {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, conflicts_with_all = ["tube", "set"])]
        region: Option<PathBuf>,
        #[arg(long, requires = "set")]
        tube: Option<PathBuf>,
        /// 1-based index set, e.g. "1,2".
        #[arg(long)]
        set: Option<String>,
    },
    /// Dimensions of the tropical Dolbeault cohomology H^{p,q}.
    Hpq {
        #[arg(long, conflicts_with = "demo")]
        complex: Option<PathBuf>,
        /// Built-in complex: point, circle, torus, tropical_line, cube.
        #[arg(long)]
        demo: Option<String>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        emit_csv: Option<PathBuf>,
    },
    /// Build and verify the Čech zig-zag of a tube's cycle class.
    CycleClass {
        #[arg(long)]
        tube: PathBuf,
        #[arg(long)]
        cover: Option<PathBuf>,
        /// Write the class (its inputs) to this file for `pair`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair a cycle class with a closed form on the base.
    Pair {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        form: PathBuf,
    },
    /// τ of a Milnor symbol as a (q,0)-form per maximal cell.
    Tau {
        #[arg(long)]
        symbol: PathBuf,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Run the regression corpus.
    Corpus {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Pairing of a tube's class with the base volume form.
    Cauchy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        m: i64,
    },
    /// Degree of a zero-cycle via the class pairing.
    Degree {
        /// Weights, e.g. "2,3".
        #[arg(long)]
        points: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let report: Report = match cli.command {
        Cmd::CheckBalance { cycle } => commands::check_balance(&read::<CycleSpec>(&cycle)?)?,
        Cmd::Degree { cycle } => commands::degree(&read::<CycleSpec>(&cycle)?)?,
        Cmd::Integrate { form, cycle } => {
            commands::integrate_cmd(&read::<FormSpec>(&form)?, &read::<CycleSpec>(&cycle)?)?
        }
        Cmd::Stokes { form, region, tube, set } => {
            let form = read::<FormSpec>(&form)?;
            match (region, tube, set) {
                (Some(r), _, _) => commands::stokes_region(&form, &read::<PolyhedronSpec>(&r)?)?,
                (None, Some(t), Some(s)) => {
                    commands::stokes_tube(&form, &read::<TubeSpec>(&t)?, &commands::parse_set(&s)?)?
                }
                _ => anyhow::bail!("stokes needs --region or --tube with --set"),
            }
        }
        Cmd::Hpq { complex, demo, p, emit_csv } => {
            let spec = match (complex, demo) {
                (Some(path), _) => read::<ComplexSpec>(&path)?,
                (None, Some(name)) => ComplexSpec::Demo { name, n: None, lo: None, hi: None },
                (None, None) => anyhow::bail!("hpq needs --complex or --demo"),
            };
            let ps = p.map(|p| vec![p]);
            let (report, table) = commands::hpq(&spec, ps.as_deref())?;
            if let Some(path) = emit_csv {
                std::fs::write(&path, commands::hpq_csv(&table))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            report
        }
        Cmd::CycleClass { tube, cover, out } => {
            let spec = ClassSpec {
                tube: read(&tube)?,
                cover: cover.map(|c| read(&c)).transpose()?,
            };
            let report = commands::cycle_class(&spec)?;
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&spec)?;
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            report
        }
        Cmd::Pair { class, form } => {
            commands::pair(&read::<ClassSpec>(&class)?, &read::<FormSpec>(&form)?)?
        }
        Cmd::Tau { symbol } => commands::tau(&read::<SymbolSpec>(&symbol)?)?,
        Cmd::Demo { which } => match which {
            Demo::Cauchy { n, q, m } => commands::demo_cauchy(n, q, m)?,
            Demo::Degree { points, n } => {
                commands::demo_degree(&commands::parse_list::<i64>(&points)?, n)?
            }
        },
        Cmd::Corpus { dir } => {
            let dir = dir.unwrap_or_else(corpus::default_dir);
            let scenarios = corpus::load_dir(&dir)?;
            let mut failed = 0;
            for s in &scenarios {
                let o = corpus::run_scenario(s);
                let tag = if o.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} [{}]: {}", o.name, s.source, o.detail);
                failed += usize::from(!o.passed);
            }
            println!("{} scenarios, {failed} failed", scenarios.len());
            return Ok(failed == 0);
        }
    };
    if cli.json {
        println!("{}", report.value);
    } else {
        print!("{}", report.text);
    }
    Ok(report.ok)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("TROPCALC_THREADS").ok().and_then(|s| s.parse().ok()) {
        // a failure here only means the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
