//! `mvrp` — cluster-first route-second solver for the multiple vehicle
//! routing problem.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use mvrp_cli::config::Overrides;
use mvrp_cli::pipeline::{
    digest_bytes, instance_digest, run_bench, solve_instance, Algorithm, BenchSource, BenchSpec,
};
use mvrp_cli::report::SolveReport;
use mvrp_cli::{plot, CliError};

use mvrp_core::instance::{
    generate_random_instance, read_instance, write_instance, City, Instance,
};
use mvrp_core::milp::{build_model, export_lp};
use mvrp_core::trace::Trace;

#[derive(Parser)]
#[command(name = "mvrp", version, about = "multiple vehicle routing solver toolkit")]
struct Cli {
    /// Master random seed; every randomized stage derives a sub-seed from it
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory for generated reports, traces and plots
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// key=value overrides file (see README for keys)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file
    Gen {
        /// number of cities (depot included)
        #[arg(short)]
        n: usize,
        /// side length of the square the cities are drawn from
        #[arg(long, default_value_t = 35.0)]
        side: f64,
        /// 1-based position of the depot city
        #[arg(long, default_value_t = 1)]
        depot: u32,
        /// output file (defaults to <out-dir>/instance.txt)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster an instance and optimize one tour per vehicle
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// number of vehicles / clusters
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Algorithm::Ga)]
        algorithm: Algorithm,
    },
    /// Compare algorithms over seeds with shared per-seed clustering
    Bench {
        /// fixed instance file (alternative to the generator flags)
        #[arg(long, conflicts_with_all = ["gen_n"])]
        instance: Option<PathBuf>,
        /// generate a fresh instance per seed with this many cities
        #[arg(long)]
        gen_n: Option<usize>,
        #[arg(long, default_value_t = 35.0)]
        gen_side: f64,
        #[arg(long, default_value_t = 1)]
        gen_depot: u32,
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "ga,sa,tabu")]
        algorithms: Vec<Algorithm>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
        seeds: Vec<u64>,
    },
    /// Render convergence curves and/or a route map as SVG
    Plot {
        /// trace CSV files; one convergence SVG is emitted per file
        #[arg(long)]
        trace: Vec<PathBuf>,
        /// solve report for the route map (requires --instance)
        #[arg(long, requires = "instance")]
        report: Option<PathBuf>,
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Export the time-indexed 0/1 model in LP format
    ExportLp {
        #[arg(long)]
        instance: PathBuf,
        /// cluster the instance first and export one cluster's sub-model
        #[arg(short)]
        k: Option<usize>,
        /// cluster index to export (with -k)
        #[arg(long, default_value_t = 0)]
        cluster: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = match &cli.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    std::fs::create_dir_all(&cli.out_dir)?;

    match cli.command {
        Command::Gen { n, side, depot, out } => {
            let inst = generate_random_instance(n, side, depot, cli.seed)?;
            let path = out.unwrap_or_else(|| cli.out_dir.join("instance.txt"));
            write_instance(&inst, &path)?;
            println!("{} {}", path.display(), instance_digest(&inst));
            Ok(())
        }
        Command::Solve { instance, k, algorithm } => {
            let bytes = std::fs::read(&instance)?;
            let inst = mvrp_core::instance::parse_instance(
                std::str::from_utf8(&bytes)
                    .map_err(|_| CliError::Usage("instance file is not UTF-8".into()))?,
            )?;
            let outcome =
                solve_instance(&inst, digest_bytes(&bytes), k, algorithm, cli.seed, &overrides)?;
            for (vehicle, trace) in outcome.report.vehicles.iter().zip(&outcome.traces) {
                trace.write_csv(&cli.out_dir.join(&vehicle.trace))?;
            }
            let report_path = cli.out_dir.join("report.json");
            std::fs::write(&report_path, outcome.report.to_json())?;
            println!(
                "{} total_distance {}",
                report_path.display(),
                outcome.report.total_distance
            );
            Ok(())
        }
        Command::Bench { instance, gen_n, gen_side, gen_depot, k, algorithms, seeds } => {
            let source = match (instance, gen_n) {
                (Some(path), None) => BenchSource::File(path),
                (None, Some(n)) => BenchSource::Generator { n, side: gen_side, depot: gen_depot },
                (None, None) => {
                    return Err(CliError::Usage("bench needs --instance or --gen-n".into()))
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let spec = BenchSpec { source, k, algorithms, seeds };
            let results = run_bench(&spec, &overrides)?;
            for cell in &results.cells {
                if let Some(err) = &cell.error {
                    eprintln!("warning: {} seed {} failed: {err}", cell.algorithm, cell.seed);
                }
            }
            std::fs::write(cli.out_dir.join("bench.csv"), results.to_csv())?;
            let table = results.to_table();
            std::fs::write(cli.out_dir.join("bench.txt"), &table)?;
            print!("{table}");
            Ok(())
        }
        Command::Plot { trace, report, instance } => {
            if trace.is_empty() && report.is_none() {
                return Err(CliError::Usage("plot needs --trace and/or --report".into()));
            }
            for path in &trace {
                let t = Trace::read_csv(path)?;
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .ok_or_else(|| CliError::Usage(format!("bad trace path {}", path.display())))?;
                let svg = plot::convergence_svg(&t, stem)?;
                let out = cli.out_dir.join(format!("{stem}.svg"));
                std::fs::write(&out, svg)?;
                println!("{}", out.display());
            }
            if let Some(report_path) = report {
                let inst_path = instance.expect("clap requires --instance with --report");
                let inst = read_instance(&inst_path)?;
                let rep = SolveReport::from_json(&std::fs::read_to_string(&report_path)?)?;
                let svg = plot::route_map_svg(&inst, &rep)?;
                let out = cli.out_dir.join("route_map.svg");
                std::fs::write(&out, svg)?;
                println!("{}", out.display());
            }
            Ok(())
        }
        Command::ExportLp { instance, k, cluster, out } => {
            let inst = read_instance(&instance)?;
            let sub = match k {
                None => relabel(&inst, &inst.non_depot_ids())?,
                Some(k) => {
                    let asg = mvrp_core::clustering::kmeans(
                        &inst,
                        k,
                        mvrp_core::seed::derive_seed(cli.seed, "kmeans", 0),
                        overrides.kmeans_max_iter()?,
                        overrides.kmeans_restarts()?,
                        overrides.kmeans_init()?,
                    )?;
                    if cluster >= k {
                        return Err(CliError::Usage(format!(
                            "cluster index {cluster} out of range 0..{k}"
                        )));
                    }
                    relabel(&inst, &asg.members(&inst, cluster))?
                }
            };
            let dm = mvrp_core::build_distance_matrix(&sub);
            let model = build_model(&sub, &dm)?;
            if model.variable_count() > 1_000_000 {
                eprintln!(
                    "warning: model has {} binary variables; the LP file will be large",
                    model.variable_count()
                );
            }
            export_lp(&model, &out)?;
            println!("{} variables {}", out.display(), model.variable_count());
            Ok(())
        }
    }
}

/// Sub-instance of the depot plus the given cities, relabeled 1..n with
/// the depot as city 1 and the rest in instance order.
fn relabel(inst: &Instance, cluster: &[u32]) -> Result<Instance, CliError> {
    if cluster.is_empty() {
        return Err(CliError::Usage("cluster has no cities; the model needs n >= 2".into()));
    }
    let depot = inst.depot();
    let mut cities = vec![City { id: 1, x: depot.x, y: depot.y }];
    for (idx, &id) in cluster.iter().enumerate() {
        let c = inst
            .city(id)
            .ok_or_else(|| CliError::Usage(format!("unknown city id {id} in cluster")))?;
        cities.push(City { id: idx as u32 + 2, x: c.x, y: c.y });
    }
    Ok(Instance::new(cities, 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvrp_core::instance::instance_to_string;

    #[test]
    fn relabel_puts_depot_first() {
        let inst = generate_random_instance(5, 10.0, 3, 1).unwrap();
        let sub = relabel(&inst, &[1, 5]).unwrap();
        assert_eq!(sub.depot_id(), 1);
        assert_eq!(sub.cities().len(), 3);
        assert_eq!(sub.cities()[0].x, inst.depot().x);
        assert_eq!(sub.cities()[1].x, inst.city(1).unwrap().x);
        assert_eq!(sub.cities()[2].x, inst.city(5).unwrap().x);
    }

    #[test]
    fn relabel_rejects_empty_cluster() {
        let inst = generate_random_instance(5, 10.0, 3, 1).unwrap();
        assert!(relabel(&inst, &[]).is_err());
    }

    #[test]
    fn instance_to_string_is_what_gen_writes() {
        // gen's printed digest hashes the same bytes solve later reads
        let inst = generate_random_instance(4, 10.0, 2, 9).unwrap();
        let text = instance_to_string(&inst);
        assert_eq!(digest_bytes(text.as_bytes()), instance_digest(&inst));
    }
}
