use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use freezetag::generate::{generate_instance, Profile};
use freezetag::io::{instance_from_file, load_instance, load_schedule, schedule_to_json, Instance, LoadError};
use freezetag::oracle::{optimal_makespan, ORACLE_CAP};
use freezetag::ptas::PtasError;
use freezetag::svg::{render_svg, Overlay};
use freezetag::tree::tree_schedule;
use freezetag::{
    build_visibility_graph, greedy_spanner, place_steiner, solve_cfa, solve_ptas, validate_schedule, GeodesicEngine,
    GeodesicMetric, Metric, PtasOptions, RobotSet64, Schedule64, TravelTable,
};

#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Bound(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Bound(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Validation(m) => write!(f, "validation error: {m}"),
            Failure::Bound(m) => write!(f, "bound violation: {m}"),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Validation(format!("[{}] {e}", e.code()))
    }
}

type Outcome = Result<(), Failure>;

fn invalid(e: impl fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "freezetag",
    version,
    about = "Wake a swarm of robots inside a polygon with holes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Cfa,
    Ptas,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Geodesic,
    Visibility,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Geodesic => Metric::Geodesic,
            MetricArg::Visibility => Metric::Visibility,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Convex,
    Lshape,
    RandomOrthogonal,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Convex => Profile::Convex,
            ProfileArg::Lshape => Profile::LShape,
            ProfileArg::RandomOrthogonal => Profile::RandomOrthogonal,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute a wake-up schedule for an instance.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "cfa")]
        algo: Algo,
        /// Defaults to the instance's metric tag, else geodesic.
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        /// Grid size for ptas.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Spanner stretch for cfa.
        #[arg(long, default_value_t = 6.0)]
        t: f64,
        /// Cone count for convex pixels in ptas.
        #[arg(long, default_value_t = 9)]
        k: usize,
        /// Maximum depth of the representative tree in ptas.
        #[arg(long)]
        depth_cap: Option<usize>,
        /// Schedule output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a schedule file against an instance.
    Verify { instance: PathBuf, schedule: PathBuf },
    /// Write a random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        holes: usize,
        #[arg(long, value_enum, default_value = "lshape")]
        profile: ProfileArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw an instance as SVG.
    Render {
        instance: PathBuf,
        /// Schedule whose wake tree is drawn.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Draw the greedy spanner over robots and Steiner robots.
        #[arg(long)]
        spanner: bool,
        /// Draw the geodesic path between two robot ids.
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        path: Option<Vec<usize>>,
        #[arg(long, default_value_t = 6.0)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Instance and solver statistics as JSON.
    Stats {
        instance: PathBuf,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        #[arg(long, default_value_t = 6.0)]
        t: f64,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pick_metric(flag: Option<MetricArg>, inst: &Instance) -> Metric {
    flag.map(Metric::from).or(inst.metric).unwrap_or(Metric::Geodesic)
}

fn check_valid(schedule: &Schedule64, robots: &RobotSet64, inst: &Instance) -> Outcome {
    let violations = validate_schedule(schedule, robots, &inst.domain);
    if violations.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Err(Failure::Bound(format!(
        "solver produced an invalid schedule: {}",
        list.join("; ")
    )))
}

fn solve(
    inst: &Instance,
    algo: Algo,
    metric: Metric,
    t: f64,
    opts: PtasOptions,
) -> Result<(Schedule64, RobotSet64, Value), Failure> {
    let s = &inst.robots;
    match algo {
        Algo::Cfa => {
            let run = solve_cfa(&inst.domain, s, t, metric).map_err(invalid)?;
            check_valid(&run.schedule, &run.robots, inst)?;
            let factor = run.spanner.awakening_factor();
            if metric == Metric::Geodesic {
                let gm = GeodesicMetric::new(&run.robots.points(), &inst.domain).map_err(invalid)?;
                for i in 0..s.len() {
                    let limit = factor * gm.distance(s.source(), i);
                    if run.schedule.wake_times[i] > limit + 1e-9 {
                        return Err(Failure::Bound(format!(
                            "robot {i} wakes at {} > {limit}",
                            run.schedule.wake_times[i]
                        )));
                    }
                }
            }
            let extra = json!({
                "steiner": run.robots.steiner_count(),
                "t_target": run.spanner.t_target,
                "t_measured": run.spanner.t_measured,
                "k_measured": run.spanner.k_measured,
            });
            Ok((run.schedule, run.robots, extra))
        }
        Algo::Ptas => {
            let run = solve_ptas(&inst.domain, s, metric, opts).map_err(|e| match e {
                PtasError::TooManyRepresentatives { .. } => Failure::Validation(format!("size cap: {e}")),
                other => invalid(other),
            })?;
            check_valid(&run.schedule, s, inst)?;
            let extra = json!({
                "pixels": run.pixels.len(),
                "representatives": run.tree.len(),
                "tree_depth": run.tree.depth,
                "tree_makespan": run.tree.makespan,
            });
            Ok((run.schedule, s.clone(), extra))
        }
        Algo::Exact => {
            let res = optimal_makespan(s, metric, &inst.domain).map_err(invalid)?;
            let table = TravelTable::new(&s.points(), GeodesicEngine::new(&inst.domain), metric).map_err(invalid)?;
            let schedule = tree_schedule(&res.witness, s, &table);
            check_valid(&schedule, s, inst)?;
            let extra = json!({ "optimal": res.optimal, "nodes_explored": res.nodes_explored });
            Ok((schedule, s.clone(), extra))
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve {
            instance,
            algo,
            metric,
            m,
            t,
            k,
            depth_cap,
            out,
        } => {
            if t.is_nan() || t <= 1.0 {
                return Err(Failure::Usage(format!("--t must exceed 1, got {t}")));
            }
            if m == 0 {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            let inst = load_instance(&instance)?;
            let metric = pick_metric(metric, &inst);
            let opts = PtasOptions {
                m,
                k,
                depth_cap,
                ..Default::default()
            };
            let (schedule, robots, extra) = solve(&inst, algo, metric, t, opts)?;
            emit(out.as_deref(), &schedule_to_json(&schedule, &robots))?;
            let degenerate = schedule.visibility_degenerate();
            if degenerate {
                eprintln!("note: visibility-degenerate: every wake happens at time 0 because each trip joins mutually visible robots");
            }
            let summary = json!({
                "metric": metric.as_str(),
                "model": schedule.model.as_str(),
                "robots": robots.len(),
                "makespan_all": schedule.makespan_all,
                "makespan_original": schedule.makespan_original,
                "degenerate": degenerate,
                "details": extra,
            });
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            if out.is_some() {
                println!("{text}");
            } else {
                eprintln!("{text}");
            }
            Ok(())
        }
        Command::Verify { instance, schedule } => {
            let inst = load_instance(&instance)?;
            let loaded = load_schedule(&schedule)?;
            let ours = inst.robots.robots();
            let theirs = loaded.robots.robots();
            let corners = inst.domain.corners();
            let mismatch = ours.len() != loaded.robots.original_count()
                || inst.robots.source() != loaded.robots.source()
                || ours.iter().zip(theirs).any(|(a, b)| !a.point.coincides(b.point))
                || theirs[ours.len().min(theirs.len())..]
                    .iter()
                    .any(|r| !corners.iter().any(|c| c.coincides(r.point)));
            if mismatch {
                return Err(Failure::Validation("schedule robots do not match the instance".into()));
            }
            let violations = validate_schedule(&loaded.schedule, &loaded.robots, &inst.domain);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("{v}");
                }
                return Err(Failure::Validation(format!("{} violation(s)", violations.len())));
            }
            println!("ok: makespan {}", loaded.schedule.makespan_all);
            Ok(())
        }
        Command::Gen {
            seed,
            n,
            holes,
            profile,
            out,
        } => {
            let file = generate_instance(seed, n, holes, profile.into()).map_err(invalid)?;
            let inst = instance_from_file(&file)?;
            emit(out.as_deref(), &freezetag::io::instance_to_json(&inst))
        }
        Command::Render {
            instance,
            schedule,
            spanner,
            path,
            t,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let loaded = schedule.as_deref().map(load_schedule).transpose()?;
            let robots = match &loaded {
                Some(l) => l.robots.clone(),
                None if spanner => place_steiner(&inst.domain, &inst.robots),
                None => inst.robots.clone(),
            };
            let vt = if spanner {
                let g = build_visibility_graph(&robots.points(), &inst.domain).map_err(invalid)?;
                Some(greedy_spanner(&g, t).map_err(invalid)?)
            } else {
                None
            };
            let mut paths = Vec::new();
            if let Some(ids) = path {
                let (a, b) = (ids[0], ids[1]);
                if a >= robots.len() || b >= robots.len() {
                    return Err(Failure::Usage(format!("robot id out of range 0..{}", robots.len())));
                }
                let engine = GeodesicEngine::new(&inst.domain);
                paths.push(
                    engine
                        .geodesic_path(robots.point(a), robots.point(b))
                        .map_err(invalid)?,
                );
            }
            let overlay = Overlay {
                schedule: loaded.as_ref().map(|l| &l.schedule),
                spanner: vt.as_ref().map(|v| &v.graph),
                paths: &paths,
            };
            emit(out.as_deref(), &render_svg(&inst.domain, &robots, overlay))
        }
        Command::Stats { instance, metric, t, m } => {
            let inst = load_instance(&instance)?;
            let metric = pick_metric(metric, &inst);
            println!(
                "{}",
                serde_json::to_string_pretty(&stats(&inst, metric, t, m)?).expect("stats serialize")
            );
            Ok(())
        }
    }
}

fn stats(inst: &Instance, metric: Metric, t: f64, m: usize) -> Result<Value, Failure> {
    let d = &inst.domain;
    let run = solve_cfa(d, &inst.robots, t, metric).map_err(invalid)?;
    check_valid(&run.schedule, &run.robots, inst)?;
    let diam = GeodesicMetric::new(&run.robots.points(), d)
        .map_err(invalid)?
        .diameter();
    let factor = run.spanner.awakening_factor();
    let bound = factor * diam;
    if metric == Metric::Geodesic && run.schedule.makespan_all > bound + 1e-9 {
        return Err(Failure::Bound(format!(
            "makespan {} exceeds t(2k-1)*diam = {bound}",
            run.schedule.makespan_all
        )));
    }
    let ptas = match solve_ptas(
        d,
        &inst.robots,
        metric,
        PtasOptions {
            m,
            ..Default::default()
        },
    ) {
        Ok(r) => json!(r.schedule.makespan_all),
        Err(e) => json!(format!("unavailable: {e}")),
    };
    let exact = if run.robots.len() <= ORACLE_CAP {
        let res = optimal_makespan(&run.robots, metric, d).map_err(invalid)?;
        let ratio = if res.optimal > 0.0 {
            json!(run.schedule.makespan_all / res.optimal)
        } else {
            Value::Null
        };
        json!({ "optimal_with_steiner": res.optimal, "cfa_ratio": ratio })
    } else {
        json!(format!("skipped: more than {ORACLE_CAP} robots"))
    };
    Ok(json!({
        "metric": metric.as_str(),
        "robots": inst.robots.len(),
        "reflex_vertices": d.reflex_vertices().len(),
        "hole_vertices": d.hole_vertices().len(),
        "steiner_robots": run.robots.steiner_count(),
        "diameter": diam,
        "spanner": {
            "t_target": run.spanner.t_target,
            "t_measured": run.spanner.t_measured,
            "k_measured": run.spanner.k_measured,
        },
        "cfa": {
            "makespan_all": run.schedule.makespan_all,
            "makespan_original": run.schedule.makespan_original,
            "bound": bound,
            "degenerate": run.schedule.visibility_degenerate(),
        },
        "ptas": ptas,
        "exact": exact,
    }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
