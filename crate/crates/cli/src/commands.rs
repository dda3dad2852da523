use std::path::{Path, PathBuf};

use pminimal::gauss_map::{verify_theorem1, write_distortion_csv, GaussMapOptions, GAUSS_MAP_CHECK, GAUSS_MAP_STATEMENT};
use pminimal::geom::Point;
use pminimal::io::write_atomic;
use pminimal::profile::{life_time, sample_model_surface, ModelSurface, PExponent, Profile, ProfileStatus};
use pminimal::report::{CheckReport, Status};
use pminimal::surface::{refine_p_minimal_graph, solve_p_minimal_graph, GraphFunction, GridSpec};
use pminimal::tube::{all_passed, run_suite};
use pminimal::Error;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::builtins::Builtin;
use crate::config::SuiteConfig;
use crate::Failure;

/// Written next to `profile.csv` so that `verify --input` can recover the
/// exponent and the profile status.
#[derive(Debug, Serialize, Deserialize)]
pub struct TubeSidecar {
    pub n: usize,
    pub p: f64,
    pub beta: f64,
    pub r: f64,
    pub h: f64,
    pub span: f64,
    pub status: ProfileStatus,
    /// `None` for `beta <= 1`, where the tube is entire.
    pub life_time: Option<f64>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push('\n');
    Ok(write_atomic(path, text.as_bytes())?)
}

pub fn generate_tube(config: &SuiteConfig) -> Result<(), Failure> {
    let shape = config.shape()?;
    let profile = pminimal::profile::solve_profile(&shape, config.r, config.tau_span, config.h)?;
    let surface = sample_model_surface(&profile, config.theta_count)?;
    std::fs::create_dir_all(&config.out).map_err(|e| Failure::Usage(format!("{}: {e}", config.out.display())))?;
    profile.write_csv(&config.out.join("profile.csv"))?;
    surface.write_csv(&config.out.join("surface.csv"))?;
    let sidecar = TubeSidecar {
        n: shape.n,
        p: shape.p.value(),
        beta: shape.beta,
        r: config.r,
        h: config.h,
        span: profile.span(),
        status: profile.status,
        life_time: life_time(&shape, config.r).ok().filter(|t| t.is_finite()),
    };
    write_json(&config.out.join("tube.json"), &sidecar)?;
    let status = match profile.status {
        ProfileStatus::Complete => "complete".to_string(),
        ProfileStatus::Truncated { blow_up_at } => format!("truncated, blow-up at tau = {blow_up_at:.6}"),
    };
    println!("n = {}, p = {}, beta = {}", shape.n, shape.p.value(), shape.beta);
    println!("{} nodes, tau in [{:.6}, {:.6}] ({status})", profile.len(), profile.tau[0], profile.tau[profile.len() - 1]);
    match sidecar.life_time {
        Some(t) => println!("life-time {t:.9}, measured span {:.9}", profile.span()),
        None => println!("entire tube (beta <= 1)"),
    }
    println!("wrote {}", config.out.display());
    Ok(())
}

pub fn solve_graph(config: &SuiteConfig) -> Result<(), Failure> {
    let p = config.exponent(None)?;
    let [x0, x1, y0, y1] = config.boundary.domain();
    let boundary = config.boundary;
    let f = move |x: f64, y: f64| boundary.eval(x, y);
    let mut grid = GridSpec::square(config.grid, x0, x1, y0, y1);
    std::fs::create_dir_all(&config.out).map_err(|e| Failure::Usage(format!("{}: {e}", config.out.display())))?;
    let sidecar = config.out.join("graph.json");

    let mut attempt = solve_p_minimal_graph(&f, p, grid, &config.solver);
    for _ in 0..config.refine {
        let Ok(coarse) = &attempt else { break };
        grid = grid.refined();
        attempt = refine_p_minimal_graph(&coarse.graph, &f, p, &config.solver);
    }
    let solution = match attempt {
        Ok(s) => s,
        Err(Error::Convergence { residual, iterations, p: stalled }) => {
            write_json(
                &sidecar,
                &json!({
                    "p": p.value(), "grid": grid.nx, "boundary": config.boundary,
                    "converged": false, "residual": pminimal::report::json_f64(residual),
                    "iterations": iterations, "stalled_at": stalled,
                }),
            )?;
            return Err(Error::Convergence { residual, iterations, p: stalled }.into());
        }
        Err(e) => return Err(e.into()),
    };
    solution.graph.write_csv(&config.out.join("graph.csv"))?;
    write_json(
        &sidecar,
        &json!({
            "p": p.value(), "grid": grid.nx, "boundary": config.boundary, "converged": true,
            "residual": solution.residual, "iterations": solution.iterations, "stages": solution.stages,
        }),
    )?;
    println!(
        "p = {}, {}x{} grid, {} Newton iterations over {} stages, residual {:e}",
        p.value(),
        grid.nx,
        grid.ny,
        solution.iterations,
        solution.stages.len(),
        solution.residual
    );
    println!("wrote {}", config.out.display());
    Ok(())
}

/// What `verify` runs on.
pub enum Input {
    Dir(PathBuf),
    Builtin(Builtin),
    Graph(PathBuf),
}

fn read_tube(dir: &Path, config: &SuiteConfig) -> Result<(ModelSurface, Option<f64>), Failure> {
    let sidecar: Option<TubeSidecar> = match std::fs::read_to_string(dir.join("tube.json")) {
        Ok(text) => Some(serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}/tube.json: {e}", dir.display())))?),
        Err(_) => None,
    };
    let mut profile = Profile::read_csv(&dir.join("profile.csv"))?;
    if let Some(s) = &sidecar {
        profile.status = s.status;
    }
    let surface_csv = dir.join("surface.csv");
    let surface = if surface_csv.exists() {
        ModelSurface::read_csv(profile, &surface_csv)?
    } else {
        sample_model_surface(&profile, config.theta_count)?
    };
    Ok((surface, sidecar.map(|s| s.p)))
}

fn verify_graph(path: &Path, p: PExponent, config: &SuiteConfig) -> Result<Vec<CheckReport>, Failure> {
    let options = config.suite_options();
    options.selected()?;
    if options.checks.iter().any(|c| c != GAUSS_MAP_CHECK) {
        return Err(Failure::Usage(format!("graph input supports only the {GAUSS_MAP_CHECK} check")));
    }
    let graph = GraphFunction::read_csv(path)?;
    let patch = graph.to_patch()?;
    let gauss = GaussMapOptions { slack_constant: options.tolerance(GAUSS_MAP_CHECK), ..GaussMapOptions::default() };
    let report = match verify_theorem1(&patch, p, &Point::basis(3, 2), &gauss) {
        Ok((report, samples)) => {
            write_distortion_csv(&samples, &config.out.join("distortion.csv"))?;
            report
        }
        Err(Error::Precondition { message, max_residual, .. }) => {
            CheckReport::skipped(GAUSS_MAP_CHECK, GAUSS_MAP_STATEMENT, &message).with("max_normalized_defect", max_residual)
        }
        Err(e) => return Err(e.into()),
    };
    Ok(vec![report])
}

/// Runs the suite, prints the report and writes `report.json`. Returns
/// whether every check passed.
pub fn verify(input: Input, config: &SuiteConfig) -> Result<bool, Failure> {
    std::fs::create_dir_all(&config.out).map_err(|e| Failure::Usage(format!("{}: {e}", config.out.display())))?;
    let reports = match &input {
        Input::Graph(path) => verify_graph(path, config.exponent(None)?, config)?,
        Input::Dir(dir) => {
            let (surface, recorded) = read_tube(dir, config)?;
            // `beta` converts to `p` with the dimension of the tube on disk.
            let local = SuiteConfig { n: surface.profile.n(), ..config.clone() };
            run_suite(&surface, local.exponent(recorded)?, &config.suite_options())?
        }
        Input::Builtin(b) => run_suite(&b.surface(config)?, config.exponent(None)?, &config.suite_options())?,
    };
    let document = json!({ "checks": reports, "config": config });
    let mut text = serde_json::to_string_pretty(&document).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push('\n');
    write_atomic(&config.out.join("report.json"), text.as_bytes())?;
    print!("{text}");
    Ok(all_passed(&reports))
}

#[derive(Deserialize)]
struct ReportFile {
    checks: Vec<CheckReport>,
}

/// Prints a saved report as a table. Returns whether every check passed.
pub fn report(path: &Path) -> Result<bool, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let file: ReportFile = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    print!("{}", render_table(&file.checks));
    Ok(all_passed(&file.checks))
}

pub fn render_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:width$}  {:7}  {:>13}  {:>13}  statement\n", "check", "status", "violation", "tolerance");
    for r in reports {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        };
        let (violation, tolerance) = match r.status {
            Status::Skipped => ("-".to_string(), "-".to_string()),
            _ => (format!("{:.6e}", r.max_violation), format!("{:.6e}", r.tolerance)),
        };
        out.push_str(&format!("{:width$}  {status:7}  {violation:>13}  {tolerance:>13}  {}\n", r.name, r.statement));
    }
    out
}
