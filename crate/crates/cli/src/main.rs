use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wulffkit::fd::Stencil;
use wulffkit::io::{
    flow_csv, profile_csv, profile_svg, read_scene, surface_csv, to_json, BodyScene, Overlay,
    ProfileScene, RunCache, RunWriter, SurfaceScene, VariationScene, CODE_VERSION,
};
use wulffkit::profile::{
    comparison_report, cone_profile_curve, cone_profile_value, polygon_profile, profile_reports,
    uniform_grid, ProfileCurve, ProfileMode, ProfileOptions,
};
use wulffkit::suite::{report_checks, run_suite, Check, Source, SuiteConfig, CRITERIA};
use wulffkit::tolerance::Tolerances;
use wulffkit::variation::{Flow, Omega};
use wulffkit::{ConvexBody, Domain, Error, Hypersurface};

const DEFAULT_SEED: u64 = 7;

#[derive(Parser)]
#[command(name = "wulffkit", version, about = "Anisotropic perimeter, variations and isoperimetric profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume, support extremes and ellipticity bounds of a convex body.
    Body(RunArgs),
    /// Per-node frames, areas and curvature statistics of a hypersurface.
    Surface(RunArgs),
    /// First and second variations along a deformation, with finite-difference checks.
    Variation(RunArgs),
    /// Relative isoperimetric profile with concavity, comparison and structure reports.
    Profile(RunArgs),
    /// Cone comparison bounds for a profile.
    Compare(RunArgs),
    /// The acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct Common {
    /// Seed; overrides the scene's own seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Skip the run cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Scene JSON file.
    #[arg(long)]
    scene: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SuiteArgs {
    /// Criteria to run; all when omitted.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u32>,
    #[command(flatten)]
    common: Common,
}

/// Why a run stopped.
enum Failure {
    Input(Error),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotStationary { .. }
            | Error::ImmersionLost(_)
            | Error::OptimizerDiverged(_)
            | Error::NoFeasibleCandidate(_)
            | Error::ZeroVolumeVelocity
            | Error::EmptyIntersection
            | Error::DegenerateMetric(..) => Failure::Numeric(e),
            _ => Failure::Input(e),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Body(a) => body(a),
        Command::Surface(a) => surface(a),
        Command::Variation(a) => variation(a),
        Command::Profile(a) => profile(a, false),
        Command::Compare(a) => profile(a, true),
        Command::Suite(a) => suite(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn tolerances(common: &Common) -> Result<Tolerances, Error> {
    let mut t = Tolerances::default();
    for a in &common.tol {
        t.apply(a)?;
    }
    Ok(t)
}

fn setup(common: &Common) -> Result<Tolerances, Error> {
    if let Some(j) = common.jobs {
        if j == 0 {
            return Err(Error::InvalidArgument("--jobs must be positive".into()));
        }
        wulffkit::set_threads(j)?;
    }
    tolerances(common)
}

/// Names the scene field a construction error came from.
fn field<T>(name: &str, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| match e {
        Error::Io(_) | Error::Json(_) => e,
        e => Error::Schema(format!("{name}: {e}")),
    })
}

fn seed_of(common: &Common, scene_seed: Option<u64>) -> u64 {
    common.seed.or(scene_seed).unwrap_or(DEFAULT_SEED)
}

/// Prints the checks and returns whether all passed.
fn verdict(title: &str, checks: &[Check]) -> bool {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    for c in &failed {
        eprintln!(
            "FAIL {}: value {:e}, tolerance {:e} ({:?})",
            c.name, c.value, c.tolerance, c.source
        );
    }
    let pass = failed.is_empty();
    println!(
        "{title}: {} ({} checks, {} failed)",
        if pass { "PASS" } else { "FAIL" },
        checks.len(),
        failed.len()
    );
    pass
}

fn finish(writer: &RunWriter, out: &Path) {
    for name in writer.written() {
        println!("wrote {}", out.join(name).display());
    }
}

fn body(args: &RunArgs) -> Outcome {
    let tol = setup(&args.common)?;
    let scene: BodyScene = read_scene(&args.scene)?;
    let seed = seed_of(&args.common, scene.seed);
    let body = field("body", ConvexBody::from_spec(&scene.body))?;
    let samples = scene.samples.unwrap_or_else(|| body.default_ellipticity_samples());
    let bounds = body.ellipticity_bounds(samples)?;
    let (h_min, h_max) = body.support_extremes();
    let text = serde_json::to_string(&body).map_err(Error::from)?;
    let back: ConvexBody = serde_json::from_str(&text).map_err(Error::from)?;
    let checks = vec![
        Check::flag("JSON round trip reproduces the body", back.spec() == body.spec(), Source::Analytic),
        Check::above("ellipticity lower bound", bounds.lower, 0.0, Source::Analytic),
    ];
    let pass = verdict("body", &checks);
    let doc = json!({
        "version": CODE_VERSION,
        "seed": seed,
        "body": body.spec(),
        "dim": body.dim(),
        "volume": body.volume(),
        "support_min": h_min,
        "support_max": h_max,
        "centrally_symmetric": body.is_centrally_symmetric(),
        "ellipticity": bounds,
        "tolerances": tol,
        "checks": checks,
        "pass": pass,
    });
    let mut w = RunWriter::new(&args.common.out)?;
    w.write("body.json", &to_json(&doc)?)?;
    finish(&w, &args.common.out);
    Ok(pass)
}

fn surface(args: &RunArgs) -> Outcome {
    setup(&args.common)?;
    let scene: SurfaceScene = read_scene(&args.scene)?;
    let seed = seed_of(&args.common, scene.seed);
    let body = field("body", ConvexBody::from_spec(&scene.body))?;
    let s = field("surface", Hypersurface::from_config(&scene.surface))?;
    if s.ambient_dim() != body.dim() {
        return Err(Failure::Input(Error::InvalidArgument(format!(
            "surface lives in dimension {} but the body in dimension {}",
            s.ambient_dim(),
            body.dim()
        ))));
    }
    let samples = s.samples(&body)?;
    let volume = if s.is_closed() { Some(s.enclosed_volume(&[])?) } else { None };
    let doc = json!({
        "version": CODE_VERSION,
        "seed": seed,
        "body": body.spec(),
        "surface": scene.surface,
        "closed": s.is_closed(),
        "area": s.area()?,
        "anisotropic_area": s.anisotropic_area(&body)?,
        "enclosed_volume": volume,
        "curvature": s.curvature_stats(&body)?,
        "nodes": samples.len(),
    });
    let mut w = RunWriter::new(&args.common.out)?;
    w.write("surface.json", &to_json(&doc)?)?;
    w.write("surface.csv", &surface_csv(&samples, seed)?)?;
    println!("surface: {} nodes", samples.len());
    finish(&w, &args.common.out);
    Ok(true)
}

fn variation(args: &RunArgs) -> Outcome {
    let tol = setup(&args.common)?;
    let scene: VariationScene = read_scene(&args.scene)?;
    let seed = seed_of(&args.common, scene.seed);
    let body = field("body", ConvexBody::from_spec(&scene.body))?;
    let s = field("surface", Hypersurface::from_config(&scene.surface))?;
    let domain = field("domain", scene.domain.as_ref().map(Domain::from_spec).transpose())?;
    let omega = field("omega", Omega::new(scene.omega.clone(), &s))?;
    let flow = Flow::new(s, body, omega, scene.mode, domain)?;
    let stencil = Stencil::default();
    let rep = if scene.second {
        flow.second_variation(&stencil)?
    } else {
        flow.first_variation(&stencil)?
    };
    let checks = report_checks("variation", &rep, &tol, false);
    let pass = verdict("variation", &checks);
    println!("A'(0) = {:.12} (analytic), {:.12} (fd)", rep.a_prime_analytic, rep.a_prime_fd.value);
    let doc = json!({
        "version": CODE_VERSION,
        "seed": seed,
        "scene": scene,
        "tolerances": tol,
        "report": rep,
        "checks": checks,
        "pass": pass,
    });
    let mut w = RunWriter::new(&args.common.out)?;
    w.write("variation.json", &to_json(&doc)?)?;
    w.write("flow.csv", &flow_csv(&rep.samples, seed)?)?;
    finish(&w, &args.common.out);
    Ok(pass)
}

fn compute_profile(scene: &ProfileScene, body: &ConvexBody, domain: &Domain, seed: u64) -> Result<ProfileCurve, Error> {
    let grid = scene.grid.unwrap_or(ProfileScene::DEFAULT_GRID);
    if domain.is_bounded() {
        let total = domain.volume().expect("bounded domain");
        let volumes = scene.volumes.clone().unwrap_or_else(|| uniform_grid(total, grid));
        polygon_profile(body, domain, &volumes, &scene.options(seed))
    } else {
        let volumes = scene.volumes.clone().unwrap_or_else(|| uniform_grid(1.0, grid));
        cone_profile_curve(body, domain, &volumes, seed)
    }
}

fn cached_profile(scene: &ProfileScene, body: &ConvexBody, domain: &Domain, seed: u64, use_cache: bool) -> Result<ProfileCurve, Error> {
    if !use_cache {
        return compute_profile(scene, body, domain, seed);
    }
    let cache = RunCache::from_env();
    let key = RunCache::key(scene, seed)?;
    if let Some(p) = cache.get(&key) {
        println!("cache hit {key}");
        return Ok(p);
    }
    let p = compute_profile(scene, body, domain, seed)?;
    if let Err(e) = cache.put(&key, &p) {
        eprintln!("warning: cache write failed: {e}");
    }
    Ok(p)
}

/// Candidates-only profile of the Euclidean ball on the same volumes.
fn euclidean_reference(profile: &ProfileCurve, domain: &Domain, seed: u64) -> Result<ProfileCurve, Error> {
    let ball = ConvexBody::ball(2, 1.0)?;
    let opts = ProfileOptions {
        mode: ProfileMode::Candidates,
        seed,
        ..ProfileOptions::default()
    };
    let volumes: Vec<f64> = profile.uniform().iter().map(|s| s.v).collect();
    polygon_profile(&ball, domain, &volumes, &opts)
}

fn cone_overlay(profile: &ProfileCurve, label: String, theta: f64) -> Overlay {
    let vmax = profile.total_volume.unwrap_or_else(|| profile.volumes().last().copied().unwrap_or(1.0));
    let points = (0..=100)
        .map(|i| {
            let v = vmax * i as f64 / 100.0;
            [v, cone_profile_value(profile.n, theta, v)]
        })
        .collect();
    Overlay { label, points }
}

fn profile(args: &RunArgs, compare_only: bool) -> Outcome {
    let tol = setup(&args.common)?;
    let scene: ProfileScene = read_scene(&args.scene)?;
    let seed = seed_of(&args.common, scene.seed);
    let body = field("body", ConvexBody::from_spec(&scene.body))?;
    let domain = field("domain", Domain::from_spec(&scene.domain))?;
    if compare_only && !(domain.dim() == 2 && domain.is_bounded()) {
        return Err(Failure::Input(Error::InvalidArgument(
            "domain: comparison needs a bounded planar domain".into(),
        )));
    }
    let p = cached_profile(&scene, &body, &domain, seed, !args.common.no_cache)?;
    let mut w = RunWriter::new(&args.common.out)?;
    if compare_only {
        let cmp = comparison_report(&p, &body, &domain, seed, &tol)?;
        let pass = verdict("compare", &cmp.checks);
        let doc = json!({
            "version": CODE_VERSION,
            "seed": seed,
            "tolerances": tol,
            "comparison": cmp,
            "pass": pass,
        });
        w.write("compare.json", &to_json(&doc)?)?;
        finish(&w, &args.common.out);
        return Ok(pass);
    }
    let reference = if domain.dim() == 2 && domain.is_bounded() {
        Some(euclidean_reference(&p, &domain, seed)?)
    } else {
        None
    };
    let reports = profile_reports(&p, &body, &domain, reference.as_ref(), &tol)?;
    let pass = verdict("profile", &reports.checks);
    for note in p.warnings.iter().chain(&reports.notes) {
        println!("note: {note}");
    }
    let mut overlays = Vec::new();
    if let Some(cmp) = &reports.comparison {
        if let Some(theta) = cmp.best_theta {
            overlays.push(cone_overlay(&p, "best vertex cone".into(), theta));
        }
        if let Some(hp) = cmp.half_planes.iter().min_by(|a, b| a.theta.total_cmp(&b.theta)) {
            overlays.push(cone_overlay(&p, format!("half-plane at {}", hp.label), hp.theta));
        }
    } else if let Some(s) = p.samples.iter().find(|s| s.v > 0.0) {
        // Cone domains: the profile is itself a cone profile.
        let theta = (s.value / (p.n + 1) as f64).powi(p.n as i32 + 1) / s.v.powi(p.n as i32);
        overlays.push(cone_overlay(&p, "cone".into(), theta));
    }
    let doc = json!({
        "version": CODE_VERSION,
        "seed": seed,
        "tolerances": tol,
        "reports": reports,
        "pass": pass,
    });
    w.write("profile.csv", &profile_csv(&p)?)?;
    w.write("reports.json", &to_json(&doc)?)?;
    w.write("profile.svg", &profile_svg(&p, &overlays))?;
    finish(&w, &args.common.out);
    Ok(pass)
}

fn suite(args: &SuiteArgs) -> Outcome {
    let tol = setup(&args.common)?;
    let ids: Vec<u32> = if args.criteria.is_empty() { CRITERIA.to_vec() } else { args.criteria.clone() };
    let config = SuiteConfig {
        seed: args.common.seed.unwrap_or(DEFAULT_SEED),
        tolerances: tol,
    };
    let summary = run_suite(&ids, &config)?;
    for c in &summary.criteria {
        println!("{}", c.line());
        for f in c.failures() {
            eprintln!("  FAIL {}: value {:e}, tolerance {:e}", f.name, f.value, f.tolerance);
        }
    }
    let mut w = RunWriter::new(&args.common.out)?;
    w.write("summary.json", &to_json(&summary)?)?;
    finish(&w, &args.common.out);
    Ok(summary.pass)
}
