//! Command-line front end.
//!
//! Five subcommands drive the library end to end, all reading one TOML
//! configuration (see [`crate::config`]):
//!
//! * `homogenize` — average the stack into its effective quadratic forms.
//! * `energy` — evaluate the plate energy of displacement fields from CSV.
//! * `minimize` — minimize the plate energy; writes fields and a report.
//! * `sweep-theta` — minimize across an ascending list of misfit weights.
//! * `gamma-check` — run a recovery-sequence study against the 2D limit.
//!
//! Relative output paths land under `--out-dir` (created on demand); input
//! paths resolve against the working directory. The process exits 0 on
//! success, 1 on configuration or validation problems, and 2 on runtime
//! failures (divergence, overflow, I/O).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::functionals::{energy, Regime};
use crate::gamma::convergence_study;
use crate::grid::DisplacementField;
use crate::minimize::{
    curvature_stats, cylinder_minimize_lki, jitter_fields, minimize_energy, solve_lvk,
    theta_sweep, MinimizeResult, SweepOpts,
};
use crate::relaxation::effective_forms;
use crate::report::{
    gamma_table_csv, read_fields_csv, sweep_table_csv, write_fields_csv, write_json, GammaJson,
    MomentsReport, RunReport, SweepJson,
};

#[derive(Parser, Debug)]
#[command(name = "platelim", version, about = "Layered-plate limit models: homogenize, minimize, verify")]
struct Cli {
    /// TOML configuration file.
    #[arg(short = 'c', long = "config", global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory receiving every output artifact (created if missing).
    #[arg(short = 'o', long = "out-dir", global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Seed of the symmetry-breaking jitter added to starting guesses
    /// (active when the solver's init_jitter is positive).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Average the layered material into its effective quadratic forms.
    Homogenize,
    /// Evaluate the plate energy of displacement fields read from CSV.
    Energy,
    /// Minimize the plate energy and write the fields and a report.
    Minimize,
    /// Minimize across an ascending list of misfit weights theta.
    SweepTheta,
    /// Run a recovery-sequence convergence study against the 2D limit.
    GammaCheck,
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok { 0 } else { 1 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// 1 for configuration/validation problems, 2 for runtime failures.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Diverged(_)
        | Error::EnergyOverflow { .. }
        | Error::RelaxationSingular
        | Error::OutOfThickness { .. }
        | Error::Io { .. } => 2,
        _ => 1,
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let path = cli.config.as_ref().ok_or_else(|| {
        Error::Config("a configuration file is required (-c FILE / --config FILE)".into())
    })?;
    let cfg = Config::from_path(path)?;
    if let Some(dir) = &cli.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    match cli.command {
        Cmd::Homogenize => cmd_homogenize(cli, &cfg),
        Cmd::Energy => cmd_energy(cli, &cfg),
        Cmd::Minimize => cmd_minimize(cli, &cfg),
        Cmd::SweepTheta => cmd_sweep(cli, &cfg),
        Cmd::GammaCheck => cmd_gamma(cli, &cfg),
    }
}

/// Resolve an output path against `--out-dir` (absolute paths pass through).
fn out_path(cli: &Cli, p: &Path) -> PathBuf {
    match (&cli.out_dir, p.is_absolute()) {
        (Some(dir), false) => dir.join(p),
        _ => p.to_path_buf(),
    }
}

fn report_path(cli: &Cli, cfg: &Config, default: &str) -> PathBuf {
    out_path(cli, cfg.output.report_json.as_deref().unwrap_or(Path::new(default)))
}

fn table_path(cli: &Cli, cfg: &Config, default: &str) -> PathBuf {
    out_path(cli, cfg.output.table_csv.as_deref().unwrap_or(Path::new(default)))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn cmd_homogenize(cli: &Cli, cfg: &Config) -> Result<()> {
    let eff = effective_forms(&cfg.laminate)?;
    let report = MomentsReport::from(&eff);
    let path = report_path(cli, cfg, "report.json");
    write_json(&path, &report)?;
    println!(
        "homogenized {} layer(s): q00 trace = {:.6e}, c_const = {:.6e}",
        cfg.laminate.layers().len(),
        eff.q00[0][0] + eff.q00[1][1] + eff.q00[2][2],
        eff.c_const
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_energy(cli: &Cli, cfg: &Config) -> Result<()> {
    let input = cfg.input_fields.as_ref().ok_or_else(|| {
        Error::Config("the energy command needs [input] fields_csv".into())
    })?;
    let fields = read_fields_csv(input, &cfg.grid)?;
    let eff = effective_forms(&cfg.laminate)?;
    let value = energy(&cfg.regime, &eff, &fields, &cfg.grid, &cfg.solver.energy)?;
    let stats = curvature_stats(&cfg.grid, &fields.v);
    let report = RunReport::from_evaluation(&cfg.regime, value, stats);
    let path = report_path(cli, cfg, "report.json");
    write_json(&path, &report)?;
    println!("I[{}] = {:.12e}", cfg.regime.tag(), value);
    println!("wrote {}", path.display());
    Ok(())
}

fn starting_fields(cli: &Cli, cfg: &Config) -> Result<DisplacementField> {
    let mut init = match &cfg.input_fields {
        Some(p) => read_fields_csv(p, &cfg.grid)?,
        None => DisplacementField::zeros(&cfg.grid),
    };
    if cfg.solver.init_jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.unwrap_or(0));
        jitter_fields(&mut init, cfg.solver.init_jitter, &mut rng);
    }
    Ok(init)
}

fn cmd_minimize(cli: &Cli, cfg: &Config) -> Result<()> {
    let eff = effective_forms(&cfg.laminate)?;
    let result: MinimizeResult = match cfg.regime {
        // exact decoupled solution over the developable cylinders
        Regime::Lki { .. } => {
            let dirs = direction_fan(cfg.directions);
            cylinder_minimize_lki(&eff, &cfg.grid, cfg.profile_nodes, &dirs, &cfg.solver)?.best
        }
        // convex quadratic: conjugate gradients on the exact system
        Regime::Lvk { .. } => solve_lvk(&eff, &cfg.grid, &cfg.solver)?,
        Regime::Vk { .. } => {
            let init = starting_fields(cli, cfg)?;
            minimize_energy(&cfg.regime, &eff, &cfg.grid, &init, &cfg.solver)?
        }
    };
    let fields_path = out_path(
        cli,
        cfg.output.fields_csv.as_deref().unwrap_or(Path::new("fields.csv")),
    );
    write_fields_csv(&fields_path, &cfg.grid, &result.fields)?;
    let report = RunReport::from_result(&cfg.regime, &result);
    let path = report_path(cli, cfg, "report.json");
    write_json(&path, &report)?;
    println!(
        "I[{}] = {:.12e} after {} iteration(s), converged: {}",
        cfg.regime.tag(),
        result.energy,
        result.iterations,
        result.converged
    );
    println!("wrote {} and {}", fields_path.display(), path.display());
    Ok(())
}

/// Evenly spaced roll directions over the upper half circle.
fn direction_fan(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|k| {
            let phi = std::f64::consts::PI * k as f64 / count as f64;
            [phi.cos(), phi.sin()]
        })
        .collect()
}

/// `base.csv` -> `base_theta3.csv` for the fields of the third sweep row.
fn theta_fields_path(base: &Path, index: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("fields");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_theta{index}.{ext}"),
        None => format!("{stem}_theta{index}"),
    };
    base.with_file_name(name)
}

fn cmd_sweep(cli: &Cli, cfg: &Config) -> Result<()> {
    let eff = effective_forms(&cfg.laminate)?;
    let opts = SweepOpts {
        solver: cfg.solver,
        multistart: cfg.sweep.multistart,
        seed: cli.seed.unwrap_or(0),
        directions: cfg.directions,
        profile_nodes: cfg.profile_nodes,
    };
    let report = theta_sweep(&eff, &cfg.grid, &cfg.sweep.thetas, &opts)?;

    let table = table_path(cli, cfg, "table.csv");
    write_text(&table, &sweep_table_csv(&report))?;
    let json = report_path(cli, cfg, "report.json");
    write_json(&json, &SweepJson::from(&report))?;
    if let Some(base) = &cfg.output.fields_csv {
        for (k, row) in report.rows.iter().enumerate() {
            let p = out_path(cli, &theta_fields_path(base, k));
            write_fields_csv(&p, &cfg.grid, &row.result.fields)?;
        }
    }
    for row in &report.rows {
        println!(
            "theta = {:.3e}: I = {:.9e} (start: {}, det residual {:.3e})",
            row.theta, row.result.energy, row.start, row.result.curvature.det_residual
        );
    }
    println!("wrote {} and {}", table.display(), json.display());
    Ok(())
}

fn cmd_gamma(cli: &Cli, cfg: &Config) -> Result<()> {
    let (u, v) = cfg.gamma.preset.fields();
    let table = convergence_study(
        &cfg.laminate,
        &cfg.regime,
        &u,
        &v,
        &cfg.gamma.hs,
        &cfg.gamma.study,
    )?;
    let csv_path = table_path(cli, cfg, "table.csv");
    write_text(&csv_path, &gamma_table_csv(&table))?;
    let json_path = report_path(cli, cfg, "report.json");
    write_json(&json_path, &GammaJson::new(&cfg.regime, cfg.gamma.preset.name(), &table))?;
    println!(
        "I[{}] limit = {:.9e} ({} preset)",
        cfg.regime.tag(),
        table.limit,
        cfg.gamma.preset.name()
    );
    for r in &table.rows {
        println!(
            "  h = {:.6e}: I^h = {:.9e}, error = {:.3e}, P^h error = {:.3e}",
            r.h, r.energy, r.error, r.ph_error
        );
    }
    println!("observed rate = {:.2}", table.rate);
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    const SMALL: &str = r#"
        [domain]
        nx = 9
        ny = 9

        [[layer]]
        fraction = 1.0
        lambda = 1.0
        mu = 1.0
        misfit_slope = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    "#;

    #[test]
    fn missing_config_flag_is_a_usage_error() {
        assert_eq!(run(["platelim", "homogenize"]), 1);
    }

    #[test]
    fn help_exits_cleanly() {
        assert_eq!(run(["platelim", "--help"]), 0);
        assert_eq!(run(["platelim", "minimize", "--help"]), 0);
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        assert_eq!(run(["platelim", "optimize"]), 1);
    }

    #[test]
    fn homogenize_writes_the_report() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "run.toml", SMALL);
        let out = dir.path().join("artifacts");
        let code = run([
            "platelim",
            "homogenize",
            "-c",
            cfg.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = fs::read_to_string(out.join("report.json")).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(json["q00"].is_array());
        assert!(json["c_const"].is_number());
    }

    #[test]
    fn bad_config_exits_with_one() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "run.toml", "[[layer]]\nfraction = 0.4\nlambda = 1.0\nmu = 1.0\n");
        assert_eq!(run(["platelim", "homogenize", "-c", cfg.to_str().unwrap()]), 1);
        assert_eq!(run(["platelim", "homogenize", "-c", "/no/such/file.toml"]), 2);
    }

    #[test]
    fn energy_requires_input_fields() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "run.toml", SMALL);
        assert_eq!(run(["platelim", "energy", "-c", cfg.to_str().unwrap()]), 1);
    }

    #[test]
    fn minimize_then_energy_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let base = format!(
            "{SMALL}\n[regime]\nkind = \"lvk\"\nalpha = 4.0\n\n[output]\nfields_csv = \"f.csv\"\n"
        );
        let cfg = write_cfg(dir.path(), "min.toml", &base);
        let out = dir.path().join("run");
        assert_eq!(
            run([
                "platelim",
                "minimize",
                "-c",
                cfg.to_str().unwrap(),
                "-o",
                out.to_str().unwrap()
            ]),
            0
        );
        // feed the minimizer output back through the evaluator
        let eval_cfg = format!(
            "{SMALL}\n[regime]\nkind = \"lvk\"\nalpha = 4.0\n\n[input]\nfields_csv = \"{}\"\n\
             \n[output]\nreport_json = \"eval.json\"\n",
            out.join("f.csv").display()
        );
        let cfg2 = write_cfg(dir.path(), "eval.toml", &eval_cfg);
        assert_eq!(
            run([
                "platelim",
                "energy",
                "-c",
                cfg2.to_str().unwrap(),
                "-o",
                out.to_str().unwrap()
            ]),
            0
        );
        let min: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        let eval: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("eval.json")).unwrap()).unwrap();
        let (a, b) = (min["energy"].as_f64().unwrap(), eval["energy"].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn theta_suffix_lands_before_the_extension() {
        assert_eq!(
            theta_fields_path(Path::new("runs/fields.csv"), 2),
            Path::new("runs/fields_theta2.csv")
        );
        assert_eq!(theta_fields_path(Path::new("fields"), 0), Path::new("fields_theta0"));
    }
}
