//! TOML run configuration.
//!
//! One file describes the material stack, the midplane domain, the scaling
//! regime, and the knobs of the solvers and studies. Parsing is strict:
//! unknown keys are rejected, so a typo fails loudly instead of silently
//! falling back to a default.
//!
//! ```toml
//! [domain]
//! lx = 1.0
//! ly = 1.0
//! nx = 65
//! ny = 65
//!
//! [regime]
//! kind = "vk"     # "lki" | "vk" | "lvk"
//! theta = 1.0     # vk only
//! # alpha = 4.0   # lki / lvk only
//!
//! [[layer]]
//! fraction = 0.5
//! lambda = 1.0
//! mu = 1.0
//! misfit_slope = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
//!
//! [[layer]]
//! fraction = 0.5
//! lambda = 2.0
//! mu = 0.5
//! ```
//!
//! A layer takes either `lambda`/`mu` or a full 6x6 `voigt` stiffness.
//! `misfit_const` and `misfit_slope` are optional 3x3 matrices defining the
//! layer misfit `B(t) = misfit_const + t misfit_slope` in the global
//! thickness coordinate.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::functionals::{EnergyOpts, Regime};
use crate::gamma::{presets, QuadSpec, StudyOpts};
use crate::grid::Grid2D;
use crate::laminate::{Laminate, Layer};
use crate::minimize::SolverOpts;
use crate::poly::Poly2;
use crate::tensor::{ElasticForm, Mat3};

/// A parsed and validated run configuration.
#[derive(Clone, Debug)]
pub struct Config {
    pub grid: Grid2D,
    pub regime: Regime,
    pub laminate: Laminate,
    pub solver: SolverOpts,
    /// Cylinder-scan resolution shared by the Kirchhoff minimizer and the
    /// sweep candidates.
    pub directions: usize,
    pub profile_nodes: usize,
    pub sweep: SweepSettings,
    pub gamma: GammaSettings,
    pub output: OutputPaths,
    /// Optional CSV with starting/input displacement fields.
    pub input_fields: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct SweepSettings {
    /// Ascending misfit weights.
    pub thetas: Vec<f64>,
    pub multistart: bool,
}

/// Target fields of a convergence study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GammaPreset {
    Zero,
    Cap,
    Poly2,
    Cylinder { angle_deg: f64, curvature: f64 },
}

impl GammaPreset {
    pub fn name(&self) -> &'static str {
        match self {
            GammaPreset::Zero => "zero",
            GammaPreset::Cap => "cap",
            GammaPreset::Poly2 => "poly2",
            GammaPreset::Cylinder { .. } => "cylinder",
        }
    }

    /// The closed-form target fields `(u, v)`.
    pub fn fields(&self) -> ([Poly2; 2], Poly2) {
        match *self {
            GammaPreset::Zero => presets::zero(),
            GammaPreset::Cap => presets::cap(),
            GammaPreset::Poly2 => presets::poly2(),
            GammaPreset::Cylinder { angle_deg, curvature } => {
                presets::cylinder(angle_deg.to_radians(), curvature)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GammaSettings {
    /// Strictly decreasing thickness sequence.
    pub hs: Vec<f64>,
    pub study: StudyOpts,
    pub preset: GammaPreset,
}

/// Output artifact locations; relative paths land under `--out-dir`.
#[derive(Clone, Debug, Default)]
pub struct OutputPaths {
    pub fields_csv: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
    pub table_csv: Option<PathBuf>,
}

impl Config {
    /// Read and validate a configuration file.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Config> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::from_toml_str(&text)
    }

    /// Parse and validate configuration text.
    pub fn from_toml_str(text: &str) -> Result<Config> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("TOML parse: {e}")))?;
        file.validate()
    }
}

// ---------------------------------------------------------------------------
// raw sections

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    domain: Option<DomainSection>,
    regime: Option<RegimeSection>,
    #[serde(default, rename = "layer")]
    layers: Vec<LayerSection>,
    solver: Option<SolverSection>,
    sweep: Option<SweepSection>,
    gamma: Option<GammaSection>,
    output: Option<OutputSection>,
    input: Option<InputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSection {
    lx: Option<f64>,
    ly: Option<f64>,
    nx: Option<usize>,
    ny: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegimeSection {
    kind: String,
    theta: Option<f64>,
    alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerSection {
    fraction: f64,
    lambda: Option<f64>,
    mu: Option<f64>,
    voigt: Option<Vec<Vec<f64>>>,
    misfit_const: Option<Vec<Vec<f64>>>,
    misfit_slope: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    grad_tol: Option<f64>,
    max_iterations: Option<usize>,
    armijo: Option<f64>,
    backtrack: Option<f64>,
    memory: Option<usize>,
    init_jitter: Option<f64>,
    reproducible: Option<bool>,
    lki_sign: Option<f64>,
    directions: Option<usize>,
    profile_nodes: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    thetas: Option<Vec<f64>>,
    multistart: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaSection {
    h: Option<Vec<f64>>,
    cells: Option<usize>,
    gauss_inplane: Option<usize>,
    gauss_thickness: Option<usize>,
    preset: Option<String>,
    cylinder_angle_deg: Option<f64>,
    cylinder_curvature: Option<f64>,
    ph_grid: Option<usize>,
    reference_grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    fields_csv: Option<String>,
    report_json: Option<String>,
    table_csv: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputSection {
    fields_csv: Option<String>,
}

// ---------------------------------------------------------------------------
// validation

impl ConfigFile {
    fn validate(self) -> Result<Config> {
        let (lx, ly, nx, ny) = match &self.domain {
            None => (1.0, 1.0, 65, 65),
            Some(d) => (
                d.lx.unwrap_or(1.0),
                d.ly.unwrap_or(1.0),
                d.nx.unwrap_or(65),
                d.ny.unwrap_or(65),
            ),
        };
        let grid = Grid2D::new(lx, ly, nx, ny)?;
        let regime = build_regime(self.regime.as_ref())?;
        let laminate = build_laminate(&self.layers)?;
        let sol = self.solver.unwrap_or_default();
        let (solver, directions, profile_nodes) = build_solver(&sol)?;

        let sw = self.sweep.unwrap_or_default();
        let sweep = SweepSettings {
            thetas: sw.thetas.unwrap_or_else(|| vec![1e-2, 1e-1, 1.0, 1e1, 1e2]),
            multistart: sw.multistart.unwrap_or(true),
        };

        let ga = self.gamma.unwrap_or_default();
        let gamma = build_gamma(&ga, lx, ly, solver.energy)?;

        let out = self.output.unwrap_or_default();
        let output = OutputPaths {
            fields_csv: out.fields_csv.map(PathBuf::from),
            report_json: out.report_json.map(PathBuf::from),
            table_csv: out.table_csv.map(PathBuf::from),
        };
        let input_fields =
            self.input.unwrap_or_default().fields_csv.map(PathBuf::from);

        Ok(Config {
            grid,
            regime,
            laminate,
            solver,
            directions,
            profile_nodes,
            sweep,
            gamma,
            output,
            input_fields,
        })
    }
}

fn build_regime(sec: Option<&RegimeSection>) -> Result<Regime> {
    let Some(sec) = sec else {
        return Regime::vk(1.0);
    };
    match sec.kind.as_str() {
        "vk" => {
            if sec.alpha.is_some() {
                return Err(Error::Config("regime `vk` takes theta, not alpha".into()));
            }
            Regime::vk(sec.theta.unwrap_or(1.0))
        }
        "lki" | "lvk" => {
            if sec.theta.is_some() {
                return Err(Error::Config(format!(
                    "regime `{}` takes alpha, not theta",
                    sec.kind
                )));
            }
            let alpha = sec.alpha.ok_or_else(|| {
                Error::Config(format!("regime `{}` needs an alpha value", sec.kind))
            })?;
            if sec.kind == "lki" {
                Regime::lki(alpha)
            } else {
                Regime::lvk(alpha)
            }
        }
        other => Err(Error::Config(format!(
            "unknown regime kind `{other}` (expected lki, vk, or lvk)"
        ))),
    }
}

fn mat3_from(rows: &Option<Vec<Vec<f64>>>, what: &str) -> Result<Mat3> {
    let Some(rows) = rows else {
        return Ok(Mat3::zero());
    };
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(Error::Config(format!("{what} must be a 3x3 matrix")));
    }
    let mut m = Mat3::zero();
    for (i, r) in rows.iter().enumerate() {
        for (j, e) in r.iter().enumerate() {
            if !e.is_finite() {
                return Err(Error::Config(format!("{what} has a non-finite entry")));
            }
            m.0[i][j] = *e;
        }
    }
    Ok(m)
}

fn build_laminate(sections: &[LayerSection]) -> Result<Laminate> {
    if sections.is_empty() {
        return Err(Error::Config("at least one [[layer]] is required".into()));
    }
    let mut layers = Vec::with_capacity(sections.len());
    for (k, sec) in sections.iter().enumerate() {
        let b0 = mat3_from(&sec.misfit_const, &format!("layer {k} misfit_const"))?;
        let b1 = mat3_from(&sec.misfit_slope, &format!("layer {k} misfit_slope"))?;
        let layer = match (sec.lambda, sec.mu, &sec.voigt) {
            (Some(l), Some(m), None) => Layer::isotropic(sec.fraction, l, m, b0, b1)?,
            (None, None, Some(rows)) => {
                if rows.len() != 6 || rows.iter().any(|r| r.len() != 6) {
                    return Err(Error::Config(format!(
                        "layer {k} voigt stiffness must be a 6x6 matrix"
                    )));
                }
                let mut v = [[0.0; 6]; 6];
                for (i, r) in rows.iter().enumerate() {
                    for (j, e) in r.iter().enumerate() {
                        v[i][j] = *e;
                    }
                }
                Layer {
                    fraction: sec.fraction,
                    stiffness: ElasticForm::new(v)?,
                    misfit_const: b0,
                    misfit_slope: b1,
                }
            }
            _ => {
                return Err(Error::Config(format!(
                    "layer {k}: give either lambda and mu or a 6x6 voigt matrix, not both"
                )))
            }
        };
        layers.push(layer);
    }
    Laminate::new(layers)
}

fn build_solver(sec: &SolverSection) -> Result<(SolverOpts, usize, usize)> {
    let mut s = SolverOpts::default();
    if let Some(v) = sec.grad_tol {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(format!("grad_tol must be positive, got {v}")));
        }
        s.grad_tol = v;
    }
    if let Some(v) = sec.max_iterations {
        s.max_iterations = v;
    }
    if let Some(v) = sec.armijo {
        if !(v.is_finite() && v > 0.0 && v < 1.0) {
            return Err(Error::Config(format!("armijo must lie in (0, 1), got {v}")));
        }
        s.armijo = v;
    }
    if let Some(v) = sec.backtrack {
        if !(v.is_finite() && v > 0.0 && v < 1.0) {
            return Err(Error::Config(format!("backtrack must lie in (0, 1), got {v}")));
        }
        s.backtrack = v;
    }
    if let Some(v) = sec.memory {
        if v == 0 {
            return Err(Error::Config("memory must be at least 1".into()));
        }
        s.memory = v;
    }
    if let Some(v) = sec.init_jitter {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Config(format!("init_jitter must be >= 0, got {v}")));
        }
        s.init_jitter = v;
    }
    let mut energy = EnergyOpts::default();
    if let Some(v) = sec.reproducible {
        energy.reproducible = v;
    }
    if let Some(v) = sec.lki_sign {
        if v != 1.0 && v != -1.0 {
            return Err(Error::Config(format!("lki_sign must be +1 or -1, got {v}")));
        }
        energy.lki_sign = v;
    }
    s.energy = energy;
    let directions = sec.directions.unwrap_or(16);
    if directions == 0 {
        return Err(Error::Config("directions must be at least 1".into()));
    }
    let profile_nodes = sec.profile_nodes.unwrap_or(129);
    if profile_nodes < 3 {
        return Err(Error::Config("profile_nodes must be at least 3".into()));
    }
    Ok((s, directions, profile_nodes))
}

fn build_gamma(sec: &GammaSection, lx: f64, ly: f64, energy: EnergyOpts) -> Result<GammaSettings> {
    let hs = sec
        .h
        .clone()
        .unwrap_or_else(|| vec![0.125, 0.0625, 0.03125, 0.015625, 0.0078125]);
    let preset = match sec.preset.as_deref().unwrap_or("cap") {
        "zero" => GammaPreset::Zero,
        "cap" => GammaPreset::Cap,
        "poly2" => GammaPreset::Poly2,
        "cylinder" => GammaPreset::Cylinder {
            angle_deg: sec.cylinder_angle_deg.unwrap_or(30.0),
            curvature: sec.cylinder_curvature.unwrap_or(0.5),
        },
        other => {
            return Err(Error::Config(format!(
                "unknown gamma preset `{other}` (expected zero, cap, poly2, cylinder)"
            )))
        }
    };
    if !matches!(preset, GammaPreset::Cylinder { .. })
        && (sec.cylinder_angle_deg.is_some() || sec.cylinder_curvature.is_some())
    {
        return Err(Error::Config(
            "cylinder_angle_deg / cylinder_curvature only apply to the cylinder preset".into(),
        ));
    }
    let study = StudyOpts {
        quad: QuadSpec {
            lx,
            ly,
            cells: sec.cells.unwrap_or(64),
            gauss_inplane: sec.gauss_inplane.unwrap_or(3),
            gauss_thickness: sec.gauss_thickness.unwrap_or(3),
        },
        ph_grid: sec.ph_grid.unwrap_or(33),
        reference_grid: sec.reference_grid.unwrap_or(257),
        energy,
    };
    if study.ph_grid < 2 || study.reference_grid < 2 {
        return Err(Error::Config("ph_grid and reference_grid need at least 2 nodes".into()));
    }
    Ok(GammaSettings { hs, study, preset })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [[layer]]
        fraction = 1.0
        lambda = 1.0
        mu = 1.0
    "#;

    #[test]
    fn minimal_config_gets_the_documented_defaults() {
        let cfg = Config::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.grid.nx(), 65);
        assert_eq!(cfg.grid.ny(), 65);
        assert_eq!(cfg.regime.tag(), "vk");
        assert_eq!(cfg.regime.theta(), Some(1.0));
        assert_eq!(cfg.laminate.layers().len(), 1);
        assert_eq!(cfg.solver.max_iterations, 10_000);
        assert_eq!(cfg.directions, 16);
        assert_eq!(cfg.sweep.thetas.len(), 5);
        assert!(cfg.sweep.multistart);
        assert_eq!(cfg.gamma.preset, GammaPreset::Cap);
        assert_eq!(cfg.gamma.hs.len(), 5);
        assert_eq!(cfg.gamma.study.quad.cells, 64);
        assert!(cfg.output.report_json.is_none());
        assert!(cfg.input_fields.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{MINIMAL}\n[solver]\ngrad_tolerance = 1e-6\n");
        let err = Config::from_toml_str(&bad).unwrap_err();
        assert!(err.to_string().contains("config:"), "{err}");
    }

    #[test]
    fn a_layer_must_pick_one_stiffness_spelling() {
        let both = r#"
            [[layer]]
            fraction = 1.0
            lambda = 1.0
            mu = 1.0
            voigt = [[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0],[0,0,0,1,0,0],[0,0,0,0,1,0],[0,0,0,0,0,1]]
        "#;
        assert!(Config::from_toml_str(both).is_err());
        let neither = "[[layer]]\nfraction = 1.0\n";
        assert!(Config::from_toml_str(neither).is_err());
        assert!(Config::from_toml_str("[domain]\nnx = 5\n").is_err(), "no layers");
    }

    #[test]
    fn voigt_layers_and_misfits_parse() {
        let cfg = Config::from_toml_str(
            r#"
            [[layer]]
            fraction = 0.5
            voigt = [
                [3, 1, 1, 0, 0, 0],
                [1, 3, 1, 0, 0, 0],
                [1, 1, 3, 0, 0, 0],
                [0, 0, 0, 1, 0, 0],
                [0, 0, 0, 0, 1, 0],
                [0, 0, 0, 0, 0, 1],
            ]
            misfit_slope = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

            [[layer]]
            fraction = 0.5
            lambda = 2.0
            mu = 0.5
            "#,
        )
        .unwrap();
        assert_eq!(cfg.laminate.layers().len(), 2);
        assert_eq!(cfg.laminate.layers()[0].misfit_slope, Mat3::identity());
        let bad = r#"
            [[layer]]
            fraction = 1.0
            lambda = 1.0
            mu = 1.0
            misfit_const = [[1, 0], [0, 1]]
        "#;
        assert!(Config::from_toml_str(bad).is_err());
    }

    #[test]
    fn regime_sections_are_validated() {
        let lki = format!("{MINIMAL}\n[regime]\nkind = \"lki\"\nalpha = 2.5\n");
        assert_eq!(Config::from_toml_str(&lki).unwrap().regime.tag(), "lki");
        let missing = format!("{MINIMAL}\n[regime]\nkind = \"lvk\"\n");
        assert!(Config::from_toml_str(&missing).is_err());
        let mixed = format!("{MINIMAL}\n[regime]\nkind = \"vk\"\nalpha = 4.0\n");
        assert!(Config::from_toml_str(&mixed).is_err());
        let unknown = format!("{MINIMAL}\n[regime]\nkind = \"plate\"\n");
        assert!(Config::from_toml_str(&unknown).is_err());
        // out-of-window alpha propagates the regime validation
        let bad_alpha = format!("{MINIMAL}\n[regime]\nkind = \"lki\"\nalpha = 3.5\n");
        assert!(Config::from_toml_str(&bad_alpha).is_err());
    }

    #[test]
    fn solver_knobs_are_range_checked() {
        let cfg = format!(
            "{MINIMAL}\n[solver]\ngrad_tol = 1e-6\nlki_sign = -1.0\nreproducible = true\n"
        );
        let cfg = Config::from_toml_str(&cfg).unwrap();
        assert_eq!(cfg.solver.grad_tol, 1e-6);
        assert_eq!(cfg.solver.energy.lki_sign, -1.0);
        assert!(cfg.solver.energy.reproducible);
        for bad in [
            "backtrack = 1.5",
            "armijo = 0.0",
            "memory = 0",
            "lki_sign = 0.5",
            "init_jitter = -1.0",
            "grad_tol = 0.0",
        ] {
            let text = format!("{MINIMAL}\n[solver]\n{bad}\n");
            assert!(Config::from_toml_str(&text).is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn gamma_section_builds_study_options() {
        let text = format!(
            "{MINIMAL}\n[domain]\nlx = 2.0\n\n[gamma]\nh = [0.1, 0.05, 0.025, 0.0125]\n\
             cells = 8\npreset = \"cylinder\"\ncylinder_angle_deg = 45.0\n"
        );
        let cfg = Config::from_toml_str(&text).unwrap();
        assert_eq!(cfg.gamma.hs, vec![0.1, 0.05, 0.025, 0.0125]);
        assert_eq!(cfg.gamma.study.quad.cells, 8);
        assert_eq!(cfg.gamma.study.quad.lx, 2.0);
        match cfg.gamma.preset {
            GammaPreset::Cylinder { angle_deg, curvature } => {
                assert_eq!(angle_deg, 45.0);
                assert_eq!(curvature, 0.5);
            }
            other => panic!("wrong preset {other:?}"),
        }
        // preset-specific keys without the preset are a mistake
        let stray = format!("{MINIMAL}\n[gamma]\ncylinder_curvature = 0.3\n");
        assert!(Config::from_toml_str(&stray).is_err());
        let unknown = format!("{MINIMAL}\n[gamma]\npreset = \"dome\"\n");
        assert!(Config::from_toml_str(&unknown).is_err());
    }

    #[test]
    fn output_and_input_paths_pass_through() {
        let text = format!(
            "{MINIMAL}\n[output]\nfields_csv = \"out.csv\"\nreport_json = \"r.json\"\n\
             \n[input]\nfields_csv = \"start.csv\"\n"
        );
        let cfg = Config::from_toml_str(&text).unwrap();
        assert_eq!(cfg.output.fields_csv.as_deref(), Some(Path::new("out.csv")));
        assert_eq!(cfg.output.report_json.as_deref(), Some(Path::new("r.json")));
        assert!(cfg.output.table_csv.is_none());
        assert_eq!(cfg.input_fields.as_deref(), Some(Path::new("start.csv")));
    }

    #[test]
    fn preset_fields_evaluate() {
        let (u, v) = GammaPreset::Cap.fields();
        assert!(u[0].is_zero() && u[1].is_zero());
        assert!((v.eval(1.0, 1.0) - 1.0).abs() < 1e-15);
        let (_, v) = GammaPreset::Cylinder { angle_deg: 0.0, curvature: 2.0 }.fields();
        assert!((v.eval(1.0, 0.5) - 1.0).abs() < 1e-15);
    }
}
