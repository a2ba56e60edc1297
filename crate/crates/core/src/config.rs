//! JSON run configuration for the command-line front end.
//!
//! Relative file paths inside a config are resolved against the directory
//! holding the config file.

use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::linalg::HermitianOperator;
use crate::models::{
    bath_qubit, bosonic_mode, probe_oscillator_auto, probe_oscillator_with, probe_qubit, BathModel, BathQubitCoupling,
    Continuum, Discrete, ProbeModel,
};
use crate::perturbation::{DerivativeMethod, ExpansionOptions};
use crate::{Error, Result, Tolerances, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub probe: ProbeConfig,
    pub bath: BathConfig,
    #[serde(default)]
    pub gamma: f64,
    pub beta_grid: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_axis: Option<SecondAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingConfig>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// What `report`/`sweep` do when the second-order state is not positive.
    #[serde(default)]
    pub regime_violation: RegimePolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimePolicy {
    /// Abort with a perturbative-regime error.
    #[default]
    Error,
    /// Keep the row and warn on stderr.
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeConfig {
    Qubit {
        epsilon: f64,
        theta: f64,
    },
    Oscillator {
        omega0: f64,
        /// Chosen from the tail-population tolerance at the smallest β when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_trunc: Option<usize>,
    },
    /// [`MatrixFile`] with `hamiltonian`, `coupling` and optional `mu`.
    Matrix { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathConfig {
    Ohmic {
        s: f64,
        #[serde(rename = "Omega")]
        omega_c: f64,
        /// Must equal `1 − 2μ` of the probe coupling; defaults to it.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        amplitude: Option<f64>,
    },
    /// [`MatrixFile`] with `hamiltonian` and `coupling`.
    Discrete { file: PathBuf },
    /// `H_B = ω σ_z`.
    Qubit { omega: f64, coupling: BathQubitCoupling },
    /// One bosonic mode coupled through its position.
    Mode {
        omega: f64,
        #[serde(default = "default_mode_levels")]
        levels: usize,
    },
}

fn default_mode_levels() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let step = |i: usize| i as f64 / (self.n - 1) as f64;
        match self.spacing {
            Spacing::Linear => (0..self.n).map(|i| self.min + (self.max - self.min) * step(i)).collect(),
            Spacing::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..self.n)
                    .map(|i| if i + 1 == self.n { self.max } else { (a + (b - a) * step(i)).exp() })
                    .collect()
            }
        }
    }

    fn validate(&self, path: &str, positive: bool) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config(format!("{path}.n"), "grid must have at least one point"));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::config(path, "grid bounds must be finite"));
        }
        if (positive || self.spacing == Spacing::Log) && !(self.min > 0.0) {
            return Err(Error::config(format!("{path}.min"), format!("must be positive, got {}", self.min)));
        }
        if self.max < self.min {
            return Err(Error::config(format!("{path}.max"), format!("{} is below min {}", self.max, self.min)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SecondAxis {
    Gamma { values: Vec<f64> },
    /// Qubit probes only.
    Theta { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    #[serde(default = "default_scaling_beta")]
    pub beta: f64,
    #[serde(default = "default_gamma_grid")]
    pub gamma_grid: Grid,
    /// Minimum log-log slopes; derived from the model when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedOrders>,
}

fn default_scaling_beta() -> f64 {
    1.0
}

fn default_gamma_grid() -> Grid {
    Grid {
        min: 1e-2,
        max: 1e-1,
        n: 8,
        spacing: Spacing::Log,
    }
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            beta: default_scaling_beta(),
            gamma_grid: default_gamma_grid(),
            expected: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedOrders {
    pub fisher_gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qfi_truncation: Option<f64>,
    pub state: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub n_u: usize,
    pub n_omega: usize,
    pub derivative: DerivativeMethod,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n_u: 64,
            n_omega: 128,
            derivative: DerivativeMethod::Analytic,
        }
    }
}

/// Operator file: row-major `[re, im]` pairs with a declared dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub hamiltonian: Vec<[f64; 2]>,
    pub coupling: Vec<[f64; 2]>,
    /// Scaling dimension of the coupling operator, `[S] = [ω]^μ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl MatrixFile {
    fn operator(&self, entries: &[[f64; 2]], path: &str) -> Result<HermitianOperator> {
        let n = self.dim;
        if n == 0 || entries.len() != n * n {
            return Err(Error::config(path, format!("expected {} entries for dim {n}, got {}", n * n, entries.len())));
        }
        let m = Array2::from_shape_fn((n, n), |(i, j)| {
            let [re, im] = entries[i * n + j];
            C64::new(re, im)
        });
        HermitianOperator::new(m).map_err(|e| Error::config(path, e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        parse_json(&std::fs::read_to_string(path)?, &path.display().to_string())
    }
}

/// Parse with field-path error messages.
fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { origin.to_string() } else { path };
        Error::config(path, e.into_inner().to_string())
    })
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), format!("cannot read config: {e}")))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base)
    }

    /// Parse, resolve relative paths against `base` and validate.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut c: RunConfig = parse_json(text, "<config>")?;
        c.resolve_paths(base);
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let ProbeConfig::Matrix { file } = &mut self.probe {
            fix(file);
        }
        if let BathConfig::Discrete { file } = &mut self.bath {
            fix(file);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, path: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be positive and finite, got {v}")))
            }
        };
        match &self.probe {
            ProbeConfig::Qubit { epsilon, theta } => {
                pos(*epsilon, "probe.epsilon")?;
                if !theta.is_finite() {
                    return Err(Error::config("probe.theta", "must be finite"));
                }
            }
            ProbeConfig::Oscillator { omega0, n_trunc } => {
                pos(*omega0, "probe.omega0")?;
                if matches!(n_trunc, Some(n) if *n < 2) {
                    return Err(Error::config("probe.n_trunc", "need at least 2 levels"));
                }
            }
            ProbeConfig::Matrix { .. } => {}
        }
        match &self.bath {
            BathConfig::Ohmic { s, omega_c, a, amplitude } => {
                pos(*s, "bath.s")?;
                pos(*omega_c, "bath.Omega")?;
                if matches!(a, Some(v) if !v.is_finite()) {
                    return Err(Error::config("bath.a", "must be finite"));
                }
                if matches!(amplitude, Some(v) if !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::config("bath.amplitude", "must be ≥ 0"));
                }
            }
            BathConfig::Discrete { .. } => {}
            BathConfig::Qubit { omega, .. } => pos(*omega, "bath.omega")?,
            BathConfig::Mode { omega, levels } => {
                pos(*omega, "bath.omega")?;
                if *levels < 2 {
                    return Err(Error::config("bath.levels", "need at least 2 levels"));
                }
            }
        }
        if !(self.gamma.is_finite()) {
            return Err(Error::config("gamma", "must be finite"));
        }
        self.beta_grid.validate("beta_grid", true)?;
        match &self.second_axis {
            Some(SecondAxis::Gamma { values }) | Some(SecondAxis::Theta { values }) if values.is_empty() => {
                return Err(Error::config("second_axis.values", "must not be empty"));
            }
            Some(SecondAxis::Gamma { values }) | Some(SecondAxis::Theta { values }) if values.iter().any(|v| !v.is_finite()) => {
                return Err(Error::config("second_axis.values", "must be finite"));
            }
            Some(SecondAxis::Theta { .. }) if !matches!(self.probe, ProbeConfig::Qubit { .. }) => {
                return Err(Error::config("second_axis.kind", "a θ axis needs a qubit probe"));
            }
            _ => {}
        }
        if let Some(sc) = &self.scaling {
            pos(sc.beta, "scaling.beta")?;
            sc.gamma_grid.validate("scaling.gamma_grid", true)?;
            if sc.gamma_grid.n < 5 {
                return Err(Error::config("scaling.gamma_grid.n", "order fits need at least 5 points"));
            }
        }
        if self.quadrature.n_u < 2 {
            return Err(Error::config("quadrature.n_u", "must be ≥ 2"));
        }
        if self.quadrature.n_omega < 2 {
            return Err(Error::config("quadrature.n_omega", "must be ≥ 2"));
        }
        // builds the probe so file and truncation problems surface as config errors
        let probe = self.build_probe(None)?;
        self.build_bath(&probe)?;
        Ok(())
    }

    pub fn beta_values(&self) -> Vec<f64> {
        self.beta_grid.values()
    }

    /// Hottest point of any grid: truncations are sized for it.
    fn beta_min(&self) -> f64 {
        self.beta_values()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            .min(self.scaling.as_ref().map_or(f64::INFINITY, |s| s.beta))
    }

    /// `theta` overrides the configured angle of a qubit probe.
    pub fn build_probe(&self, theta: Option<f64>) -> Result<ProbeModel> {
        let tail = self.tolerances.tail_population;
        match &self.probe {
            ProbeConfig::Qubit { epsilon, theta: t } => probe_qubit(*epsilon, theta.unwrap_or(*t)),
            ProbeConfig::Oscillator { omega0, n_trunc } => {
                let r = match n_trunc {
                    Some(n) => probe_oscillator_with(*omega0, *n, self.beta_min(), tail),
                    None => probe_oscillator_auto(*omega0, self.beta_min(), tail),
                };
                r.map_err(|e| match e {
                    Error::Truncation(m) => Error::config("probe.n_trunc", m),
                    e => e,
                })
            }
            ProbeConfig::Matrix { file } => {
                let m = MatrixFile::read(file)?;
                let h = m.operator(&m.hamiltonian, "probe.file.hamiltonian")?;
                let s = m.operator(&m.coupling, "probe.file.coupling")?;
                ProbeModel::new(h, s, m.mu.unwrap_or(0.0), file.display().to_string())
            }
        }
    }

    pub fn build_bath(&self, probe: &ProbeModel) -> Result<BathModel> {
        match &self.bath {
            BathConfig::Ohmic { s, omega_c, a, amplitude } => {
                let want = probe.spectral_exponent();
                if let Some(a) = a {
                    if (a - want).abs() > 1e-12 {
                        return Err(Error::config(
                            "bath.a",
                            format!("a = {a} does not match 1 − 2μ = {want} of the probe coupling"),
                        ));
                    }
                }
                let c = Continuum {
                    s: *s,
                    omega_c: *omega_c,
                    a: a.unwrap_or(want),
                    amplitude: amplitude.unwrap_or(1.0),
                };
                BathModel::continuum(c, self.quadrature.n_omega).map_err(|e| Error::config("bath", e.to_string()))
            }
            _ => Ok(BathModel::discrete(self.build_discrete_bath()?)),
        }
    }

    /// The sample as a finite system, for the exact oracle.
    pub fn build_discrete_bath(&self) -> Result<Discrete> {
        match &self.bath {
            BathConfig::Ohmic { .. } => Err(Error::config("bath.kind", "a continuum bath has no exact finite model")),
            BathConfig::Discrete { file } => {
                let m = MatrixFile::read(file)?;
                Discrete::new(
                    m.operator(&m.hamiltonian, "bath.file.hamiltonian")?,
                    m.operator(&m.coupling, "bath.file.coupling")?,
                )
            }
            BathConfig::Qubit { omega, coupling } => bath_qubit(*omega, *coupling),
            BathConfig::Mode { omega, levels } => {
                bosonic_mode(*omega, *levels, self.beta_min(), self.tolerances.tail_population).map_err(|e| match e {
                    Error::Truncation(m) => Error::config("bath.levels", m),
                    e => e,
                })
            }
        }
    }

    pub fn expansion_options(&self) -> ExpansionOptions {
        ExpansionOptions {
            n_u: self.quadrature.n_u,
            derivative: self.quadrature.derivative,
            tolerances: self.tolerances,
        }
    }

    /// `(β, γ, θ)` in output order: β outer, second axis inner.
    pub fn grid_points(&self) -> Vec<GridPoint> {
        let betas = self.beta_values();
        let mut out = Vec::new();
        for beta in betas {
            match &self.second_axis {
                None => out.push(GridPoint { beta, gamma: self.gamma, theta: None }),
                Some(SecondAxis::Gamma { values }) => {
                    out.extend(values.iter().map(|&gamma| GridPoint { beta, gamma, theta: None }))
                }
                Some(SecondAxis::Theta { values }) => out.extend(values.iter().map(|&t| GridPoint {
                    beta,
                    gamma: self.gamma,
                    theta: Some(t),
                })),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub beta: f64,
    pub gamma: f64,
    pub theta: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"{
        "probe": {"kind": "qubit", "epsilon": 1.0, "theta": 0.7853981633974483},
        "bath": {"kind": "ohmic", "s": 1.0, "Omega": 100.0},
        "gamma": 0.1,
        "beta_grid": {"min": 0.05, "max": 5.0, "n": 50},
        "second_axis": {"kind": "theta", "values": [4.71238898038469, 0.7853981633974483]}
    }"#;

    #[test]
    fn round_trip() {
        let c = RunConfig::from_json(FIG2, Path::new(".")).unwrap();
        let again = RunConfig::from_json(&c.to_json(), Path::new(".")).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.quadrature.n_u, 64);
        assert_eq!(c.grid_points().len(), 100);
        let g = c.grid_points();
        assert_eq!(g[0].beta, g[1].beta);
        assert_eq!(g[0].theta, Some(4.71238898038469));
    }

    #[test]
    fn field_paths_in_errors() {
        let bad = FIG2.replace("\"Omega\": 100.0", "\"Omega\": \"big\"");
        match RunConfig::from_json(&bad, Path::new(".")) {
            Err(Error::Config { path, .. }) => assert!(path.contains("bath"), "{path}"),
            other => panic!("{other:?}"),
        }
        let bad = FIG2.replace("\"n\": 50", "\"n\": 0");
        match RunConfig::from_json(&bad, Path::new(".")) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "beta_grid.n"),
            other => panic!("{other:?}"),
        }
        let bad = FIG2.replace("\"gamma\": 0.1", "\"gama\": 0.1");
        assert!(matches!(RunConfig::from_json(&bad, Path::new(".")), Err(Error::Config { .. })));
    }

    #[test]
    fn spectral_exponent_checked() {
        let bad = FIG2.replace("\"Omega\": 100.0", "\"Omega\": 100.0, \"a\": 2.0");
        match RunConfig::from_json(&bad, Path::new(".")) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "bath.a"),
            other => panic!("{other:?}"),
        }
        let ok = FIG2.replace("\"Omega\": 100.0", "\"Omega\": 100.0, \"a\": 1.0");
        assert!(RunConfig::from_json(&ok, Path::new(".")).is_ok());
    }

    #[test]
    fn matrix_files() {
        let dir = tempfile::tempdir().unwrap();
        let probe = r#"{"dim": 2, "hamiltonian": [[0.5,0],[0,0],[0,0],[-0.5,0]],
                        "coupling": [[0,0],[1,0],[1,0],[0,0]]}"#;
        std::fs::write(dir.path().join("p.json"), probe).unwrap();
        let cfg = r#"{"probe": {"kind": "matrix", "file": "p.json"},
                      "bath": {"kind": "discrete", "file": "p.json"},
                      "beta_grid": {"min": 1, "max": 1, "n": 1}}"#;
        let path = dir.path().join("c.json");
        std::fs::write(&path, cfg).unwrap();
        let c = RunConfig::from_path(&path).unwrap();
        let p = c.build_probe(None).unwrap();
        assert_eq!(p.dim(), 2);
        assert!(c.build_discrete_bath().is_ok());
        let bad = r#"{"dim": 2, "hamiltonian": [[0,0]], "coupling": []}"#;
        std::fs::write(dir.path().join("p.json"), bad).unwrap();
        assert!(matches!(RunConfig::from_path(&path), Err(Error::Config { .. })));
    }

    #[test]
    fn grids() {
        let g = Grid { min: 1.0, max: 100.0, n: 3, spacing: Spacing::Log };
        let v = g.values();
        assert!((v[1] - 10.0).abs() < 1e-12 && (v[2] - 100.0).abs() < 1e-12);
        let g = Grid { min: 0.0, max: 1.0, n: 5, spacing: Spacing::Linear };
        assert_eq!(g.values()[2], 0.5);
    }
}
