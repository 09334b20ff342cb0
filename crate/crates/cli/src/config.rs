use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use magel::energy::AppliedField;
use magel::grid::{BoundarySpec, Datum, Face, Grid, LabelField, VectorField};
use magel::tensor::{AnisotropySpec, MaterialLaw, Matrix3, Vector3};
use magel::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    GammaStudy,
    StrayCheck,
    Geodesic,
    MinimizeLimit,
    MinimizeDiffuse,
    AlmostMinStudy,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::GammaStudy => "gamma-study",
            Experiment::StrayCheck => "stray-check",
            Experiment::Geodesic => "geodesic",
            Experiment::MinimizeLimit => "minimize-limit",
            Experiment::MinimizeDiffuse => "minimize-diffuse",
            Experiment::AlmostMinStudy => "almost-min-study",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawConfig {
    pub p: f64,
    pub q: f64,
    pub c_w: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for LawConfig {
    fn default() -> Self {
        let l = MaterialLaw::default();
        Self { p: l.p, q: l.q, c_w: l.c_w, a: l.a, b: l.b }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AnisotropyConfig {
    Uniaxial { kappa: f64, axis: [f64; 3] },
    Cubic { k1: f64, k2: f64, axes: [[f64; 3]; 3] },
    WellProduct { kappa: f64, wells: Vec<[f64; 3]> },
}

impl Default for AnisotropyConfig {
    fn default() -> Self {
        AnisotropyConfig::Uniaxial { kappa: 4.0, axis: [1.0, 0.0, 0.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldConfig {
    Uniform { value: [f64; 3] },
    Affine { a: [[f64; 3]; 3], c: [f64; 3] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineConfig {
    pub a: [[f64; 3]; 3],
    pub c: [f64; 3],
}

impl AffineConfig {
    pub fn scaled_identity(t: f64) -> Self {
        Self { a: [[t, 0.0, 0.0], [0.0, t, 0.0], [0.0, 0.0, t]], c: [0.0; 3] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// Face names `x-`, `x+`, `y-`, `y+`, `z-`, `z+`.
    pub faces: Vec<String>,
    pub datum: AffineConfig,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self { faces: vec!["x-".into()], datum: AffineConfig::scaled_identity(0.0) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LabelConfig {
    Constant { label: usize },
    /// Label `below` for `x[axis] < position`, `above` otherwise.
    Laminate { axis: usize, position: f64, below: usize, above: usize },
    Ball { center: [f64; 3], radius: f64, inside: usize, outside: usize },
}

/// Configuration file contents. Missing entries take per-experiment defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<Experiment>,
    pub n: Option<usize>,
    pub law: Option<LawConfig>,
    pub anisotropy: Option<AnisotropyConfig>,
    pub beta: Option<f64>,
    pub eps: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub field: Option<FieldConfig>,
    pub boundary: Option<BoundaryConfig>,
    pub labels: Option<LabelConfig>,
    pub displacement: Option<AffineConfig>,
    pub seed: Option<u64>,
    pub padding: Option<usize>,
    pub level: Option<usize>,
    pub radius: Option<f64>,
    pub steps: Option<usize>,
    pub step: Option<f64>,
    pub rounds: Option<usize>,
    pub perturbation: Option<f64>,
    pub output: Option<PathBuf>,
}

/// Fully resolved configuration; this is what `manifest.json` records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub law: LawConfig,
    pub anisotropy: AnisotropyConfig,
    pub beta: f64,
    pub eps: Vec<f64>,
    pub lambda: f64,
    pub field: FieldConfig,
    pub boundary: BoundaryConfig,
    pub labels: LabelConfig,
    pub displacement: AffineConfig,
    pub seed: u64,
    pub padding: usize,
    pub level: usize,
    pub radius: f64,
    pub steps: usize,
    pub step: f64,
    pub rounds: usize,
    pub perturbation: f64,
    pub output: PathBuf,
}

impl RawConfig {
    /// Fills unset entries with the defaults of `experiment` (or of the
    /// file's own experiment when `None`).
    pub fn resolve(self, experiment: Option<Experiment>) -> Result<ExperimentConfig> {
        let kind = match (experiment, self.experiment) {
            (Some(k), _) => k,
            (None, Some(k)) => k,
            (None, None) => return Err(Error::Validation("no experiment kind given".into())),
        };
        let n_default = match kind {
            Experiment::StrayCheck => 64,
            Experiment::MinimizeLimit | Experiment::MinimizeDiffuse | Experiment::AlmostMinStudy => 16,
            _ => 32,
        };
        let field_default = match kind {
            Experiment::MinimizeLimit | Experiment::MinimizeDiffuse | Experiment::AlmostMinStudy => {
                let t = 30f64.to_radians();
                FieldConfig::Uniform { value: [0.5 * t.cos(), 0.5 * t.sin(), 0.0] }
            }
            _ => FieldConfig::Uniform { value: [0.0; 3] },
        };
        let labels_default = match kind {
            Experiment::GammaStudy => LabelConfig::Laminate { axis: 0, position: 0.5, below: 0, above: 1 },
            _ => LabelConfig::Constant { label: 0 },
        };
        let eps_default = match kind {
            Experiment::MinimizeDiffuse => vec![0.1],
            Experiment::AlmostMinStudy => vec![0.1, 0.05],
            _ => vec![0.2, 0.1, 0.05, 0.025],
        };
        let displacement_default = match kind {
            Experiment::GammaStudy => AffineConfig::scaled_identity(0.1),
            _ => AffineConfig::scaled_identity(0.0),
        };
        let cfg = ExperimentConfig {
            experiment: kind,
            n: self.n.unwrap_or(n_default),
            law: self.law.unwrap_or_default(),
            anisotropy: self.anisotropy.unwrap_or_default(),
            beta: self.beta.unwrap_or(0.5),
            eps: self.eps.unwrap_or(eps_default),
            lambda: self.lambda.unwrap_or(0.0),
            field: self.field.unwrap_or(field_default),
            boundary: self.boundary.unwrap_or_default(),
            labels: self.labels.unwrap_or(labels_default),
            displacement: self.displacement.unwrap_or(displacement_default),
            seed: self.seed.unwrap_or(0),
            padding: self.padding.unwrap_or(2),
            level: self.level.unwrap_or(5),
            radius: self.radius.unwrap_or(0.25),
            steps: self.steps.unwrap_or(200),
            step: self.step.unwrap_or(1e-3),
            rounds: self.rounds.unwrap_or(50),
            perturbation: self.perturbation.unwrap_or(0.05),
            output: self.output.unwrap_or_else(|| PathBuf::from("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn vec3(v: [f64; 3]) -> Vector3<f64> {
    Vector3(v)
}

fn mat3(a: [[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3(a)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let law = self.law()?;
        law.check_beta(self.beta)?;
        if self.n < 4 {
            return Err(Error::Validation(format!("grid size n = {} is below 4", self.n)));
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Validation("epsilon schedule must be nonempty and positive".into()));
        }
        if self.eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Validation("epsilon schedule must be strictly decreasing".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::Validation(format!("stray weight lambda = {} must be nonnegative", self.lambda)));
        }
        if self.padding < 2 {
            return Err(Error::Validation(format!("padding factor {} must be at least 2", self.padding)));
        }
        if self.level < 2 {
            return Err(Error::Validation(format!("mesh level {} must be at least 2", self.level)));
        }
        if !(self.radius > 0.0 && self.radius < 0.5) {
            return Err(Error::Validation(format!("ball radius {} must lie in (0, 0.5)", self.radius)));
        }
        if !(self.step > 0.0) || !(self.perturbation >= 0.0) {
            return Err(Error::Validation("step and perturbation must be positive".into()));
        }
        let spec = self.anisotropy()?;
        self.label_field(&self.grid()?, spec.well_count())?;
        self.boundary()?;
        Ok(())
    }

    pub fn law(&self) -> Result<MaterialLaw<f64>> {
        let l = &self.law;
        MaterialLaw::new(l.p, l.q, l.c_w, l.a, l.b)
    }

    pub fn anisotropy(&self) -> Result<AnisotropySpec<f64>> {
        match &self.anisotropy {
            AnisotropyConfig::Uniaxial { kappa, axis } => AnisotropySpec::uniaxial(*kappa, vec3(*axis)),
            AnisotropyConfig::Cubic { k1, k2, axes } => AnisotropySpec::cubic(*k1, *k2, axes.map(vec3)),
            AnisotropyConfig::WellProduct { kappa, wells } => {
                AnisotropySpec::well_product(*kappa, wells.iter().map(|w| vec3(*w)).collect())
            }
        }
    }

    pub fn grid(&self) -> Result<Grid<f64>> {
        Grid::unit_cube(self.n)
    }

    pub fn field(&self) -> AppliedField<f64> {
        match &self.field {
            FieldConfig::Uniform { value } => AppliedField::Uniform(vec3(*value)),
            FieldConfig::Affine { a, c } => AppliedField::Affine { a: mat3(*a), c: vec3(*c) },
        }
    }

    pub fn boundary(&self) -> Result<BoundarySpec<f64>> {
        let faces = self
            .boundary
            .faces
            .iter()
            .map(|s| Face::parse(s).ok_or_else(|| Error::Validation(format!("unknown face {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let d = &self.boundary.datum;
        BoundarySpec::new(faces, Datum::Affine { a: mat3(d.a), c: vec3(d.c) })
    }

    pub fn label_field(&self, grid: &Grid<f64>, wells: usize) -> Result<LabelField<f64>> {
        match &self.labels {
            LabelConfig::Constant { label } => LabelField::constant(*grid, *label, wells),
            LabelConfig::Laminate { axis, position, below, above } => {
                if *axis > 2 {
                    return Err(Error::Validation(format!("laminate axis {axis} must be 0, 1 or 2")));
                }
                LabelField::from_fn(*grid, wells, |x| if x[*axis] < *position { *below } else { *above })
            }
            LabelConfig::Ball { center, radius, inside, outside } => {
                let c = vec3(*center);
                LabelField::from_fn(*grid, wells, |x| if (x - c).norm() < *radius { *inside } else { *outside })
            }
        }
    }

    pub fn displacement(&self, grid: &Grid<f64>) -> VectorField<f64> {
        let a = mat3(self.displacement.a);
        let c = vec3(self.displacement.c);
        VectorField::from_fn(*grid, move |x| a * x + c)
    }
}
