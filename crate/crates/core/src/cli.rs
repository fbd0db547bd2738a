//! Command-line driver: configuration resolution, the five subcommands and
//! their output files.
//!
//! Settings are resolved as flags over config file over defaults. Every run
//! writes `manifest.toml` into the output directory before any computation;
//! the manifest is itself a valid config file for rerunning.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{
    classical_ellipse, confocal_phase_cells, orbit_circle, worldsheet_cylinder, write_geometry_csv,
    write_summary_csv, OrbitGeometry, DEFAULT_ANGULAR_SAMPLES, DEFAULT_TIME_SAMPLES,
};
use crate::klein_gordon::{
    assemble_kg_operator_4d_with_budget, eigenmode_history, energy_drift, kg_null_residual,
    kg_residual_3plus1, product_eigenmode, write_energy_csv, write_trajectory_csv, InitialCondition,
    Leapfrog, DEFAULT_MEMORY_BUDGET,
};
use crate::lattice::{
    build_delta_circ, build_delta_sharp, commutator, LatticeOperator, LatticeShape, TruncatedBasis,
    WaveFunction, DEFAULT_INTERIOR_MARGIN,
};
use crate::oscillator::{
    continuum_eigenstate_q, continuum_eigenstate_y, discrete_hamiltonian, linspace,
    solve_discrete_spectrum, write_eigenfunction_csv, write_spectrum_csv, PhysicalConstants,
    SpectrumRow,
};
use crate::poincare::{
    build_finite_transform, build_generators_with, check_boost_invariance_3plus1,
    check_casimir_commutation, check_null_transport, check_rotation_invariance_3plus1,
    invariance_report, BoostCheckConfig, PoincareParams, PositionConvention, CASIMIR_MARGIN,
    ROTATION_PAIRS,
};
use crate::quadrature::AdaptiveConfig;
use crate::report::{all_pass, write_reports_csv, write_reports_json, InvarianceReport};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_ASSERTION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_UNSTABLE: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

const ONE_AXIS_NMAX: usize = 64;
const FOUR_AXIS_NMAX: usize = 6;
const SPECTRUM_TOLERANCE: f64 = 1e-10;
const DRIFT_TOLERANCE: f64 = 1e-6;
const AMPLITUDE_TOLERANCE: f64 = 1e-4;
const REVERSAL_TOLERANCE: f64 = 1e-10;
// Leapfrog satisfies the discrete equation up to rounding amplified by 1/dt².
const RESIDUAL_TOLERANCE: f64 = 1e-8;
const LEVEL_SET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Run(Error::Unstable { .. }) => EXIT_UNSTABLE,
            Self::Run(Error::MemoryBudget { .. }) => EXIT_BUDGET,
            Self::Run(
                Error::InvalidBasis(_)
                | Error::Domain(_)
                | Error::DimensionMismatch { .. }
                | Error::AxisOutOfRange { .. }
                | Error::HermiteDegreeTooLarge { .. }
                | Error::Parse(_),
            ) => EXIT_USAGE,
            Self::Run(_) => EXIT_ASSERTION,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::Run(Error::Io(err))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "phasecell", version, about = "Discrete phase-space oscillator, Klein-Gordon and Poincaré checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Commutator and symmetry checks of the difference operators.
    OpsCheck,
    /// Oscillator spectra in three representations and eigenfunction tables.
    Oscillator,
    /// Leapfrog evolution of the (3+1) Klein-Gordon equation.
    Kg,
    /// Casimir, finite-transform and boost checks on the four-axis lattice.
    Poincare,
    /// Ellipse, circle and cylinder point sets.
    Geometry,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::OpsCheck => "ops-check",
            Self::Oscillator => "oscillator",
            Self::Kg => "kg",
            Self::Poincare => "poincare",
            Self::Geometry => "geometry",
        }
    }

    fn default_n_max(&self) -> usize {
        match self {
            Self::Kg | Self::Poincare => FOUR_AXIS_NMAX,
            _ => ONE_AXIS_NMAX,
        }
    }

    fn default_modes(&self) -> [usize; 3] {
        match self {
            Self::Poincare => [3, 1, 0],
            _ => [0, 0, 0],
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Fundamental,
    Explicit,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    Zero,
    Eigenmode,
    Gaussian,
    Random,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Circle,
    Ellipse,
    Cells,
    Cylinder,
}

/// Optional settings, shared by the flag parser and the config file.
#[derive(Args, Deserialize, Default, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Flat TOML config file; flags override its values.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(skip)]
    pub command: Option<String>,
    /// Recorded in manifests; ignored on input.
    #[arg(skip)]
    pub version: Option<String>,
    /// Truncation level per axis.
    #[arg(long = "nmax", global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub units: Option<Units>,
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub l: Option<f64>,
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Replaces the tolerance of every threshold check.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Initial data for `kg`.
    #[arg(long, value_enum, global = true)]
    pub initial: Option<InitialKind>,
    /// Per-axis mode numbers of the eigenmode initial data.
    #[arg(long, value_delimiter = ',', global = true)]
    pub modes: Option<Vec<usize>>,
    /// Gaussian width in lattice units.
    #[arg(long, global = true)]
    pub width: Option<f64>,
    /// Level list N for `geometry`.
    #[arg(long, value_delimiter = ',', num_args = 0..=1, global = true)]
    pub levels: Option<Vec<usize>>,
    /// Objects written by `geometry`.
    #[arg(long, value_enum, value_delimiter = ',', global = true)]
    pub objects: Option<Vec<ObjectKind>>,
    /// `E / ħν` of the classical ellipse.
    #[arg(long, global = true)]
    pub energy: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    /// Angular samples per orbit.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub time_samples: Option<usize>,
    /// Translation `c^μ`, four values.
    #[arg(long = "c-mu", value_delimiter = ',', allow_negative_numbers = true, global = true)]
    pub c_mu: Option<Vec<f64>>,
    /// `ω^{αβ}` for (1,2) (1,3) (1,4) (2,3) (2,4) (3,4), axis 4 being time.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, global = true)]
    pub omega: Option<Vec<f64>>,
    /// Dense-memory budget in bytes.
    #[arg(long, global = true)]
    pub memory_budget: Option<u64>,
    /// Snapshot stride of the trajectory file.
    #[arg(long, global = true)]
    pub trajectory_stride: Option<usize>,
    /// Highest continuum level checked by `oscillator`.
    #[arg(long, global = true)]
    pub continuum_levels: Option<usize>,
    /// Level tabulated in the eigenfunction file.
    #[arg(long, global = true)]
    pub eigenfunction_n: Option<usize>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),+) => {
        Settings { $($field: $top.$field.or($base.$field),)+ }
    };
}

impl Settings {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `self` wherever set, `base` elsewhere.
    pub fn over(self, base: Settings) -> Settings {
        overlay!(
            self, base, config, command, version, n_max, mass, dt, steps, units, hbar, c, l, nu, out, format, tolerance,
            seed, initial, modes, width, levels, objects, energy, t_min, t_max, samples, time_samples, c_mu,
            omega, memory_budget, trajectory_stride, continuum_levels, eigenfunction_n
        )
    }
}

/// Fully resolved configuration; serialised as the run manifest.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub n_max: usize,
    pub mass: f64,
    pub dt: f64,
    pub steps: usize,
    pub units: Units,
    pub hbar: f64,
    pub c: f64,
    pub l: f64,
    pub nu: f64,
    pub out: PathBuf,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub initial: InitialKind,
    pub modes: [usize; 3],
    pub width: f64,
    pub levels: Vec<usize>,
    pub objects: Vec<ObjectKind>,
    pub energy: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub time_samples: usize,
    pub c_mu: [f64; 4],
    pub omega: [f64; 6],
    pub memory_budget: u64,
    pub trajectory_stride: usize,
    pub continuum_levels: usize,
    pub eigenfunction_n: usize,
    pub version: String,
}

fn positive(name: &str, value: f64) -> CliResult<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Usage(format!("{name} must be positive and finite, got {value}")))
    }
}

fn fixed<const N: usize, T: Copy>(name: &str, values: Vec<T>) -> CliResult<[T; N]> {
    let found = values.len();
    values
        .try_into()
        .map_err(|_| CliError::Usage(format!("{name} needs {N} values, got {found}")))
}

impl RunConfig {
    pub fn resolve(command: Command, settings: Settings) -> CliResult<Self> {
        let s = settings;
        if let Some(name) = &s.command {
            if name != command.name() {
                return Err(CliError::Usage(format!(
                    "config was written for `{name}`, not `{}`",
                    command.name()
                )));
            }
        }
        let units = s.units.unwrap_or(Units::Fundamental);
        let mut constants = [("hbar", s.hbar), ("c", s.c), ("l", s.l), ("nu", s.nu)].map(|(name, v)| (name, v.unwrap_or(1.0)));
        for (name, value) in &mut constants {
            *value = positive(name, *value)?;
            if units == Units::Fundamental && *value != 1.0 {
                return Err(CliError::Usage(format!("{name} = {value} requires --units explicit")));
            }
        }
        let n_max = s.n_max.unwrap_or(command.default_n_max());
        if n_max < 2 {
            return Err(CliError::Usage(format!("n_max must be at least 2, got {n_max}")));
        }
        let mass = s.mass.unwrap_or(1.0);
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(CliError::Usage(format!("mass must be non-negative, got {mass}")));
        }
        let steps = s.steps.unwrap_or(1000);
        if steps == 0 {
            return Err(CliError::Usage("steps must be positive".into()));
        }
        let levels = s.levels.unwrap_or_else(|| (0..=4).collect());
        if command == Command::Geometry && levels.is_empty() {
            return Err(CliError::Usage("level list is empty".into()));
        }
        let t_min = s.t_min.unwrap_or(0.0);
        let t_max = s.t_max.unwrap_or(1.0);
        if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
            return Err(CliError::Usage(format!("need t_min < t_max, got [{t_min}, {t_max}]")));
        }
        let omega = fixed::<6, f64>("omega", s.omega.unwrap_or_else(|| vec![0.0; 6]))?;
        let c_mu = fixed::<4, f64>("c-mu", s.c_mu.unwrap_or_else(|| vec![0.02, 0.03, 0.01, 0.04]))?;
        if omega.iter().chain(&c_mu).any(|v| !v.is_finite()) {
            return Err(CliError::Usage("c-mu and omega must be finite".into()));
        }
        if let Some(tol) = s.tolerance {
            positive("tolerance", tol)?;
        }
        Ok(Self {
            command: command.name().into(),
            n_max,
            mass,
            dt: positive("dt", s.dt.unwrap_or(0.01))?,
            steps,
            units,
            hbar: constants[0].1,
            c: constants[1].1,
            l: constants[2].1,
            nu: constants[3].1,
            out: s.out.unwrap_or_else(|| PathBuf::from("phasecell-out").join(command.name())),
            format: s.format.unwrap_or(Format::Csv),
            tolerance: s.tolerance,
            seed: s.seed.unwrap_or(0),
            initial: s.initial.unwrap_or(InitialKind::Eigenmode),
            modes: fixed::<3, usize>("modes", s.modes.unwrap_or_else(|| command.default_modes().to_vec()))?,
            width: positive("width", s.width.unwrap_or(1.0))?,
            levels,
            objects: s.objects.unwrap_or_else(|| vec![ObjectKind::Circle]),
            energy: positive("energy", s.energy.unwrap_or(0.5))?,
            t_min,
            t_max,
            samples: s.samples.unwrap_or(DEFAULT_ANGULAR_SAMPLES),
            time_samples: s.time_samples.unwrap_or(DEFAULT_TIME_SAMPLES),
            c_mu,
            omega,
            memory_budget: s.memory_budget.unwrap_or(DEFAULT_MEMORY_BUDGET as u64),
            trajectory_stride: s.trajectory_stride.unwrap_or(10).max(1),
            continuum_levels: s.continuum_levels.unwrap_or(12),
            eigenfunction_n: s.eigenfunction_n.unwrap_or(2),
            version: env!("CARGO_PKG_VERSION").into(),
        })
    }

    pub fn constants(&self) -> CliResult<PhysicalConstants> {
        Ok(match self.units {
            Units::Fundamental => PhysicalConstants::fundamental(),
            Units::Explicit => PhysicalConstants::explicit(self.hbar, self.c, self.l, self.nu)?,
        })
    }

    pub fn params(&self) -> CliResult<PoincareParams> {
        let mut params = PoincareParams::translation(self.c_mu)?;
        for (&(a, b), &w) in ROTATION_PAIRS.iter().zip(&self.omega) {
            params = params.with_omega(a, b, w)?;
        }
        Ok(params)
    }

    pub fn initial_condition(&self) -> InitialCondition {
        match self.initial {
            InitialKind::Zero => InitialCondition::Zero,
            InitialKind::Eigenmode => InitialCondition::Eigenmode { modes: self.modes },
            InitialKind::Gaussian => InitialCondition::Gaussian {
                centre: [self.n_max as f64 / 2.0; 3],
                width: self.width,
            },
            InitialKind::Random => InitialCondition::Random { seed: self.seed },
        }
    }

    fn basis(&self) -> CliResult<TruncatedBasis> {
        TruncatedBasis::new(self.n_max).map_err(|e| CliError::Usage(e.to_string()))
    }

    fn shape(&self, axes: usize) -> CliResult<LatticeShape> {
        Ok(LatticeShape::uniform(self.basis()?, axes)?)
    }

    pub fn write_manifest(&self) -> CliResult<PathBuf> {
        let text = toml::to_string(self).map_err(|e| CliError::Run(Error::Parse(e.to_string())))?;
        let path = self.out.join("manifest.toml");
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Reports produced by a run and the files it wrote.
#[derive(Debug, Default)]
pub struct Outcome {
    pub reports: Vec<InvarianceReport>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if all_pass(&self.reports) {
            EXIT_PASS
        } else {
            EXIT_ASSERTION
        }
    }
}

/// Resolves settings for `command` (flags over `--config` file over
/// defaults), writes the manifest and runs the subcommand.
pub fn run(command: Command, flags: Settings) -> CliResult<Outcome> {
    let settings = match &flags.config {
        Some(path) => flags.clone().over(Settings::load(path)?),
        None => flags,
    };
    let config = RunConfig::resolve(command, settings)?;
    fs::create_dir_all(&config.out)?;
    let manifest = config.write_manifest()?;
    let mut outcome = match command {
        Command::OpsCheck => cmd_ops_check(&config),
        Command::Oscillator => cmd_oscillator(&config),
        Command::Kg => cmd_kg(&config),
        Command::Poincare => cmd_poincare(&config),
        Command::Geometry => cmd_geometry(&config),
    }?;
    outcome.files.insert(0, manifest);
    Ok(outcome)
}

fn create(config: &RunConfig, name: &str) -> CliResult<(BufWriter<File>, PathBuf)> {
    let path = config.out.join(name);
    Ok((BufWriter::new(File::create(&path)?), path))
}

fn finish_reports(config: &RunConfig, mut reports: Vec<InvarianceReport>, outcome: &mut Outcome) -> CliResult<()> {
    if let Some(tol) = config.tolerance {
        for r in reports.iter_mut().filter(|r| !matches!(r.test.as_str(), "boost_3plus1_slope" | "rotation_3plus1")) {
            r.tolerance = tol;
            r.pass = r.norm_interior < tol;
        }
    }
    let (mut out, path) = create(config, &format!("reports.{}", config.format.extension()))?;
    match config.format {
        Format::Csv => write_reports_csv(&mut out, &reports)?,
        Format::Json => write_reports_json(&mut out, &reports)?,
    }
    outcome.files.push(path);
    outcome.reports.extend(reports);
    Ok(())
}

/// Structure of the one-axis difference operators.
pub fn cmd_ops_check(config: &RunConfig) -> CliResult<Outcome> {
    let basis = config.basis()?;
    let n_max = basis.n_max();
    let margin = DEFAULT_INTERIOR_MARGIN;
    let circ = build_delta_circ(basis);
    let sharp = build_delta_sharp(basis);
    // entries are rounded square roots, so exactness holds to a few ulp of N
    let tol = 8.0 * f64::EPSILON * n_max as f64;
    let identity = LatticeOperator::identity(LatticeShape::single(basis));
    let defect = commutator(&sharp, &circ)?.try_sub(&identity)?;
    let diag = LatticeOperator::from_triplets(
        LatticeShape::single(basis),
        Some(0),
        (0..basis.len()).map(|n| (n, n, Complex64::new(n as f64 + 0.5, 0.0))).collect::<Vec<_>>(),
    )?;
    let hamiltonian = discrete_hamiltonian(basis, &PhysicalConstants::fundamental()).try_sub(&diag)?;
    let circ_sym = circ.try_sub(&circ.transpose())?.max_abs();
    let sharp_anti = sharp.try_add(&sharp.transpose())?.max_abs();
    let reports = vec![
        InvarianceReport::below("commutator_sharp_circ", n_max, margin, defect.interior_max_abs(margin), defect.max_abs(), tol),
        InvarianceReport::below("hamiltonian_diagonal", n_max, margin, hamiltonian.interior_max_abs(margin), hamiltonian.max_abs(), tol),
        InvarianceReport::below("delta_circ_symmetric", n_max, 0, circ_sym, circ_sym, f64::MIN_POSITIVE),
        InvarianceReport::below("delta_sharp_antisymmetric", n_max, 0, sharp_anti, sharp_anti, f64::MIN_POSITIVE),
    ];
    let mut outcome = Outcome::default();
    finish_reports(config, reports, &mut outcome)?;
    Ok(outcome)
}

/// Spectra from the discrete solver and both continuum representations.
pub fn cmd_oscillator(config: &RunConfig) -> CliResult<Outcome> {
    let basis = config.basis()?;
    let n_max = basis.n_max();
    let constants = config.constants()?;
    let hnu = constants.hbar_nu();
    let exact = |n: usize| n as f64 + 0.5;

    let discrete = solve_discrete_spectrum(basis, &constants)?;
    let mut rows = Vec::new();
    let (mut disc_interior, mut disc_full, mut overlap_defect) = (0.0f64, 0.0f64, 0.0f64);
    for state in &discrete {
        let err = (state.eigenvalue() - exact(state.n())).abs();
        disc_full = disc_full.max(err);
        if state.is_interior() {
            disc_interior = disc_interior.max(err);
            let overlap = state.vector().amplitudes()[state.n()].norm();
            overlap_defect = overlap_defect.max(1.0 - overlap);
            rows.push(SpectrumRow {
                representation: "discrete",
                n: state.n(),
                energy: state.energy(),
            });
        }
    }

    let quad = AdaptiveConfig::default();
    let (mut q_err, mut y_err, mut spread) = (0.0f64, 0.0f64, 0.0f64);
    let mut continuum = Vec::new();
    for n in 0..=config.continuum_levels {
        let q = continuum_eigenstate_q(n, &constants)?.rayleigh_energy(quad)?;
        let y = continuum_eigenstate_y(n, &constants)?.rayleigh_energy(quad)?;
        q_err = q_err.max((q - exact(n)).abs());
        y_err = y_err.max((y - exact(n)).abs());
        if let Some(d) = discrete.iter().find(|s| s.n() == n && s.is_interior()) {
            spread = spread.max((q - d.eigenvalue()).abs()).max((y - d.eigenvalue()).abs());
        }
        spread = spread.max((q - y).abs());
        continuum.push((n, q, y));
    }
    rows.extend(continuum.iter().map(|&(n, q, _)| SpectrumRow {
        representation: "position",
        n,
        energy: q * hnu,
    }));
    rows.extend(continuum.iter().map(|&(n, _, y)| SpectrumRow {
        representation: "y",
        n,
        energy: y * hnu,
    }));

    let mut outcome = Outcome::default();
    let (mut out, path) = create(config, "spectrum.csv")?;
    write_spectrum_csv(&mut out, &rows)?;
    outcome.files.push(path);

    let state = continuum_eigenstate_q(config.eigenfunction_n, &constants)?;
    let (mut out, path) = create(config, "eigenfunctions.csv")?;
    write_eigenfunction_csv(&mut out, &[state], &linspace(-5.0, 5.0, 101))?;
    outcome.files.push(path);

    let margin = basis.interior_margin();
    let reports = vec![
        InvarianceReport::below("discrete_spectrum", n_max, margin, disc_interior, disc_full, SPECTRUM_TOLERANCE),
        InvarianceReport::below("discrete_eigenvectors", n_max, margin, overlap_defect, overlap_defect, SPECTRUM_TOLERANCE),
        InvarianceReport::below("position_rayleigh", n_max, margin, q_err, q_err, SPECTRUM_TOLERANCE),
        InvarianceReport::below("y_rayleigh", n_max, margin, y_err, y_err, SPECTRUM_TOLERANCE),
        InvarianceReport::below("representation_agreement", n_max, margin, spread, spread, SPECTRUM_TOLERANCE),
    ];
    finish_reports(config, reports, &mut outcome)?;
    Ok(outcome)
}

/// Leapfrog run with trajectory, energy and residual outputs.
pub fn cmd_kg(config: &RunConfig) -> CliResult<Outcome> {
    let shape = config.shape(3)?;
    let n_max = config.n_max;
    let leapfrog = Leapfrog::new(&shape, config.mass)?;
    leapfrog.check_step(config.dt)?;
    let initial = config.initial_condition().build(&shape, config.mass)?;
    let history = leapfrog.evolve_with_history(&initial, config.dt, config.steps, 1)?;

    let mut outcome = Outcome::default();
    let (mut out, path) = create(config, "trajectory.csv")?;
    write_trajectory_csv(&mut out, &history, config.trajectory_stride)?;
    outcome.files.push(path);
    let (mut out, path) = create(config, "energy.csv")?;
    write_energy_csv(&mut out, &history, leapfrog.generator(), config.dt)?;
    outcome.files.push(path);

    let drift = energy_drift(&history, leapfrog.generator(), config.dt)?;
    let residual = kg_residual_3plus1(&history)?;
    let back = leapfrog.evolve(history.last(), -config.dt, config.steps)?;
    let reversal = (back.phi() - initial.phi()).max_abs().max((back.phi_dot() - initial.phi_dot()).max_abs());
    let mut reports = vec![
        InvarianceReport::below("kg_energy_drift", n_max, 0, drift.modified, drift.plain, DRIFT_TOLERANCE),
        InvarianceReport::below("kg_residual", n_max, 0, residual, residual, RESIDUAL_TOLERANCE),
        InvarianceReport::below("kg_time_reversal", n_max, 0, reversal, reversal, REVERSAL_TOLERANCE),
    ];
    if config.initial == InitialKind::Eigenmode {
        let mode = product_eigenmode(&shape, config.mass, config.modes)?;
        let amplitude = history
            .states()
            .iter()
            .map(|s| {
                let expected = mode.vector.scaled(Complex64::new((mode.omega * s.t()).cos(), 0.0));
                (s.phi() - &expected).max_abs()
            })
            .fold(0.0, f64::max);
        reports.push(InvarianceReport::below("kg_eigenmode_amplitude", n_max, 0, amplitude, amplitude, AMPLITUDE_TOLERANCE));
    }
    finish_reports(config, reports, &mut outcome)?;
    Ok(outcome)
}

/// Gaussian bump centred in the lattice, used as the four-axis test vector.
fn centred_bump(shape: &LatticeShape, n_max: usize) -> WaveFunction {
    let centre = n_max as f64 / 2.0;
    WaveFunction::from_fn(shape.clone(), |n| {
        let r2: f64 = n.iter().map(|&k| (k as f64 - centre).powi(2)).sum();
        Complex64::new((-0.5 * r2).exp(), 0.0)
    })
}

/// Casimir commutators, finite transforms and the (3+1) boost and rotation
/// checks.
pub fn cmd_poincare(config: &RunConfig) -> CliResult<Outcome> {
    let shape = config.shape(4)?;
    let n_max = config.n_max;
    let budget = u128::from(config.memory_budget);
    let op = assemble_kg_operator_4d_with_budget(&shape, config.mass, budget)?;
    let gens = build_generators_with(&shape, PositionConvention::MetricWeighted, budget)?;
    let params = config.params()?;
    let mut reports = check_casimir_commutation(&gens)?;

    let zero = build_finite_transform(&gens, &PoincareParams::zero())?;
    let defect = zero.identity_defect();
    reports.push(InvarianceReport::below("transform_zero_identity", n_max, 0, defect, defect, f64::MIN_POSITIVE));

    let phi = centred_bump(&shape, n_max);
    let translation = PoincareParams::translation(params.c())?;
    let u = build_finite_transform(&gens, &translation)?;
    let orth = u.orthogonality_defect();
    reports.push(InvarianceReport::below("transform_translation_orthogonal", n_max, 0, orth, orth, 1e-12));
    reports.push(invariance_report(&op, &u, &translation, &phi)?);

    if !params.is_translation() {
        let u = build_finite_transform(&gens, &params)?;
        reports.push(invariance_report(&op, &u, &params, &phi)?);
        let null = kg_null_residual(&op)?;
        reports.push(check_null_transport(&op, &u, &null.vector)?);
    }

    // the first-order checks fall back to a unit boost and a small rotation
    let omega = params.omega();
    let spatial = config.shape(3)?;
    let boost = if (0..3).any(|j| omega[j][3] != 0.0) {
        params
    } else {
        PoincareParams::zero().with_omega(0, 3, 1.0)?
    };
    let history = eigenmode_history(&spatial, config.mass, config.modes, -1.0, 0.01, 201)?;
    let report = check_boost_invariance_3plus1(&history, &boost, &BoostCheckConfig::default())?;
    reports.push(report.to_report(n_max, BoostCheckConfig::default().spatial_margin));
    let rotation = if omega[0][1] != 0.0 || omega[0][2] != 0.0 || omega[1][2] != 0.0 {
        params
    } else {
        PoincareParams::zero().with_omega(0, 1, 0.05)?
    };
    let history = eigenmode_history(&spatial, config.mass, config.modes, 0.0, 0.01, 21)?;
    reports.push(check_rotation_invariance_3plus1(&history, &rotation, CASIMIR_MARGIN)?);

    let mut outcome = Outcome::default();
    finish_reports(config, reports, &mut outcome)?;
    Ok(outcome)
}

/// Orbit point sets and their summary.
pub fn cmd_geometry(config: &RunConfig) -> CliResult<Outcome> {
    let constants = config.constants()?;
    let mut geometries: Vec<OrbitGeometry> = Vec::new();
    for kind in &config.objects {
        match kind {
            ObjectKind::Circle => {
                for &n in &config.levels {
                    geometries.push(orbit_circle(n, config.samples)?);
                }
            }
            ObjectKind::Ellipse => geometries.push(classical_ellipse(config.energy, &constants, config.samples)?),
            ObjectKind::Cells => geometries.extend(confocal_phase_cells(&config.levels, &constants, config.samples)?),
            ObjectKind::Cylinder => {
                for &n in &config.levels {
                    geometries.push(worldsheet_cylinder(n, config.t_min, config.t_max, config.samples, config.time_samples)?);
                }
            }
        }
    }
    let mut outcome = Outcome::default();
    let (mut out, path) = create(config, "geometry.csv")?;
    write_geometry_csv(&mut out, &geometries)?;
    outcome.files.push(path);
    let (mut out, path) = create(config, &format!("summary.{}", config.format.extension()))?;
    match config.format {
        Format::Csv => write_summary_csv(&mut out, &geometries)?,
        Format::Json => {
            let summaries: Vec<_> = geometries.iter().map(OrbitGeometry::summary).collect();
            serde_json::to_writer_pretty(&mut out, &summaries).map_err(std::io::Error::from)?;
        }
    }
    outcome.files.push(path);
    let residual = geometries.iter().map(OrbitGeometry::level_set_residual).fold(0.0, f64::max);
    let reports = vec![InvarianceReport::below("geometry_level_set", 0, 0, residual, residual, LEVEL_SET_TOLERANCE)];
    finish_reports(config, reports, &mut outcome)?;
    Ok(outcome)
}
