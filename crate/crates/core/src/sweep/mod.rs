//! Parameter sweeps over one or two axes.
//!
//! A [`SweepGrid`] names a task, up to two axes and a base configuration.
//! Every cell applies its axis values on top of the base configuration and
//! runs the task independently; cells that fail are kept as rows with NaN
//! outputs and the error token in the `error` column. Rows are written in
//! grid order (first axis outermost) regardless of the worker count.

mod figures;

pub use figures::{figure_dataset, FigureDataset, FIGURE_IDS};

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analytic::coefficients;
use crate::config::RunConfig;
use crate::dynamics::propagate;
use crate::error::{Error, Result};
use crate::model::{initial_density, InitialState};
use crate::noise::propagate_noisy;
use crate::spectral::{default_ep_tolerance, ep_locus_test, spectrum};
use crate::table::{Cell, Table};

pub const MAX_AXES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// Complex spectrum, widths, spacing and EP flag.
    Spectrum,
    /// `η₁(τ), η₂(τ)` from the noiseless propagator.
    Efficiency,
    /// Long-time efficiency η₀ from the closed form.
    Eta0,
    /// `η₁(τ), η₂(τ)` averaged over telegraph noise.
    NoisyEfficiency,
}

impl Task {
    pub fn output_columns(self) -> &'static [&'static str] {
        match self {
            Task::Spectrum => &["e1_re", "e1_im", "e2_re", "e2_im", "upsilon1", "upsilon2", "spacing", "is_ep"],
            Task::Efficiency | Task::NoisyEfficiency => &["eta1", "eta2"],
            Task::Eta0 => &["eta0"],
        }
    }
}

/// Numeric parameters that an axis may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    /// Splitting ε, applied as `ε₁ = −ε₂ = ε/2`.
    Eps,
    Eps1,
    Eps2,
    Gamma1,
    Gamma2,
    /// Real coupling `V = |V|`.
    V,
    VRe,
    VIm,
    D,
    GammaNoise,
    TFinal,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        match self {
            AxisParam::Eps => "eps",
            AxisParam::Eps1 => "eps1",
            AxisParam::Eps2 => "eps2",
            AxisParam::Gamma1 => "gamma1",
            AxisParam::Gamma2 => "gamma2",
            AxisParam::V => "v",
            AxisParam::VRe => "v_re",
            AxisParam::VIm => "v_im",
            AxisParam::D => "d",
            AxisParam::GammaNoise => "gamma_noise",
            AxisParam::TFinal => "t_final",
        }
    }

    fn apply(self, c: &mut RunConfig, x: f64) {
        match self {
            AxisParam::Eps => {
                c.eps1 = Some(0.5 * x);
                c.eps2 = Some(-0.5 * x);
            }
            AxisParam::Eps1 => c.eps1 = Some(x),
            AxisParam::Eps2 => c.eps2 = Some(x),
            AxisParam::Gamma1 => c.gamma1 = Some(x),
            AxisParam::Gamma2 => c.gamma2 = Some(x),
            AxisParam::V => {
                c.v_re = Some(x);
                c.v_im = Some(0.0);
            }
            AxisParam::VRe => c.v_re = Some(x),
            AxisParam::VIm => c.v_im = Some(x),
            AxisParam::D => c.d = Some(x),
            AxisParam::GammaNoise => c.gamma_noise = Some(x),
            AxisParam::TFinal => c.t_final = Some(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// One sweep axis: an evenly spaced range, an explicit list, or a set of
/// initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Axis {
    Range {
        param: AxisParam,
        min: f64,
        max: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
    List {
        param: AxisParam,
        values: Vec<f64>,
    },
    Init {
        init: Vec<InitialState>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum AxisValue {
    Num(AxisParam, f64),
    State(InitialState),
}

impl Axis {
    pub fn linear(param: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Axis::Range {
            param,
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn list(param: AxisParam, values: &[f64]) -> Self {
        Axis::List {
            param,
            values: values.to_vec(),
        }
    }

    pub fn column(&self) -> &'static str {
        match self {
            Axis::Range { param, .. } | Axis::List { param, .. } => param.name(),
            Axis::Init { .. } => "init",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGrid(format!("axis {}: {m}", self.column())));
        match self {
            Axis::Range {
                min,
                max,
                count,
                spacing,
                ..
            } => {
                if *count < 2 {
                    return bad(format!("count must be at least 2, got {count}"));
                }
                if !(min.is_finite() && max.is_finite()) {
                    return bad("bounds must be finite".into());
                }
                if *spacing == Spacing::Log && !(*min > 0.0 && *max > 0.0) {
                    return bad(format!("log spacing needs positive bounds, got [{min}, {max}]"));
                }
                Ok(())
            }
            Axis::List { values, .. } => {
                if values.is_empty() {
                    return bad("empty value list".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("values must be finite".into());
                }
                Ok(())
            }
            Axis::Init { init } if init.is_empty() => bad("empty state list".into()),
            Axis::Init { .. } => Ok(()),
        }
    }

    /// Numeric values of the axis (empty for an initial-state axis).
    pub fn numeric_values(&self) -> Vec<f64> {
        match self {
            Axis::Range {
                min,
                max,
                count,
                spacing,
                ..
            } => {
                let n = *count;
                (0..n)
                    .map(|k| {
                        let f = k as f64 / (n - 1) as f64;
                        match spacing {
                            Spacing::Linear => min + (max - min) * f,
                            Spacing::Log => (min.ln() + (max.ln() - min.ln()) * f).exp(),
                        }
                    })
                    .collect()
            }
            Axis::List { values, .. } => values.clone(),
            Axis::Init { .. } => Vec::new(),
        }
    }

    fn values(&self) -> Vec<AxisValue> {
        match self {
            Axis::Range { param, .. } | Axis::List { param, .. } => self
                .numeric_values()
                .into_iter()
                .map(|x| AxisValue::Num(*param, x))
                .collect(),
            Axis::Init { init } => init.iter().cloned().map(AxisValue::State).collect(),
        }
    }
}

/// Task, axes and the base configuration shared by every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub task: Task,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fixed: RunConfig,
}

impl SweepGrid {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidGrid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidGrid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.len() > MAX_AXES {
            return Err(Error::InvalidGrid(format!(
                "at most {MAX_AXES} axes, got {}",
                self.axes.len()
            )));
        }
        for a in &self.axes {
            a.validate()?;
        }
        let names: Vec<_> = self.axes.iter().map(Axis::column).collect();
        if names.len() == 2 && names[0] == names[1] {
            return Err(Error::InvalidGrid(format!("axis {} given twice", names[0])));
        }
        // a cell must be fully specified; probing one catches missing inputs
        let probe = self.cells().next().expect("grid has at least one cell");
        match self.cell_config(&probe).and_then(|(c, s)| self.check_inputs(&c, s.as_ref())) {
            Err(Error::Config(m)) => Err(Error::InvalidGrid(m)),
            _ => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values().len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cells(&self) -> impl Iterator<Item = Vec<AxisValue>> + '_ {
        let vals: Vec<Vec<AxisValue>> = self.axes.iter().map(Axis::values).collect();
        let n = self.len();
        (0..n).map(move |mut k| {
            let mut out = vec![AxisValue::Num(AxisParam::Eps, 0.0); vals.len()];
            for (j, v) in vals.iter().enumerate().rev() {
                out[j] = v[k % v.len()].clone();
                k /= v.len();
            }
            out
        })
    }

    fn cell_config(&self, cell: &[AxisValue]) -> Result<(RunConfig, Option<InitialState>)> {
        let mut c = self.fixed.clone();
        for v in cell {
            match v {
                AxisValue::Num(p, x) => p.apply(&mut c, *x),
                AxisValue::State(s) => c.init = Some(*s),
            }
        }
        let init = c.init;
        Ok((c, init))
    }

    fn check_inputs(&self, c: &RunConfig, init: Option<&InitialState>) -> Result<()> {
        c.model_params().map(|_| ()).or_else(|e| match e {
            Error::Config(_) => Err(e),
            _ => Ok(()),
        })?;
        let needs = |v: Option<()>, name: &str| v.ok_or_else(|| Error::Config(format!("missing required parameter: {name}")));
        match self.task {
            Task::Spectrum | Task::Eta0 => Ok(()),
            Task::Efficiency => {
                needs(init.map(|_| ()), "init")?;
                needs(c.t_final.map(|_| ()), "t_final")
            }
            Task::NoisyEfficiency => {
                needs(init.map(|_| ()), "init")?;
                needs(c.t_final.map(|_| ()), "t_final")?;
                needs(c.d.map(|_| ()), "d")?;
                needs(c.gamma_noise.map(|_| ()), "gamma_noise")
            }
        }
    }

    /// Header: axis columns, task outputs, `error`.
    pub fn columns(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.column())
            .chain(self.task.output_columns().iter().copied())
            .chain(["error"])
            .map(String::from)
            .collect()
    }

    fn run_cell(&self, cell: &[AxisValue]) -> Result<Vec<Cell>> {
        let (c, _) = self.cell_config(cell)?;
        let p = c.model_params()?;
        match self.task {
            Task::Spectrum => {
                let s = spectrum(&p);
                let ep = ep_locus_test(&p, default_ep_tolerance(&p)).is_ep;
                Ok(vec![
                    s.e1.re.into(),
                    s.e1.im.into(),
                    s.e2.re.into(),
                    s.e2.im.into(),
                    s.width1.into(),
                    s.width2.into(),
                    s.spacing.into(),
                    ep.into(),
                ])
            }
            Task::Eta0 => Ok(vec![coefficients(&p)?.eta0.into()]),
            Task::Efficiency => {
                let rho0 = initial_density(&c.initial_state()?, &p)?;
                let last = *propagate(&p, &rho0, &c.integrator(None)?)?.last();
                Ok(vec![last.eta1.into(), last.eta2.into()])
            }
            Task::NoisyEfficiency => {
                let rho0 = initial_density(&c.initial_state()?, &p)?;
                let r = propagate_noisy(&p, &c.noise_params()?, &rho0, &c.integrator(None)?)?;
                let last = *r.record.last();
                Ok(vec![last.eta1.into(), last.eta2.into()])
            }
        }
    }

    fn row(&self, cell: &[AxisValue]) -> Vec<Cell> {
        let mut row: Vec<Cell> = cell
            .iter()
            .map(|v| match v {
                AxisValue::Num(_, x) => Cell::Num(*x),
                AxisValue::State(s) => Cell::Text(s.label().to_string()),
            })
            .collect();
        match self.run_cell(cell) {
            Ok(out) => {
                row.extend(out);
                row.push(Cell::Text(String::new()));
            }
            Err(e) => {
                row.extend(self.task.output_columns().iter().map(|_| Cell::Num(f64::NAN)));
                row.push(Cell::Text(e.token().to_string()));
            }
        }
        row
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Recorded in the manifest.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub started_at: String,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub table: Table,
    pub manifest: Manifest,
}

/// Sidecar manifest path: `out.csv` becomes `out.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

impl SweepResult {
    /// Writes the table to `out` and the manifest next to it.
    pub fn write(&self, out: &Path, format: crate::table::Format) -> Result<()> {
        self.table.write(out, format)?;
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(manifest_path(out), text + "\n")?;
        Ok(())
    }
}

pub fn run_sweep(grid: &SweepGrid, options: SweepOptions) -> Result<SweepResult> {
    grid.validate()?;
    let started_at = chrono::Utc::now().to_rfc3339();
    let clock = Instant::now();
    let cells: Vec<Vec<AxisValue>> = grid.cells().collect();
    let compute = || cells.par_iter().map(|c| grid.row(c)).collect::<Vec<_>>();
    let rows = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(compute),
        None => compute(),
    };
    let mut table = Table::new(grid.columns());
    for r in rows {
        table.push(r);
    }
    let manifest = Manifest {
        config: json!(grid),
        seed: options.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        elapsed_s: clock.elapsed().as_secs_f64(),
    };
    Ok(SweepResult { table, manifest })
}
