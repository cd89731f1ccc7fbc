use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_sink_core::{Format, InitialState, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "dirac-sink",
    version,
    about = "Non-Hermitian two-level graphene model with sinks: spectra, dynamics, noise and sweeps",
    after_help = "Energies and rates are in ps^-1 (1 ps^-1 = 0.66 meV), times in ps.\n\
                  DIRAC_SINK_THREADS caps the number of worker threads."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat key = value config file; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file (stdout when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// RNG seed for Monte-Carlo runs (recorded in sweep manifests)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

/// Model, noise and time parameters shared by the subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// Level splitting ε = ε1 − ε2, split symmetrically [ps^-1]
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["eps1", "eps2"])]
    pub eps: Option<f64>,
    /// Site energy ε1 [ps^-1]
    #[arg(long, allow_hyphen_values = true)]
    pub eps1: Option<f64>,
    /// Site energy ε2 [ps^-1]
    #[arg(long, allow_hyphen_values = true)]
    pub eps2: Option<f64>,
    /// Sink rate Γ1 on sublattice A [ps^-1]
    #[arg(long)]
    pub gamma1: Option<f64>,
    /// Sink rate Γ2 on sublattice B [ps^-1]
    #[arg(long)]
    pub gamma2: Option<f64>,
    /// Re V, coupling X [ps^-1]
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["qx", "qy", "vf"])]
    pub v_re: Option<f64>,
    /// Im V, coupling Y [ps^-1]
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["qx", "qy", "vf"])]
    pub v_im: Option<f64>,
    /// Wave-vector offset q_x from the Dirac point [m^-1]
    #[arg(long, allow_hyphen_values = true)]
    pub qx: Option<f64>,
    /// Wave-vector offset q_y from the Dirac point [m^-1]
    #[arg(long, allow_hyphen_values = true)]
    pub qy: Option<f64>,
    /// Fermi velocity v_F [m/s]; V = 2 v_F (q_x + i q_y) x 1e-12 ps^-1
    #[arg(long)]
    pub vf: Option<f64>,
    /// Initial state: site-a, site-b, band-plus, band-minus
    #[arg(long)]
    pub init: Option<InitialState>,
    /// Noise amplitude asymmetry d = d1 − d2 [ps^-1]
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<f64>,
    /// Telegraph flip rate γ; correlations decay as exp(−2γ|s|) [ps^-1]
    #[arg(long)]
    pub gamma_noise: Option<f64>,
    /// Evolution time τ [ps]
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Fixed RK4 step [ps]; adaptive Dormand–Prince when omitted
    #[arg(long)]
    pub dt: Option<f64>,
}

impl Params {
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            eps1: self.eps.map(|e| 0.5 * e).or(self.eps1),
            eps2: self.eps.map(|e| -0.5 * e).or(self.eps2),
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            v_re: self.v_re,
            v_im: self.v_im,
            qx: self.qx,
            qy: self.qy,
            vf: self.vf,
            init: self.init,
            d: self.d,
            gamma_noise: self.gamma_noise,
            t_final: self.t_final,
            dt: self.dt,
        }
    }
}

/// A Γ1 grid on `[min, max]`.
#[derive(Debug, Clone, Args)]
pub struct Gamma1Grid {
    /// Smallest Γ1 [ps^-1]
    #[arg(long, default_value_t = 0.0)]
    pub gamma1_min: f64,
    /// Largest Γ1 [ps^-1]
    #[arg(long, default_value_t = 20.0)]
    pub gamma1_max: f64,
    /// Number of Γ1 values
    #[arg(long, default_value_t = 201)]
    pub gamma1_count: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complex eigenvalues, half-widths, spacing and EP flag
    Spectrum {
        #[command(flatten)]
        params: Params,
    },
    /// Biorthogonal eigenvectors and their self-overlaps (fails on an EP)
    Ep {
        #[command(flatten)]
        params: Params,
    },
    /// Γ1 values where the resonance widths overlap the level spacing
    Criterion {
        #[command(flatten)]
        params: Params,
        /// Upper end of the root search [ps^-1]; default 10·sqrt(|V|² + 2ε²)
        #[arg(long)]
        gamma_max: Option<f64>,
    },
    /// Superradiance transition: Γ1 maximizing the subradiant half-width
    St {
        #[command(flatten)]
        params: Params,
        /// Upper end of the Γ1 grid [ps^-1]; default 10·sqrt(|V|² + 2ε²)
        #[arg(long)]
        gamma_max: Option<f64>,
        /// Number of Γ1 grid points (at least 100)
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Density matrix and sink efficiencies versus time
    Propagate {
        #[command(flatten)]
        params: Params,
        /// Spacing of output samples [ps]
        #[arg(long, default_value_t = 0.1)]
        sample_interval: f64,
    },
    /// Efficiencies η1(τ), η2(τ) versus Γ1
    Efficiency {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        grid: Gamma1Grid,
        /// Average over telegraph noise (needs --d and --gamma-noise)
        #[arg(long)]
        noisy: bool,
    },
    /// Long-time efficiency η0 over a (Γ1, ε) grid for a start on sublattice B
    Eta0 {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        grid: Gamma1Grid,
        /// Smallest ε [ps^-1]
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        eps_min: f64,
        /// Largest ε [ps^-1]
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        eps_max: f64,
        /// Number of ε values
        #[arg(long, default_value_t = 101)]
        eps_count: usize,
    },
    /// Noise-averaged density matrix and efficiencies versus time
    Noisy {
        #[command(flatten)]
        params: Params,
        /// Spacing of output samples [ps]
        #[arg(long, default_value_t = 0.1)]
        sample_interval: f64,
    },
    /// Monte-Carlo average over telegraph-noise trajectories (needs --seed)
    Mc {
        #[command(flatten)]
        params: Params,
        /// Spacing of output samples [ps]
        #[arg(long, default_value_t = 0.1)]
        sample_interval: f64,
        /// Number of trajectories (at least 100)
        #[arg(long, default_value_t = 10_000)]
        n_traj: usize,
    },
    /// Run a JSON sweep grid; writes the table and a .manifest.json sidecar
    Sweep {
        /// Sweep grid file
        grid: PathBuf,
    },
    /// Write the dataset of a figure (3 to 9)
    Figure {
        /// Figure number
        id: u32,
    },
}
