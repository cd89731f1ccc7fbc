mod args;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use dirac_sink_core::analytic::eta0_surface;
use dirac_sink_core::dynamics::linspace;
use dirac_sink_core::noise::mc::McConfig;
use dirac_sink_core::spectral::{default_ep_tolerance, default_gamma_max};
use dirac_sink_core::sweep::{figure_dataset, run_sweep, SweepGrid, SweepOptions};
use dirac_sink_core::{
    biorthogonal_eigenvectors, efficiency_curve, ep_locus_test, initial_density, mc_oracle, noisy_efficiency_curve,
    overlap_criterion_solve, propagate, propagate_noisy, spectrum, st_locate, Error, Format, Result, RunConfig, StGrid,
    Table,
};

use args::{Cli, Command, Common, Gamma1Grid, Params};

const THREADS_ENV: &str = "DIRAC_SINK_THREADS";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.token());
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for problems with the invocation, 1 for numerical failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidConfig(_)
        | Error::InvalidGrid(_)
        | Error::UnknownFigure(_)
        | Error::SeedRequired
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn load_config(common: &Common, params: &Params) -> Result<RunConfig> {
    let base = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    Ok(base.overlay(&params.to_config()))
}

fn emit(table: &Table, common: &Common) -> Result<()> {
    let format: Format = common.format.into();
    match &common.out {
        Some(path) => table.write(path, format),
        None => {
            print!("{}", table.render(format));
            Ok(())
        }
    }
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required parameter: {name}")))
}

/// `(ε, |V|, Γ2)` for the commands that do not need Γ1.
fn reduced_params(cfg: &RunConfig) -> Result<(f64, f64, f64)> {
    let eps = required(cfg.eps1, "eps1")? - required(cfg.eps2, "eps2")?;
    Ok((eps, cfg.coupling()?.norm(), required(cfg.gamma2, "gamma2")?))
}

fn gamma1_values(g: &Gamma1Grid) -> Result<Vec<f64>> {
    if g.gamma1_count < 2 || g.gamma1_max.partial_cmp(&g.gamma1_min) != Some(std::cmp::Ordering::Greater) || g.gamma1_min < 0.0 {
        return Err(Error::Config(format!(
            "gamma1 grid needs 0 <= min < max and count >= 2 (got [{}, {}], {})",
            g.gamma1_min, g.gamma1_max, g.gamma1_count
        )));
    }
    Ok(linspace(g.gamma1_min, g.gamma1_max, g.gamma1_count))
}

fn panel_path(out: &Path, label: &str) -> PathBuf {
    if label.is_empty() {
        return out.to_path_buf();
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("figure");
    let name = match out.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{label}.{ext}"),
        None => format!("{stem}_{label}"),
    };
    out.with_file_name(name)
}

fn run(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Spectrum { params } => {
            let p = load_config(common, params)?.model_params()?;
            let s = spectrum(&p);
            let ep = ep_locus_test(&p, default_ep_tolerance(&p));
            let mut t = Table::new([
                "e1_re", "e1_im", "e2_re", "e2_im", "upsilon1", "upsilon2", "spacing", "omega_re", "omega_im",
                "ep_distance", "is_ep",
            ]);
            t.push(vec![
                s.e1.re.into(),
                s.e1.im.into(),
                s.e2.re.into(),
                s.e2.im.into(),
                s.width1.into(),
                s.width2.into(),
                s.spacing.into(),
                s.omega.re.into(),
                s.omega.im.into(),
                ep.distance.into(),
                ep.is_ep.into(),
            ]);
            emit(&t, common)
        }
        Command::Ep { params } => {
            let p = load_config(common, params)?.model_params()?;
            let b = biorthogonal_eigenvectors(&p)?;
            let mut t = Table::new(["e1_re", "e1_im", "e2_re", "e2_im", "overlap1", "overlap2"]);
            t.push(vec![
                b.eigenvalues[0].re.into(),
                b.eigenvalues[0].im.into(),
                b.eigenvalues[1].re.into(),
                b.eigenvalues[1].im.into(),
                b.raw_overlaps[0].into(),
                b.raw_overlaps[1].into(),
            ]);
            emit(&t, common)
        }
        Command::Criterion { params, gamma_max } => {
            let (eps, v, g2) = reduced_params(&load_config(common, params)?)?;
            let roots = overlap_criterion_solve(eps, v, g2, *gamma_max)?;
            let mut t = Table::new(["gamma1_star"]);
            for r in roots {
                t.push(vec![r.into()]);
            }
            emit(&t, common)
        }
        Command::St {
            params,
            gamma_max,
            points,
        } => {
            let (eps, v, g2) = reduced_params(&load_config(common, params)?)?;
            let grid = StGrid {
                gamma_max: gamma_max.unwrap_or_else(|| default_gamma_max(eps, v)),
                points: *points,
            };
            let st = st_locate(eps, v, g2, grid)?;
            let star = overlap_criterion_solve(eps, v, g2, *gamma_max)
                .ok()
                .and_then(|r| r.first().copied())
                .unwrap_or(f64::NAN);
            let mut t = Table::new(["gamma1_st", "subradiant_width", "gamma1_star", "relative_gap"]);
            t.push(vec![
                st.gamma1.into(),
                st.subradiant_width.into(),
                star.into(),
                ((st.gamma1 - star) / st.gamma1).into(),
            ]);
            emit(&t, common)
        }
        Command::Propagate {
            params,
            sample_interval,
        } => {
            let cfg = load_config(common, params)?;
            let p = cfg.model_params()?;
            let rho0 = initial_density(&cfg.initial_state()?, &p)?;
            let record = propagate(&p, &rho0, &cfg.integrator(Some(*sample_interval))?)?;
            emit(&record.to_table(), common)
        }
        Command::Efficiency { params, grid, noisy } => {
            let mut cfg = load_config(common, params)?;
            let values = gamma1_values(grid)?;
            cfg.gamma1.get_or_insert(values[0]);
            let p = cfg.model_params()?;
            let init = cfg.initial_state()?;
            let icfg = cfg.integrator(None)?;
            let curve = if *noisy {
                noisy_efficiency_curve(&p, &cfg.noise_params()?, &values, &init, &icfg)?
            } else {
                efficiency_curve(&p, &values, &init, &icfg)?
            };
            emit(&curve.to_table(), common)
        }
        Command::Eta0 {
            params,
            grid,
            eps_min,
            eps_max,
            eps_count,
        } => {
            let cfg = load_config(common, params)?;
            let v = cfg.coupling()?.norm();
            let g2 = required(cfg.gamma2, "gamma2")?;
            if *eps_count < 1 || eps_max < eps_min {
                return Err(Error::Config("eps grid needs min <= max and count >= 1".into()));
            }
            let eps = linspace(*eps_min, *eps_max, *eps_count);
            emit(&eta0_surface(&gamma1_values(grid)?, &eps, g2, v).to_table(), common)
        }
        Command::Noisy {
            params,
            sample_interval,
        } => {
            let cfg = load_config(common, params)?;
            let p = cfg.model_params()?;
            let rho0 = initial_density(&cfg.initial_state()?, &p)?;
            let r = propagate_noisy(&p, &cfg.noise_params()?, &rho0, &cfg.integrator(Some(*sample_interval))?)?;
            emit(&r.to_table(), common)
        }
        Command::Mc {
            params,
            sample_interval,
            n_traj,
        } => {
            let cfg = load_config(common, params)?;
            let p = cfg.model_params()?;
            let rho0 = initial_density(&cfg.initial_state()?, &p)?;
            let mc = McConfig {
                n_traj: *n_traj,
                seed: common.seed,
                reproducible: true,
            };
            let r = mc_oracle(&p, &cfg.noise_params()?, &rho0, &cfg.integrator(Some(*sample_interval))?, &mc)?;
            emit(&r.to_table(), common)
        }
        Command::Sweep { grid } => {
            let out = common
                .out
                .as_ref()
                .ok_or_else(|| Error::Config("sweep needs --out for the table and its manifest".into()))?;
            let g = SweepGrid::load(grid)?;
            let r = run_sweep(&g, SweepOptions { threads: None, seed: common.seed })?;
            r.write(out, common.format.into())
        }
        Command::Figure { id } => {
            let dataset = figure_dataset(*id)?;
            let ext = match common.format {
                args::OutFormat::Csv => "csv",
                args::OutFormat::Json => "json",
            };
            let out = common.out.clone().unwrap_or_else(|| PathBuf::from(format!("fig{id}.{ext}")));
            for (label, grid) in &dataset.panels {
                let r = run_sweep(grid, SweepOptions { threads: None, seed: common.seed })?;
                let path = panel_path(&out, label);
                r.write(&path, common.format.into())?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_paths() {
        assert_eq!(panel_path(Path::new("out/fig3.csv"), "eps2"), Path::new("out/fig3_eps2.csv"));
        assert_eq!(panel_path(Path::new("fig6.csv"), ""), Path::new("fig6.csv"));
        assert_eq!(panel_path(Path::new("data"), "a"), Path::new("data_a"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::SeedRequired), 2);
        assert_eq!(exit_code(&Error::MonotoneNoMax), 1);
        assert_eq!(exit_code(&Error::SingularDenominator("x".into())), 1);
    }

    #[test]
    fn eps_flag_splits_symmetrically() {
        let p = Params {
            eps: Some(0.4),
            ..Default::default()
        };
        let c = p.to_config();
        assert_eq!((c.eps1, c.eps2), (Some(0.2), Some(-0.2)));
    }
}
