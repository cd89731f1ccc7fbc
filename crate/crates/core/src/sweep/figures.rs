//! Preconfigured sweep grids, numbered 3 to 9.
//!
//! 1-D axes use 201 points and 2-D grids 101×101. The returned grids are
//! plain values, so ranges and counts can be edited before running them.

use serde::Serialize;

use super::{Axis, AxisParam, SweepGrid, Task};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model::InitialState;

pub const FIGURE_IDS: [u32; 7] = [3, 4, 5, 6, 7, 8, 9];

const LINE: usize = 201;
const SURFACE: usize = 101;

/// Grids for one figure; multi-panel figures have one grid per panel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureDataset {
    pub figure: u32,
    /// `(panel label, grid)`; the label is empty for single-grid figures.
    pub panels: Vec<(String, SweepGrid)>,
}

fn fixed(eps: f64, gamma2: Option<f64>, v: f64) -> RunConfig {
    RunConfig {
        eps1: Some(0.5 * eps),
        eps2: Some(-0.5 * eps),
        gamma2,
        v_re: Some(v),
        v_im: Some(0.0),
        ..Default::default()
    }
}

fn single(figure: u32, grid: SweepGrid) -> FigureDataset {
    FigureDataset {
        figure,
        panels: vec![(String::new(), grid)],
    }
}

pub fn figure_dataset(id: u32) -> Result<FigureDataset> {
    let gamma1_line = |max: f64| Axis::linear(AxisParam::Gamma1, 0.0, max, LINE);
    Ok(match id {
        // widths over (Γ₁, Γ₂) at two splittings
        3 => FigureDataset {
            figure: 3,
            panels: [("eps0", 0.0), ("eps2", 2.0)]
                .into_iter()
                .map(|(label, eps)| {
                    (
                        label.to_string(),
                        SweepGrid {
                            task: Task::Spectrum,
                            axes: vec![
                                Axis::linear(AxisParam::Gamma1, 0.0, 6.0, SURFACE),
                                Axis::linear(AxisParam::Gamma2, 0.0, 6.0, SURFACE),
                            ],
                            fixed: fixed(eps, None, 2.0),
                        },
                    )
                })
                .collect(),
        },
        // widths and spacing versus Γ₁ for a family of splittings
        4 => single(
            4,
            SweepGrid {
                task: Task::Spectrum,
                axes: vec![
                    Axis::list(AxisParam::Eps, &[0.0, 0.1, 0.5, 2.0, 4.0]),
                    gamma1_line(10.0),
                ],
                fixed: fixed(0.0, Some(0.0), 2.0),
            },
        ),
        // real parts of the eigenvalues over (Re V, Im V) at Γ = 1
        5 => FigureDataset {
            figure: 5,
            panels: [("eps0", 0.0), ("eps0.25", 0.25)]
                .into_iter()
                .map(|(label, eps)| {
                    let mut f = fixed(eps, Some(0.0), 0.0);
                    f.gamma1 = Some(2.0);
                    (
                        label.to_string(),
                        SweepGrid {
                            task: Task::Spectrum,
                            axes: vec![
                                Axis::linear(AxisParam::VRe, -2.0, 2.0, SURFACE),
                                Axis::linear(AxisParam::VIm, -2.0, 2.0, SURFACE),
                            ],
                            fixed: f,
                        },
                    )
                })
                .collect(),
        },
        // efficiencies versus Γ₁ for four initial states
        6 => single(
            6,
            SweepGrid {
                task: Task::Efficiency,
                axes: vec![
                    Axis::Init {
                        init: vec![
                            InitialState::SiteB,
                            InitialState::SiteA,
                            InitialState::BandPlus,
                            InitialState::BandMinus,
                        ],
                    },
                    gamma1_line(20.0),
                ],
                fixed: RunConfig {
                    t_final: Some(10.0),
                    ..fixed(0.1, Some(1.0), 2.0)
                },
            },
        ),
        // efficiencies over (Γ₁, Γ₂)
        7 => single(
            7,
            SweepGrid {
                task: Task::Efficiency,
                axes: vec![
                    Axis::linear(AxisParam::Gamma1, 0.0, 10.0, SURFACE),
                    Axis::linear(AxisParam::Gamma2, 0.0, 10.0, SURFACE),
                ],
                fixed: RunConfig {
                    init: Some(InitialState::SiteB),
                    t_final: Some(10.0),
                    ..fixed(0.1, None, 2.0)
                },
            },
        ),
        // long-time efficiency over (Γ₁, ε)
        8 => single(
            8,
            SweepGrid {
                task: Task::Eta0,
                axes: vec![
                    Axis::linear(AxisParam::Eps, -2.0, 2.0, SURFACE),
                    Axis::linear(AxisParam::Gamma1, 0.0, 10.0, SURFACE),
                ],
                fixed: RunConfig {
                    init: Some(InitialState::SiteB),
                    ..fixed(0.0, Some(1.0), 2.0)
                },
            },
        ),
        // noise-averaged efficiencies versus Γ₁ for four amplitudes
        9 => single(
            9,
            SweepGrid {
                task: Task::NoisyEfficiency,
                axes: vec![Axis::list(AxisParam::D, &[0.0, 5.0, 10.0, 20.0]), gamma1_line(20.0)],
                fixed: RunConfig {
                    init: Some(InitialState::SiteB),
                    t_final: Some(10.0),
                    gamma_noise: Some(10.0),
                    ..fixed(0.0, Some(1.0), 2.0)
                },
            },
        ),
        other => return Err(Error::UnknownFigure(other)),
    })
}
