//! Space-time density grids for the four spreading figures: non-relativistic
//! (m = 3), lattice (m = 3, a = 1), relativistic (m = 1) and massless packets,
//! all with α = 1 and β ∈ {0, 1/2}.

use crate::dispersion::Dispersion;
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::packet::PacketParams;
use crate::propagation::{density_grid, DensityGrid, EvolutionMethod};

/// One panel: a packet and the grid it is evolved on.
#[derive(Debug, Clone)]
pub struct FigurePanel {
    pub name: &'static str,
    pub packet: PacketParams,
    pub x_values: Vec<f64>,
    pub t_values: Vec<f64>,
}

impl FigurePanel {
    pub fn render(&self, spec: &QuadratureSpec) -> Result<DensityGrid> {
        density_grid(&self.packet, &self.x_values, &self.t_values, EvolutionMethod::Closed, spec)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn continuum_axis() -> Vec<f64> {
    linspace(-20.0, 30.0, 501)
}

fn time_axis() -> Vec<f64> {
    linspace(0.0, 10.0, 21)
}

fn panel(name: &'static str, d: Dispersion, beta: f64, x_values: Vec<f64>) -> Result<FigurePanel> {
    Ok(FigurePanel {
        name,
        packet: PacketParams::make_minimal(d, 1.0, beta, 0.0)?,
        x_values,
        t_values: time_axis(),
    })
}

/// Panels of figure `which` (1 to 4).
pub fn figure_panels(which: u8) -> Result<Vec<FigurePanel>> {
    match which {
        1 => {
            let d = Dispersion::non_relativistic(3.0)?;
            Ok(vec![
                panel("fig1_top", d, 0.0, continuum_axis())?,
                panel("fig1_bottom", d, 0.5, continuum_axis())?,
            ])
        }
        2 => {
            let sites = (-30..=30).map(f64::from).collect();
            Ok(vec![panel("fig2", Dispersion::lattice(3.0, 1.0)?, 0.0, sites)?])
        }
        3 => {
            let d = Dispersion::relativistic(1.0)?;
            Ok(vec![
                panel("fig3_top", d, 0.0, continuum_axis())?,
                panel("fig3_bottom", d, 0.5, continuum_axis())?,
            ])
        }
        4 => {
            let d = Dispersion::massless();
            Ok(vec![
                panel("fig4_top", d, 0.0, continuum_axis())?,
                panel("fig4_bottom", d, 0.5, continuum_axis())?,
            ])
        }
        _ => Err(Error::InvalidInput(format!("figure must be 1, 2, 3 or 4, got {which}"))),
    }
}

/// Least-squares slope of the row centroids against time.
pub fn centroid_drift(grid: &DensityGrid) -> f64 {
    let pts: Vec<(f64, f64)> = grid
        .t_values
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, grid.row_moments(i).mean))
        .collect();
    let n = pts.len() as f64;
    let (st, sx) = pts.iter().fold((0.0, 0.0), |(a, b), (t, x)| (a + t, b + x));
    let (tm, xm) = (st / n, sx / n);
    let (num, den) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, x)| (a + (t - tm) * (x - xm), b + (t - tm) * (t - tm)));
    num / den
}

/// Positions of strict local maxima of a row.
pub fn local_maxima(grid: &DensityGrid, row: usize) -> Vec<f64> {
    let d = &grid.density[row];
    (1..d.len().saturating_sub(1))
        .filter(|&j| d[j] > d[j - 1] && d[j] > d[j + 1])
        .map(|j| grid.x_values[j])
        .collect()
}

/// Sign changes of the discrete second difference over points whose density
/// exceeds `threshold` times the row maximum.
pub fn curvature_sign_changes(grid: &DensityGrid, row: usize, threshold: f64) -> usize {
    let d = &grid.density[row];
    let peak = d.iter().cloned().fold(0.0, f64::max);
    let signs: Vec<f64> = (1..d.len().saturating_sub(1))
        .filter(|&j| d[j] > threshold * peak)
        .map(|j| d[j + 1] - 2.0 * d[j] + d[j - 1])
        .filter(|c| *c != 0.0)
        .map(f64::signum)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}
