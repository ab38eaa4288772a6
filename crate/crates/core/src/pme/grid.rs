//! Finite-volume cells of a radial model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::VolumeProfile;
use crate::quadrature::GaussLegendre;

/// Cells `(r_{i−1/2}, r_{i+1/2})` from the pole to `R_max`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialGrid {
    pub edges: Vec<f64>,
    pub centers: Vec<f64>,
    /// `ΔV_i = V(r_{i+1/2}) − V(r_{i−1/2})`.
    pub volumes: Vec<f64>,
    /// `S(r_{i+1/2})` for each edge, starting with `S(0) = 0`.
    pub face_areas: Vec<f64>,
}

impl RadialGrid {
    pub fn uniform(profile: &VolumeProfile, r_max: f64, cells: usize) -> Result<Self> {
        check(r_max, cells)?;
        let h = r_max / cells as f64;
        let edges = (0..=cells).map(|i| if i == cells { r_max } else { i as f64 * h }).collect();
        Self::from_edges(profile, edges)
    }

    /// Cell widths growing by `ratio` from `first` outward until `r_max`.
    pub fn geometric(profile: &VolumeProfile, r_max: f64, first: f64, ratio: f64) -> Result<Self> {
        if !(first > 0.0 && ratio >= 1.0 && r_max > first) {
            return Err(Error::InvalidParameter(format!(
                "geometric grid needs 0 < first < r_max and ratio >= 1, got {first}, {ratio}, {r_max}"
            )));
        }
        let mut edges = vec![0.0];
        let mut w = first;
        while edges[edges.len() - 1] + w < r_max * (1.0 - 1e-12) {
            let next = edges[edges.len() - 1] + w;
            edges.push(next);
            w *= ratio;
        }
        edges.push(r_max);
        Self::from_edges(profile, edges)
    }

    pub fn from_edges(profile: &VolumeProfile, edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges[0] != 0.0 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "edges must start at 0 and increase strictly".into(),
            ));
        }
        let vol: Vec<f64> = edges.iter().map(|&r| profile.volume(r)).collect();
        let volumes: Vec<f64> = vol.windows(2).map(|w| w[1] - w[0]).collect();
        if volumes.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NonmonotoneVolume("empty finite-volume cell".into()));
        }
        let centers = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let face_areas = edges.iter().map(|&r| if r == 0.0 { 0.0 } else { profile.area(r) }).collect();
        Ok(Self {
            edges,
            centers,
            volumes,
            face_areas,
        })
    }

    pub fn len(&self) -> usize {
        self.volumes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volumes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    /// `∫_cell g S dr` for each cell.
    pub fn cell_weights<G: Fn(f64) -> f64>(&self, profile: &VolumeProfile, g: G) -> Vec<f64> {
        let gl = GaussLegendre::new(8);
        self.edges
            .windows(2)
            .map(|w| gl.integrate(|r| g(r) * profile.area(r), w[0], w[1]))
            .collect()
    }

    /// Cell averages of `g`.
    pub fn cell_averages<G: Fn(f64) -> f64>(&self, profile: &VolumeProfile, g: G) -> Vec<f64> {
        self.cell_weights(profile, g)
            .into_iter()
            .zip(&self.volumes)
            .map(|(w, v)| w / v)
            .collect()
    }

    /// `Σ u_i ΔV_i`.
    pub fn integrate(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.volumes).map(|(a, v)| a * v).sum()
    }

    /// `(Σ |u_i|^p ΔV_i)^{1/p}`, or the maximum for `p = ∞`.
    pub fn lp_norm(&self, u: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return u.iter().fold(0.0, |a, &b| a.max(b.abs()));
        }
        u.iter()
            .zip(&self.volumes)
            .map(|(a, v)| a.abs().powf(p) * v)
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

fn check(r_max: f64, cells: usize) -> Result<()> {
    if cells == 0 || !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "grid needs cells > 0 and finite r_max > 0, got {cells}, {r_max}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes_sum_to_ball() {
        let p = VolumeProfile::euclidean(3).unwrap();
        let g = RadialGrid::uniform(&p, 20.0, 500).unwrap();
        assert!((g.total_volume() / p.volume(20.0) - 1.0).abs() < 1e-12);
        assert!(g.volumes.iter().all(|&v| v > 0.0));
        let geo = RadialGrid::geometric(&p, 20.0, 0.01, 1.01).unwrap();
        assert!((geo.total_volume() / p.volume(20.0) - 1.0).abs() < 1e-12);
        assert_eq!(*geo.edges.last().unwrap(), 20.0);
    }

    #[test]
    fn rejects_bad_edges() {
        let p = VolumeProfile::euclidean(3).unwrap();
        assert!(RadialGrid::from_edges(&p, vec![0.0, 1.0, 1.0]).is_err());
        assert!(RadialGrid::uniform(&p, 1.0, 0).is_err());
    }
}
