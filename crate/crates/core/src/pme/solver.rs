//! Flux-form finite-volume discretization of `∂_t u = Δ(u^m)` on radial cells.
//!
//! The flux through the face between cells `i` and `i+1` is
//! `S_{i+1/2} (u_{i+1}^m − u_i^m) / (r_{i+1} − r_i)`, using the difference of
//! `u^m` directly. The face at the pole has zero area. The outer face is either
//! closed or absorbing (`u = 0` ghost at `R_max`); the mass that leaves through
//! it is accumulated in the state.

use serde::Serialize;

use super::grid::RadialGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Forward Euler with step `cfl · min_i ΔV_i / ((a_{i−1/2} + a_{i+1/2}) m ‖u‖_∞^{m−1})`,
    /// where `a` are the face conductances `S/Δr`; `cfl ≤ 1` keeps the update monotone.
    ExplicitAdaptive { cfl: f64 },
    /// Backward Euler with nominal step `dt`, solved by damped Newton.
    ImplicitEuler { dt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBoundary {
    ZeroFlux,
    Absorbing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub m: f64,
    pub scheme: Scheme,
    pub boundary: OuterBoundary,
    /// Newton stops once `‖residual‖_∞ ≤ newton_tol · max(1, ‖u‖_∞)`.
    pub newton_tol: f64,
    pub max_newton: usize,
    pub max_steps: usize,
}

impl SolverConfig {
    pub fn explicit(m: f64) -> Self {
        Self {
            m,
            scheme: Scheme::ExplicitAdaptive { cfl: 0.4 },
            boundary: OuterBoundary::Absorbing,
            newton_tol: 1e-10,
            max_newton: 50,
            max_steps: 200_000_000,
        }
    }

    pub fn implicit(m: f64, dt: f64) -> Self {
        Self {
            scheme: Scheme::ImplicitEuler { dt },
            ..Self::explicit(m)
        }
    }

    pub fn with_boundary(mut self, boundary: OuterBoundary) -> Self {
        self.boundary = boundary;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialState {
    pub u: Vec<f64>,
    pub t: f64,
    /// Mass that has left through `R_max`.
    pub boundary_flux: f64,
}

impl RadialState {
    pub fn new(u: Vec<f64>, t: f64) -> Result<Self> {
        if let Some(i) = u.iter().position(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "initial datum must be finite and nonnegative, cell {i} holds {}",
                u[i]
            )));
        }
        Ok(Self {
            u,
            t,
            boundary_flux: 0.0,
        })
    }

    pub fn mass(&self, grid: &RadialGrid) -> f64 {
        grid.integrate(&self.u)
    }

    pub fn sup(&self) -> f64 {
        self.u.iter().fold(0.0, |a: f64, &b| a.max(b))
    }
}

/// Snapshots of one run. The first snapshot is the initial state.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub m: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
    pub boundary_flux: Vec<f64>,
    pub steps: usize,
    pub rejected_steps: usize,
}

impl RunRecord {
    pub fn initial(&self) -> &[f64] {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &[f64] {
        &self.snapshots[self.snapshots.len() - 1]
    }

    /// Worst `|mass(t) + outflow(t) − mass(0)| / mass(0)` over the snapshots.
    pub fn conservation_defect(&self) -> f64 {
        let m0 = self.masses[0];
        self.masses
            .iter()
            .zip(&self.boundary_flux)
            .map(|(m, b)| (m + b - m0).abs() / m0.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

pub struct Solver<'g> {
    grid: &'g RadialGrid,
    config: SolverConfig,
    /// `coef[j]` is the conductance of face `j` (between cells `j−1` and `j`).
    coef: Vec<f64>,
    min_cell_time: f64,
}

fn pow_m(u: f64, m: f64) -> f64 {
    if m == 2.0 {
        u * u.abs()
    } else {
        u.signum() * u.abs().powf(m)
    }
}

fn dpow_m(u: f64, m: f64) -> f64 {
    if m == 2.0 {
        2.0 * u.abs()
    } else {
        m * u.abs().powf(m - 1.0)
    }
}

impl<'g> Solver<'g> {
    pub fn new(grid: &'g RadialGrid, config: SolverConfig) -> Result<Self> {
        if !(config.m > 1.0) {
            return Err(Error::InvalidParameter(format!("m must exceed 1, got {}", config.m)));
        }
        match config.scheme {
            Scheme::ExplicitAdaptive { cfl } if !(cfl > 0.0 && cfl <= 1.0) => {
                return Err(Error::InvalidParameter(format!("cfl must lie in (0, 1], got {cfl}")))
            }
            Scheme::ImplicitEuler { dt } if !(dt > 0.0) => {
                return Err(Error::InvalidParameter(format!("implicit step must be positive, got {dt}")))
            }
            _ => {}
        }
        let n = grid.len();
        let mut coef = vec![0.0; n + 1];
        for j in 1..n {
            coef[j] = grid.face_areas[j] / (grid.centers[j] - grid.centers[j - 1]);
        }
        if config.boundary == OuterBoundary::Absorbing {
            coef[n] = grid.face_areas[n] / (grid.edges[n] - grid.centers[n - 1]);
        }
        let min_cell_time = (0..n)
            .map(|i| grid.volumes[i] / (coef[i] + coef[i + 1]).max(f64::MIN_POSITIVE))
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            grid,
            config,
            coef,
            min_cell_time,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Largest stable explicit step for the current state.
    pub fn explicit_dt(&self, state: &RadialState, cfl: f64) -> f64 {
        let umax = state.sup();
        if umax == 0.0 {
            return f64::INFINITY;
        }
        cfl * self.min_cell_time / (self.config.m * umax.powf(self.config.m - 1.0))
    }

    fn active_end(&self, u: &[f64]) -> usize {
        let last = u.iter().rposition(|&x| x != 0.0).unwrap_or(0);
        (last + 2).min(u.len())
    }

    /// Advances by at most `dt_max`; returns the step actually taken.
    pub fn step(&self, state: &mut RadialState, dt_max: f64) -> Result<f64> {
        match self.config.scheme {
            Scheme::ExplicitAdaptive { cfl } => {
                let dt = self.explicit_dt(state, cfl).min(dt_max);
                self.explicit_update(state, dt);
                Ok(dt)
            }
            Scheme::ImplicitEuler { dt } => {
                let mut dt = dt.min(dt_max);
                for _ in 0..60 {
                    match self.implicit_update(state, dt) {
                        Ok(()) => return Ok(dt),
                        Err(Error::NewtonDivergence { .. }) | Err(Error::Domain(_)) => dt *= 0.5,
                        Err(e) => return Err(e),
                    }
                }
                Err(Error::NewtonDivergence {
                    iterations: self.config.max_newton,
                    residual: f64::NAN,
                })
            }
        }
    }

    fn explicit_update(&self, state: &mut RadialState, dt: f64) {
        let m = self.config.m;
        let n = state.u.len();
        let end = self.active_end(&state.u);
        let w: Vec<f64> = state.u[..end].iter().map(|&x| pow_m(x, m)).collect();
        // cells past `end` and their faces carry no flux
        let mut inflow_left = 0.0;
        for i in 0..end {
            let right = if i + 1 < end {
                self.coef[i + 1] * (w[i + 1] - w[i])
            } else if i + 1 < n {
                -self.coef[i + 1] * w[i]
            } else {
                -self.coef[n] * w[i]
            };
            state.u[i] += dt * (right - inflow_left) / self.grid.volumes[i];
            if i + 1 == n {
                state.boundary_flux -= dt * right;
            }
            inflow_left = right;
        }
        state.t += dt;
    }

    fn residual(&self, u: &[f64], prev: &[f64], dt: f64, out: &mut [f64]) {
        let m = self.config.m;
        let n = u.len();
        let mut left = 0.0;
        for i in 0..n {
            let right = if i + 1 < n {
                self.coef[i + 1] * (pow_m(u[i + 1], m) - pow_m(u[i], m))
            } else {
                -self.coef[n] * pow_m(u[i], m)
            };
            out[i] = u[i] - prev[i] - dt * (right - left) / self.grid.volumes[i];
            left = right;
        }
    }

    fn implicit_update(&self, state: &mut RadialState, dt: f64) -> Result<()> {
        let m = self.config.m;
        let n = state.u.len();
        let prev = state.u.clone();
        let scale = state.sup().max(1.0);
        let tol = self.config.newton_tol * scale;
        let mut u = prev.clone();
        let mut res = vec![0.0; n];
        let (mut lower, mut diag, mut upper, mut rhs) =
            (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        self.residual(&u, &prev, dt, &mut res);
        let mut norm = res.iter().fold(0.0, |a: f64, &b| a.max(b.abs()));
        let mut iterations = 0;
        let mut polished = false;
        loop {
            if norm <= tol {
                if polished || norm == 0.0 {
                    break;
                }
                polished = true;
            }
            if iterations >= self.config.max_newton {
                return Err(Error::NewtonDivergence {
                    iterations,
                    residual: norm,
                });
            }
            iterations += 1;
            for i in 0..n {
                let s = dt / self.grid.volumes[i];
                let d = dpow_m(u[i], m);
                diag[i] = 1.0 + s * (self.coef[i] + self.coef[i + 1]) * d;
                lower[i] = if i > 0 { -s * self.coef[i] * dpow_m(u[i - 1], m) } else { 0.0 };
                upper[i] = if i + 1 < n { -s * self.coef[i + 1] * dpow_m(u[i + 1], m) } else { 0.0 };
                rhs[i] = -res[i];
            }
            let delta = thomas(&lower, &diag, &upper, &rhs);
            let mut lambda = 1.0;
            let mut trial = vec![0.0; n];
            let mut trial_res = vec![0.0; n];
            loop {
                for i in 0..n {
                    trial[i] = u[i] + lambda * delta[i];
                }
                self.residual(&trial, &prev, dt, &mut trial_res);
                let tn = trial_res.iter().fold(0.0, |a: f64, &b| a.max(b.abs()));
                if tn < norm || lambda < 1e-4 || tn <= tol {
                    u.copy_from_slice(&trial);
                    res.copy_from_slice(&trial_res);
                    norm = tn;
                    break;
                }
                lambda *= 0.5;
            }
        }
        if u.iter().any(|&x| x < -1e-14 * scale) {
            return Err(Error::Domain("negative value after implicit step".into()));
        }
        // outflow: the flux through the outer face integrated over the step
        let out = self.coef[n] * pow_m(u[n - 1], m) * dt;
        for x in u.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        state.u = u;
        state.boundary_flux += out;
        state.t += dt;
        Ok(())
    }

    /// Integrates to each snapshot time in turn, landing on them exactly.
    pub fn run(&self, initial: RadialState, snapshot_times: &[f64]) -> Result<RunRecord> {
        if initial.u.len() != self.grid.len() {
            return Err(Error::InvalidParameter(format!(
                "state has {} cells, grid has {}",
                initial.u.len(),
                self.grid.len()
            )));
        }
        if snapshot_times.windows(2).any(|w| !(w[1] > w[0]))
            || snapshot_times.first().is_some_and(|&t| t < initial.t)
        {
            return Err(Error::InvalidParameter(
                "snapshot times must increase and start no earlier than the initial time".into(),
            ));
        }
        let mut state = initial;
        let mut record = RunRecord {
            m: self.config.m,
            times: vec![state.t],
            snapshots: vec![state.u.clone()],
            masses: vec![state.mass(self.grid)],
            boundary_flux: vec![0.0],
            steps: 0,
            rejected_steps: 0,
        };
        for &target in snapshot_times {
            if target == record.times[0] && record.times.len() == 1 {
                continue;
            }
            while state.t < target {
                let remaining = target - state.t;
                let dt = self.step(&mut state, remaining)?;
                if let Scheme::ImplicitEuler { dt: nominal } = self.config.scheme {
                    if dt < nominal.min(remaining) {
                        record.rejected_steps += 1;
                    }
                }
                record.steps += 1;
                if record.steps > self.config.max_steps {
                    return Err(Error::InvalidParameter(format!(
                        "exceeded {} steps before t = {target}",
                        self.config.max_steps
                    )));
                }
                if dt >= remaining {
                    state.t = target;
                }
            }
            record.times.push(state.t);
            record.snapshots.push(state.u.clone());
            record.masses.push(state.mass(self.grid));
            record.boundary_flux.push(state.boundary_flux);
        }
        Ok(record)
    }
}

/// Tridiagonal solve; `lower[0]` and `upper[n−1]` are ignored.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VolumeProfile;

    #[test]
    fn constant_state_is_stationary_without_outflow() {
        let p = VolumeProfile::euclidean(3).unwrap();
        let g = RadialGrid::uniform(&p, 5.0, 50).unwrap();
        for cfg in [SolverConfig::explicit(2.0), SolverConfig::implicit(2.0, 0.01)] {
            let solver = Solver::new(&g, cfg.with_boundary(OuterBoundary::ZeroFlux)).unwrap();
            let rec = solver.run(RadialState::new(vec![0.7; 50], 0.0).unwrap(), &[0.1]).unwrap();
            assert!(rec.last().iter().all(|&x| (x - 0.7).abs() < 1e-14));
        }
    }

    #[test]
    fn thomas_solves_tridiagonal() {
        let x = thomas(&[0.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0, 0.0], &[5.0, 6.0, 5.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_negative_datum() {
        assert!(RadialState::new(vec![1.0, -0.1], 0.0).is_err());
    }

    #[test]
    fn implicit_conserves_mass_with_closed_boundary() {
        let p = VolumeProfile::euclidean(3).unwrap();
        let g = RadialGrid::uniform(&p, 4.0, 80).unwrap();
        let u0: Vec<f64> = g.centers.iter().map(|&r| if r < 1.0 { 1.0 } else { 0.0 }).collect();
        let cfg = SolverConfig::implicit(2.0, 0.01).with_boundary(OuterBoundary::ZeroFlux);
        let rec = Solver::new(&g, cfg).unwrap().run(RadialState::new(u0, 0.0).unwrap(), &[0.5]).unwrap();
        assert!(rec.conservation_defect() < 1e-10, "{}", rec.conservation_defect());
        assert!(rec.last().iter().all(|&x| x >= 0.0));
    }
}
