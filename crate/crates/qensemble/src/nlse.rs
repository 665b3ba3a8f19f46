//! Local (nonlinear) Schrödinger system.
//!
//! The stationary form is [-beta^2 Lap + rho^2 phi] psi = rho beta omega psi
//! with rho = |psi|^2, the time-dependent form replaces the right side by
//! i rho beta d psi / dt. Because rho multiplies the eigenvalue term the
//! system is nonlinear and superpositions of solutions are not solutions;
//! the companion linear wave equation keeps superposition intact.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::check_uniform;

/// A plane-wave solution of the local system at a point.
///
/// The phase is (rho0 u / beta) x - omega t; the wave is on shell when
/// |psi0|^2 (u^2 + phi) = beta omega.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPlaneWave {
    /// Real amplitude psi0 (density rho0 = psi0^2).
    pub amplitude: f64,
    /// Propagation velocity (m/s).
    pub u: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// External potential parameter entering the nonlinear term.
    pub phi: f64,
}

impl LocalPlaneWave {
    /// Build the on-shell wave for a given amplitude, velocity, and
    /// potential: omega = rho0 (u^2 + phi) / beta.
    pub fn on_shell(amplitude: f64, u: f64, phi: f64, beta: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !(beta > 0.0) {
            return Err(Error::Domain(
                "amplitude must be non-negative and beta positive".into(),
            ));
        }
        let rho0 = amplitude * amplitude;
        Ok(Self {
            amplitude,
            u,
            omega: rho0 * (u * u + phi) / beta,
            phi,
        })
    }

    pub fn density(&self) -> f64 {
        self.amplitude * self.amplitude
    }

    /// Relative defect of the on-shell constraint.
    pub fn shell_defect(&self, beta: f64) -> f64 {
        let lhs = self.density() * (self.u * self.u + self.phi);
        let rhs = beta * self.omega;
        (lhs - rhs).abs() / rhs.abs().max(1e-300)
    }

    /// Phase (rho0 u / beta) x - omega t.
    pub fn phase_at(&self, beta: f64, x: f64, t: f64) -> f64 {
        self.density() * self.u * x / beta - self.omega * t
    }

    /// Complex value at (x, t).
    pub fn value_at(&self, beta: f64, x: f64, t: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase_at(beta, x, t))
    }
}

/// A complex field with its external potential profile on a uniform,
/// periodic grid (the last point is one spacing short of the period).
#[derive(Debug, Clone)]
pub struct LocalField1D {
    pub grid: Vec<f64>,
    pub psi: Vec<Complex64>,
    pub phi: Vec<f64>,
    pub beta: f64,
}

impl LocalField1D {
    pub fn new(grid: Vec<f64>, psi: Vec<Complex64>, phi: Vec<f64>, beta: f64) -> Result<Self> {
        if grid.len() != psi.len() || grid.len() != phi.len() {
            return Err(Error::Domain("field component lengths differ".into()));
        }
        check_uniform(&grid)?;
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        if psi.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("field contains non-finite values".into()));
        }
        Ok(Self {
            grid,
            psi,
            phi,
            beta,
        })
    }

    /// Plane-wave field of integer `mode` on a periodic domain of the
    /// given length with constant potential, at t = 0.
    pub fn plane_wave(
        n: usize,
        length: f64,
        mode: i32,
        amplitude: f64,
        phi: f64,
        beta: f64,
    ) -> Result<(Self, f64)> {
        if n < 8 || !(length > 0.0) {
            return Err(Error::Domain("need n >= 8 grid points and a positive length".into()));
        }
        let h = length / n as f64;
        let k = 2.0 * std::f64::consts::PI * mode as f64 / length;
        let rho = amplitude * amplitude;
        let omega = (beta * beta * k * k + rho * rho * phi) / (beta * rho);
        let grid: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let psi = grid
            .iter()
            .map(|&x| Complex64::from_polar(amplitude, k * x))
            .collect();
        let field = Self::new(grid, psi, vec![phi; n], beta)?;
        Ok((field, omega))
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Period of the underlying domain, n * h.
    pub fn period(&self) -> f64 {
        self.spacing() * self.grid.len() as f64
    }

    pub fn densities(&self) -> Vec<f64> {
        self.psi.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Periodic rectangle-rule integral of |psi|^2.
    pub fn total_density(&self) -> f64 {
        self.psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spacing()
    }

    pub fn max_abs(&self) -> f64 {
        self.psi.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Local wavelength and frequency for a density/velocity pair:
/// lambda = 2 pi beta / (rho0 u), omega = rho0 u^2 / beta.
pub fn local_relations(rho0: f64, u: f64, beta: f64) -> Result<(f64, f64)> {
    if !(rho0 > 0.0) || !(u > 0.0) || !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "need positive density, velocity, and beta; got rho0 = {rho0}, u = {u}, beta = {beta}"
        )));
    }
    let lambda = 2.0 * std::f64::consts::PI * beta / (rho0 * u);
    let omega = rho0 * u * u / beta;
    Ok((lambda, omega))
}

/// Dispersion of the linear wave equation for a monochromatic wave:
/// beta = rho0 u^2 / omega and k = omega / u.
pub fn wave_dispersion(rho0: f64, u: f64, omega: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    Ok((rho0 * u * u / omega, omega / u))
}

/// Spectral Laplacian of a periodic field.
fn spectral_laplacian(psi: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = psi.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = psi.to_vec();
    fft.process(&mut buf);
    let length = h * n as f64;
    for (j, v) in buf.iter_mut().enumerate() {
        let freq = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        let k = 2.0 * std::f64::consts::PI * freq / length;
        *v *= -k * k;
    }
    ifft.process(&mut buf);
    for v in buf.iter_mut() {
        *v /= n as f64;
    }
    buf
}

/// Residual max |[-beta^2 Lap + rho^2 phi] psi - rho beta omega psi| with
/// rho = |psi|^2 pointwise, using spectral differentiation.
pub fn stationary_residual(f: &LocalField1D, omega: f64) -> f64 {
    let lap = spectral_laplacian(&f.psi, f.spacing());
    let beta = f.beta;
    f.psi
        .iter()
        .zip(&lap)
        .zip(&f.phi)
        .map(|((&p, &lp), &ph)| {
            let rho = p.norm_sqr();
            (-beta * beta * lp + rho * rho * ph * p - rho * beta * omega * p).norm()
        })
        .fold(0.0, f64::max)
}

/// Per-step record of the nonlinear evolution.
#[derive(Debug, Clone, Copy)]
pub struct EvolveSample {
    pub t: f64,
    pub max_abs: f64,
    pub total_density: f64,
    /// Final fixed-point change of the step that produced this state.
    pub iteration_residual: f64,
}

/// Result of evolving a field.
#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub field: LocalField1D,
    /// Fraction of (step, point) density evaluations that sat below the
    /// regularization floor.
    pub regularized_fraction: f64,
    pub history: Vec<EvolveSample>,
}

const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX_ITERS: usize = 50;

/// Integrate i rho beta d psi/dt = [-beta^2 Lap + rho^2 phi] psi with
/// rho = max(|psi|^2, epsilon), by a Crank-Nicolson average of the
/// operator with the density frozen per fixed-point iterate at the
/// step-average |psi|^2.
pub fn evolve_local(
    f: &LocalField1D,
    dt: f64,
    steps: usize,
    epsilon: f64,
) -> Result<EvolveOutcome> {
    if !(dt > 0.0) || !(epsilon > 0.0) {
        return Err(Error::Domain("dt and epsilon must be positive".into()));
    }
    let omega_max = max_field_frequency(f, epsilon);
    if dt * omega_max >= 0.1 {
        return Err(Error::Domain(format!(
            "dt = {dt} does not resolve the field's maximum frequency {omega_max} \
             (need dt * omega_max < 0.1)"
        )));
    }

    let n = f.grid.len();
    let h = f.spacing();
    let beta = f.beta;
    let off = Complex64::new(beta * beta / (2.0 * h * h), 0.0);
    let mut psi = f.psi.clone();
    let mut history = Vec::with_capacity(steps + 1);
    let mut floored = 0usize;
    history.push(EvolveSample {
        t: 0.0,
        max_abs: max_abs(&psi),
        total_density: total_density(&psi, h),
        iteration_residual: 0.0,
    });

    for step in 0..steps {
        let rho_start: Vec<f64> = psi.iter().map(|v| v.norm_sqr()).collect();
        let mut rho: Vec<f64> = rho_start.iter().map(|&r| r.max(epsilon)).collect();
        let mut current = psi.clone();
        let mut residual = f64::INFINITY;
        let mut converged = false;

        for _ in 0..FIXED_POINT_MAX_ITERS {
            let next = cn_step(&psi, &rho, &f.phi, beta, dt, h, off);
            residual = current
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let scale = max_abs(&next).max(1e-300);
            current = next;
            // refresh the frozen density from the step average
            for (r, (p0, p1)) in rho.iter_mut().zip(rho_start.iter().zip(&current)) {
                *r = (0.5 * (p0 + p1.norm_sqr())).max(epsilon);
            }
            if residual <= FIXED_POINT_TOL * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::StepFailure {
                max_iters: FIXED_POINT_MAX_ITERS,
                residual,
            });
        }
        floored += current
            .iter()
            .filter(|p| p.norm_sqr() < epsilon)
            .count();
        psi = current;
        history.push(EvolveSample {
            t: (step + 1) as f64 * dt,
            max_abs: max_abs(&psi),
            total_density: total_density(&psi, h),
            iteration_residual: residual,
        });
    }

    let field = LocalField1D::new(f.grid.clone(), psi, f.phi.clone(), beta)?;
    Ok(EvolveOutcome {
        field,
        regularized_fraction: floored as f64 / (steps * n) as f64,
        history,
    })
}

fn max_abs(psi: &[Complex64]) -> f64 {
    psi.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn total_density(psi: &[Complex64], h: f64) -> f64 {
    psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * h
}

/// Largest angular frequency present in the initial field: spectral
/// content of psi combined with the potential term, scaled by the
/// smallest (floored) density.
fn max_field_frequency(f: &LocalField1D, epsilon: f64) -> f64 {
    let n = f.grid.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf = f.psi.clone();
    fft.process(&mut buf);
    let peak = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let length = f.period();
    let mut k_sig = 0.0_f64;
    for (j, v) in buf.iter().enumerate() {
        if v.norm() > 1e-8 * peak {
            let freq = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            k_sig = k_sig.max((2.0 * std::f64::consts::PI * freq / length).abs());
        }
    }
    let rho_min = f
        .psi
        .iter()
        .map(|v| v.norm_sqr())
        .fold(f64::INFINITY, f64::min)
        .max(epsilon);
    let pot_max = f
        .psi
        .iter()
        .zip(&f.phi)
        .map(|(p, &ph)| p.norm_sqr().powi(2) * ph.abs())
        .fold(0.0, f64::max);
    (f.beta * f.beta * k_sig * k_sig + pot_max) / (f.beta * rho_min)
}

/// One Crank-Nicolson solve with the density frozen:
/// (i rho beta / dt - H/2) psi_next = (i rho beta / dt + H/2) psi.
fn cn_step(
    psi: &[Complex64],
    rho: &[f64],
    phi: &[f64],
    beta: f64,
    dt: f64,
    h: f64,
    off: Complex64,
) -> Vec<Complex64> {
    let n = psi.len();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut diag = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    let lap_diag = -2.0 * beta * beta / (2.0 * h * h);
    for i in 0..n {
        let coupling = i_unit * rho[i] * beta / dt;
        // H/2 = -(beta^2/2) D2 + rho^2 phi / 2
        let half_pot = 0.5 * rho[i] * rho[i] * phi[i];
        diag.push(coupling - Complex64::new(lap_diag + half_pot, 0.0) + Complex64::new(0.0, 0.0));
        let prev = psi[(i + n - 1) % n];
        let next = psi[(i + 1) % n];
        let h_psi = Complex64::new(-beta * beta / (2.0 * h * h), 0.0) * (prev + next)
            + Complex64::new(lap_diag + half_pot, 0.0) * psi[i];
        rhs.push(coupling * psi[i] + h_psi);
    }
    // diag above double-counted nothing; A = diag(coupling - lap_diag - half_pot) - off on neighbors
    solve_cyclic_tridiagonal(&diag, -off, &rhs)
}

/// Solve A x = rhs for A cyclic tridiagonal with constant off-diagonal
/// `off` (including the two corner entries), via Sherman-Morrison over a
/// Thomas sweep.
fn solve_cyclic_tridiagonal(diag: &[Complex64], off: Complex64, rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    assert!(n >= 3);
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= off * off / gamma;

    let y = thomas(&d, off, rhs);
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    u[0] = gamma;
    u[n - 1] = off;
    let z = thomas(&d, off, &u);

    // v = (1, 0, ..., 0, off / gamma)
    let v_dot_y = y[0] + off / gamma * y[n - 1];
    let v_dot_z = z[0] + off / gamma * z[n - 1];
    let factor = v_dot_y / (Complex64::new(1.0, 0.0) + v_dot_z);
    y.iter().zip(&z).map(|(&yi, &zi)| yi - factor * zi).collect()
}

/// Thomas sweep for a (plain) tridiagonal system with constant
/// off-diagonal entries.
fn thomas(diag: &[Complex64], off: Complex64, rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
    let mut d_prime = vec![Complex64::new(0.0, 0.0); n];
    c_prime[0] = off / diag[0];
    d_prime[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - off * c_prime[i - 1];
        c_prime[i] = off / m;
        d_prime[i] = (rhs[i] - off * d_prime[i - 1]) / m;
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    x
}

/// The two pieces of the superposition check and their mismatch.
#[derive(Debug, Clone, Copy)]
pub struct SuperpositionCheck {
    /// Energy-density value produced by the superposed field.
    pub superposed: f64,
    /// beta (omega1 + omega2), what linearity would give.
    pub linear: f64,
    pub deviation: f64,
}

/// Evaluate the superposition mismatch of two on-shell plane waves at
/// (x, t):
/// beta (rho1 w1 + rho2 w2)/|psi_s|^2
///   + phi (|psi_s|^4 - rho1^2 - rho2^2)/|psi_s|^2  vs  beta (w1 + w2).
///
/// Both waves must share the same external potential parameter.
pub fn superposition_residual(
    w1: &LocalPlaneWave,
    w2: &LocalPlaneWave,
    beta: f64,
    x: f64,
    t: f64,
) -> Result<SuperpositionCheck> {
    if (w1.phi - w2.phi).abs() > 1e-12 * w1.phi.abs().max(w2.phi.abs()).max(1.0) {
        return Err(Error::Domain(
            "superposed waves must share the external potential".into(),
        ));
    }
    for (idx, w) in [w1, w2].iter().enumerate() {
        if w.amplitude > 0.0 && w.shell_defect(beta) > 1e-10 {
            return Err(Error::Domain(format!(
                "wave {} is off shell by {}",
                idx + 1,
                w.shell_defect(beta)
            )));
        }
    }
    let phi = w1.phi;
    let rho1 = w1.density();
    let rho2 = w2.density();
    let delta_phase = w1.phase_at(beta, x, t) - w2.phase_at(beta, x, t);
    let rho_s = rho1 + rho2 + 2.0 * (rho1 * rho2).sqrt() * delta_phase.cos();
    let floor = 1e-12 * (rho1 + rho2).max(1e-300);
    if rho_s < floor {
        return Err(Error::DestructiveInterference {
            density: rho_s,
            floor,
        });
    }
    let superposed = beta * (rho1 * w1.omega + rho2 * w2.omega) / rho_s
        + phi * (rho_s * rho_s - rho1 * rho1 - rho2 * rho2) / rho_s;
    let linear = beta * (w1.omega + w2.omega);
    Ok(SuperpositionCheck {
        superposed,
        linear,
        deviation: superposed - linear,
    })
}

/// Critical phases where the interference factor's denominator
/// 4 (1 + cos)^2 - 2 vanishes, in [0, 2 pi).
pub fn gamma_critical_phases() -> (f64, f64) {
    let c = 1.0 / 2.0_f64.sqrt() - 1.0;
    let p = c.acos();
    (p, 2.0 * std::f64::consts::PI - p)
}

/// Interference factor
/// Gamma = beta (1 + 2 cos dphi) / (4 (1 + cos dphi)^2 - 2).
///
/// Pass beta = 1 for the factor in units of beta.
pub fn interference_gamma(delta_phi: f64, beta: f64) -> Result<f64> {
    let c = delta_phi.cos();
    let denom = 4.0 * (1.0 + c) * (1.0 + c) - 2.0;
    if denom.abs() < 1e-9 {
        let (pole_a, pole_b) = gamma_critical_phases();
        return Err(Error::SingularPhase {
            phase: delta_phi,
            pole_a,
            pole_b,
        });
    }
    Ok(beta * (1.0 + 2.0 * c) / denom)
}
