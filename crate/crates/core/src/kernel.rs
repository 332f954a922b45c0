//! Kernels of the smoothed spectral projector on the sphere, plain and
//! Hecke-twisted.
//!
//! With mu_k = sqrt(k(k+1)) and the window rho, the smoothed projector at
//! spectral parameter mu has kernel
//!
//!   K(x, y) = sum_k rho(mu - mu_k) (2k+1)/(4pi) P_k(x . y),
//!
//! rotation-invariant on the diagonal. Composing with T_n twists it into
//! the average of kernel values at the Hecke translates,
//!
//!   K_n(x, x) = 1/2 sum_{alpha in R(n)} K(R_alpha x, x),
//!
//! which also equals the spectral sum over joint eigenfunctions weighted by
//! their T_n eigenvalues; both evaluations are exposed and checked against
//! each other. Degree sums truncate where the window drops below its tail
//! threshold, identically for every evaluation path.

use crate::error::{Error, Result};
use crate::harmonics;
use crate::hecke::HeckeMaassBasis;
use crate::quaternion::{enumerate_rn, rotation_of};
use crate::window::{mu_of_degree, SpectralWindow};
use std::f64::consts::PI;

/// Kernel value on the diagonal; independent of the point by rotation
/// invariance.
pub fn kernel_diag(mu: f64, w: &SpectralWindow) -> f64 {
    assert!(mu >= 0.0, "spectral parameter must be nonnegative");
    let kmax = w.degree_cutoff(mu);
    let mut acc = 0.0;
    let mut comp = 0.0; // Kahan compensation; the terms span many scales
    for k in 0..=kmax {
        if !w.keeps_degree(mu, k) {
            continue;
        }
        let term = w.eval(mu - mu_of_degree(k)) * (2.0 * k as f64 + 1.0) / (4.0 * PI);
        let t = acc + term;
        comp += if acc.abs() >= term.abs() { (acc - t) + term } else { (term - t) + acc };
        acc = t;
    }
    acc + comp
}

/// Kernel value at two points separated by angle theta in (0, pi].
pub fn kernel_offdiag(mu: f64, theta: f64, w: &SpectralWindow) -> Result<f64> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let kmax = w.degree_cutoff(mu);
    let p = harmonics::legendre_all(kmax, theta.cos());
    let mut acc = 0.0;
    for k in 0..=kmax {
        if !w.keeps_degree(mu, k) {
            continue;
        }
        acc += w.eval(mu - mu_of_degree(k)) * (2.0 * k as f64 + 1.0) / (4.0 * PI) * p[k as usize];
    }
    Ok(acc)
}

/// Hecke-twisted diagonal kernel, geometric evaluation: the average of
/// off-diagonal kernel values at the lattice translates of x.
pub fn hecke_kernel_diag(n: u64, mu: f64, x: [f64; 3], w: &SpectralWindow) -> Result<f64> {
    let elements = enumerate_rn(n);
    if elements.is_empty() {
        return Err(Error::EmptyLevel(n));
    }
    let kmax = w.degree_cutoff(mu);
    // window weights per degree, shared across lattice points
    let weights: Vec<f64> = (0..=kmax)
        .map(|k| {
            if w.keeps_degree(mu, k) {
                w.eval(mu - mu_of_degree(k)) * (2.0 * k as f64 + 1.0) / (4.0 * PI)
            } else {
                0.0
            }
        })
        .collect();
    let mut acc = 0.0;
    for alpha in &elements {
        let r = rotation_of(alpha)?;
        let rx = r.apply(x);
        let dot = (rx[0] * x[0] + rx[1] * x[1] + rx[2] * x[2]).clamp(-1.0, 1.0);
        let p = harmonics::legendre_all(kmax, dot);
        let mut inner = 0.0;
        for k in 0..=kmax as usize {
            inner += weights[k] * p[k];
        }
        acc += inner;
    }
    Ok(0.5 * acc)
}

/// Hecke-twisted diagonal kernel, spectral evaluation: the eigenfunction
/// expansion sum_k sum_j rho(mu - mu_k) lambda_j(n) |phi_j(x)|^2 from
/// precomputed joint eigendata. The independent cross-check of the
/// geometric route.
pub fn hecke_kernel_diag_spectral(
    n: u64,
    mu: f64,
    x: [f64; 3],
    w: &SpectralWindow,
    eigendata: &std::collections::BTreeMap<u32, HeckeMaassBasis>,
) -> Result<f64> {
    let kmax = w.degree_cutoff(mu);
    let stacks = harmonics::real_basis_all(kmax, x);
    let mut acc = 0.0;
    for k in 0..=kmax {
        if !w.keeps_degree(mu, k) {
            continue;
        }
        let basis = eigendata.get(&k).ok_or(Error::MissingDegree(k))?;
        let weight = w.eval(mu - mu_of_degree(k));
        let y = &stacks[k as usize];
        let dim = 2 * k as usize + 1;
        let mut inner = 0.0;
        for j in 0..dim {
            let mut phi = 0.0;
            for i in 0..dim {
                phi += basis.vectors.get(i, j) * y[i];
            }
            inner += basis.lambda(j, n)? * phi * phi;
        }
        acc += weight * inner;
    }
    Ok(acc)
}

/// Exact eigenvalue count below the spectral parameter:
/// sum of (2k+1) over degrees with sqrt(k(k+1)) <= mu. Grows like mu^2
/// (this is the sharp-projector Weyl count; the smoothed kernels above are
/// used for every bound scan).
pub fn weyl_count(mu: f64) -> u64 {
    if mu < 0.0 {
        return 0;
    }
    // largest k with k(k+1) <= mu^2
    let k = (-0.5 + (0.25 + mu * mu).sqrt()).floor() as u64;
    (k + 1) * (k + 1)
}

/// Eigenvalue count in the sharp shell (mu, mu+1].
pub fn sharp_shell_count(mu: f64) -> u64 {
    weyl_count(mu + 1.0) - weyl_count(mu)
}

/// A scan of kernel values over a parameter grid, for the CLI and the
/// bound-shape checks.
#[derive(Clone, Debug)]
pub struct KernelScan {
    pub mode: ScanMode,
    pub rows: Vec<ScanRow>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanMode {
    Diag,
    OffDiag { theta: f64 },
    Hecke { n: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct ScanRow {
    pub mu: f64,
    pub value: f64,
}

/// Uniform mu-grid scan in the requested mode.
pub fn scan(
    mode: ScanMode,
    mu_min: f64,
    mu_max: f64,
    steps: usize,
    x: [f64; 3],
    w: &SpectralWindow,
) -> Result<KernelScan> {
    assert!(steps >= 1);
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let mu = if steps == 1 {
            mu_min
        } else {
            mu_min + (mu_max - mu_min) * i as f64 / (steps - 1) as f64
        };
        let value = match mode {
            ScanMode::Diag => kernel_diag(mu, w),
            ScanMode::OffDiag { theta } => kernel_offdiag(mu, theta, w)?,
            ScanMode::Hecke { n } => hecke_kernel_diag(n, mu, x, w)?,
        };
        rows.push(ScanRow { mu, value });
    }
    Ok(KernelScan { mode, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn window() -> SpectralWindow {
        // coarser tail keeps the eigendata ranges small in tests
        SpectralWindow::with_tail_threshold(1.0, 1e-4).unwrap()
    }

    #[test]
    fn diag_at_zero_is_the_plain_sum() {
        let w = SpectralWindow::new(1.0).unwrap();
        let v = kernel_diag(0.0, &w);
        let k0_term = w.eval(0.0) / (4.0 * PI);
        assert!(v >= k0_term);
        // direct re-evaluation of the defining sum
        let mut direct = 0.0;
        for k in 0..=w.degree_cutoff(0.0) {
            if w.keeps_degree(0.0, k) {
                direct += w.eval(mu_of_degree(k)) * (2.0 * k as f64 + 1.0) / (4.0 * PI);
            }
        }
        assert!((v - direct).abs() < 1e-12 * direct.max(1.0));
    }

    #[test]
    fn diag_grows_linearly() {
        let w = window();
        let r1 = kernel_diag(40.0, &w) / 40.0;
        let r2 = kernel_diag(80.0, &w) / 80.0;
        assert!((r2 / r1 - 1.0).abs() < 0.15);
        // doubling check straight from the growth rate mu^(d-1), d = 2
        let ratio = kernel_diag(80.0, &w) / kernel_diag(40.0, &w);
        assert!((ratio - 2.0).abs() < 0.3);
    }

    #[test]
    fn diag_matches_harmonic_expansion_at_pole() {
        // the j-sum over an explicit orthonormal basis reproduces the
        // closed Legendre form at the north pole
        let w = window();
        let mu = 25.0;
        let pole = [0.0, 0.0, 1.0];
        let kmax = w.degree_cutoff(mu);
        let stacks = harmonics::real_basis_all(kmax, pole);
        let mut spectral = 0.0;
        for k in 0..=kmax {
            if !w.keeps_degree(mu, k) {
                continue;
            }
            let s: f64 = stacks[k as usize].iter().map(|v| v * v).sum();
            spectral += w.eval(mu - mu_of_degree(k)) * s;
        }
        let direct = kernel_diag(mu, &w);
        assert!((spectral - direct).abs() < 1e-9 * direct.max(1.0));
    }

    #[test]
    fn diag_positive() {
        let w = window();
        for mu in [0.0, 3.7, 11.0, 42.5, 77.0] {
            assert!(kernel_diag(mu, &w) >= -1e-9);
        }
    }

    #[test]
    fn offdiag_rejects_zero_angle() {
        let w = window();
        assert!(matches!(kernel_offdiag(30.0, 0.0, &w), Err(Error::ThetaOutOfRange(_))));
    }

    #[test]
    fn offdiag_bounded_by_diag() {
        let w = window();
        let d = kernel_diag(60.0, &w);
        let v = kernel_offdiag(60.0, std::f64::consts::FRAC_PI_2, &w).unwrap();
        assert!(v.abs() <= d + 1e-12);
    }

    #[test]
    fn single_degree_window_reproduces_one_legendre_term() {
        // centering the window at mu_1 and reading theta-dependence:
        // kernel proportional to 3 cos(theta) / 4pi plus same-parity tails
        let w = SpectralWindow::new(1.0).unwrap();
        let mu = mu_of_degree(1);
        let peak0 = w.eval(mu - mu_of_degree(0));
        let peak1 = w.eval(0.0);
        for theta in [0.4f64, 1.1, 2.0] {
            let v = kernel_offdiag(mu, theta, &w).unwrap();
            let leading = peak1 * 3.0 / (4.0 * PI) * theta.cos();
            // remaining degrees contribute at most their window weights
            let mut slack = peak0 / (4.0 * PI);
            for k in 2..=w.degree_cutoff(mu) {
                slack += w.eval(mu - mu_of_degree(k)) * (2.0 * k as f64 + 1.0) / (4.0 * PI);
            }
            assert!((v - leading).abs() <= slack + 1e-12);
        }
    }

    #[test]
    fn weyl_count_is_mu_squared_up_to_linear() {
        let mut mu = 1.0;
        while mu <= 200.0 {
            let count = weyl_count(mu) as f64;
            assert!(
                (count - mu * mu).abs() <= mu + 1.0,
                "mu = {mu}: count {count}"
            );
            mu += 0.73;
        }
    }

    #[test]
    fn hecke_level_one_is_plain_diag() {
        let w = window();
        let v = hecke_kernel_diag(1, 33.0, [0.0, 0.0, 1.0], &w).unwrap();
        let d = kernel_diag(33.0, &w);
        assert!((v - d).abs() < 1e-12 * d.max(1.0));
    }

    #[test]
    fn hecke_kernel_bounded_by_lattice_size() {
        let w = window();
        let x = [0.6, 0.0, 0.8];
        for n in [5u64, 13] {
            let count = enumerate_rn(n).len() as f64;
            let v = hecke_kernel_diag(n, 30.0, x, &w).unwrap();
            let bound = 0.5 * count * kernel_diag(30.0, &w);
            assert!(v.abs() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn geometric_equals_spectral() {
        // the pre-trace oracle across the documented grid: 20 random
        // points, levels {5, 13, 25}, spectral parameters {20, 40, 60}
        use rand::{Rng, SeedableRng};
        let w = window();
        let levels = [5u64, 13, 25];
        let kmax = w.degree_cutoff(60.0);
        let eigendata = crate::hecke::joint_eigenbasis_range(kmax, &levels, 42).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        let mut points = Vec::new();
        while points.len() < 20 {
            let v = [
                rng.gen_range(-1.0f64..1.0),
                rng.gen_range(-1.0f64..1.0),
                rng.gen_range(-1.0f64..1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.1 && n <= 1.0 {
                points.push([v[0] / n, v[1] / n, v[2] / n]);
            }
        }
        let mut worst = 0.0f64;
        for &n in &levels {
            for &mu in &[20.0, 40.0, 60.0] {
                for &x in &points {
                    let geo = hecke_kernel_diag(n, mu, x, &w).unwrap();
                    let spec = hecke_kernel_diag_spectral(n, mu, x, &w, &eigendata).unwrap();
                    worst = worst.max((geo - spec).abs() / geo.abs().max(1.0));
                }
            }
        }
        assert!(worst <= crate::tol::PRETRACE_REL, "worst relative gap {worst:e}");
    }

    #[test]
    fn scan_grid_shapes() {
        let w = window();
        let s = scan(ScanMode::Diag, 10.0, 20.0, 6, [0.0, 0.0, 1.0], &w).unwrap();
        assert_eq!(s.rows.len(), 6);
        assert_eq!(s.rows[0].mu, 10.0);
        assert_eq!(s.rows[5].mu, 20.0);
        assert!((s.rows[2].value - kernel_diag(14.0, &w)).abs() < 1e-14);
        let s = scan(ScanMode::Hecke { n: 5 }, 12.0, 12.0, 1, [0.0, 0.0, 1.0], &w).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert!((s.rows[0].value - hecke_kernel_diag(5, 12.0, [0.0, 0.0, 1.0], &w).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn spectral_route_requires_coverage() {
        let w = window();
        let eigendata = BTreeMap::new();
        assert!(matches!(
            hecke_kernel_diag_spectral(5, 20.0, [0.0, 0.0, 1.0], &w, &eigendata),
            Err(Error::MissingDegree(_))
        ));
    }
}
