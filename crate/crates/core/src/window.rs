//! The smoothing window of the approximate spectral projector.
//!
//! The window rho is a nonnegative Schwartz function with unit mass whose
//! Fourier transform is compactly supported: take the standard bump
//! eta(t) = exp(-1 / (1 - (t/w)^2)) on (-w, w) with w = delta_s / 4, let
//! phi be its inverse Fourier transform, and set rho = c phi^2 with c
//! normalizing the mass. Then rho >= 0 everywhere, rho-hat = c (eta * eta)
//! / 2pi is supported in (-delta_s/2, delta_s/2), rho-hat(0) = 1, and rho
//! is strictly positive on [-1, 1] because cos(st) stays positive there for
//! |s| < w <= 1/4.
//!
//! phi is evaluated by composite Gauss-Legendre quadrature over the bump's
//! support with the panel count tied to the oscillation t |x|, then rho is
//! cached on a uniform grid and read back through cubic interpolation. The
//! grid extends until the tail falls below a configurable fraction of the
//! peak; beyond the grid the window evaluates to exactly zero, which is what
//! truncates every kernel sum downstream.

use crate::error::{Error, Result};
use crate::tol;

/// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half;
/// nodes are symmetric).
const GL_NODES: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.755404408355003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_WEIGHTS: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// A positive smoothing window with band-limited Fourier transform.
#[derive(Clone, Debug)]
pub struct SpectralWindow {
    support_half_width: f64,
    bump_half_width: f64,
    /// rho(i * step) for i = 0..samples; rho is even.
    grid: Vec<f64>,
    step: f64,
    peak: f64,
    /// values below tail_threshold * peak are treated as zero
    tail_threshold: f64,
    /// last grid abscissa with rho above the tail threshold
    tail_cut: f64,
    mass: f64,
}

impl SpectralWindow {
    /// Window with the default tail threshold.
    pub fn new(support_half_width: f64) -> Result<Self> {
        Self::with_tail_threshold(support_half_width, tol::WINDOW_TAIL)
    }

    /// Window whose kernel sums truncate once rho falls below
    /// `tail_threshold` times the peak. Coarser thresholds shrink the
    /// degree range of downstream spectral sums; both evaluation pipelines
    /// of any identity check share the same truncation through this value.
    pub fn with_tail_threshold(support_half_width: f64, tail_threshold: f64) -> Result<Self> {
        if !(support_half_width > 0.0 && support_half_width <= 1.0) {
            return Err(Error::WindowParam(support_half_width));
        }
        let w = support_half_width / 4.0;

        // normalization: rho = c phi^2 with c = 2 pi / integral(eta^2)
        let eta = |t: f64| {
            let u = t / w;
            if u.abs() >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - u * u)).exp()
            }
        };
        let eta_sq_mass = gl_integrate(&|t| eta(t) * eta(t), 0.0, w, 64) * 2.0;
        let c = 2.0 * std::f64::consts::PI / eta_sq_mass;

        let phi = |x: f64| {
            // (1/pi) integral_0^w eta(t) cos(x t) dt, panels tracking the
            // oscillation count w |x| / pi
            let panels = (16 + (w * x.abs() / std::f64::consts::PI) as usize).min(4096);
            gl_integrate(&|t| eta(t) * (x * t).cos(), 0.0, w, panels) / std::f64::consts::PI
        };

        let peak = c * phi(0.0) * phi(0.0);
        let floor = peak * (tail_threshold * 1e-2).max(1e-300);

        // grid step: several hundred samples per oscillation period pi / w
        let step = (std::f64::consts::PI / w / 600.0).clamp(5e-3, 1.0);
        let mut grid: Vec<f64> = Vec::new();
        let mut i = 0usize;
        let mut quiet = 0usize;
        // extend until a long stretch stays under the floor
        let quiet_needed = (40.0 / step).ceil() as usize;
        const HARD_CAP: usize = 4_000_000;
        loop {
            let x = i as f64 * step;
            let v = c * phi(x) * phi(x);
            grid.push(v);
            if v < floor {
                quiet += 1;
                if quiet >= quiet_needed {
                    break;
                }
            } else {
                quiet = 0;
            }
            i += 1;
            assert!(i < HARD_CAP, "window grid failed to decay");
        }

        let threshold_val = peak * tail_threshold;
        let mut tail_idx = 0usize;
        for (j, &v) in grid.iter().enumerate() {
            if v >= threshold_val {
                tail_idx = j;
            }
        }
        let tail_cut = tail_idx as f64 * step;

        // mass by Simpson on the cached grid (extended by even symmetry)
        let mass = simpson_even(&grid, step);

        Ok(SpectralWindow {
            support_half_width,
            bump_half_width: w,
            grid,
            step,
            peak,
            tail_threshold,
            tail_cut,
            mass,
        })
    }

    /// rho(t), by cubic interpolation on the cached grid; exactly zero
    /// beyond the cached range.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        let pos = t / self.step;
        let i = pos.floor() as usize;
        if i + 2 >= self.grid.len() {
            return 0.0;
        }
        let frac = pos - i as f64;
        // Catmull-Rom using the even extension at the origin
        let p0 = if i == 0 { self.grid[1] } else { self.grid[i - 1] };
        let p1 = self.grid[i];
        let p2 = self.grid[i + 1];
        let p3 = self.grid[i + 2];
        let a = 0.5 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3);
        let b = 0.5 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3);
        let cc = 0.5 * (p2 - p0);
        let v = ((a * frac + b) * frac + cc) * frac + p1;
        v.max(0.0)
    }

    /// rho(0), the peak value.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    /// Unit mass check value: the numerically re-integrated mass.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn support_half_width(&self) -> f64 {
        self.support_half_width
    }

    pub fn bump_half_width(&self) -> f64 {
        self.bump_half_width
    }

    pub fn tail_threshold(&self) -> f64 {
        self.tail_threshold
    }

    /// Arguments beyond this are below the tail threshold; kernel sums stop
    /// here.
    pub fn tail_cut(&self) -> f64 {
        self.tail_cut
    }

    /// Largest degree k whose spectral parameter sqrt(k(k+1)) lands within
    /// the window tail around mu.
    pub fn degree_cutoff(&self, mu: f64) -> u32 {
        let top = mu + self.tail_cut;
        // k(k+1) <= top^2
        let k = (-0.5 + (0.25 + top * top).sqrt()).floor();
        k.max(0.0) as u32
    }

    /// Whether the degree-k term survives truncation at spectral
    /// parameter mu.
    pub fn keeps_degree(&self, mu: f64, k: u32) -> bool {
        let mu_k = mu_of_degree(k);
        (mu - mu_k).abs() <= self.tail_cut
    }
}

/// Spectral parameter of degree k: sqrt(k(k+1)), the square root of the
/// Laplace eigenvalue.
pub fn mu_of_degree(k: u32) -> f64 {
    let kf = k as f64;
    (kf * (kf + 1.0)).sqrt()
}

fn gl_integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        for i in 0..8 {
            acc += GL_WEIGHTS[i] * (f(mid + half * GL_NODES[i]) + f(mid - half * GL_NODES[i]));
        }
    }
    acc * (hi - lo) / (2.0 * panels as f64)
}

/// Simpson integral of an even function sampled at 0, h, 2h, ...
fn simpson_even(half_grid: &[f64], h: f64) -> f64 {
    let n = half_grid.len();
    if n < 3 {
        return half_grid.iter().sum::<f64>() * h;
    }
    let m = if (n - 1) % 2 == 0 { n - 1 } else { n - 2 };
    let mut acc = half_grid[0] + half_grid[m];
    for i in 1..m {
        acc += half_grid[i] * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    // double for the even extension, minus the origin counted twice
    (acc * h / 3.0) * 2.0 - 0.0
}
