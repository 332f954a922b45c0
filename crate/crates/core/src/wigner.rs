//! Rotation matrices on spaces of spherical harmonics.
//!
//! A rotation R acts on degree-k harmonics by (f -> f o R^{-1}); this module
//! produces the matrix of that operator in the fixed real harmonic basis
//! (m = 0, then cos/sin pairs for m = 1..k). The construction goes through
//! the ZYZ Euler factorization R = Rz(alpha) Ry(beta) Rz(gamma): in the
//! complex basis the operator matrix is
//!
//!   D^k_{m',m} = exp(-i m' alpha) d^k_{m'm}(beta) exp(-i m gamma),
//!
//! and the small-d values are generated, for each fixed (m', m), by the
//! three-term recurrence of the Jacobi polynomials over the degree. That
//! direction of recurrence follows the dominant solution, so the stack stays
//! accurate well past k = 100. Finally the complex matrix is conjugated into
//! the real basis by the sparse unitary that defines the real harmonics.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::quaternion::RotationMatrix;
use num_complex::Complex64;

/// ZYZ Euler angles with beta in [0, pi].
#[derive(Clone, Copy, Debug)]
pub struct EulerZyz {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Factor R = Rz(alpha) Ry(beta) Rz(gamma). The gimbal-locked cases
/// (beta near 0 or pi) put the whole z-rotation into alpha.
pub fn euler_zyz(r: &RotationMatrix) -> EulerZyz {
    let c = r.m[2][2].clamp(-1.0, 1.0);
    let beta = c.acos();
    let sb = (1.0 - c * c).max(0.0).sqrt();
    if sb > 1e-12 {
        EulerZyz {
            alpha: r.m[1][2].atan2(r.m[0][2]),
            beta,
            gamma: r.m[2][1].atan2(-r.m[2][0]),
        }
    } else if c > 0.0 {
        EulerZyz { alpha: r.m[1][0].atan2(r.m[0][0]), beta: 0.0, gamma: 0.0 }
    } else {
        EulerZyz {
            alpha: (-r.m[0][1]).atan2(-r.m[0][0]),
            beta: std::f64::consts::PI,
            gamma: 0.0,
        }
    }
}

/// Recurrence over the degree for d^j_{m'm}(beta) at fixed (m', m).
///
/// Yields d^j for j = jmin, jmin+1, ... where jmin = max(|m'|, |m|). The
/// parameters (a, b) and the sign are fixed by which of j+-m, j+-m' is
/// smallest; b = 2 jmin - a stays constant along the chain.
pub struct DChain {
    // Jacobi recurrence state
    a: f64,
    b: f64,
    x: f64,
    p_prev: f64, // P_{s-1}
    p_curr: f64, // P_s
    s: i64,
    // prefactor sqrt(binom(2jmin+s, s+a) / binom(s+b, b)), updated per step
    pref: f64,
    base: f64,
    sign: f64,
    two_jmin: i64,
}

impl DChain {
    pub fn new(mp: i32, m: i32, beta: f64) -> Self {
        let (mp, m) = (mp as i64, m as i64);
        let jmin = mp.abs().max(m.abs());
        // pick the minimal of (j+m, j-m, j+m', j-m') at j = jmin; the
        // minimizer is degree-independent
        let vals = [jmin + m, jmin - m, jmin + mp, jmin - mp];
        let k0 = *vals.iter().min().unwrap();
        // the two middle cases of the four-way split share parameters
        let (a, lam) = if vals[0] == k0 {
            (mp - m, mp - m)
        } else if vals[1] == k0 || vals[2] == k0 {
            (m - mp, 0)
        } else {
            (mp - m, mp - m)
        };
        debug_assert!(a >= 0);
        let b = 2 * jmin - a;
        debug_assert!(b >= 0);

        let half = 0.5 * beta;
        let (sh, ch) = (half.sin(), half.cos());
        // (sin b/2)^a (cos b/2)^b; underflow to zero is harmless because the
        // Jacobi factor can recover at most ~4^j of it
        let base = sh.powi(a as i32) * ch.powi(b as i32);
        let sign = if lam.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
        let pref = (0.5 * ln_binom(2 * jmin, a)).exp();

        DChain {
            a: a as f64,
            b: b as f64,
            x: beta.cos(),
            p_prev: 0.0,
            p_curr: 1.0,
            s: 0,
            pref,
            base,
            sign,
            two_jmin: 2 * jmin,
        }
    }

    /// d value at the current degree, then advance the chain by one degree.
    pub fn next_value(&mut self) -> f64 {
        let d = self.sign * self.pref * self.base * self.p_curr;
        self.advance();
        d
    }

    fn advance(&mut self) {
        let (a, b, x) = (self.a, self.b, self.x);
        let s_next = self.s + 1;
        let sf = s_next as f64;
        let p_next = if s_next == 1 {
            0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
        } else {
            let c0 = 2.0 * sf * (sf + a + b) * (2.0 * sf + a + b - 2.0);
            let c1 = (2.0 * sf + a + b - 1.0) * (2.0 * sf + a + b) * (2.0 * sf + a + b - 2.0);
            let c2 = (2.0 * sf + a + b - 1.0) * (a * a - b * b);
            let c3 = 2.0 * (sf + a - 1.0) * (sf + b - 1.0) * (2.0 * sf + a + b);
            ((c1 * x + c2) * self.p_curr - c3 * self.p_prev) / c0
        };
        self.p_prev = self.p_curr;
        self.p_curr = p_next;
        // prefactor step: binom(2jmin+s+1, s+1+a)/binom(2jmin+s, s+a)
        //               * binom(s+b, b)/binom(s+1+b, b)
        let ratio = ((self.two_jmin as f64 + sf) / (sf + a)) * (sf / (sf + b));
        self.pref *= ratio.sqrt();
        self.s = s_next;
    }
}

fn ln_binom(n: i64, k: i64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// ln(n!) from a lazily built running-sum table. Covers degrees past 2000,
/// far beyond desk scale.
fn ln_factorial(n: i64) -> f64 {
    use std::sync::OnceLock;
    const TABLE_LEN: usize = 8192;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        t.push(0.0);
        for v in 1..TABLE_LEN as i64 {
            t.push(t[(v - 1) as usize] + (v as f64).ln());
        }
        t
    });
    assert!(n >= 0 && (n as usize) < TABLE_LEN, "ln_factorial out of range: {n}");
    table[n as usize]
}

/// Sparse column of the real-basis unitary: the complex harmonic of order m
/// contributes to at most two real rows. Rows are ordered m = 0, then
/// (cos, sin) pairs for each |m| = 1..k.
#[derive(Clone, Copy)]
struct RealColumn {
    n: usize,
    entries: [(usize, Complex64); 2],
}

fn real_column(m: i32) -> RealColumn {
    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;
    let zero = (0usize, Complex64::new(0.0, 0.0));
    if m == 0 {
        RealColumn { n: 1, entries: [(0, Complex64::new(1.0, 0.0)), zero] }
    } else if m > 0 {
        let mm = m as usize;
        let cs = if m % 2 == 0 { INV_SQRT2 } else { -INV_SQRT2 };
        RealColumn {
            n: 2,
            entries: [
                (2 * mm - 1, Complex64::new(cs, 0.0)),
                (2 * mm, Complex64::new(0.0, -cs)),
            ],
        }
    } else {
        let mm = (-m) as usize;
        RealColumn {
            n: 2,
            entries: [
                (2 * mm - 1, Complex64::new(INV_SQRT2, 0.0)),
                (2 * mm, Complex64::new(0.0, INV_SQRT2)),
            ],
        }
    }
}

/// Accumulate `weight` times the real representation matrices of one rotation
/// into `mats`, where `mats[k]` is (2k+1) x (2k+1), for every k <= kmax.
///
/// One degree recurrence serves the whole symmetry orbit of a pair,
///
///   d_{m'm} = (-1)^{m'-m} d_{mm'} = (-1)^{m'-m} d_{-m',-m} = d_{-m,-m'},
///
/// so only representatives with m' >= |m| are walked, and the stack costs
/// the same as its largest matrix up to a constant.
pub fn accumulate_rotation_stack(mats: &mut [Mat], r: &RotationMatrix, weight: f64) {
    let kmax = mats.len() as i32 - 1;
    if kmax < 0 {
        return;
    }
    let e = euler_zyz(r);
    let cols: Vec<RealColumn> = (-kmax..=kmax).map(real_column).collect();
    let phase_alpha: Vec<Complex64> =
        (-kmax..=kmax).map(|m| Complex64::from_polar(1.0, -(m as f64) * e.alpha)).collect();
    let phase_gamma: Vec<Complex64> =
        (-kmax..=kmax).map(|m| Complex64::from_polar(1.0, -(m as f64) * e.gamma)).collect();
    let idx = |m: i32| (m + kmax) as usize;

    // combo scratch: up to 4 orbit members x 4 row pairs
    let mut combos: [(usize, usize, f64); 16] = [(0, 0, 0.0); 16];

    for mp in 0..=kmax {
        for m in -mp..=mp {
            let jmin = mp; // representatives satisfy m' = max(|m'|, |m|)
            let orbit_sign = if (mp - m).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            // orbit members as (row index, column index, d multiplier)
            let mut members: [(i32, i32, f64); 4] = [(0, 0, 0.0); 4];
            let mut n_members = 0usize;
            for cand in [
                (mp, m, 1.0),
                (m, mp, orbit_sign),
                (-mp, -m, orbit_sign),
                (-m, -mp, 1.0),
            ] {
                if !members[..n_members].iter().any(|&(a, b, _)| (a, b) == (cand.0, cand.1)) {
                    members[n_members] = cand;
                    n_members += 1;
                }
            }

            let mut ncombo = 0usize;
            for &(m1, m2, sign) in &members[..n_members] {
                let col_1 = cols[idx(m1)];
                let col_2 = cols[idx(m2)];
                let phase = phase_alpha[idx(m1)] * phase_gamma[idx(m2)];
                for &(r1, b1) in &col_1.entries[..col_1.n] {
                    for &(r2, b2) in &col_2.entries[..col_2.n] {
                        let w = (b1.conj() * b2 * phase).re * weight * sign;
                        combos[ncombo] = (r1, r2, w);
                        ncombo += 1;
                    }
                }
            }

            let mut chain = DChain::new(mp, m, e.beta);
            for k in jmin..=kmax {
                let d = chain.next_value();
                if d != 0.0 {
                    let mat = &mut mats[k as usize];
                    let cols = mat.cols();
                    let data = mat.data_mut();
                    for &(r1, r2, w) in &combos[..ncombo] {
                        data[r1 * cols + r2] += w * d;
                    }
                }
            }
        }
    }
}

/// Fresh stack of zero matrices sized for degrees 0..=kmax.
pub fn zero_stack(kmax: u32) -> Vec<Mat> {
    (0..=kmax).map(|k| Mat::zeros(2 * k as usize + 1, 2 * k as usize + 1)).collect()
}

/// Matrix of (f -> f o R^{-1}) on the degree-k harmonics in the real basis.
///
/// Orthogonal, and a homomorphism in R. For k = 1 it is the rotation itself
/// up to the basis permutation (z, x, y).
pub fn rotation_rep_matrix(k: u32, r: &RotationMatrix) -> Result<Mat> {
    if !r.is_rotation() {
        return Err(Error::InvalidRotation);
    }
    let mut mats = zero_stack(k);
    accumulate_rotation_stack(&mut mats, r, 1.0);
    Ok(mats.pop().unwrap())
}

/// One column of the complex Wigner matrix in the real-row basis:
/// entries sum_{m} conj(B[r, m]) D^k_{m, l}(g) for the fixed K-type weight l.
/// This is what a degree-k form of weight l is expanded in on the group.
pub fn real_row_d_column(k: u32, l: i32, r: &RotationMatrix) -> Result<Vec<Complex64>> {
    let ki = k as i32;
    if l.abs() > ki {
        return Err(Error::WeightOutOfRange { k, l });
    }
    let e = euler_zyz(r);
    let dim = 2 * k as usize + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    let gamma_phase = Complex64::from_polar(1.0, -(l as f64) * e.gamma);
    for m in -ki..=ki {
        // d^k_{m, l}(beta) via the degree chain for the pair (m, l)
        let mut chain = DChain::new(m, l, e.beta);
        let jmin = m.abs().max(l.abs());
        let mut d = 0.0;
        for _ in jmin..=ki {
            d = chain.next_value();
        }
        let dml = Complex64::from_polar(1.0, -(m as f64) * e.alpha) * d * gamma_phase;
        let col = real_column(m);
        for &(row, b) in &col.entries[..col.n] {
            out[row] += b.conj() * dml;
        }
    }
    Ok(out)
}
