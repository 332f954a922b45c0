//! Exact lattice-point counting in both settings, with bound-shape fits.
//!
//! Sphere: the number of norm-n lattice rotations moving a point by less
//! than a geodesic angle delta. Hyperbolic plane: the number of order
//! elements of reduced norm n whose Moebius action moves z by less than
//! delta in the point-pair invariant u(z, w) = |z - w|^2 / (Im z Im w).
//!
//! The hyperbolic count encloses its solutions in a certified coordinate
//! box: u(z, g z) = |h^{-1} g h|_F^2 - 2 for g in SL(2, R) and h i = z, so
//! every solution satisfies |h^{-1} theta(x) h|_F^2 < n (delta + 2), and the
//! linear coordinate map pins each |x_i|. A 10 percent margin is enumerated
//! on top and must stay empty.

use crate::error::{Error, Result};
use crate::linalg::{solve_dense, Mat};
use crate::quaternion::{enumerate_rn, rotation_of, IndefAlgebra};

/// A point x + iy with y > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicPoint {
    re: f64,
    im: f64,
}

impl HyperbolicPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) {
            return Err(Error::NotInUpperHalfPlane(im));
        }
        Ok(HyperbolicPoint { re, im })
    }

    pub fn i() -> Self {
        HyperbolicPoint { re: 0.0, im: 1.0 }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    /// Moebius action of a real 2x2 matrix with positive determinant.
    pub fn moebius(&self, g: &[[f64; 2]; 2]) -> Result<HyperbolicPoint> {
        let (a, b, c, d) = (g[0][0], g[0][1], g[1][0], g[1][1]);
        let det = a * d - b * c;
        if !(det > 0.0) {
            return Err(Error::DegenerateInput("moebius action needs det > 0"));
        }
        let (x, y) = (self.re, self.im);
        let den = (c * x + d) * (c * x + d) + (c * y) * (c * y);
        HyperbolicPoint::new(
            ((a * x + b) * (c * x + d) + a * c * y * y) / den,
            det * y / den,
        )
    }
}

/// The point-pair invariant u(z, w) = |z - w|^2 / (Im z Im w): symmetric,
/// nonnegative, zero only on the diagonal, invariant under simultaneous
/// fractional-linear maps.
pub fn u_invariant(z: &HyperbolicPoint, w: &HyperbolicPoint) -> f64 {
    let dre = z.re - w.re;
    let dim = z.im - w.im;
    (dre * dre + dim * dim) / (z.im * w.im)
}

/// Geodesic distance arcosh(1 + u/2), for the metric-equivalence checks.
pub fn hyperbolic_dist(z: &HyperbolicPoint, w: &HyperbolicPoint) -> f64 {
    (1.0 + 0.5 * u_invariant(z, w)).acosh()
}

/// Count of alpha in R(n) with angle(x, R_alpha x) < delta on the sphere.
pub fn count_sphere(n: u64, x: [f64; 3], delta: f64) -> Result<u64> {
    if n % 4 != 1 {
        return Err(Error::EmptyLevel(n));
    }
    assert!(delta >= 0.0);
    let mut count = 0;
    for alpha in enumerate_rn(n) {
        let r = rotation_of(&alpha)?;
        let rx = r.apply(x);
        let dot = (rx[0] * x[0] + rx[1] * x[1] + rx[2] * x[2]).clamp(-1.0, 1.0);
        if dot.acos() < delta {
            count += 1;
        }
    }
    Ok(count)
}

/// Count of order elements x with N(x) = n and u(z, theta(x)/sqrt(n) z)
/// < delta. Exact: integer norms are checked exactly, the box enumerated is
/// certified by the Frobenius-norm bound with a margin shell.
pub fn count_hyperbolic(
    alg: &IndefAlgebra,
    n: u64,
    z: &HyperbolicPoint,
    delta: f64,
) -> Result<u64> {
    assert!(delta >= 0.0);
    let n_i = n as i64;
    if n == 0 {
        return Ok(0);
    }

    // h i = z, h = [[sqrt y, x / sqrt y], [0, 1 / sqrt y]]
    let sy = z.im.sqrt();
    let h = [[sy, z.re / sy], [0.0, 1.0 / sy]];
    let h_inv = [[1.0 / sy, -z.re / sy], [0.0, sy]];

    // linear map L: coordinates -> entries of h^{-1} theta(.) h
    let mut l = Mat::zeros(4, 4);
    for (col, basis) in [
        alg.element(1, 0, 0, 0),
        alg.element(0, 1, 0, 0),
        alg.element(0, 0, 1, 0),
        alg.element(0, 0, 0, 1),
    ]
    .iter()
    .enumerate()
    {
        let t = basis.theta_embed();
        let conj = mat2_mul(&mat2_mul(&h_inv, &t), &h);
        l.set(0, col, conj[0][0]);
        l.set(1, col, conj[0][1]);
        l.set(2, col, conj[1][0]);
        l.set(3, col, conj[1][1]);
    }
    // rows of L^{-1} bound each coordinate by |row| * |entries|
    let id_cols: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let inv_cols = solve_dense(&l, &id_cols)
        .map_err(|_| Error::EnumerationBoundOverflow("coordinate map is singular".into()))?;
    // inv_cols[j][i] = (L^{-1})_{i j}; row norms of L^{-1}
    let radius = ((n as f64) * (delta + 2.0)).sqrt();
    let mut bounds = [0i64; 4];
    let mut base_bounds = [0.0f64; 4];
    let mut box_cells: f64 = 1.0;
    for i in 0..4 {
        let row_norm: f64 = (0..4).map(|j| inv_cols[j][i] * inv_cols[j][i]).sum::<f64>().sqrt();
        base_bounds[i] = row_norm * radius;
        let padded = (1.1 * base_bounds[i]).ceil() + 1.0;
        if padded > 1e7 {
            return Err(Error::EnumerationBoundOverflow(format!(
                "coordinate bound {padded:.1e} too large at n = {n}, delta = {delta}"
            )));
        }
        bounds[i] = padded as i64;
        box_cells *= 2.0 * padded + 1.0;
    }
    if box_cells > 5e8 {
        return Err(Error::EnumerationBoundOverflow(format!(
            "box of {box_cells:.1e} cells too large at n = {n}, delta = {delta}"
        )));
    }

    let sqrt_n = (n as f64).sqrt();
    let mut count = 0u64;
    for x0 in -bounds[0]..=bounds[0] {
        for x1 in -bounds[1]..=bounds[1] {
            for x2 in -bounds[2]..=bounds[2] {
                for x3 in -bounds[3]..=bounds[3] {
                    let el = alg.element(x0, x1, x2, x3);
                    if el.reduced_norm()? != n_i {
                        continue;
                    }
                    let t = el.theta_embed();
                    let g = [
                        [t[0][0] / sqrt_n, t[0][1] / sqrt_n],
                        [t[1][0] / sqrt_n, t[1][1] / sqrt_n],
                    ];
                    let gz = z.moebius(&g)?;
                    if u_invariant(z, &gz) < delta {
                        // margin shell must stay empty or the box bound is wrong
                        let coords = [x0, x1, x2, x3];
                        for i in 0..4 {
                            if (coords[i].abs() as f64) > base_bounds[i].floor() + 1.0 {
                                return Err(Error::EnumerationBoundOverflow(format!(
                                    "solution {coords:?} escaped the certified box at n = {n}"
                                )));
                            }
                        }
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

fn mat2_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Which setting a counting profile was produced in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    Sphere,
    Hyperbolic,
}

/// A column of (delta, count) pairs at a fixed level and base point.
#[derive(Clone, Debug)]
pub struct CountingProfile {
    pub setting: Setting,
    pub n: u64,
    /// Unit 3-vector in the sphere setting, (re, im) in the hyperbolic one.
    pub base_point: [f64; 3],
    pub rows: Vec<(f64, u64)>,
}

impl CountingProfile {
    pub fn sphere_scan(n: u64, x: [f64; 3], deltas: &[f64]) -> Result<Self> {
        let rows = deltas
            .iter()
            .map(|&d| count_sphere(n, x, d).map(|m| (d, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CountingProfile { setting: Setting::Sphere, n, base_point: x, rows })
    }

    pub fn hyperbolic_scan(
        alg: &IndefAlgebra,
        n: u64,
        z: &HyperbolicPoint,
        deltas: &[f64],
    ) -> Result<Self> {
        let rows = deltas
            .iter()
            .map(|&d| count_hyperbolic(alg, n, z, d).map(|m| (d, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CountingProfile {
            setting: Setting::Hyperbolic,
            n,
            base_point: [z.re, z.im, 0.0],
            rows,
        })
    }
}

/// Bound shapes the counts are fitted against. The epsilon-powers are fixed
/// at 0.05 so the fitted constants are comparable across scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundModel {
    /// Constant: count independent of delta (level 1).
    Constant,
    /// Sphere shape: sqrt(delta) n^(1+eps) + n^eps.
    SphereSqrt,
    /// Hyperbolic shape: (delta + delta^(1/4)) n^(1+eps) + n^eps.
    HypQuarter,
}

pub const MODEL_EPSILON: f64 = 0.05;

impl BoundModel {
    pub fn eval(&self, delta: f64, n: u64) -> f64 {
        let nf = n as f64;
        match self {
            BoundModel::Constant => 1.0,
            BoundModel::SphereSqrt => {
                delta.sqrt() * nf.powf(1.0 + MODEL_EPSILON) + nf.powf(MODEL_EPSILON)
            }
            BoundModel::HypQuarter => {
                (delta + delta.powf(0.25)) * nf.powf(1.0 + MODEL_EPSILON)
                    + nf.powf(MODEL_EPSILON)
            }
        }
    }
}

/// Result of fitting counts against a bound model.
#[derive(Clone, Copy, Debug)]
pub struct BoundFit {
    /// Least-squares coefficient of the model.
    pub c: f64,
    /// Largest observed count / model ratio; the empirical constant that
    /// makes the bound hold over the scan.
    pub max_ratio: f64,
    /// Root mean square residual of the least-squares fit.
    pub rms_residual: f64,
}

/// Fit one profile. At least 10 rows; a non-constant model on an all-equal
/// profile is degenerate.
pub fn fit_bound(profile: &CountingProfile, model: BoundModel) -> Result<BoundFit> {
    fit_bound_family(std::slice::from_ref(profile), model)
}

/// Fit a family of profiles jointly (shared constant across levels).
pub fn fit_bound_family(profiles: &[CountingProfile], model: BoundModel) -> Result<BoundFit> {
    const MIN_ROWS: usize = 10;
    let total_rows: usize = profiles.iter().map(|p| p.rows.len()).sum();
    if total_rows < MIN_ROWS {
        return Err(Error::ProfileTooSmall(total_rows, MIN_ROWS));
    }
    let mut first = None;
    let mut all_equal = true;
    for p in profiles {
        for &(_, m) in &p.rows {
            match first {
                None => first = Some(m),
                Some(f) if f != m => all_equal = false,
                _ => {}
            }
        }
    }
    if all_equal && model != BoundModel::Constant {
        return Err(Error::DegenerateProfile(first.unwrap_or(0)));
    }

    let mut num = 0.0;
    let mut den = 0.0;
    let mut max_ratio = 0.0f64;
    for p in profiles {
        for &(delta, m) in &p.rows {
            let model_val = model.eval(delta, p.n);
            num += m as f64 * model_val;
            den += model_val * model_val;
            if model_val > 0.0 {
                max_ratio = max_ratio.max(m as f64 / model_val);
            }
        }
    }
    if den == 0.0 {
        return Err(Error::DegenerateProfile(first.unwrap_or(0)));
    }
    let c = num / den;
    let mut ss = 0.0;
    for p in profiles {
        for &(delta, m) in &p.rows {
            ss += (m as f64 - c * model.eval(delta, p.n)).powi(2);
        }
    }
    Ok(BoundFit { c, max_ratio, rms_residual: (ss / total_rows as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn u_invariant_basics() {
        let i = HyperbolicPoint::i();
        assert_eq!(u_invariant(&i, &i), 0.0);
        // u(i, e^t i) = e^t + e^{-t} - 2
        for t in [0.1f64, 0.5, 2.0_f64.ln(), 1.7] {
            let w = HyperbolicPoint::new(0.0, t.exp()).unwrap();
            let want = t.exp() + (-t).exp() - 2.0;
            assert!((u_invariant(&i, &w) - want).abs() < 1e-12);
        }
        let w = HyperbolicPoint::new(0.0, 2.0).unwrap();
        assert!((u_invariant(&i, &w) - 0.5).abs() < 1e-12);
        assert!((u_invariant(&w, &i) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn upper_half_plane_enforced() {
        assert!(HyperbolicPoint::new(0.3, 0.0).is_err());
        assert!(HyperbolicPoint::new(0.3, -1.0).is_err());
    }

    fn random_sl2(rng: &mut ChaCha8Rng) -> [[f64; 2]; 2] {
        // a b; c d with ad - bc = 1 via d = (1 + bc) / a
        loop {
            let a: f64 = rng.gen_range(-2.0..2.0);
            if a.abs() < 0.1 {
                continue;
            }
            let b: f64 = rng.gen_range(-2.0..2.0);
            let c: f64 = rng.gen_range(-2.0..2.0);
            let d = (1.0 + b * c) / a;
            if d.abs() < 10.0 {
                return [[a, b], [c, d]];
            }
        }
    }

    #[test]
    fn u_of_moebius_orbit_is_frobenius_norm() {
        // u(i, g i) = |g|_F^2 - 2 on SL(2, R)
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let i = HyperbolicPoint::i();
        for _ in 0..1000 {
            let g = random_sl2(&mut rng);
            let gi = i.moebius(&g).unwrap();
            let frob: f64 = g.iter().flatten().map(|v| v * v).sum();
            assert!((u_invariant(&i, &gi) - (frob - 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn u_is_moebius_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let g = random_sl2(&mut rng);
            let z = HyperbolicPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0)).unwrap();
            let w = HyperbolicPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0)).unwrap();
            let u0 = u_invariant(&z, &w);
            let u1 = u_invariant(&z.moebius(&g).unwrap(), &w.moebius(&g).unwrap());
            assert!((u0 - u1).abs() < 1e-9 * u0.max(1.0));
        }
    }

    #[test]
    fn metric_equivalence_on_compact_set() {
        // c1 u <= dist^2 <= c2 u on sampled pairs with u bounded
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let (mut c1, mut c2): (f64, f64) = (f64::INFINITY, 0.0);
        for _ in 0..500 {
            let z = HyperbolicPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)).unwrap();
            let w = HyperbolicPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)).unwrap();
            let u = u_invariant(&z, &w);
            if u < 1e-12 {
                continue;
            }
            let ratio = hyperbolic_dist(&z, &w).powi(2) / u;
            c1 = c1.min(ratio);
            c2 = c2.max(ratio);
        }
        assert!(c1 > 0.0 && c2.is_finite() && c1 <= c2);
        assert!(c2 / c1 < 10.0, "metric ratio spread too large: {c1} .. {c2}");
    }

    #[test]
    fn sphere_count_saturates_and_level_one() {
        let x = [0.0, 0.0, 1.0];
        let full = enumerate_rn(13).len() as u64;
        assert_eq!(count_sphere(13, x, 4.0).unwrap(), full);
        assert_eq!(count_sphere(1, [0.3, 0.4, (1.0f64 - 0.25).sqrt()], 0.5).unwrap(), 2);
    }

    #[test]
    fn sphere_count_polar_axis_fixers() {
        // at the pole with a tiny threshold only the rotations about the
        // polar axis survive; for R(5) these are the four (+-1, 0, 0, +-2)
        let x = [0.0, 0.0, 1.0];
        let count = count_sphere(5, x, 1e-6).unwrap();
        let mut oracle = 0;
        for alpha in enumerate_rn(5) {
            let axis_polar = alpha.a1 == 0 && alpha.a2 == 0;
            let angle_zero = alpha.a1 == 0 && alpha.a2 == 0 && alpha.a3 == 0;
            if axis_polar || angle_zero {
                oracle += 1;
            }
        }
        assert_eq!(count, oracle);
        assert_eq!(count, 4);
    }

    #[test]
    fn sphere_count_even_and_monotone() {
        let x = [0.48, 0.6, 0.64];
        for n in [5u64, 13, 25] {
            let mut prev = 0;
            for delta in [0.3, 1.0, 2.2, 4.0] {
                let c = count_sphere(n, x, delta).unwrap();
                assert_eq!(c % 2, 0, "conjugation pairs alpha with -alpha");
                assert!(c >= prev);
                prev = c;
            }
        }
    }

    #[test]
    fn hyperbolic_count_monotone_and_zero_at_zero() {
        let alg = IndefAlgebra::new(2, 3).unwrap();
        let z = HyperbolicPoint::new(0.3, 1.2).unwrap();
        assert_eq!(count_hyperbolic(&alg, 3, &z, 0.0).unwrap(), 0);
        let mut prev = 0;
        for delta in [0.1, 0.5, 1.0, 2.0] {
            let c = count_hyperbolic(&alg, 3, &z, delta).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn hyperbolic_count_matches_oversized_box() {
        let alg = IndefAlgebra::new(2, 3).unwrap();
        let z = HyperbolicPoint::i();
        let delta = 0.5;
        for n in 1u64..=20 {
            let fast = count_hyperbolic(&alg, n, &z, delta).unwrap();
            // naive oversized box
            let lim = 2 * ((((n as f64) * (delta + 2.0)).sqrt()).ceil() as i64);
            let mut naive = 0u64;
            for x0 in -lim..=lim {
                for x1 in -lim..=lim {
                    for x2 in -lim..=lim {
                        for x3 in -lim..=lim {
                            let el = alg.element(x0, x1, x2, x3);
                            if el.reduced_norm().unwrap() != n as i64 {
                                continue;
                            }
                            let t = el.theta_embed();
                            let s = (n as f64).sqrt();
                            let g = [[t[0][0] / s, t[0][1] / s], [t[1][0] / s, t[1][1] / s]];
                            let gz = z.moebius(&g).unwrap();
                            if u_invariant(&z, &gz) < delta {
                                naive += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(fast, naive, "n = {n}");
        }
    }

    #[test]
    fn fit_constant_profile() {
        let profile = CountingProfile {
            setting: Setting::Sphere,
            n: 1,
            base_point: [0.0, 0.0, 1.0],
            rows: (1..=12).map(|i| (i as f64 * 0.1, 2u64)).collect(),
        };
        let fit = fit_bound(&profile, BoundModel::Constant).unwrap();
        assert!((fit.c - 2.0).abs() < 1e-12);
        assert!((fit.max_ratio - 2.0).abs() < 1e-12);
        // non-constant model on the same all-equal profile is degenerate
        assert!(matches!(
            fit_bound(&profile, BoundModel::SphereSqrt),
            Err(Error::DegenerateProfile(2))
        ));
    }

    #[test]
    fn fit_requires_enough_rows() {
        let profile = CountingProfile {
            setting: Setting::Sphere,
            n: 5,
            base_point: [0.0, 0.0, 1.0],
            rows: vec![(0.1, 2), (0.2, 4)],
        };
        assert!(matches!(
            fit_bound(&profile, BoundModel::SphereSqrt),
            Err(Error::ProfileTooSmall(2, 10))
        ));
    }
}
