//! Real spherical harmonics, fully normalized against surface measure.
//!
//! Basis order for degree k: m = 0 first, then (cos, sin) pairs for
//! m = 1..k, matching the rotation representation matrices. The values are
//! generated by the normalized associated-Legendre recurrences, so no raw
//! factorials appear and degrees in the hundreds are safe.

use std::f64::consts::PI;

/// All (2k+1) real harmonics of degree k at a unit vector.
pub fn real_basis(k: u32, x: [f64; 3]) -> Vec<f64> {
    let mut all = real_basis_all(k, x);
    all.pop().unwrap()
}

/// Real harmonic vectors for every degree 0..=kmax at one point.
///
/// Shared by the kernel and sup-norm scans, which need whole stacks; the
/// normalized recurrence fills all degrees of one order in a single sweep.
pub fn real_basis_all(kmax: u32, x: [f64; 3]) -> Vec<Vec<f64>> {
    let kmax = kmax as usize;
    let ct = x[2].clamp(-1.0, 1.0);
    let st = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let phi = x[1].atan2(x[0]);

    let mut out: Vec<Vec<f64>> = (0..=kmax).map(|k| vec![0.0; 2 * k + 1]).collect();

    // cos(m phi), sin(m phi) by the angle-addition recurrence
    let (cp, sp) = (phi.cos(), phi.sin());
    let mut cos_m = vec![0.0; kmax + 1];
    let mut sin_m = vec![0.0; kmax + 1];
    cos_m[0] = 1.0;
    for m in 1..=kmax {
        cos_m[m] = cos_m[m - 1] * cp - sin_m[m - 1] * sp;
        sin_m[m] = sin_m[m - 1] * cp + cos_m[m - 1] * sp;
    }

    // nbar(k, m) = sqrt((2k+1)/(4pi) (k-m)!/(k+m)!) P_k^m(ct), by order
    let sqrt2 = 2.0f64.sqrt();
    let mut nbar_mm = (1.0 / (4.0 * PI)).sqrt(); // nbar(0, 0)
    for m in 0..=kmax {
        // fill degrees k = m..kmax for this order
        let mut prev2 = 0.0; // nbar(k-2, m)
        let mut prev1 = nbar_mm; // nbar(k-1, m), seeded with nbar(m, m)
        for k in m..=kmax {
            let val = if k == m {
                nbar_mm
            } else if k == m + 1 {
                (2.0 * m as f64 + 3.0).sqrt() * ct * prev1
            } else {
                let kf = k as f64;
                let mf = m as f64;
                let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
                let b = (((kf - 1.0) * (kf - 1.0) - mf * mf) / (4.0 * (kf - 1.0) * (kf - 1.0) - 1.0))
                    .sqrt();
                a * (ct * prev1 - b * prev2)
            };
            if k > m {
                prev2 = prev1;
                prev1 = val;
            }
            if m == 0 {
                out[k][0] = val;
            } else {
                out[k][2 * m - 1] = sqrt2 * val * cos_m[m];
                out[k][2 * m] = sqrt2 * val * sin_m[m];
            }
        }
        // nbar(m+1, m+1) from nbar(m, m)
        let mf = m as f64;
        nbar_mm *= ((2.0 * mf + 3.0) / (2.0 * mf + 2.0)).sqrt() * st;
    }
    out
}

/// Legendre polynomials P_0..P_kmax at t, by the upward recurrence.
pub fn legendre_all(kmax: u32, t: f64) -> Vec<f64> {
    let kmax = kmax as usize;
    let mut p = Vec::with_capacity(kmax + 1);
    p.push(1.0);
    if kmax == 0 {
        return p;
    }
    p.push(t);
    for k in 2..=kmax {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * t * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
        p.push(next);
    }
    p
}

/// Quasi-uniform Fibonacci lattice on the sphere, for quadrature checks.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * PI * (i as f64 / golden).fract();
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
        loop {
            let v: [f64; 3] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.1 && n <= 1.0 {
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    }

    #[test]
    fn degree_zero_and_one_are_explicit() {
        let x = [0.6, 0.48, 0.64];
        let y0 = real_basis(0, x);
        assert!((y0[0] - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        let y1 = real_basis(1, x);
        let c = (3.0 / (4.0 * PI)).sqrt();
        assert!((y1[0] - c * x[2]).abs() < 1e-14); // m = 0 carries z
        assert!((y1[1] - c * x[0]).abs() < 1e-14); // cos carries x
        assert!((y1[2] - c * x[1]).abs() < 1e-14); // sin carries y
    }

    #[test]
    fn addition_theorem_diagonal() {
        // sum_m |Y_km(x)|^2 = (2k+1)/(4pi) at any point
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = random_unit(&mut rng);
            let all = real_basis_all(40, x);
            for (k, y) in all.iter().enumerate() {
                let s: f64 = y.iter().map(|v| v * v).sum();
                let want = (2.0 * k as f64 + 1.0) / (4.0 * PI);
                assert!((s - want).abs() < 1e-10 * want.max(1.0), "k = {k}");
            }
        }
    }

    #[test]
    fn addition_theorem_off_diagonal() {
        // sum_m Y_km(x) Y_km(y) = (2k+1)/(4pi) P_k(x . y)
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = random_unit(&mut rng);
            let y = random_unit(&mut rng);
            let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
            let ax = real_basis_all(30, x);
            let ay = real_basis_all(30, y);
            let p = legendre_all(30, dot);
            for k in 0..=30usize {
                let s: f64 = ax[k].iter().zip(&ay[k]).map(|(a, b)| a * b).sum();
                let want = (2.0 * k as f64 + 1.0) / (4.0 * PI) * p[k];
                assert!((s - want).abs() < 1e-10, "k = {k}: {s} vs {want}");
            }
        }
    }

    #[test]
    fn orthonormal_under_quadrature() {
        // fibonacci-lattice quadrature of Y_3m Y_3m' approximates delta
        let pts = fibonacci_sphere(20000);
        let k = 3usize;
        let mut gram = vec![vec![0.0; 2 * k + 1]; 2 * k + 1];
        for p in &pts {
            let y = real_basis(k as u32, *p);
            for i in 0..2 * k + 1 {
                for j in 0..2 * k + 1 {
                    gram[i][j] += y[i] * y[j];
                }
            }
        }
        let w = 4.0 * PI / pts.len() as f64;
        for i in 0..2 * k + 1 {
            for j in 0..2 * k + 1 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] * w - want).abs() < 5e-3, "({i},{j})");
            }
        }
    }

    #[test]
    fn zonal_value_at_pole() {
        for k in [0u32, 5, 20, 60] {
            let y = real_basis(k, [0.0, 0.0, 1.0]);
            let want = ((2.0 * k as f64 + 1.0) / (4.0 * PI)).sqrt();
            assert!((y[0] - want).abs() < 1e-12);
            for &v in &y[1..] {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn legendre_endpoint_values() {
        let p = legendre_all(25, 1.0);
        for v in &p {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let p = legendre_all(25, -1.0);
        for (k, v) in p.iter().enumerate() {
            let want = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - want).abs() < 1e-12);
        }
    }
}
