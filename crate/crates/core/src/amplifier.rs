//! The Iwaniec-Sarnak amplifier and the two evaluations of the amplified
//! spectral sum.
//!
//! Given a target joint eigenfunction phi_{j0}, the amplifier is the sparse
//! coefficient vector
//!
//!   z_p   = eta_{j0}(p)   for admissible primes p <= sqrt(N),
//!   z_p^2 = -1            for p^2 <= N,
//!
//! built so that sum_n z_n eta_{j0}(n) counts the admissible primes through
//! the relation eta(p)^2 - eta(p^2) = 1, making the target dominate the
//! windowed average
//!
//!   S(x) = sum_j rho(mu - mu_j) |phi_j(x)|^2 |sum_n z_n eta_j(n)|^2.
//!
//! S(x) is evaluated two independent ways: spectrally from joint eigendata,
//! and geometrically by expanding the square through the Hecke composition
//! law into twisted kernel values,
//!
//!   S(x) = sum_{n,m} sum_{d | (n,m)} (d / sqrt(nm)) z_n conj(z_m)
//!          K_{T_{nm/d^2}}(x, x).
//!
//! Both pipelines share the window truncation, so their agreement is a
//! machine-precision identity check of the whole operator stack.

use crate::error::{Error, Result};
use crate::harmonics;
use crate::hecke::HeckeMaassBasis;
use crate::kernel::hecke_kernel_diag;
use crate::tol;
use crate::window::{mu_of_degree, SpectralWindow};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Sparse amplifier coefficients keyed by level.
#[derive(Clone, Debug)]
pub struct AmplifierVector {
    pub n_cap: u64,
    pub entries: BTreeMap<u64, Complex64>,
    /// Degree and index of the targeted form.
    pub source_k: u32,
    pub source_index: usize,
}

impl AmplifierVector {
    /// Levels the eta values are needed at when pairing with eigendata.
    pub fn support(&self) -> Vec<u64> {
        self.entries.keys().copied().collect()
    }

    /// sum_n z_n eta_j(n) for a form in the given eigendata.
    pub fn pair_with(&self, basis: &HeckeMaassBasis, j: usize) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&n, &z) in &self.entries {
            acc += z * basis.eta(j, n)?;
        }
        Ok(acc)
    }
}

/// Primes p = 1 mod 4 with p^2 <= n_cap, ascending.
pub fn admissible_primes(n_cap: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 5u64;
    while p * p <= n_cap {
        if p % 4 == 1 && is_prime(p) {
            out.push(p);
        }
        p += 2;
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Divisors of gcd(n, m), ascending.
pub fn common_divisors(n: u64, m: u64) -> Vec<u64> {
    let g = gcd(n, m);
    let mut out: Vec<u64> = (1..=g).filter(|d| g % d == 0).collect();
    out.sort_unstable();
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Build the amplifier for form `j0` of the eigendata, with length cap N.
pub fn build_amplifier(
    basis: &HeckeMaassBasis,
    j0: usize,
    n_cap: u64,
) -> Result<AmplifierVector> {
    if j0 >= basis.dim() {
        return Err(Error::FormIndexOutOfRange { k: basis.k, index: j0, dim: basis.dim() });
    }
    let primes = admissible_primes(n_cap);
    if primes.is_empty() {
        return Err(Error::NoAdmissiblePrimes(n_cap));
    }
    let mut entries = BTreeMap::new();
    for &p in &primes {
        entries.insert(p, Complex64::new(basis.eta(j0, p)?, 0.0));
        entries.insert(p * p, Complex64::new(-1.0, 0.0));
    }
    Ok(AmplifierVector { n_cap, entries, source_k: basis.k, source_index: j0 })
}

/// Worst residual of eta_j(p)^2 - eta_j(p^2) = 1 over the forms of one
/// eigendata block.
pub fn relation_residual(basis: &HeckeMaassBasis, p: u64) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 0..basis.dim() {
        let ep = basis.eta(j, p)?;
        let ep2 = basis.eta(j, p * p)?;
        worst = worst.max((ep * ep - ep2 - 1.0).abs());
    }
    Ok(worst)
}

/// Mean of eta_j(p)^2 over the given primes; the termwise Deligne bound
/// keeps it under 4, and the mean staying bounded is the finite-scan shadow
/// of the second-moment bound on Hecke eigenvalues.
pub fn eta_second_moment(basis: &HeckeMaassBasis, j: usize, primes: &[u64]) -> Result<f64> {
    let mut acc = 0.0;
    for &p in primes {
        let e = basis.eta(j, p)?;
        acc += e * e;
    }
    Ok(acc / primes.len().max(1) as f64)
}

/// Spectral pipeline: the explicit eigenfunction expansion of the amplified
/// sum at x. Requires eigendata for every degree the window keeps at mu,
/// each containing all support levels of the amplifier.
pub fn amplified_sum_spectral(
    x: [f64; 3],
    mu: f64,
    z: &AmplifierVector,
    w: &SpectralWindow,
    eigendata: &BTreeMap<u32, HeckeMaassBasis>,
) -> Result<f64> {
    let kmax = w.degree_cutoff(mu);
    let stacks = harmonics::real_basis_all(kmax, x);
    let mut total = 0.0;
    for k in 0..=kmax {
        if !w.keeps_degree(mu, k) {
            continue;
        }
        let basis = eigendata.get(&k).ok_or(Error::MissingDegree(k))?;
        let weight = w.eval(mu - mu_of_degree(k));
        let y = &stacks[k as usize];
        let dim = 2 * k as usize + 1;
        for j in 0..dim {
            let mut phi = 0.0;
            for i in 0..dim {
                phi += basis.vectors.get(i, j) * y[i];
            }
            let a = z.pair_with(basis, j)?;
            total += weight * phi * phi * a.norm_sqr();
        }
    }
    Ok(total)
}

/// Character weighting the divisor in the composition law,
/// T_n T_m = sum_{d | (n,m)} d chi(d) T_{nm/d^2}. The lattices used here
/// carry only the trivial character, but the factor is threaded through so
/// orders with nontrivial characters slot in without touching the sums.
pub type DivisorCharacter = fn(u64) -> Complex64;

/// The trivial character: 1 on every divisor.
pub fn trivial_character(_d: u64) -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// One term of the geometric double sum, for reporting.
#[derive(Clone, Copy, Debug)]
pub struct GeometricTerm {
    pub n: u64,
    pub m: u64,
    pub d: u64,
    pub level: u64,
    pub coefficient: Complex64,
    pub kernel_value: f64,
}

/// Geometric pipeline: expand |sum z_n eta_j(n)|^2 through the composition
/// law and evaluate twisted kernels. Returns the (real) value and the
/// per-term breakdown.
pub fn amplified_sum_geometric_terms(
    x: [f64; 3],
    mu: f64,
    z: &AmplifierVector,
    w: &SpectralWindow,
) -> Result<(f64, Vec<GeometricTerm>)> {
    amplified_sum_geometric_terms_with_character(x, mu, z, w, trivial_character)
}

/// Geometric pipeline with an explicit divisor character.
pub fn amplified_sum_geometric_terms_with_character(
    x: [f64; 3],
    mu: f64,
    z: &AmplifierVector,
    w: &SpectralWindow,
    chi: DivisorCharacter,
) -> Result<(f64, Vec<GeometricTerm>)> {
    let mut kernel_cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut kernel_at = |level: u64| -> Result<f64> {
        if let Some(&v) = kernel_cache.get(&level) {
            return Ok(v);
        }
        let v = if level == 1 {
            crate::kernel::kernel_diag(mu, w)
        } else {
            hecke_kernel_diag(level, mu, x, w)?
        };
        kernel_cache.insert(level, v);
        Ok(v)
    };

    let mut acc = Complex64::new(0.0, 0.0);
    let mut terms = Vec::new();
    for (&n, &zn) in &z.entries {
        for (&m, &zm) in &z.entries {
            for d in common_divisors(n, m) {
                let level = n / d * (m / d);
                let coeff =
                    zn * zm.conj() * chi(d) * (d as f64) / ((n as f64) * (m as f64)).sqrt();
                let kv = kernel_at(level)?;
                acc += coeff * kv;
                terms.push(GeometricTerm { n, m, d, level, coefficient: coeff, kernel_value: kv });
            }
        }
    }
    let scale = acc.norm().max(1.0);
    debug_assert!(
        acc.im.abs() <= tol::HERMITIAN_IMAG * scale,
        "hermitian double sum left imaginary part {}",
        acc.im
    );
    Ok((acc.re, terms))
}

/// Geometric pipeline value only.
pub fn amplified_sum_geometric(
    x: [f64; 3],
    mu: f64,
    z: &AmplifierVector,
    w: &SpectralWindow,
) -> Result<f64> {
    Ok(amplified_sum_geometric_terms(x, mu, z, w)?.0)
}
