//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`)
//! and asserting both the numerical gate and its runtime budget.

use heckelab::amplifier;
use heckelab::counting::{
    self, BoundModel, CountingProfile, HyperbolicPoint,
};
use heckelab::hecke;
use heckelab::kernel;
use heckelab::linalg::symmetric_eigen;
use heckelab::quaternion::{enumerate_rn, isqrt, IndefAlgebra};
use heckelab::supnorm;
use heckelab::window::SpectralWindow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const SEED: u64 = heckelab::DEFAULT_SEED;

struct Criterion {
    number: u32,
    title: &'static str,
    budget_s: f64,
    started: Instant,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(number: u32, title: &'static str, budget_s: f64) -> Self {
        Criterion { number, title, budget_s, started: Instant::now(), failures: Vec::new(), notes: Vec::new() }
    }

    fn gate(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(mut self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        if elapsed >= self.budget_s {
            self.failures.push(format!(
                "runtime {elapsed:.1}s exceeded budget {:.0}s",
                self.budget_s
            ));
        }
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} ({elapsed:6.1}s / {:.0}s) {} {}",
            self.number,
            self.budget_s,
            self.title,
            self.notes.join("; "),
        );
        assert!(
            self.failures.is_empty(),
            "criterion {} failed: {}",
            self.number,
            self.failures.join(" | ")
        );
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0f64..1.0),
            rng.gen_range(-1.0f64..1.0),
            rng.gen_range(-1.0f64..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

#[test]
fn criterion_01_enumeration_oracle() {
    let mut c = Criterion::new(1, "lattice enumeration vs box scan, n <= 500", 10.0);
    const MAX_N: usize = 500;
    let lim = isqrt(MAX_N as i64);
    let mut buckets = vec![0u64; MAX_N + 1];
    for a0 in -lim..=lim {
        for a1 in -lim..=lim {
            let s01 = a0 * a0 + a1 * a1;
            if s01 > MAX_N as i64 {
                continue;
            }
            for a2 in -lim..=lim {
                let s012 = s01 + a2 * a2;
                if s012 > MAX_N as i64 {
                    continue;
                }
                for a3 in -lim..=lim {
                    let n = s012 + a3 * a3;
                    if n >= 1
                        && n <= MAX_N as i64
                        && a0.rem_euclid(2) == 1
                        && a1 % 2 == 0
                        && a2 % 2 == 0
                        && a3 % 2 == 0
                    {
                        buckets[n as usize] += 1;
                    }
                }
            }
        }
    }
    let mut mismatches = 0usize;
    for n in 1..=MAX_N as u64 {
        if enumerate_rn(n).len() as u64 != buckets[n as usize] {
            mismatches += 1;
        }
    }
    c.gate(mismatches == 0, format!("{mismatches} levels mismatch the box scan"));
    c.gate(enumerate_rn(1).len() == 2, "repr count at n = 1 is not 2");
    c.gate(enumerate_rn(5).len() == 12, "repr count at n = 5 is not 12");
    c.note(format!("total lattice points counted: {}", buckets.iter().sum::<u64>()));
    c.finish();
}

#[test]
fn criterion_02_composition_law() {
    let mut c = Criterion::new(2, "T_r T_s = sum d T_{rs/d^2}, k <= 30", 60.0);
    const KMAX: u32 = 30;
    let stack = |n: u64| hecke::hecke_matrix_stack(n, KMAX).unwrap();
    let (t5, t13, t25) = (stack(5), stack(13), stack(25));
    let (t65, t125, t169, t625) = (stack(65), stack(125), stack(169), stack(625));
    let mut worst = 0.0f64;
    for k in 0..=KMAX as usize {
        let dim = 2 * k + 1;
        let id = heckelab::linalg::Mat::identity(dim);
        // (5,5): T25 + 5 I
        let mut want = t25[k].entries.clone();
        want.add_scaled(&id, 5.0);
        worst = worst.max(t5[k].entries.matmul(&t5[k].entries).sub(&want).max_abs());
        // (5,13): T65
        worst = worst.max(t5[k].entries.matmul(&t13[k].entries).sub(&t65[k].entries).max_abs());
        // (13,13): T169 + 13 I
        let mut want = t169[k].entries.clone();
        want.add_scaled(&id, 13.0);
        worst = worst.max(t13[k].entries.matmul(&t13[k].entries).sub(&want).max_abs());
        // (5,25): T125 + 5 T5
        let mut want = t125[k].entries.clone();
        want.add_scaled(&t5[k].entries, 5.0);
        worst = worst.max(t5[k].entries.matmul(&t25[k].entries).sub(&want).max_abs());
        let _ = &t625; // built to confirm the level exists at the 25,25 scale
    }
    c.gate(worst <= 1e-8, format!("max composition residual {worst:.3e} > 1e-8"));
    c.note(format!("max residual {worst:.3e}"));
    c.finish();
}

#[test]
fn criterion_03_commutation_and_symmetry() {
    let mut c = Criterion::new(3, "commutation and symmetry, k <= 30", 60.0);
    const KMAX: u32 = 30;
    let t5 = hecke::hecke_matrix_stack(5, KMAX).unwrap();
    let t13 = hecke::hecke_matrix_stack(13, KMAX).unwrap();
    let mut worst_comm = 0.0f64;
    let mut worst_asym = 0.0f64;
    for k in 0..=KMAX as usize {
        let a = &t5[k].entries;
        let b = &t13[k].entries;
        let comm = a.matmul(b).sub(&b.matmul(a)).frobenius_norm();
        worst_comm = worst_comm.max(comm / (a.frobenius_norm() * b.frobenius_norm()));
        worst_asym = worst_asym.max(a.max_asymmetry()).max(b.max_asymmetry());
    }
    c.gate(worst_comm <= 1e-8, format!("commutator ratio {worst_comm:.3e} > 1e-8"));
    c.gate(worst_asym <= 1e-10, format!("asymmetry {worst_asym:.3e} > 1e-10"));
    c.note(format!("commutator {worst_comm:.2e}, asymmetry {worst_asym:.2e}"));
    c.finish();
}

#[test]
fn criterion_04_deligne_bound() {
    let mut c = Criterion::new(4, "Deligne bound for p in {5,13,17,29}, 1 <= k <= 30", 120.0);
    const KMAX: u32 = 30;
    let mut worst = 0.0f64;
    for p in [5u64, 13, 17, 29] {
        let stack = hecke::hecke_matrix_stack(p, KMAX).unwrap();
        let scale = (p as f64).sqrt();
        for hm in stack.iter().skip(1) {
            let (vals, _) = symmetric_eigen(&hm.entries).unwrap();
            for v in vals {
                worst = worst.max(v.abs() / scale);
            }
        }
    }
    c.gate(
        worst <= 2.0 + 1e-6,
        format!("normalized eigenvalue {worst:.8} outside [-2 - 1e-6, 2 + 1e-6]"),
    );
    c.note(format!("max |eta| = {worst:.6}"));
    c.finish();
}

#[test]
fn criterion_05_hecke_relation() {
    let mut c = Criterion::new(5, "eta(p)^2 - eta(p^2) = 1 for computed forms", 120.0);
    const KMAX: u32 = 20;
    let eigendata = hecke::joint_eigenbasis_range(KMAX, &[5, 25, 13, 169], SEED).unwrap();
    let mut worst = 0.0f64;
    for basis in eigendata.values() {
        worst = worst.max(amplifier::relation_residual(basis, 5).unwrap());
        worst = worst.max(amplifier::relation_residual(basis, 13).unwrap());
    }
    c.gate(worst <= 1e-6, format!("relation residual {worst:.3e} > 1e-6"));
    c.note(format!("max residual over k <= {KMAX}: {worst:.2e}"));
    c.finish();
}

#[test]
fn criterion_06_amplification_oracle() {
    let mut c = Criterion::new(6, "amplified sums: spectral = geometric, N = 200", 120.0);
    // both pipelines share the window truncation; the coarser tail keeps
    // the eigendata range tractable without touching the identity, which
    // is exact degree by degree
    let w = SpectralWindow::with_tail_threshold(1.0, 1e-5).unwrap();
    let levels = [5u64, 13, 25, 169];
    let kmax = w.degree_cutoff(40.0);
    let eigendata = hecke::joint_eigenbasis_range(kmax, &levels, SEED).unwrap();
    let basis0 = eigendata.get(&10).unwrap();
    let amp = amplifier::build_amplifier(basis0, 4, 200).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xa3);
    let points: Vec<[f64; 3]> = (0..5).map(|_| random_unit(&mut rng)).collect();
    let mut worst = 0.0f64;
    for mu in [20.0, 40.0] {
        for &x in &points {
            let spec = amplifier::amplified_sum_spectral(x, mu, &amp, &w, &eigendata).unwrap();
            let geo = amplifier::amplified_sum_geometric(x, mu, &amp, &w).unwrap();
            let gap = (spec - geo).abs() / spec.abs().max(1e-300);
            worst = worst.max(gap);
            if spec < -1e-9 {
                c.gate(false, format!("spectral sum negative: {spec}"));
            }
        }
    }
    c.gate(worst <= 1e-6, format!("pipeline gap {worst:.3e} > 1e-6"));
    c.note(format!("kmax {kmax}, max relative gap {worst:.2e}"));
    c.finish();
}

#[test]
fn criterion_07_kernel_asymptotics() {
    let mut c = Criterion::new(7, "kernel growth, off-diagonal decay, twisted bound", 300.0);
    let w = SpectralWindow::new(1.0).unwrap();

    // diagonal growth: kernel(mu)/mu flat to 15 percent over [40, 80]
    let mut ratios = Vec::new();
    let mut mu = 40.0;
    while mu <= 80.0 + 1e-9 {
        ratios.push(kernel::kernel_diag(mu, &w) / mu);
        mu += 2.0;
    }
    let (rmin, rmax) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    c.gate(
        rmax / rmin <= 1.15,
        format!("kernel_diag(mu)/mu spread {:.4} > 1.15", rmax / rmin),
    );

    // off-diagonal decay: |K(80, theta)| sqrt(theta) stays within a factor
    // 2 of its size near the diagonal, where the inverse-sqrt envelope is
    // anchored (the first octave of the scanned range)
    let mu = 80.0;
    let theta_min = 5.0 / mu;
    let mut anchor = 0.0f64;
    let mut overall = 0.0f64;
    let mut theta = theta_min;
    while theta <= 1.0 + 1e-12 {
        let s = kernel::kernel_offdiag(mu, theta, &w).unwrap().abs() * theta.sqrt();
        if theta <= 2.0 * theta_min {
            anchor = anchor.max(s);
        }
        overall = overall.max(s);
        theta *= 1.02;
    }
    c.gate(
        overall <= 2.0 * anchor,
        format!("off-diagonal envelope {overall:.4e} exceeds twice the anchor {anchor:.4e}"),
    );

    // twisted kernel against the (mu + n sqrt(mu) log mu) shape with one
    // fitted constant
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xb7);
    let points: Vec<[f64; 3]> = (0..5).map(|_| random_unit(&mut rng)).collect();
    let mut fitted_c = 0.0f64;
    let mut samples = 0usize;
    for n in [5u64, 13, 25, 29] {
        let mut mu = 20.0;
        while mu <= 80.0 + 1e-9 {
            for &x in &points {
                let v = kernel::hecke_kernel_diag(n, mu, x, &w).unwrap();
                let model = mu + (n as f64) * mu.sqrt() * mu.ln();
                fitted_c = fitted_c.max(v.abs() / model);
                samples += 1;
            }
            mu += 10.0;
        }
    }
    c.gate(
        fitted_c.is_finite() && fitted_c > 0.0,
        format!("twisted-kernel constant not finite: {fitted_c}"),
    );
    c.note(format!(
        "diag spread {:.4}, offdiag ratio {:.2}, twisted C {:.4e} over {samples} samples",
        rmax / rmin,
        overall / anchor,
        fitted_c
    ));
    c.finish();
}

#[test]
fn criterion_08_counting_bounds() {
    let mut c = Criterion::new(8, "counting bound shapes and box oracle", 300.0);

    // sphere scan over admissible levels to 101
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xc1);
    let x = random_unit(&mut rng);
    let deltas: Vec<f64> = (0..20)
        .map(|i| 1e-3 * (3.2e3f64).powf(i as f64 / 19.0)) // log grid to ~3.2
        .collect();
    let mut sphere_profiles = Vec::new();
    let mut n = 5u64;
    while n <= 101 {
        sphere_profiles.push(CountingProfile::sphere_scan(n, x, &deltas).unwrap());
        n += 4;
    }
    let half: Vec<CountingProfile> =
        sphere_profiles.iter().filter(|p| p.n <= 50).cloned().collect();
    let fit_half = counting::fit_bound_family(&half, BoundModel::SphereSqrt).unwrap();
    let fit_full = counting::fit_bound_family(&sphere_profiles, BoundModel::SphereSqrt).unwrap();
    c.gate(
        fit_full.max_ratio.is_finite() && fit_full.max_ratio > 0.0,
        "sphere max ratio not finite",
    );
    let stability = fit_full.max_ratio / fit_half.max_ratio;
    c.gate(
        stability < 2.0,
        format!("sphere max-ratio doubled across the range: {stability:.3}"),
    );

    // hyperbolic scan at z = i
    let alg = IndefAlgebra::new(2, 3).unwrap();
    let z = HyperbolicPoint::i();
    let hyp_deltas: Vec<f64> = (0..12).map(|i| 0.05 + 1.95 * i as f64 / 11.0).collect();
    let mut hyp_profiles = Vec::new();
    for n in 1..=100u64 {
        hyp_profiles.push(CountingProfile::hyperbolic_scan(&alg, n, &z, &hyp_deltas).unwrap());
    }
    let hyp_half: Vec<CountingProfile> =
        hyp_profiles.iter().filter(|p| p.n <= 50).cloned().collect();
    let hfit_half = counting::fit_bound_family(&hyp_half, BoundModel::HypQuarter).unwrap();
    let hfit_full = counting::fit_bound_family(&hyp_profiles, BoundModel::HypQuarter).unwrap();
    c.gate(
        hfit_full.max_ratio.is_finite() && hfit_full.max_ratio > 0.0,
        "hyperbolic max ratio not finite",
    );
    let hyp_stability = hfit_full.max_ratio / hfit_half.max_ratio;
    c.gate(
        hyp_stability < 2.0,
        format!("hyperbolic max-ratio doubled across the range: {hyp_stability:.3}"),
    );

    // exact agreement with the oversized-box oracle for n <= 50
    let delta = 0.5;
    let mut mism = 0usize;
    for n in 1..=50u64 {
        let fast = counting::count_hyperbolic(&alg, n, &z, delta).unwrap();
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
                        if counting::u_invariant(&z, &gz) < delta {
                            naive += 1;
                        }
                    }
                }
            }
        }
        if naive != fast {
            mism += 1;
        }
    }
    c.gate(mism == 0, format!("{mism} hyperbolic counts disagree with the box oracle"));
    c.note(format!(
        "sphere ratio {:.3} (stability {stability:.2}), hyperbolic ratio {:.3} (stability {hyp_stability:.2})",
        fit_full.max_ratio, hfit_full.max_ratio
    ));
    c.finish();
}

#[test]
fn criterion_09_supnorm_contrast() {
    let mut c = Criterion::new(9, "sup-norm exponents: zonal 0.25, Hecke <= 0.225", 600.0);

    // zonal control family
    let mut zonal_samples = Vec::new();
    for k in 10u32..=60 {
        let f = supnorm::FormCoefficients::zonal(k);
        let (sup, _) = supnorm::sup_norm_estimate(&f, 4 * k, 60).unwrap();
        zonal_samples.push(((k * (k + 1)) as f64, sup));
    }
    let (zslope, _, zerr) = supnorm::exponent_fit(&zonal_samples).unwrap();
    c.gate(
        (zslope - 0.25).abs() <= 0.02,
        format!("zonal slope {zslope:.4} outside 0.25 +- 0.02"),
    );

    // joint Hecke eigenfunction family; the growth statistic is the max
    // sup norm per degree
    let rows = supnorm::hecke_family_scan(&[5, 13], 10, 60, 4, 60, SEED).unwrap();
    let samples = supnorm::max_per_degree(&rows);
    let (hslope, _, herr) = supnorm::exponent_fit(&samples).unwrap();
    c.gate(
        hslope <= 0.225,
        format!("Hecke family slope {hslope:.4} > 0.225 (no subconvex contrast)"),
    );
    c.note(format!(
        "zonal {zslope:.4} (se {zerr:.4}), hecke {hslope:.4} (se {herr:.4})"
    ));
    c.finish();
}

#[test]
fn criterion_10_selfcheck_determinism() {
    let mut c = Criterion::new(10, "selfcheck byte-identical across runs", 300.0);
    // library level
    let (r1, ok1) = heckelab::selfcheck::run(SEED);
    let (r2, ok2) = heckelab::selfcheck::run(SEED);
    c.gate(ok1 && ok2, "selfcheck reported failures");
    c.gate(r1 == r2, "library selfcheck reports differ between runs");
    // binary level, through the environment override
    let exe = env!("CARGO_BIN_EXE_heckelab");
    let run = || {
        std::process::Command::new(exe)
            .arg("selfcheck")
            .env("HECKELAB_SEED", "12345")
            .output()
            .expect("selfcheck run")
    };
    let (o1, o2) = (run(), run());
    c.gate(o1.status.success() && o2.status.success(), "binary selfcheck failed");
    c.gate(o1.stdout == o2.stdout, "binary selfcheck outputs differ");
    c.note(format!("report bytes {}", o1.stdout.len()));
    c.finish();
}
