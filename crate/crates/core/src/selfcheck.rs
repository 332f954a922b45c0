//! A deterministic cross-module invariant suite.
//!
//! Runs a curated set of fast checks spanning every module and renders a
//! plain-text report. Given the same seed the report is byte-identical
//! across runs: all randomness is seeded, all iteration orders fixed, and
//! no timing information enters the text.

use crate::amplifier;
use crate::counting::{self, HyperbolicPoint};
use crate::format_float;
use crate::harmonics;
use crate::hecke;
use crate::kernel;
use crate::linalg::Mat;
use crate::quaternion::{self, enumerate_rn, IndefAlgebra, Quaternion};
use crate::supnorm;
use crate::window::SpectralWindow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Run the suite; returns the report text and whether everything passed.
pub fn run(seed: u64) -> (String, bool) {
    let mut checks: Vec<Check> = Vec::new();

    // exact arithmetic
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x01);
        let mut worst = 0i64;
        for _ in 0..200 {
            let r = |rng: &mut ChaCha8Rng| rng.gen_range(-10_000i64..=10_000);
            let p = Quaternion::new(r(&mut rng), r(&mut rng), r(&mut rng), r(&mut rng));
            let q = Quaternion::new(r(&mut rng), r(&mut rng), r(&mut rng), r(&mut rng));
            let lhs = p.multiply(&q).unwrap().norm().unwrap();
            let rhs = p.norm().unwrap() * q.norm().unwrap();
            worst = worst.max((lhs - rhs).abs());
        }
        checks.push(check(
            "quaternion.norm-multiplicative",
            worst == 0,
            format!("max_defect={worst}"),
        ));
    }

    // lattice enumeration against a single bucketed box scan
    {
        let max_n = 100u64;
        let lim = quaternion::isqrt(max_n as i64);
        let mut buckets = vec![0u64; max_n as usize + 1];
        for a0 in -lim..=lim {
            for a1 in -lim..=lim {
                for a2 in -lim..=lim {
                    for a3 in -lim..=lim {
                        let n = a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3;
                        if n >= 1
                            && n <= max_n as i64
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
        let mut ok = true;
        for n in 1..=max_n {
            if enumerate_rn(n).len() as u64 != buckets[n as usize] {
                ok = false;
            }
        }
        let r5 = enumerate_rn(5).len();
        checks.push(check(
            "quaternion.rn-box-oracle",
            ok && r5 == 12,
            format!("max_n={max_n} r5={r5}"),
        ));
    }

    // rotation homomorphism
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let r = |rng: &mut ChaCha8Rng| rng.gen_range(-20i64..=20);
            let p = Quaternion::new(r(&mut rng), r(&mut rng), r(&mut rng), r(&mut rng));
            let q = Quaternion::new(r(&mut rng), r(&mut rng), r(&mut rng), r(&mut rng));
            if p.norm().unwrap() == 0 || q.norm().unwrap() == 0 {
                continue;
            }
            let lhs = quaternion::rotation_of(&p.multiply(&q).unwrap()).unwrap();
            let rhs = quaternion::rotation_of(&p)
                .unwrap()
                .matmul(&quaternion::rotation_of(&q).unwrap());
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((lhs.m[i][j] - rhs.m[i][j]).abs());
                }
            }
        }
        checks.push(check(
            "quaternion.rotation-homomorphism",
            worst < 1e-9,
            format!("max_defect={}", format_float(worst)),
        ));
    }

    // indefinite order: determinant is the norm form
    {
        let alg = IndefAlgebra::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x03);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let r = |rng: &mut ChaCha8Rng| rng.gen_range(-30i64..=30);
            let x = alg.element(r(&mut rng), r(&mut rng), r(&mut rng), r(&mut rng));
            let n = x.reduced_norm().unwrap() as f64;
            let t = x.theta_embed();
            let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
            worst = worst.max((det - n).abs() / n.abs().max(1.0));
        }
        checks.push(check(
            "algebra.det-is-norm",
            worst < 1e-9,
            format!("max_rel_defect={}", format_float(worst)),
        ));
    }

    // Hecke composition and commutation on small degrees
    {
        let kmax = 8u32;
        let mut comp_worst = 0.0f64;
        let mut comm_worst = 0.0f64;
        for k in 0..=kmax {
            let t5 = hecke::hecke_matrix(5, k).unwrap().entries;
            let t13 = hecke::hecke_matrix(13, k).unwrap().entries;
            let t65 = hecke::hecke_matrix(65, k).unwrap().entries;
            comp_worst = comp_worst.max(t5.matmul(&t13).sub(&t65).max_abs());
            let comm = t5.matmul(&t13).sub(&t13.matmul(&t5)).frobenius_norm();
            comm_worst =
                comm_worst.max(comm / (t5.frobenius_norm() * t13.frobenius_norm()).max(1e-300));
        }
        checks.push(check(
            "hecke.composition-5x13",
            comp_worst <= crate::tol::COMPOSITION,
            format!("kmax={kmax} max_residual={}", format_float(comp_worst)),
        ));
        checks.push(check(
            "hecke.commutator-5-13",
            comm_worst <= crate::tol::COMMUTATOR_REL,
            format!("kmax={kmax} max_rel_norm={}", format_float(comm_worst)),
        ));
    }

    // Deligne bound and the multiplicative relation
    {
        let mut eta_worst = 0.0f64;
        let mut rel_worst = 0.0f64;
        for k in 1..=6u32 {
            let basis = hecke::joint_eigenbasis(k, &[5, 25, 13, 169], seed).unwrap();
            for j in 0..basis.dim() {
                eta_worst = eta_worst.max(basis.eta(j, 5).unwrap().abs());
                eta_worst = eta_worst.max(basis.eta(j, 13).unwrap().abs());
            }
            rel_worst = rel_worst.max(amplifier::relation_residual(&basis, 5).unwrap());
            rel_worst = rel_worst.max(amplifier::relation_residual(&basis, 13).unwrap());
        }
        checks.push(check(
            "hecke.deligne-bound",
            eta_worst <= 2.0 + crate::tol::DELIGNE_SLACK,
            format!("max_eta={}", format_float(eta_worst)),
        ));
        checks.push(check(
            "hecke.eta-relation",
            rel_worst <= crate::tol::HECKE_RELATION,
            format!("max_residual={}", format_float(rel_worst)),
        ));
    }

    // window invariants
    {
        let w = SpectralWindow::new(1.0).unwrap();
        let mass_defect = (w.mass() - 1.0).abs();
        let mut even_defect = 0.0f64;
        let mut min_core = f64::INFINITY;
        let mut t = 0.0;
        while t <= 1.0 {
            even_defect = even_defect.max((w.eval(t) - w.eval(-t)).abs());
            min_core = min_core.min(w.eval(t));
            t += 0.05;
        }
        checks.push(check(
            "window.unit-mass",
            mass_defect < crate::tol::WINDOW_MASS,
            format!("defect={}", format_float(mass_defect)),
        ));
        checks.push(check(
            "window.even-positive-core",
            even_defect < crate::tol::WINDOW_EVEN && min_core > 0.0,
            format!("even_defect={} core_min={}", format_float(even_defect), format_float(min_core)),
        ));
    }

    // Weyl count
    {
        let mut worst = 0.0f64;
        let mut mu = 1.0;
        while mu <= 100.0 {
            let c = kernel::weyl_count(mu) as f64;
            worst = worst.max((c - mu * mu).abs() / (mu + 1.0));
            mu += 0.37;
        }
        checks.push(check(
            "kernel.weyl-count",
            worst <= 1.0,
            format!("max_linear_ratio={}", format_float(worst)),
        ));
    }

    // pre-trace identity at one spectral parameter
    {
        let w = SpectralWindow::with_tail_threshold(1.0, 1e-4).unwrap();
        let mu = 10.0;
        let eigendata = hecke::joint_eigenbasis_range(w.degree_cutoff(mu), &[5], seed).unwrap();
        let mut worst = 0.0f64;
        for x in [[0.0, 0.0, 1.0], [0.28, 0.96, 0.0]] {
            let geo = kernel::hecke_kernel_diag(5, mu, x, &w).unwrap();
            let spec = kernel::hecke_kernel_diag_spectral(5, mu, x, &w, &eigendata).unwrap();
            worst = worst.max((geo - spec).abs() / geo.abs().max(1.0));
        }
        checks.push(check(
            "kernel.pretrace-identity",
            worst <= crate::tol::PRETRACE_REL,
            format!("mu={} max_rel_gap={}", format_float(mu), format_float(worst)),
        ));
    }

    // hyperbolic point-pair invariant against the Frobenius identity
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x04);
        let i = HyperbolicPoint::i();
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let a: f64 = {
                let v: f64 = rng.gen_range(-2.0..2.0);
                if v.abs() < 0.1 {
                    0.5
                } else {
                    v
                }
            };
            let b: f64 = rng.gen_range(-2.0..2.0);
            let c: f64 = rng.gen_range(-2.0..2.0);
            let d = (1.0 + b * c) / a;
            let g = [[a, b], [c, d]];
            let gi = i.moebius(&g).unwrap();
            let frob: f64 = g.iter().flatten().map(|v| v * v).sum();
            worst = worst.max((counting::u_invariant(&i, &gi) - (frob - 2.0)).abs());
        }
        checks.push(check(
            "counting.u-frobenius-identity",
            worst < 1e-9,
            format!("max_defect={}", format_float(worst)),
        ));
    }

    // hyperbolic counts against the oversized box
    {
        let alg = IndefAlgebra::new(2, 3).unwrap();
        let z = HyperbolicPoint::i();
        let delta = 0.5;
        let mut ok = true;
        let mut total = 0u64;
        for n in 1..=12u64 {
            let fast = counting::count_hyperbolic(&alg, n, &z, delta).unwrap();
            total += fast;
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
                            let gm = [[t[0][0] / s, t[0][1] / s], [t[1][0] / s, t[1][1] / s]];
                            let gz = z.moebius(&gm).unwrap();
                            if counting::u_invariant(&z, &gz) < delta {
                                naive += 1;
                            }
                        }
                    }
                }
            }
            if naive != fast {
                ok = false;
            }
        }
        checks.push(check(
            "counting.hyperbolic-box-oracle",
            ok,
            format!("max_n=12 total_count={total}"),
        ));
    }

    // zonal sup norm
    {
        let k = 12u32;
        let f = supnorm::FormCoefficients::zonal(k);
        let (sup, _) = supnorm::sup_norm_estimate(&f, 4 * k, 40).unwrap();
        let want = ((2.0 * k as f64 + 1.0) / (4.0 * std::f64::consts::PI)).sqrt();
        let defect = (sup - want).abs() / want;
        checks.push(check(
            "supnorm.zonal-exact",
            defect < 1e-3,
            format!("k={k} rel_defect={}", format_float(defect)),
        ));
    }

    // amplifier self-pairing counts admissible primes
    {
        let basis = hecke::joint_eigenbasis(4, &[5, 13, 25, 169], seed).unwrap();
        let amp = amplifier::build_amplifier(&basis, 1, 200).unwrap();
        let paired = amp.pair_with(&basis, 1).unwrap();
        let defect = (paired.re - 2.0).abs().max(paired.im.abs());
        checks.push(check(
            "amplifier.self-pairing",
            defect < 1e-6,
            format!("defect={}", format_float(defect)),
        ));
    }

    // addition theorem ties harmonics to the kernel normalization
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let v: [f64; 3] = [
                rng.gen_range(-1.0f64..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n < 0.1 {
                continue;
            }
            let x = [v[0] / n, v[1] / n, v[2] / n];
            let all = harmonics::real_basis_all(25, x);
            for (k, y) in all.iter().enumerate() {
                let s: f64 = y.iter().map(|v| v * v).sum();
                let want = (2.0 * k as f64 + 1.0) / (4.0 * std::f64::consts::PI);
                worst = worst.max((s - want).abs() / want);
            }
        }
        checks.push(check(
            "harmonics.addition-theorem",
            worst < 1e-10,
            format!("max_rel_defect={}", format_float(worst)),
        ));
    }

    // eigen solver sanity on a fixed matrix
    {
        let m = Mat::from_rows(&[
            vec![2.0, 1.0, 0.0, 0.5],
            vec![1.0, -1.0, 0.25, 0.0],
            vec![0.0, 0.25, 3.0, -1.0],
            vec![0.5, 0.0, -1.0, 0.0],
        ]);
        let (vals, vecs) = crate::linalg::symmetric_eigen(&m).unwrap();
        let mut worst = 0.0f64;
        for j in 0..4 {
            let v = vecs.col(j);
            let mv = m.matvec(&v);
            for i in 0..4 {
                worst = worst.max((mv[i] - vals[j] * v[i]).abs());
            }
        }
        checks.push(check(
            "linalg.jacobi-residual",
            worst < 1e-10,
            format!("max_residual={}", format_float(worst)),
        ));
    }

    // render
    let mut report = String::new();
    writeln!(report, "heckelab selfcheck").unwrap();
    writeln!(report, "seed: {seed}").unwrap();
    let mut passed = 0usize;
    for c in &checks {
        writeln!(
            report,
            "{} {} {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        )
        .unwrap();
        if c.passed {
            passed += 1;
        }
    }
    let all = passed == checks.len();
    writeln!(
        report,
        "{} {passed}/{} checks",
        if all { "PASS" } else { "FAIL" },
        checks.len()
    )
    .unwrap();
    (report, all)
}
