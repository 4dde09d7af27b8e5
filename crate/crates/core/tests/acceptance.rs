//! Acceptance suite (custom harness). Runs every criterion in order, prints
//! one line `[acceptance N] PASS|FAIL <name>: <details> (<elapsed> / budget <s>)`
//! per criterion and exits non-zero when any criterion fails. Criteria run
//! one at a time so the elapsed times are comparable with the budgets.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gltkit::acs::{acs_check, acs_tensor_check, AcsPair, SuHypothesis, Verdict};
use gltkit::asymptotics::{
    average, default_symbol_samples, distribution_report, kron_family, su_profile, svd_split, svd_split_kron,
};
use gltkit::batteries::{
    gamma_battery, glt_structural_battery, random_matrix, sampling_battery, shuffle_battery, toeplitz_battery,
    uniqueness_battery,
};
use gltkit::experiment::staircase_pair;
use gltkit::fem::{mass_normalized, poisson_family, poisson_symbol, stiffness_normalized};
use gltkit::glt::{glt_tensor, GltOperand};
use gltkit::rng::SplitMix64;
use gltkit::toeplitz::toeplitz;
use gltkit::{CoeffFn, ComplexMatrix, GltSymbol, MatrixFamily, Mode, MultiIndex, Symbol, TrigPoly};

fn criterion(id: usize, name: &str, budget_s: u64, body: impl FnOnce() -> (bool, String)) -> bool {
    let start = Instant::now();
    let (ok, details) = match catch_unwind(AssertUnwindSafe(body)) {
        Ok(r) => r,
        Err(e) => {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        }
    };
    let elapsed = start.elapsed();
    let in_budget = elapsed <= Duration::from_secs(budget_s);
    let pass = ok && in_budget;
    println!(
        "[acceptance {id}] {} {name}: {details} ({:.2}s / budget {budget_s}s{})",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        if in_budget { "" } else { ", over budget" }
    );
    pass
}

fn sched(ns: &[usize]) -> Vec<MultiIndex> {
    MatrixFamily::schedule_1d(ns)
}

fn sci(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", "))
}

fn x1() -> CoeffFn {
    CoeffFn::coordinate(1, 1).unwrap()
}

fn acceptance_01_shuffle_identity() -> bool {
    criterion(1, "shuffle identity", 1, || {
        let b = shuffle_battery(1, 50, 6).unwrap();
        (b.cases.len() == 50 && b.max_dev == 0.0, format!("{} cases, max deviation {:e}", b.cases.len(), b.max_dev))
    })
}

fn acceptance_02_gamma_correctness() -> bool {
    criterion(2, "gamma correctness", 5, || {
        let b = gamma_battery(2, &[2, 3, 4], 3).unwrap();
        let expected = 2 + 6 + 24;
        (b.cases.len() == expected && b.max_dev == 0.0, format!("{} sigmas, max deviation {:e}", b.cases.len(), b.max_dev))
    })
}

fn acceptance_03_gamma_uniqueness() -> bool {
    criterion(3, "gamma uniqueness", 60, || {
        let (b, audit) = uniqueness_battery(4, 8).unwrap();
        let failures = audit.iter().filter(|a| !a.unique()).count();
        let max_d = audit.iter().map(|a| a.sizes.len()).max().unwrap_or(0);
        (
            b.pass && failures == 0,
            format!("{} (sizes, sigma) cases up to d = {max_d}, {failures} without a unique solution equal to gamma", audit.len()),
        )
    })
}

fn acceptance_04_toeplitz_tensor() -> bool {
    criterion(4, "toeplitz tensor identity", 10, || {
        let (block, scalar) = toeplitz_battery(4, 20, 20, 1e-12).unwrap();
        (
            block.max_dev <= 1e-12 && scalar.max_dev == 0.0,
            format!("block max deviation {:e}, scalar max deviation {:e}", block.max_dev, scalar.max_dev),
        )
    })
}

fn acceptance_05_sampling_tensor() -> bool {
    criterion(5, "sampling tensor identity", 5, || {
        let b = sampling_battery(5, 20).unwrap();
        (b.max_dev == 0.0, format!("{} cases, max deviation {:e}", b.cases.len(), b.max_dev))
    })
}

fn acceptance_06_glt_structure() -> bool {
    criterion(6, "glt tensor structural identity", 30, || {
        let b = glt_structural_battery(6, 10, 1e-12).unwrap();
        (b.max_dev <= 1e-12, format!("{} cases, max deviation {:e}", b.cases.len(), b.max_dev))
    })
}

fn acceptance_07_distribution_1level() -> bool {
    criterion(7, "1-level eigenvalue distribution", 60, || {
        let ns = [128, 256, 512, 1024];
        let f = TrigPoly::laplacian();
        let fam = MatrixFamily::new(sched(&ns), 1, 1, move |n| toeplitz(n, &f)).unwrap();
        let symbol = Symbol::Trig(TrigPoly::laplacian());
        let rep = distribution_report(&fam, &symbol, None, Mode::Eig, 0.01).unwrap();
        // closed-form eigenvalues 2 - 2cos(jπ/(n+1))
        let reference = default_symbol_samples(&symbol, Mode::Eig).unwrap();
        let mut oracle_gap: f64 = 0.0;
        let mut oracle_deltas = Vec::new();
        for &n in &ns {
            let eig: Vec<f64> = (1..=n).map(|j| 2.0 - 2.0 * (j as f64 * PI / (n as f64 + 1.0)).cos()).collect();
            let mut delta: f64 = 0.0;
            for (k, tf) in rep.battery.functions().iter().enumerate() {
                let row = rep.rows.iter().find(|r| r.big_n == n && r.f_index == k + 1).unwrap();
                oracle_gap = oracle_gap.max((average(&eig, tf) - row.empirical).abs());
                delta = delta.max((average(&eig, tf) - reference.average(tf)).abs());
            }
            oracle_deltas.push(delta);
        }
        let deltas: Vec<f64> = rep.deltas.iter().map(|d| d.1).collect();
        let ok = rep.last_delta() <= 0.01 && rep.strictly_decreasing() && oracle_gap <= 1e-10;
        (ok, format!("deltas {}, closed-form deltas {}, oracle gap {oracle_gap:.1e}", sci(&deltas), sci(&oracle_deltas)))
    })
}

fn acceptance_08_distribution_tensor() -> bool {
    criterion(8, "tensor singular value distribution", 180, || {
        let lap = TrigPoly::laplacian();
        let schedule = sched(&[12, 24, 48]);
        let left = GltOperand::from_symbol(GltSymbol::term(x1(), lap.clone()).unwrap(), schedule.clone()).unwrap();
        let right = GltOperand::from_symbol(GltSymbol::from_trig(lap), schedule).unwrap();
        let op = glt_tensor(&[left, right]).unwrap();
        let rep = distribution_report(&op.family, &Symbol::Glt(op.symbol.clone()), None, Mode::Sv, 0.05).unwrap();
        let deltas: Vec<String> = rep.deltas.iter().map(|(n, d)| format!("{n}: {d:.3e}")).collect();
        (rep.last_delta() <= 0.05 && rep.strictly_decreasing(), format!("deltas [{}]", deltas.join(", ")))
    })
}

fn constant_family(ns: &[usize], identity: bool) -> MatrixFamily {
    MatrixFamily::new(sched(ns), 1, 1, move |n| {
        let k = n.n_of()?;
        Ok(if identity { ComplexMatrix::identity(k) } else { ComplexMatrix::zeros(k, k) })
    })
    .unwrap()
}

fn acceptance_09_acs_tensor() -> bool {
    criterion(9, "a.c.s. tensor", 60, || {
        let ms = [1, 2, 4, 8];
        let single = acs_check(&staircase_pair(&[128, 256, 512], &ms).unwrap(), 0.1).unwrap();
        let small = staircase_pair(&[8, 16, 32], &ms).unwrap();
        let tensored = acs_tensor_check(&small, &small, 0.2, &SuHypothesis::default()).unwrap();
        let control_ns = [8, 16, 32];
        let control = AcsPair::from_fn(constant_family(&control_ns, true), ms.to_vec(), |_| {
            Ok(constant_family(&control_ns, false))
        })
        .unwrap();
        let control = acs_check(&control, 0.1).unwrap();
        let ok = single.verdict == Verdict::Pass
            && single.rho_hat.windows(2).all(|w| w[1].1 < w[0].1)
            && tensored.verdict == Verdict::Pass
            && tensored.report.rho_hat.windows(2).all(|w| w[1].1 < w[0].1)
            && control.verdict == Verdict::Fail;
        let fmt = |r: &[(usize, f64)]| r.iter().map(|(m, x)| format!("{m}:{x:.4}")).collect::<Vec<_>>().join(" ");
        (
            ok,
            format!(
                "1-level rho_hat [{}] {}; tensored rho_hat [{}] {}; control {}",
                fmt(&single.rho_hat),
                single.verdict,
                fmt(&tensored.report.rho_hat),
                tensored.verdict,
                control.verdict
            ),
        )
    })
}

fn acceptance_10_fem_poisson() -> bool {
    criterion(10, "FEM Poisson", 120, || {
        let fam = poisson_family(&[1, 1], &[12, 24, 48]).unwrap();
        let symbol = Symbol::Glt(poisson_symbol(&[1, 1]).unwrap());
        let rep = distribution_report(&fam, &symbol, None, Mode::Eig, 0.05).unwrap();
        let k = stiffness_normalized(12, 1).unwrap();
        let m = mass_normalized(12, 1).unwrap();
        let mut stencil_err: f64 = 0.0;
        for i in 1..k.rows() - 1 {
            for (off, (kv, mv)) in [(-1i64, (-1.0, 1.0 / 6.0)), (0, (2.0, 2.0 / 3.0)), (1, (-1.0, 1.0 / 6.0))] {
                let j = (i as i64 + off) as usize;
                stencil_err = stencil_err.max((k[(i, j)].re - kv).abs()).max((m[(i, j)].re - mv).abs());
            }
        }
        let deltas: Vec<f64> = rep.deltas.iter().map(|d| d.1).collect();
        (
            rep.last_delta() <= 0.05 && rep.strictly_decreasing() && stencil_err <= 1e-12,
            format!("eig deltas {}, interior stencil error {stencil_err:.1e}", sci(&deltas)),
        )
    })
}

fn spiked_family(ns: &[usize]) -> MatrixFamily {
    // T_n(2 - 2cos θ) plus one singular value growing like n
    let f = TrigPoly::laplacian();
    MatrixFamily::new(sched(ns), 1, 1, move |n| {
        let mut a = toeplitz(n, &f)?;
        a[(0, 0)].re += n.n_of()? as f64;
        Ok(a)
    })
    .unwrap()
}

fn acceptance_11_su_machinery() -> bool {
    criterion(11, "s.u. machinery", 30, || {
        let mut r = SplitMix64::new(11);
        let mut split_ok = true;
        let mut kron_rank_ok = true;
        for _ in 0..30 {
            let (rows, cols) = (2 + r.range(0, 6), 2 + r.range(0, 6));
            let a = random_matrix(&mut r, rows, cols);
            let sv = a.svd_values();
            let m = sv[sv.len() / 2].max(1e-3);
            let (hat, tilde) = svd_split(&a, m).unwrap();
            let sum_err = hat.add(&tilde).unwrap().max_abs_diff(&a) / a.max_abs();
            let keep = sv.iter().filter(|&&s| s > m).count();
            split_ok &= sum_err <= 1e-9 && hat.rank() == keep && tilde.norm2() <= m + 1e-9;

            let (br, bc) = (2 + r.range(0, 3), 2 + r.range(0, 3));
            let b = random_matrix(&mut r, br, bc);
            let (bh, _) = svd_split(&b, m).unwrap();
            let (kh, kt) = svd_split_kron(&a, &b, m).unwrap();
            let bound = hat.rank() * b.rows().min(b.cols()) + bh.rank() * a.rows().min(a.cols());
            kron_rank_ok &= kh.rank() <= bound
                && kh.add(&kt).unwrap().max_abs_diff(&a.kron(&b).unwrap()) <= 1e-9 * a.max_abs() * b.max_abs()
                && kt.norm2() <= m * m + 1e-9;
        }
        let ns = [8, 16, 32];
        let fa = spiked_family(&ns);
        let fb = MatrixFamily::new(sched(&ns), 1, 1, |n| {
            gltkit::sampling::diag_sampling(n, &x1(), 1)?.matmul(&toeplitz(n, &TrigPoly::laplacian())?)
        })
        .unwrap();
        let su = SuHypothesis::default();
        let ms = [2.0, 5.0, 10.0];
        let squares: Vec<f64> = ms.iter().map(|m| m * m).collect();
        let (pa, pb) = (su_profile(&fa, &ms).unwrap(), su_profile(&fb, &ms).unwrap());
        let kf = kron_family(&fa, &fb).unwrap();
        let pk = su_profile(&kf, &squares).unwrap();
        let mut bound_ok = true;
        for (i, n) in kf.schedule().iter().enumerate() {
            for (j, &m) in ms.iter().enumerate() {
                let frac = |rows: &[(MultiIndex, f64, f64)], k: usize| rows[k * ms.len() + j].2;
                let lhs = frac(&pk.rows, i);
                let rhs = 2.0 * (frac(&pa.rows, i) + frac(&pb.rows, i)) + 1e-12;
                if lhs > rhs {
                    bound_ok = false;
                    println!("  rank bound violated at n = {n}, M = {m}: {lhs} > {rhs}");
                }
            }
        }
        let factors_su = su_profile(&fa, &su.ms).unwrap().pass(su.tol) && su_profile(&fb, &su.ms).unwrap().pass(su.tol);
        let kron_su = su_profile(&kf, &su.ms).unwrap().pass(su.tol);
        (
            split_ok && kron_rank_ok && bound_ok && factors_su && kron_su,
            format!(
                "svd_split contracts {split_ok}, kron split rank bound {kron_rank_ok}, fraction bound {bound_ok}, factors s.u. {factors_su}, kron s.u. {kron_su}"
            ),
        )
    })
}

fn main() -> ExitCode {
    let criteria: [fn() -> bool; 11] = [
        acceptance_01_shuffle_identity,
        acceptance_02_gamma_correctness,
        acceptance_03_gamma_uniqueness,
        acceptance_04_toeplitz_tensor,
        acceptance_05_sampling_tensor,
        acceptance_06_glt_structure,
        acceptance_07_distribution_1level,
        acceptance_08_distribution_tensor,
        acceptance_09_acs_tensor,
        acceptance_10_fem_poisson,
        acceptance_11_su_machinery,
    ];
    let start = Instant::now();
    let passed = criteria.iter().filter(|c| c()).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.1}s",
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
