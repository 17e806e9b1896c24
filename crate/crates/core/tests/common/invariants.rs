//! Every listed invariant as a deterministic check over seeded random inputs.
//! Each returns `Err(description)` on the first violation.

use reload_core::cmdp::*;
use reload_core::envs::{constrained_catch, paradoxical_cmdp, random_cmdp, SplitMix64, CatchState, catch_state};
use reload_core::experiment::*;
use reload_core::minmax::*;
use reload_core::oracle::*;
use reload_core::solvers::*;

use super::{dist, random_policy};

pub type Check = fn() -> Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn random_point(rng: &mut SplitMix64, domain: Domain, n: usize) -> Vec<f64> {
    match domain {
        Domain::Simplex => rng.dirichlet(n),
        Domain::NonnegativeOrthant => (0..n).map(|_| 3.0 * rng.next_f64()).collect(),
        Domain::Box { lo, hi } => (0..n).map(|_| lo + (hi - lo) * rng.next_f64()).collect(),
        Domain::FreeSpace => (0..n).map(|_| 6.0 * rng.next_f64() - 3.0).collect(),
    }
}

fn geometries() -> Vec<BregmanGeometry> {
    vec![
        BregmanGeometry::euclidean(Domain::FreeSpace),
        BregmanGeometry::euclidean(Domain::Simplex),
        BregmanGeometry::euclidean(Domain::NonnegativeOrthant),
        BregmanGeometry::euclidean(Domain::Box { lo: -1.0, hi: 2.0 }),
        BregmanGeometry::entropic_simplex(),
    ]
}

pub fn divergence_bounds() -> Result<(), String> {
    let mut rng = SplitMix64::new(11);
    for g in geometries() {
        for n in 1..6 {
            for _ in 0..200 {
                let u = random_point(&mut rng, g.domain, n);
                let v = random_point(&mut rng, g.domain, n);
                let d = g.divergence(&u, &v).map_err(|e| e.to_string())?;
                let half_sq = 0.5 * dist(&u, &v).powi(2);
                ensure!(d >= half_sq - 1e-12, "{g:?}: D = {d} < ½‖u−v‖² = {half_sq}");
                let self_d = g.divergence(&u, &u).map_err(|e| e.to_string())?;
                ensure!(self_d.abs() <= 1e-12, "{g:?}: D(u;u) = {self_d}");
            }
        }
    }
    Ok(())
}

pub fn zero_gradient_identity() -> Result<(), String> {
    let mut rng = SplitMix64::new(12);
    for g in geometries() {
        for n in 1..6 {
            let x = random_point(&mut rng, g.domain, n);
            let y = g.md_step(&x, &vec![0.0; n], 0.7).map_err(|e| e.to_string())?;
            ensure!(dist(&x, &y) <= 1e-12, "{g:?}: zero-gradient step moved by {}", dist(&x, &y));
        }
    }
    Ok(())
}

pub fn omd_hint_cancels() -> Result<(), String> {
    let mut rng = SplitMix64::new(13);
    for g in geometries() {
        for n in 1..6 {
            let x = random_point(&mut rng, g.domain, n);
            let grad: Vec<f64> = (0..n).map(|_| 4.0 * rng.next_f64() - 2.0).collect();
            let a = g.md_step(&x, &grad, 0.3).map_err(|e| e.to_string())?;
            let b = g.omd_step(&x, &grad, &grad, 0.3, 0.3).map_err(|e| e.to_string())?;
            ensure!(dist(&a, &b) <= 1e-14, "{g:?}: omd differs from md by {}", dist(&a, &b));
        }
    }
    Ok(())
}

fn xy_trace(algo: GameAlgorithm, eta: f64, iters: usize) -> IterateTrace {
    solve_game(&BilinearGame::xy(), algo, &StepSchedule::Constant(eta), (&[1.0], &[1.0]), iters, 1).unwrap()
}

pub fn gda_distance_recursion() -> Result<(), String> {
    for eta in [0.01, 0.1, 0.5] {
        let norms = xy_trace(GameAlgorithm::Gda, eta, 100).norms();
        for k in 0..100 {
            let (a, b) = (norms[k].powi(2), norms[k + 1].powi(2));
            let rel = (b - (1.0 + eta * eta) * a).abs() / b;
            ensure!(rel <= 1e-12, "eta {eta}, step {k}: relative error {rel:e}");
        }
    }
    Ok(())
}

pub fn xy_game_convergence_split() -> Result<(), String> {
    for algo in [GameAlgorithm::Ogda, GameAlgorithm::ExtraGradient, GameAlgorithm::PastExtraGradient, GameAlgorithm::ReflectedGradient] {
        let norms = xy_trace(algo, 0.1, 10_000).norms();
        let first = norms.iter().position(|&n| n < 1e-3);
        ensure!(first.is_some(), "{} never reaches 1e-3 (final {})", algo.name(), norms[norms.len() - 1]);
    }
    let gda = xy_trace(GameAlgorithm::Gda, 0.1, 10_000).norms();
    let tail = gda[gda.len() - 1000..].iter().copied().fold(f64::INFINITY, f64::min);
    ensure!(tail >= gda[0], "GDA tail min {tail} below the initial norm");
    let singly = xy_trace(GameAlgorithm::SinglyOptimistic, 0.1, 10_000).norms();
    let tail = singly[singly.len() - 1000..].iter().copied().fold(f64::INFINITY, f64::min);
    ensure!(tail >= 0.1, "singly-optimistic tail min {tail} < 0.1");
    Ok(())
}

pub fn singly_optimistic_radius() -> Result<(), String> {
    let r0 = singly_optimistic_spectral_radius(0.0).map_err(|e| e.to_string())?;
    ensure!((r0 - 1.0).abs() <= 1e-12, "ρ(0) = {r0}");
    for i in 0..50 {
        let eta = 1e-3 * (500f64).powf(i as f64 / 49.0);
        let r = singly_optimistic_spectral_radius(eta).map_err(|e| e.to_string())?;
        ensure!(r > 1.0, "ρ({eta}) = {r} is not above 1");
    }
    Ok(())
}

pub fn strongly_monotone_rate() -> Result<(), String> {
    let base = BilinearGame::xy();
    let game = BilinearGame::new(base.payoff, Domain::FreeSpace, Domain::FreeSpace, 0.5).unwrap();
    let eta = 0.9 * (1.0 - 2.0 * 0.01) / (2.0 * game.lipschitz());
    let t = solve_game(&game, GameAlgorithm::Ogda, &StepSchedule::Constant(eta), (&[1.0], &[1.0]), 200, 1)
        .map_err(|e| e.to_string())?;
    let fit = fit_linear_rate(&t.norms()).map_err(|e| e.to_string())?;
    ensure!(fit.alpha > 1.0 && fit.r_squared >= 0.99, "fit {fit:?}");
    Ok(())
}

pub fn gda_is_simultaneous() -> Result<(), String> {
    let eta = 0.1;
    let t = xy_trace(GameAlgorithm::Gda, eta, 200);
    let (mut x, mut y) = (1.0f64, 1.0f64);
    for k in 0..=200 {
        let (tx, ty) = (&t.iterates[k].0[0], &t.iterates[k].1[0]);
        ensure!((tx - x).abs() <= 1e-14 * x.abs().max(1.0), "x differs at {k}");
        ensure!((ty - y).abs() <= 1e-14 * y.abs().max(1.0), "y differs at {k}");
        (x, y) = (x - eta * y, y + eta * x);
    }
    Ok(())
}

fn random_instances(count: u64, ns: usize, na: usize, nc: usize) -> Vec<Cmdp> {
    (0..count).map(|s| random_cmdp(1000 + s, ns, na, nc).unwrap()).collect()
}

pub fn value_representations_agree() -> Result<(), String> {
    let mut rng = SplitMix64::new(21);
    let cmdps = random_instances(5, 4, 3, 2);
    for k in 0..50 {
        let c = &cmdps[k % cmdps.len()];
        let pi = random_policy(&mut rng, c.n_states(), c.n_actions());
        for n in 0..=c.n_constraints() {
            let v = value_of(c, &pi, n).map_err(|e| e.to_string())?;
            let q = policy_eval(c, &pi, n).map_err(|e| e.to_string())?;
            let w = normalized_state_value(c, &q.v);
            ensure!((v - w).abs() <= 1e-9, "policy {k}, reward {n}: {v} vs {w}");
        }
    }
    Ok(())
}

pub fn occupancy_invariants() -> Result<(), String> {
    let mut rng = SplitMix64::new(22);
    let mut cmdps = random_instances(5, 6, 2, 1);
    cmdps.push(paradoxical_cmdp());
    cmdps.push(constrained_catch(4, 3).unwrap());
    for c in &cmdps {
        for _ in 0..10 {
            let pi = random_policy(&mut rng, c.n_states(), c.n_actions());
            let d = occupancy_from_policy(c, &pi).map_err(|e| e.to_string())?;
            ensure!((d.mass() - 1.0).abs() <= 1e-9, "mass {}", d.mass());
            ensure!(d.flow_residual(c) <= 1e-9, "flow residual {}", d.flow_residual(c));
            ensure!(d.min_entry() >= 0.0, "negative occupancy {}", d.min_entry());
        }
    }
    Ok(())
}

pub fn projection_idempotent_nonexpansive() -> Result<(), String> {
    let mut rng = SplitMix64::new(23);
    let tol = 1e-12;
    for c in random_instances(5, 3, 2, 0) {
        let proj = FlowProjector::new(&c).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let z1: Vec<f64> = (0..c.n_pairs()).map(|_| rng.next_f64() - 0.3).collect();
            let z2: Vec<f64> = (0..c.n_pairs()).map(|_| rng.next_f64() - 0.3).collect();
            let p1 = proj.project(&z1, tol).map_err(|e| e.to_string())?;
            let p2 = proj.project(&z2, tol).map_err(|e| e.to_string())?;
            let pp = proj.project(p1.values(), tol).map_err(|e| e.to_string())?;
            ensure!(dist(pp.values(), p1.values()) <= 2.0 * tol, "not idempotent: {}", dist(pp.values(), p1.values()));
            ensure!(
                dist(p1.values(), p2.values()) <= dist(&z1, &z2) + 1e-8,
                "expansive: {} > {}",
                dist(p1.values(), p2.values()),
                dist(&z1, &z2)
            );
            ensure!(p1.flow_residual(&c) <= 1e-8, "flow residual {}", p1.flow_residual(&c));
        }
    }
    Ok(())
}

pub fn mixing_is_linear() -> Result<(), String> {
    let mut rng = SplitMix64::new(24);
    for c in random_instances(5, 4, 3, 2) {
        let pi = random_policy(&mut rng, c.n_states(), c.n_actions());
        let mu = Multipliers(vec![3.0 * rng.next_f64(), 3.0 * rng.next_f64()]);
        let ev = PolicyEvaluator::new(&c, &pi).map_err(|e| e.to_string())?;
        let direct = ev.q_of(&mixed_reward(&c, &mu).map_err(|e| e.to_string())?).q;
        let qs: Vec<Vec<f64>> = (0..=2).map(|n| ev.q(n).q).collect();
        let mixed = mixed_q(&qs[0], &[&qs[1], &qs[2]], mu.as_slice()).map_err(|e| e.to_string())?;
        let err = direct.iter().zip(&mixed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure!(err <= 1e-9, "mixing mismatch {err:e}");
    }
    Ok(())
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

pub fn lagrangian_gradients() -> Result<(), String> {
    let mut rng = SplitMix64::new(25);
    let h = 1e-6;
    for c in random_instances(5, 4, 2, 2) {
        let pi = random_policy(&mut rng, c.n_states(), c.n_actions());
        let d = occupancy_from_policy(&c, &pi).map_err(|e| e.to_string())?.into_values();
        let mu = vec![2.0 * rng.next_f64(), 2.0 * rng.next_f64()];
        let gd = lagrangian_grad_d(&c, &mu).map_err(|e| e.to_string())?;
        let gm = lagrangian_grad_mu(&c, &d).map_err(|e| e.to_string())?;
        let l = |d: &[f64], mu: &[f64]| lagrangian(&c, d, mu).unwrap();
        for i in 0..d.len() {
            let (mut up, mut dn) = (d.clone(), d.clone());
            up[i] += h;
            dn[i] -= h;
            let fd = (l(&up, &mu) - l(&dn, &mu)) / (2.0 * h);
            ensure!(rel_err(fd, gd[i]) <= 1e-5, "∂L/∂d[{i}]: fd {fd} vs {}", gd[i]);
        }
        for n in 0..mu.len() {
            let (mut up, mut dn) = (mu.clone(), mu.clone());
            up[n] += h;
            dn[n] -= h;
            let fd = (l(&d, &up) - l(&d, &dn)) / (2.0 * h);
            ensure!(rel_err(fd, gm[n]) <= 1e-5, "∂L/∂μ[{n}]: fd {fd} vs {}", gm[n]);
        }
    }
    Ok(())
}

fn jittered(iterations: usize, seed: u64) -> SolverConfig {
    SolverConfig {
        iterations,
        seed,
        policy_init: PolicyInit::Jittered { weight: 0.3 },
        ..Default::default()
    }
}

pub fn recorded_iterates_are_valid() -> Result<(), String> {
    let mut cmdps = random_instances(3, 4, 3, 2);
    cmdps.push(paradoxical_cmdp());
    for c in &cmdps {
        for name in SOLVER_NAMES {
            let mut cfg = jittered(300, 5);
            cfg.stride = 7;
            cfg.mu_cap = Some(0.5);
            let fixed = vec![0.25; c.n_constraints()];
            let t = run_solver(name, c, &cfg, Some(&fixed)).map_err(|e| e.to_string())?;
            ensure!(t.len() == 300usize.div_ceil(7) + 1, "{name}: {} records", t.len());
            for r in &t.records {
                ensure!(r.policy.max_row_error() <= 1e-12, "{name}: row error {}", r.policy.max_row_error());
                ensure!(r.policy.probs().iter().all(|&p| p >= 0.0), "{name}: negative probability");
                ensure!(r.mu.iter().all(|&m| (0.0..=0.5).contains(&m)), "{name}: μ {:?} outside [0, cap]", r.mu);
                let v = value_of(c, &r.policy, 0).map_err(|e| e.to_string())?;
                ensure!((v - r.values[0]).abs() <= 1e-9, "{name}: recorded v₀ {} vs {v}", r.values[0]);
            }
        }
    }
    Ok(())
}

pub fn optimism_off_is_mu_mdpi() -> Result<(), String> {
    for c in [paradoxical_cmdp(), random_cmdp(31, 4, 3, 2).unwrap()] {
        let cfg = SolverConfig {
            optimism: false,
            ..jittered(500, 9)
        };
        let a = reload_mdpi(&c, &cfg).map_err(|e| e.to_string())?;
        let b = mu_mdpi(&c, &cfg).map_err(|e| e.to_string())?;
        for (x, y) in a.records.iter().zip(&b.records) {
            let same = x.policy.probs().iter().zip(y.policy.probs()).all(|(p, q)| p.to_bits() == q.to_bits())
                && x.mu.iter().zip(&y.mu).all(|(p, q)| p.to_bits() == q.to_bits());
            ensure!(same, "paths differ at iteration {}", x.iteration);
        }
    }
    Ok(())
}

pub fn saddle_is_fixed_point() -> Result<(), String> {
    let mut cmdps = vec![paradoxical_cmdp()];
    cmdps.extend(random_instances(3, 3, 2, 1));
    for c in &cmdps {
        let sp = solve_cmdp_lp(c).map_err(|e| e.to_string())?;
        let target = SaddleTarget::from_saddle(&sp, c);
        let pi = policy_from_occupancy(&sp.d_star);
        for name in SOLVER_NAMES {
            let cfg = SolverConfig {
                iterations: 100,
                mu_init: Some(sp.mu_star.clone()),
                policy_init: PolicyInit::Explicit(pi.clone()),
                occupancy_init: Some(sp.d_star.values().to_vec()),
                ..Default::default()
            };
            let t = run_solver(name, c, &cfg, Some(sp.mu_star.as_slice())).map_err(|e| e.to_string())?;
            let worst = distance_to_saddle(&t, &target).map_err(|e| e.to_string())?.into_iter().fold(0.0, f64::max);
            ensure!(worst <= 1e-6, "{name}: drifted {worst:e} from the saddle");
        }
    }
    Ok(())
}

fn window_amplitudes(series: &[f64], windows: usize) -> Vec<f64> {
    let w = series.len() / windows;
    (0..windows).map(|i| tail_amplitude(&series[i * w..(i + 1) * w], 1.0)).collect()
}

pub fn reload_oscillation_decays() -> Result<(), String> {
    let c = paradoxical_cmdp();
    let cfg = SolverConfig {
        iterations: 5000,
        ..Default::default()
    };
    let ro = window_amplitudes(&reload_mdpi(&c, &cfg).map_err(|e| e.to_string())?.value_series(0)[1..], 5);
    ensure!(ro.windows(2).all(|w| w[1] < w[0]), "ReLOAD window amplitudes {ro:?} not decreasing");
    let mu = window_amplitudes(&mu_mdpi(&c, &cfg).map_err(|e| e.to_string())?.value_series(0)[1..], 5);
    ensure!(!mu.windows(2).all(|w| w[1] < w[0]), "μ-MDPI window amplitudes {mu:?} decrease");
    Ok(())
}

pub fn multiplier_update_is_simultaneous() -> Result<(), String> {
    let c = random_cmdp(41, 4, 3, 2).unwrap();
    let cfg = jittered(200, 3);
    let t = reload_mdpi(&c, &cfg).map_err(|e| e.to_string())?;
    let th = c.thresholds();
    for k in 0..200 {
        let r = &t.records[k];
        let prev = &t.records[k.saturating_sub(1)];
        for n in 0..th.len() {
            let g = r.values[n + 1] - th[n];
            let gp = prev.values[n + 1] - th[n];
            let want = (r.mu[n] + cfg.eta_mu * (2.0 * g - gp)).clamp(0.0, cfg.mu_cap.unwrap());
            let got = t.records[k + 1].mu[n];
            ensure!((got - want).abs() <= 1e-14, "step {k}: μ {got} vs {want}");
        }
    }
    Ok(())
}

fn feasible_probes(c: &Cmdp, rng: &mut SplitMix64, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| occupancy_from_policy(c, &random_policy(rng, c.n_states(), c.n_actions())).unwrap().into_values())
        .collect()
}

pub fn lp_saddle_certificate() -> Result<(), String> {
    let mut rng = SplitMix64::new(51);
    for s in 0..20u64 {
        let c = random_cmdp(2000 + s, 5, 3, 1 + (s % 2) as usize).unwrap();
        let sp = solve_cmdp_lp(&c).map_err(|e| e.to_string())?;
        ensure!(sp.is_optimal(), "instance {s} not optimal");
        ensure!((sp.primal_value - sp.dual_value).abs() <= 1e-8, "duality gap {}", sp.primal_value - sp.dual_value);
        let d = sp.d_star.values();
        let mu = sp.mu_star.as_slice();
        let l_star = lagrangian(&c, d, mu).unwrap();
        for probe in feasible_probes(&c, &mut rng, 100) {
            let l = lagrangian(&c, &probe, mu).unwrap();
            ensure!(l_star <= l + 1e-7, "instance {s}: L(d*,μ*) = {l_star} > L(d,μ*) = {l}");
            let m: Vec<f64> = mu.iter().map(|_| 5.0 * rng.next_f64()).collect();
            let l = lagrangian(&c, d, &m).unwrap();
            ensure!(l <= l_star + 1e-7, "instance {s}: L(d*,μ) = {l} > L(d*,μ*) = {l_star}");
        }
    }
    Ok(())
}

pub fn lp_matches_brute_force() -> Result<(), String> {
    let mut cases: Vec<(Cmdp, usize)> = vec![(paradoxical_cmdp(), 200)];
    for s in 0..4 {
        cases.push((random_cmdp(3000 + s, 2, 2, 1).unwrap(), 100));
        cases.push((random_cmdp(3100 + s, 3, 2, 1).unwrap(), 25));
        cases.push((random_cmdp(3200 + s, 2, 3, 2).unwrap(), 20));
    }
    for (c, res) in &cases {
        let lp = solve_cmdp_lp(c).map_err(|e| e.to_string())?;
        let bf = brute_force_verify(c, *res).map_err(|e| e.to_string())?;
        let gap = (lp.primal_value - bf.primal_value).abs();
        ensure!(gap <= 2.0 / *res as f64, "LP {} vs grid {} at resolution {res}", lp.primal_value, bf.primal_value);
    }
    Ok(())
}

pub fn lp_dual_feasible() -> Result<(), String> {
    let mut cmdps = random_instances(10, 5, 3, 2);
    cmdps.push(paradoxical_cmdp());
    cmdps.push(constrained_catch(5, 4).unwrap());
    for c in &cmdps {
        let sp = solve_cmdp_lp(c).map_err(|e| e.to_string())?;
        ensure!(sp.max_reduced_cost <= 1e-9, "reduced cost {}", sp.max_reduced_cost);
    }
    Ok(())
}

pub fn classification_is_consistent() -> Result<(), String> {
    for c in random_instances(5, 4, 2, 1) {
        let (lo, hi) = achievable_range(&c, &c.constraints()[0].reward).map_err(|e| e.to_string())?;
        for i in 0..=100 {
            let theta = lo - 0.1 * (hi - lo) + 1.2 * (hi - lo) * i as f64 / 100.0;
            let here = classify_in_range(theta, lo, hi);
            for delta in [-0.1, 0.1] {
                let there = classify_in_range(theta + delta * (hi - lo), lo, hi);
                let jump = matches!(
                    (here, there),
                    (ThresholdClass::ExtremeLow, ThresholdClass::ExtremeHigh) | (ThresholdClass::ExtremeHigh, ThresholdClass::ExtremeLow)
                );
                ensure!(!jump, "θ = {theta}: {here:?} jumps to {there:?}");
            }
            let direct = classify_threshold(&c.with_threshold(0, theta).unwrap(), 0).map_err(|e| e.to_string())?;
            ensure!(direct == here, "classify_threshold disagrees at θ = {theta}");
        }
    }
    Ok(())
}

pub fn constructors_validate() -> Result<(), String> {
    let mut all = vec![paradoxical_cmdp(), constrained_catch(10, 5).unwrap(), constrained_catch(2, 3).unwrap()];
    for s in 0..10 {
        all.push(random_cmdp(s, 1 + (s as usize % 5), 1 + (s as usize % 3), s as usize % 3).unwrap());
    }
    for c in &all {
        c.validate().map_err(|e| e.to_string())?;
        Cmdp::from_json(&c.to_json()).map_err(|e| e.to_string())?;
    }
    Ok(())
}

pub fn catch_reachability() -> Result<(), String> {
    let (rows, cols) = (6, 4);
    let c = constrained_catch(rows, cols).unwrap();
    let na = c.n_actions();
    let starts: Vec<usize> = (0..c.n_states()).filter(|&s| c.rho()[s] > 0.0).collect();
    ensure!(!starts.is_empty(), "no initial states");
    for &s0 in &starts {
        // Every action sequence moves the ball down exactly one row per step.
        let mut frontier = vec![s0];
        for step in 0..rows {
            let mut next = Vec::new();
            for &s in &frontier {
                let row = s / (cols * cols);
                ensure!(row == step, "state {s} has ball row {row} after {step} steps");
                for a in 0..na {
                    let bottom = row + 1 == rows;
                    ensure!(bottom || c.task_reward()[s * na + a] == 0.0, "reward before the bottom row");
                    ensure!(!bottom || c.task_reward()[s * na + a].abs() == 1.0, "bottom row pays ±1");
                    if !bottom {
                        next.extend(c.transition(s, a).iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(t, _)| t));
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            frontier = next;
        }
    }
    Ok(())
}

pub fn catch_mirror_symmetry() -> Result<(), String> {
    let (rows, cols) = (5, 5);
    let c = constrained_catch(rows, cols).unwrap();
    let mirror = |s: usize| {
        let (r, b, p) = (s / (cols * cols), (s / cols) % cols, s % cols);
        catch_state(cols, CatchState { ball_row: r, ball_col: cols - 1 - b, paddle_col: cols - 1 - p })
    };
    let na = c.n_actions();
    let mut r1_symmetric = true;
    for s in 0..c.n_states() {
        for a in 0..na {
            // Left and right swap under the mirror.
            let (ms, ma) = (mirror(s), na - 1 - a);
            ensure!(
                c.task_reward()[s * na + a] == c.task_reward()[ms * na + ma],
                "r₀ not mirror-invariant at state {s}"
            );
            let r1 = &c.constraints()[0].reward;
            if r1[s * na + a] != r1[ms * na + ma] {
                r1_symmetric = false;
            }
        }
    }
    ensure!(!r1_symmetric, "r₁ is unexpectedly mirror-invariant");
    Ok(())
}

pub fn random_cmdp_deterministic() -> Result<(), String> {
    for s in [0u64, 1, 42, u64::MAX] {
        let a = random_cmdp(s, 4, 3, 2).unwrap().to_json();
        let b = random_cmdp(s, 4, 3, 2).unwrap().to_json();
        ensure!(a == b, "seed {s} is not reproducible");
    }
    ensure!(
        random_cmdp(1, 4, 3, 2).unwrap().to_json() != random_cmdp(2, 4, 3, 2).unwrap().to_json(),
        "different seeds coincide"
    );
    Ok(())
}

pub fn weighted_reward_bounds() -> Result<(), String> {
    let mut rng = SplitMix64::new(61);
    for _ in 0..1000 {
        let v0 = rng.next_f64();
        let v: Vec<f64> = (0..2).map(|_| rng.next_f64()).collect();
        let th: Vec<f64> = (0..2).map(|_| rng.next_f64()).collect();
        let mu: Vec<f64> = (0..2).map(|_| 0.01 + rng.next_f64()).collect();
        let w = weighted_reward(v0, &v, &th, &mu).unwrap();
        let overshoot = v.iter().zip(&th).any(|(a, b)| a > b);
        ensure!(w <= v0, "weighted {w} above v₀ {v0}");
        ensure!((w == v0) == !overshoot, "equality iff no overshoot violated");
    }
    Ok(())
}

pub fn distance_zero_and_continuous() -> Result<(), String> {
    let c = paradoxical_cmdp();
    let sp = solve_cmdp_lp(&c).unwrap();
    let target = SaddleTarget::from_saddle(&sp, &c);
    let at = target.distance(&target.values, &target.mu);
    ensure!(at == 0.0, "distance at the saddle {at}");
    let mut rng = SplitMix64::new(62);
    let dim = (target.values.len() + target.mu.len()) as f64;
    for _ in 0..500 {
        let eps = 1e-3 * rng.next_f64();
        let v: Vec<f64> = target.values.iter().map(|x| x + rng.next_f64()).collect();
        let m: Vec<f64> = target.mu.iter().map(|x| x + rng.next_f64()).collect();
        let vp: Vec<f64> = v.iter().map(|x| x + eps * (2.0 * rng.next_f64() - 1.0)).collect();
        let mp: Vec<f64> = m.iter().map(|x| x + eps * (2.0 * rng.next_f64() - 1.0)).collect();
        let change = (target.distance(&v, &m) - target.distance(&vp, &mp)).abs();
        ensure!(change <= eps * dim.sqrt() + 1e-15, "change {change} exceeds ε√dim");
    }
    Ok(())
}

pub fn lic_implies_aic() -> Result<(), String> {
    let mut rng = SplitMix64::new(63);
    let mut converged = 0;
    for i in 0..40 {
        let rate = 0.5 + 0.45 * rng.next_f64();
        let series: Vec<f64> = if i % 4 == 3 {
            (0..100_000).map(|k| 0.2 * (1.0 + (k as f64 * 0.3).sin())).collect()
        } else {
            (0..100_000).map(|k| rate.powi(k) * (1.0 + 0.5 * rng.next_f64())).collect()
        };
        if !lic_diagnostic(&series, DEFAULT_WINDOW_FRACTION, TOY_TOL).unwrap().is_converged() {
            continue;
        }
        converged += 1;
        let rows: Vec<Vec<f64>> = series.iter().map(|&x| vec![x]).collect();
        let means: Vec<f64> = running_means(&rows).into_iter().map(|v| v[0]).collect();
        let aic = lic_diagnostic(&means, DEFAULT_WINDOW_FRACTION, TOY_TOL).unwrap();
        ensure!(aic.is_converged(), "series {i} converges but its averages give {aic:?}");
    }
    ensure!(converged >= 20, "only {converged} series converged");
    Ok(())
}

pub fn csv_round_trip() -> Result<(), String> {
    let c = random_cmdp(71, 3, 2, 2).unwrap();
    let t = reload_mdpi(&c, &jittered(50, 1)).unwrap();
    let dist: Vec<f64> = (0..t.len()).map(|i| (i as f64).sqrt() / 7.0).collect();
    let parsed = parse_trace_csv(&trace_csv(&t, &dist)).map_err(|e| e.to_string())?;
    for (i, r) in t.records.iter().enumerate() {
        ensure!(parsed.iterations[i] == r.iteration, "iteration mismatch");
        ensure!(parsed.values[i] == r.values, "values differ at record {i}");
        ensure!(parsed.mu[i] == r.mu, "μ differs at record {i}");
        ensure!(parsed.lagrangian[i].to_bits() == r.lagrangian.to_bits(), "lagrangian differs");
        ensure!(parsed.distance[i].to_bits() == dist[i].to_bits(), "distance differs");
    }
    Ok(())
}

/// `(module, description, check)` for every invariant.
pub const ALL: &[(&str, &str, Check)] = &[
    ("minmax", "Bregman divergence bounds", divergence_bounds),
    ("minmax", "zero-gradient steps are the identity", zero_gradient_identity),
    ("minmax", "optimistic step with equal gradients is a plain step", omd_hint_cancels),
    ("minmax", "GDA distance recursion on xy", gda_distance_recursion),
    ("minmax", "xy-game convergence split by method", xy_game_convergence_split),
    ("minmax", "singly-optimistic spectral radius exceeds one", singly_optimistic_radius),
    ("minmax", "strongly monotone OGDA has a linear rate", strongly_monotone_rate),
    ("minmax", "GDA matches the simultaneous recursion", gda_is_simultaneous),
    ("cmdp", "occupancy and value-function values agree", value_representations_agree),
    ("cmdp", "occupancies have unit mass and satisfy the flow", occupancy_invariants),
    ("cmdp", "projection onto K is idempotent and nonexpansive", projection_idempotent_nonexpansive),
    ("cmdp", "mixing commutes with evaluation", mixing_is_linear),
    ("cmdp", "Lagrangian gradients match finite differences", lagrangian_gradients),
    ("solvers", "recorded policies and multipliers are valid", recorded_iterates_are_valid),
    ("solvers", "optimism off reproduces the plain dynamics bitwise", optimism_off_is_mu_mdpi),
    ("solvers", "the saddle is a fixed point of every solver", saddle_is_fixed_point),
    ("solvers", "window amplitudes decay for ReLOAD only", reload_oscillation_decays),
    ("solvers", "multiplier updates use current and previous values", multiplier_update_is_simultaneous),
    ("oracle", "LP saddle certificate on random CMDPs", lp_saddle_certificate),
    ("oracle", "LP agrees with brute force", lp_matches_brute_force),
    ("oracle", "reduced costs are dual feasible", lp_dual_feasible),
    ("oracle", "threshold classification is consistent", classification_is_consistent),
    ("envs", "constructors emit valid CMDPs", constructors_validate),
    ("envs", "Catch reaches the bottom row in rows−1 steps", catch_reachability),
    ("envs", "Catch mirror symmetry", catch_mirror_symmetry),
    ("envs", "random CMDPs are reproducible", random_cmdp_deterministic),
    ("bench", "weighted reward never exceeds v₀", weighted_reward_bounds),
    ("bench", "distance to saddle is zero there and Lipschitz", distance_zero_and_continuous),
    ("bench", "LIC implies AIC on series", lic_implies_aic),
    ("bench", "CSV round trip is exact", csv_round_trip),
];

