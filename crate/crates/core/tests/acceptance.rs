//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

use std::time::{Duration, Instant};

use nalgebra::SymmetricEigen;
use rsep_core::bench::{linked_rb_study, run_sweep, spearman, summarize, summary_mean, Reductions, SweepConfig};
use rsep_core::model::{check_feasibility, count_linked, Allocation, Instance, QMatrix};
use rsep_core::pipeline::SolverConfig;
use rsep_core::reduction::{aggregate_solution, expand_solution, plan_aggregation};
use rsep_core::scenario::{fig1_misaligned, fixed_scenario, generate, ScenarioSpec};
use rsep_core::solvers::{solve_brute_force, solve_exact, SolverId, DEFAULT_NODE_BUDGET};

type Outcome = Result<String, String>;
type Criterion<'a> = (u32, &'static str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fig1() -> Outcome {
    let inst = fixed_scenario("fig1").map_err(|e| e.to_string())?;
    let res = solve_exact(&inst, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
    let bad = fig1_misaligned();
    let misaligned = count_linked(&inst, &bad).map_err(|e| e.to_string())?;
    let disagree = (0..inst.num_rbs()).filter(|&rb| bad.owner(0, rb) != bad.owner(1, rb)).count();
    check(
        res.objective == 16 && res.certified && misaligned == 4 && disagree == 12,
        format!(
            "optimum {} (certified {}), misaligned allocation {} links with {} disagreeing RBs",
            res.objective, res.certified, misaligned, disagree
        ),
    )
}

fn oracle_spec(i: u64) -> ScenarioSpec {
    const GRIDS: [(usize, usize); 6] = [(1, 2), (2, 2), (2, 3), (3, 2), (1, 6), (1, 4)];
    let (n_rb, n_sf) = GRIDS[i as usize % GRIDS.len()];
    ScenarioSpec {
        m: 1 + (i as usize % 3),
        b: 1 + (i as usize / 3) % 3,
        n_rb,
        n_sf,
        n_frames: 1,
        adjacency_density: 0.6,
        load_fraction: if i % 4 == 3 { 0.7 } else { 1.0 },
        seed: i,
        force_aggregable_k: None,
    }
}

fn oracle_equivalence() -> Outcome {
    let mut agree = 0;
    let mut failures = Vec::new();
    for i in 0..100 {
        let inst = generate(&oracle_spec(i)).map_err(|e| e.to_string())?;
        let exact = solve_exact(&inst, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        let brute = solve_brute_force(&inst).map_err(|e| e.to_string())?;
        if exact.certified && exact.objective == brute.objective {
            agree += 1;
        } else {
            failures.push(format!("#{i}: exact {} vs brute {}", exact.objective, brute.objective));
        }
    }
    check(agree == 100, format!("{agree}/100 agree {}", failures.join("; ")))
}

/// Aggregable instances with `K ∈ {2, 3}` and a scaled size of at most 200
/// variables, taken in seed order.
fn aggregable_family(count: usize) -> Vec<(Instance, usize)> {
    let mut out = Vec::new();
    let mut i = 0usize;
    while out.len() < count {
        let k = 2 + i % 2;
        let spec = ScenarioSpec {
            m: 2 + (i / 2) % 3,
            b: 2 + (i / 6) % 3,
            n_rb: 2,
            n_sf: 2 * k,
            n_frames: 1,
            adjacency_density: 0.6,
            load_fraction: 1.0,
            seed: i as u64,
            force_aggregable_k: Some(k),
        };
        i += 1;
        let inst = generate(&spec).expect("valid spec");
        if let Some(plan) = plan_aggregation(&inst) {
            if (plan.k == 2 || plan.k == 3) && plan.scaled_instance.num_variables() <= 200 {
                out.push((inst, plan.k));
            }
        }
    }
    out
}

fn aggregation_theorem(family: &[(Instance, usize)]) -> Outcome {
    let mut equal = 0;
    let mut failures = Vec::new();
    for (idx, (inst, k)) in family.iter().enumerate() {
        let plan = plan_aggregation(inst).expect("aggregable");
        let full = solve_exact(inst, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        let scaled = solve_exact(&plan.scaled_instance, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        if full.certified && scaled.certified && full.objective == *k as u64 * scaled.objective {
            equal += 1;
        } else {
            failures.push(format!(
                "#{idx}: full {}{} vs {}×{}{}",
                full.objective,
                if full.certified { "" } else { "?" },
                k,
                scaled.objective,
                if scaled.certified { "" } else { "?" }
            ));
        }
    }
    check(
        equal == family.len(),
        format!("{equal}/{} equal {}", family.len(), failures.join("; ")),
    )
}

fn appendix_mapping(family: &[(Instance, usize)]) -> Outcome {
    let mut ok = 0;
    let mut failures = Vec::new();
    for (idx, (inst, k)) in family.iter().enumerate() {
        let plan = plan_aggregation(inst).expect("aggregable");
        let best = solve_exact(inst, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        match aggregate_solution(inst, &best.allocation, *k) {
            Ok(rbam) => {
                let replicated = rbam.replicate_columns(*k);
                let paired = (0..rbam.cols()).all(|c| {
                    (0..*k).all(|j| replicated.column(c * k + j) == rbam.column(c))
                });
                let expanded = expand_solution(&plan, &rbam.to_allocation()).map_err(|e| e.to_string())?;
                let links = count_linked(inst, &expanded).map_err(|e| e.to_string())?;
                if paired && links == best.objective && links == *k as u64 * rbam.links(inst) {
                    ok += 1;
                } else {
                    failures.push(format!("#{idx}: {} -> {links}", best.objective));
                }
            }
            Err(e) => failures.push(format!("#{idx}: {}", e.to_string().lines().next().unwrap_or(""))),
        }
    }
    check(ok == family.len(), format!("{ok}/{} preserved {}", family.len(), failures.join("; ")))
}

fn penalty_identity() -> Outcome {
    let inst = Instance::new(2, 2, 2, 2, vec![vec![0, 1], vec![1, 0]], vec![vec![2, 1], vec![2, 2]])
        .map_err(|e| e.to_string())?;
    let q = QMatrix::new(&inst);
    let dense = q.to_dense().map_err(|e| e.to_string())?;
    let z_star = q.largest_eigenvalue().map_err(|e| e.to_string())?;
    let v = inst.num_variables();
    let mut feasible = 0;
    let mut worst = 0.0f64;
    for bits in 0u32..1 << v {
        let x: Vec<u8> = (0..v).map(|i| (bits >> i & 1) as u8).collect();
        let Ok(alloc) = Allocation::from_indicator(&inst, &x) else { continue };
        if !check_feasibility(&inst, &alloc).map_err(|e| e.to_string())?.is_feasible() {
            continue;
        }
        feasible += 1;
        let xf: Vec<f64> = x.iter().map(|&b| f64::from(b)).collect();
        let half_xqx = 0.5 * (0..v).map(|i| (0..v).map(|j| xf[i] * dense[(i, j)] * xf[j]).sum::<f64>()).sum::<f64>();
        for lambda in [z_star, z_star + 1.0, 10.0 * z_star] {
            let shifted = 0.5 * (0..v)
                .map(|i| {
                    (0..v)
                        .map(|j| xf[i] * (dense[(i, j)] + if i == j { 2.0 * lambda } else { 0.0 }) * xf[j])
                        .sum::<f64>()
                })
                .sum::<f64>()
                - lambda * xf.iter().sum::<f64>();
            let library = q.surrogate_value(&xf, lambda).map_err(|e| e.to_string())?;
            for value in [shifted, library] {
                worst = worst.max((value - half_xqx).abs() / half_xqx.abs().max(1.0));
            }
        }
        if q.quadratic_form_binary(&x).map_err(|e| e.to_string())? as f64 != 2.0 * half_xqx {
            return Err("integer quadratic form disagrees with the dense product".into());
        }
    }
    // |Π| = Π_b multinomial(Z; L_0b, L_1b, slack)
    let expected = 12 * 6;
    check(
        feasible == expected && worst <= 1e-9,
        format!("{feasible} feasible points (expected {expected}), worst relative error {worst:.1e}"),
    )
}

fn spectral_invariants() -> Outcome {
    let mut checked = 0;
    let mut seed = 0u64;
    let mut worst = 0.0f64;
    while checked < 20 {
        let i = seed as usize;
        let spec = ScenarioSpec {
            m: 1 + i % 3,
            b: 2 + i % 4,
            n_rb: 2 + i % 2,
            n_sf: 2 + i % 3,
            adjacency_density: 0.6,
            seed,
            ..ScenarioSpec::new(1, 1)
        };
        seed += 1;
        let inst = generate(&spec).map_err(|e| e.to_string())?;
        if !inst.has_interference() || inst.num_variables() > 4096 {
            continue;
        }
        let q = QMatrix::new(&inst);
        let dense = q.to_dense().map_err(|e| e.to_string())?;
        if dense.trace() != 0.0 || dense != dense.transpose() {
            return Err(format!("instance {seed}: Q not hollow and symmetric"));
        }
        let eig = SymmetricEigen::new(dense).eigenvalues;
        let max = eig.max();
        let min = eig.min();
        if !(max > 1e-9 && min < -1e-9) {
            return Err(format!("instance {seed}: spectrum [{min}, {max}] not indefinite"));
        }
        let fast = q.largest_eigenvalue().map_err(|e| e.to_string())?;
        worst = worst.max((fast - max).abs() / max.abs());
        checked += 1;
    }
    check(worst <= 1e-9, format!("20 instances indefinite and hollow; worst eigenvalue error {worst:.1e}"))
}

fn gap_trend() -> Outcome {
    let base = ScenarioSpec {
        n_rb: 6,
        n_sf: 2,
        ..ScenarioSpec::new(2, 2)
    };
    let config = SweepConfig::new(
        (2..=6).collect(),
        vec![2, 3],
        20,
        vec![SolverId::Exact, SolverId::Relaxed, SolverId::Mlf],
    );
    let records = run_sweep(&base, &config).map_err(|e| e.to_string())?;
    let uncertified = records.iter().filter(|r| r.solver == SolverId::Exact && !r.certified).count();
    let summary = summarize(&records);
    let mut ok = uncertified == 0;
    let mut lines = Vec::new();
    for b in [2, 3] {
        let ms: Vec<f64> = (2..=6).map(|m| m as f64).collect();
        let mlf: Vec<f64> = (2..=6).map(|m| summary_mean(&summary, m, b, "mlf", "gap").unwrap_or(f64::NAN)).collect();
        let relaxed: Vec<f64> =
            (2..=6).map(|m| summary_mean(&summary, m, b, "relaxed", "gap").unwrap_or(f64::NAN)).collect();
        let rho = spearman(&ms, &mlf);
        let dominated = relaxed.iter().zip(&mlf).all(|(r, g)| r <= g);
        ok &= rho > 0.0 && dominated;
        lines.push(format!(
            "B={b}: mlf gap {:?} (spearman {rho:.2}), relaxed gap {:?}",
            mlf.iter().map(|g| (g * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            relaxed.iter().map(|g| (g * 1000.0).round() / 1000.0).collect::<Vec<_>>()
        ));
    }
    check(ok, format!("{}; uncertified exact runs {uncertified}", lines.join("; ")))
}

fn linked_trends() -> Outcome {
    let base = ScenarioSpec {
        n_rb: 6,
        n_sf: 10,
        ..ScenarioSpec::new(2, 2)
    };
    let ms: Vec<usize> = (2..=6).collect();
    let bs: Vec<usize> = (2..=5).collect();
    let (_, cells) = linked_rb_study(&base, bs.clone(), ms.clone(), 10, SolverConfig::default()).map_err(|e| e.to_string())?;
    let mean = |m: usize, b: usize, relaxed: bool| {
        let c = cells.iter().find(|c| c.m == m && c.b == b).expect("cell");
        if relaxed {
            c.relaxed_mean
        } else {
            c.mlf_mean
        }
    };
    let mut ok = true;
    let mut worst_b = f64::INFINITY;
    let mut worst_m = f64::NEG_INFINITY;
    for relaxed in [true, false] {
        for &m in &ms {
            let rho = spearman(&bs.iter().map(|&b| b as f64).collect::<Vec<_>>(), &bs.iter().map(|&b| mean(m, b, relaxed)).collect::<Vec<_>>());
            worst_b = worst_b.min(rho);
            ok &= rho > 0.0;
        }
        for &b in &bs {
            let rho = spearman(&ms.iter().map(|&m| m as f64).collect::<Vec<_>>(), &ms.iter().map(|&m| mean(m, b, relaxed)).collect::<Vec<_>>());
            worst_m = worst_m.max(rho);
            ok &= rho < 0.0;
        }
    }
    let better = cells.iter().filter(|c| c.relaxed_mean >= c.mlf_mean).count();
    let share = better as f64 / cells.len() as f64;
    ok &= share >= 0.9;
    check(
        ok,
        format!(
            "min spearman over B {worst_b:.2}, max spearman over M {worst_m:.2}, relaxed ≥ mlf in {better}/{} cells",
            cells.len()
        ),
    )
}

fn runtime_behavior() -> Outcome {
    let paper_grid = ScenarioSpec {
        n_rb: 6,
        n_sf: 10,
        n_frames: 2,
        ..ScenarioSpec::new(4, 5)
    };
    let mut config = SweepConfig::new(vec![4, 5, 6], vec![5], 10, vec![SolverId::Exact, SolverId::Relaxed, SolverId::Mlf]);
    config.threads = Some(1);
    let records = run_sweep(&paper_grid, &config).map_err(|e| e.to_string())?;
    let mut ordered = 0;
    let mut total = 0;
    for run in records.chunks(3) {
        let (exact, relaxed, mlf) = (&run[0], &run[1], &run[2]);
        total += 1;
        ordered += usize::from(mlf.elapsed < relaxed.elapsed && relaxed.elapsed < exact.elapsed);
    }
    let certified = records.iter().filter(|r| r.solver == SolverId::Exact && r.certified).count();
    let share = ordered as f64 / total as f64;

    let aggregable = ScenarioSpec {
        n_rb: 6,
        n_sf: 2,
        force_aggregable_k: Some(2),
        ..ScenarioSpec::new(4, 5)
    };
    let mut agg_config = SweepConfig::new(vec![4, 5, 6], vec![5], 10, vec![SolverId::Exact]);
    agg_config.reductions = vec![Reductions::NONE, Reductions::AGGREGATION];
    agg_config.threads = Some(1);
    let agg_records = run_sweep(&aggregable, &agg_config).map_err(|e| e.to_string())?;
    let mean_ms = |aggregation: bool| {
        let v: Vec<f64> = agg_records
            .iter()
            .filter(|r| r.reductions.aggregation == aggregation)
            .map(|r| r.elapsed_ms())
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let (plain, aggregated) = (mean_ms(false), mean_ms(true));
    check(
        share >= 0.9 && aggregated < plain,
        format!(
            "mlf < relaxed < exact on {ordered}/{total} instances (exact certified on {certified}); \
             mean exact time {plain:.2} ms plain vs {aggregated:.2} ms aggregated"
        ),
    )
}

fn main() {
    let started = Instant::now();
    let family = aggregable_family(50);
    let criteria: Vec<Criterion> = vec![
        (1, "fig1 reproduction", Some(Duration::from_secs(1)), Box::new(fig1)),
        (2, "exact matches brute force", Some(Duration::from_secs(60)), Box::new(oracle_equivalence)),
        (3, "aggregation preserves the optimum", Some(Duration::from_secs(300)), Box::new(|| aggregation_theorem(&family))),
        (4, "penalty identity on all feasible points", Some(Duration::from_secs(10)), Box::new(penalty_identity)),
        (5, "spectral invariants of Q", Some(Duration::from_secs(60)), Box::new(spectral_invariants)),
        (6, "aggregation mapping keeps links", Some(Duration::from_secs(300)), Box::new(|| appendix_mapping(&family))),
        (7, "heuristic gap trend", None, Box::new(gap_trend)),
        (8, "linked-RB trends", None, Box::new(linked_trends)),
        (9, "runtime ordering and aggregation speedup", None, Box::new(runtime_behavior)),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = limit.is_some_and(|l| elapsed > l);
        let (pass, detail) = match outcome {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {:?}", limit.unwrap())),
            Err(d) => (false, d),
        };
        failed += usize::from(!pass);
        println!(
            "{} criterion {id} {name}: {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("N/A  criterion 10 hardware throughput results: out of scope");
    println!("{} of 9 criteria failed in {:.1}s", failed, started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
