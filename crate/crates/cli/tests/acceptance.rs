//! Acceptance suite: every criterion at its stated tolerance, one PASS/FAIL line each.
//!
//! Run with `cargo test -p rqsl-cli --test acceptance`. Exits non-zero if any
//! criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rqsl_core::hilbert::frobenius_distance;
use rqsl_core::models::{
    detector_exact_state, random_hamiltonian, random_state, random_system, two_state_exact_state,
};
use rqsl_core::preclusion::detector_outcome_partition;
use rqsl_core::{
    branch_decompose, discrete_length, eigendecompose, inner_product, preclude, rqsl_check,
    verify_norm_inequality, Amplitude, DetectorModel, EnsembleSpec, Error, EvolutionContext,
    PartitionSpec, QuadratureConfig, StateVector, TwoStateModel,
};

/// Seed of the random-system ensemble shared by criteria 3-6 and 8.
const ENSEMBLE_SEED: u64 = 42;
/// 15 systems for each dimension 2..=8.
const ENSEMBLE_SIZE: u64 = 105;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ensemble() -> Vec<EvolutionContext> {
    (0..ENSEMBLE_SIZE)
        .map(|i| {
            let dim = 2 + (i as usize % 7);
            let spec = EnsembleSpec::new(dim, ENSEMBLE_SEED, ENSEMBLE_SIZE as usize, 1.0).unwrap();
            random_system(&spec, i).unwrap()
        })
        .collect()
}

fn dt_char(ctx: &EvolutionContext) -> f64 {
    ctx.characteristic_time()
        .finite()
        .expect("random systems have an energy scale")
}

fn c(re: f64) -> Amplitude {
    Amplitude::new(re, 0.0)
}

fn detector_equality() -> Outcome {
    let m = DetectorModel::new(c(0.8), c(0.6), 1.0).unwrap();
    let r = verify_norm_inequality(&m.context(1.0).unwrap(), 1e-3).unwrap();
    let residual = (r.exact_norm - r.norm_lim).abs() / r.norm_lim;
    outcome(
        residual <= 1e-6,
        format!("|exact - NormLim|/NormLim = {residual:.3e} (tol 1e-6)"),
    )
}

fn two_state_slack() -> Outcome {
    let m = TwoStateModel::new(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), 0.0, 1.0).unwrap();
    let r = verify_norm_inequality(&m.context(1.0).unwrap(), 1e-3).unwrap();
    let rel = (r.ratio() / 2f64.sqrt() - 1.0).abs();
    outcome(
        rel <= 1e-4,
        format!(
            "exact/NormLim = {:.10} vs sqrt 2, rel {rel:.3e} (tol 1e-4)",
            r.ratio()
        ),
    )
}

fn rqsl_inequality(systems: &[EvolutionContext]) -> Outcome {
    let q = QuadratureConfig {
        abs_tol: 1e-8,
        ..QuadratureConfig::default()
    };
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    let mut checks = 0;
    for ctx in systems {
        for frac in [0.05, 0.1, 0.3, 0.5] {
            let t = frac * dt_char(ctx);
            match rqsl_check(ctx, t, &q) {
                Ok(r) => {
                    let slack = ctx.hbar() * r.length / r.delta_h + 1e-6 - t;
                    worst = worst.min(slack);
                    failures += usize::from(slack < 0.0);
                }
                Err(e) => {
                    eprintln!("  rqsl check failed: {e}");
                    failures += 1;
                }
            }
            checks += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && secs <= 60.0,
        format!(
            "{checks} checks on {} systems, {failures} failures, min slack {worst:.3e}, {secs:.2} s (limit 60 s)",
            systems.len()
        ),
    )
}

fn norm_lower_bound(systems: &[EvolutionContext]) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for ctx in systems {
        let dt = 1e-3 * dt_char(ctx);
        let exact = ctx.delta_psi(dt).norm();
        let bound = dt * ctx.energy_variance().unwrap() / ctx.hbar();
        let slack = exact - bound + 1e-12;
        worst = worst.min(slack);
        failures += usize::from(slack < 0.0);
    }
    outcome(
        failures == 0,
        format!(
            "{} samples, {failures} below dt*dH/hbar - 1e-12, min slack {worst:.3e}",
            systems.len()
        ),
    )
}

const SAMPLED_FRACTIONS: [f64; 5] = [1e-3, 0.05, 0.1, 0.3, 0.5];

fn gap_property(systems: &[EvolutionContext]) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut n = 0;
    for ctx in systems {
        for frac in SAMPLED_FRACTIONS {
            worst = worst.min(ctx.overlap_diagnostics(frac * dt_char(ctx)).gap);
            n += 1;
        }
    }
    outcome(
        worst >= -1e-12,
        format!("{n} (system, dt) samples, min |z| - Re z = {worst:.3e} (tol -1e-12)"),
    )
}

fn length_identity(systems: &[EvolutionContext]) -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for ctx in systems {
        for frac in SAMPLED_FRACTIONS {
            let dt = frac * dt_char(ctx);
            let l = discrete_length(ctx, dt);
            let d = ctx.overlap_diagnostics(dt);
            let residual = l * l - (ctx.delta_psi(dt).norm_sqr() + 2.0 * (d.re_z - d.abs_z));
            worst = worst.max(residual.abs());
            n += 1;
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{n} samples, max |residual| = {worst:.3e} (tol 1e-10)"),
    )
}

fn random_pair(rng: &mut ChaCha20Rng) -> (Amplitude, Amplitude) {
    let a = Amplitude::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let b = Amplitude::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / n, b / n)
}

fn closed_forms() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let (mut worst_two, mut worst_det) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (c1, c2) = random_pair(&mut rng);
        let m = TwoStateModel::new(
            c1,
            c2,
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        )
        .unwrap();
        let hbar = rng.random_range(0.5..2.0);
        let t = rng.random_range(0.0..10.0);
        let numeric = m.context(hbar).unwrap().propagate(t);
        worst_two = worst_two.max(
            numeric
                .max_abs_diff(&two_state_exact_state(&m, hbar, t))
                .unwrap(),
        );

        let (c1, c2) = random_pair(&mut rng);
        let m = DetectorModel::new(c1, c2, rng.random_range(0.1..5.0)).unwrap();
        let hbar = rng.random_range(0.5..2.0);
        let t = rng.random_range(0.0..10.0);
        let numeric = m.context(hbar).unwrap().propagate(t);
        worst_det = worst_det.max(
            numeric
                .max_abs_diff(&detector_exact_state(&m, hbar, t))
                .unwrap(),
        );
    }
    outcome(
        worst_two <= 1e-10 && worst_det <= 1e-10,
        format!("100 draws each, max componentwise error two-state {worst_two:.3e}, detector {worst_det:.3e} (tol 1e-10)"),
    )
}

fn moment_ordering(systems: &[EvolutionContext]) -> Outcome {
    let mut worst = f64::INFINITY;
    for ctx in systems {
        let r = verify_norm_inequality(ctx, 1e-3 * dt_char(ctx)).unwrap();
        worst = worst.min(r.moment_estimate + 1e-12 - r.norm_lim);
    }
    outcome(
        worst >= 0.0,
        format!(
            "{} samples, min (moment estimate - NormLim + 1e-12) = {worst:.3e}",
            systems.len()
        ),
    )
}

fn linear_algebra() -> Outcome {
    let mut worst_rec = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut n = 0;
    for dim in EnsembleSpec::MIN_DIM..=EnsembleSpec::MAX_DIM {
        let spec = EnsembleSpec::new(dim, 9, 7, 1.0).unwrap();
        for i in 0..7u64 {
            let mut rng = spec.rng(i);
            let h = random_hamiltonian(&mut rng, dim, spec.energy_scale);
            let d = eigendecompose(&h).unwrap();
            let rel =
                frobenius_distance(&d.reconstruct(), h.entries()) / h.frobenius_norm().max(1.0);
            worst_rec = worst_rec.max(rel);

            // columns U(t)|e_j⟩ must be orthonormal
            let t = rng.random_range(0.0..10.0);
            let columns: Vec<StateVector> = (0..dim)
                .map(|j| {
                    EvolutionContext::new(h.clone(), StateVector::basis(dim, j), 1.0)
                        .unwrap()
                        .propagate(t)
                })
                .collect();
            for (a, ua) in columns.iter().enumerate() {
                for (b, ub) in columns.iter().enumerate() {
                    let g = inner_product(ua, ub).unwrap();
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst_unit = worst_unit.max((g - Amplitude::new(target, 0.0)).norm());
                }
            }
            n += 1;
        }
    }
    outcome(
        worst_rec <= 1e-10 && worst_unit <= 1e-12,
        format!("{n} samples, dims 2-16: reconstruction {worst_rec:.3e} (tol 1e-10), |U^dag U - I| {worst_unit:.3e} (tol 1e-12)"),
    )
}

fn random_partition(rng: &mut ChaCha20Rng, dim: usize) -> PartitionSpec {
    let mut basis: Vec<StateVector> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = random_state(rng, dim);
        for b in &basis {
            v = v.sub(&b.scale(inner_product(b, &v).unwrap())).unwrap();
        }
        if v.norm() > 1e-6 {
            basis.push(v.scale(Amplitude::new(1.0 / v.norm(), 0.0)));
        }
    }
    basis.shuffle(rng);
    let groups = rng.random_range(1..=dim);
    let mut buckets: Vec<Vec<StateVector>> = vec![Vec::new(); groups];
    for (i, v) in basis.into_iter().enumerate() {
        let k = if i < groups {
            i
        } else {
            rng.random_range(0..groups)
        };
        buckets[k].push(v);
    }
    PartitionSpec::from_orthonormal_groups(
        buckets
            .into_iter()
            .enumerate()
            .map(|(k, b)| (format!("P{k}"), b))
            .collect(),
    )
    .unwrap()
}

fn preclusion() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(35);
    let (mut pythagoras, mut monotone, mut idempotent) = (0.0f64, true, 0.0f64);
    let draws = 120;
    for _ in 0..draws {
        let dim = rng.random_range(2..=6);
        let state = random_state(&mut rng, dim);
        let partition = random_partition(&mut rng, dim);
        let mut t = [rng.random_range(0.0..0.8), rng.random_range(0.0..0.8)];
        t.sort_by(f64::total_cmp);

        let branches = branch_decompose(&state, &partition).unwrap();
        let total: f64 = branches.iter().map(|b| b.norm * b.norm).sum();
        pythagoras = pythagoras.max((total - state.norm_sqr()).abs());

        let survivors = |nm: f64| match preclude(&branches, nm, true) {
            Ok(p) => p.report.survived_labels,
            Err(Error::AllPrecluded { .. }) => Vec::new(),
            Err(e) => panic!("{e}"),
        };
        let (low, high) = (survivors(t[0]), survivors(t[1]));
        monotone &= high.iter().all(|l| low.contains(l));

        if let Ok(once) = preclude(&branches, t[0], false) {
            let again = branch_decompose(&once.state, &partition).unwrap();
            let twice = preclude(&again, t[0], false).unwrap();
            idempotent = idempotent.max(twice.state.max_abs_diff(&once.state).unwrap());
        }
    }

    let c2 = 1e-6f64;
    let zero = Amplitude::new(0.0, 0.0);
    let final_state = StateVector::new(vec![c((1.0 - c2 * c2).sqrt()), zero, zero, c(c2)]).unwrap();
    let branches = branch_decompose(&final_state, &detector_outcome_partition()).unwrap();
    let p = preclude(&branches, 1e-3, true).unwrap();
    let example_ok = p.report.survived_labels == ["S1O1"]
        && p.state.max_abs_diff(&StateVector::basis(4, 0)).unwrap() <= 1e-12;

    outcome(
        pythagoras <= 1e-10 && monotone && idempotent <= 1e-12 && example_ok,
        format!(
            "{draws} draws: Pythagoras {pythagoras:.3e} (tol 1e-10), monotone {monotone}, \
             idempotence {idempotent:.3e} (tol 1e-12); small-branch example survivors {:?}",
            p.report.survived_labels
        ),
    )
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("rqsl-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut files = Vec::new();
    let mut codes = Vec::new();
    for name in ["first.csv", "second.csv"] {
        let path = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_rqsl"))
            .args(["verify", "--seed", "42", "--output"])
            .arg(&path)
            .stderr(std::process::Stdio::null())
            .status()
            .expect("binary runs");
        codes.push(status.code());
        files.push(std::fs::read(&path).unwrap_or_default());
    }
    std::fs::remove_dir_all(&dir).ok();
    let identical = !files[0].is_empty() && files[0] == files[1];
    outcome(
        identical,
        format!(
            "verify --seed 42 twice: {} bytes each, identical {identical}, exit codes {codes:?}",
            files[0].len()
        ),
    )
}

fn main() {
    let systems = ensemble();
    let criteria: Vec<Criterion> = vec![
        ("detector equality", Box::new(detector_equality)),
        ("two-state bound slack", Box::new(two_state_slack)),
        ("RQSL inequality", Box::new(|| rqsl_inequality(&systems))),
        ("norm lower bound", Box::new(|| norm_lower_bound(&systems))),
        ("gap property", Box::new(|| gap_property(&systems))),
        ("length identity", Box::new(|| length_identity(&systems))),
        ("closed-form cross-checks", Box::new(closed_forms)),
        ("moment ordering", Box::new(|| moment_ordering(&systems))),
        ("linear algebra", Box::new(linear_algebra)),
        ("preclusion", Box::new(preclusion)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
