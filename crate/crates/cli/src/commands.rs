//! The subcommands. Each builds a [`Table`] and decides its exit code; writing the
//! table is left to the caller.

use rayon::prelude::*;
use rqsl_core::models::{measurement_time, random_system};
use rqsl_core::preclusion::detector_sector_partition;
use rqsl_core::rqsl::rqsl_check_with;
use rqsl_core::rqsl::verify_norm_inequality_with;
use rqsl_core::{
    branch_decompose, discrete_length, norm_limit, preclude, reference_section_length, Amplitude,
    DetectorModel, EnsembleSpec, Error, EvolutionContext, NormLimitReport, TwoStateModel,
};

use crate::args::{
    AmplitudeArgs, Command, DetectorArgs, ModelCommand, PrecludeArgs, SweepArgs, SweepModel,
    TwoStateArgs, VerifyArgs,
};
use crate::config::RunConfig;
use crate::table::{Cell, Table};
use crate::{
    Failure, Outcome, EXIT_ALL_PRECLUDED, EXIT_PASS, EXIT_PHYSICAL, EXIT_REGIME, EXIT_VIOLATED,
};

/// RQSL durations checked by `verify`, as fractions of `Δt_char`.
pub const VERIFY_DURATION_FRACTIONS: [f64; 4] = [0.05, 0.1, 0.3, 0.5];
/// Absolute slack for the gap and moment-ordering checks of `verify`.
pub const VERIFY_ABS_TOL: f64 = 1e-12;

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome, Failure> {
    match command {
        Command::Model(ModelCommand::TwoState(a)) => model_two_state(a, cfg),
        Command::Model(ModelCommand::Detector(a)) => model_detector(a, cfg),
        Command::Verify(a) => verify(a, cfg),
        Command::Sweep(a) => sweep(a, cfg),
        Command::Preclude(a) => preclude_branches(a, cfg),
    }
}

/// Resolves the amplitude flags into a unit-norm pair.
pub fn amplitudes(a: &AmplitudeArgs) -> Result<(Amplitude, Amplitude), Failure> {
    let given = |re: Option<f64>, im: f64| {
        (re.is_some() || im != 0.0).then(|| Amplitude::new(re.unwrap_or(0.0), im))
    };
    let complement = |c: Amplitude| -> Result<Amplitude, Failure> {
        let p = c.norm_sqr();
        if !p.is_finite() || p > 1.0 + 1e-12 {
            return Err(Failure::physical(format!(
                "amplitude {c} has modulus above 1; the other cannot be derived"
            )));
        }
        Ok(Amplitude::new((1.0 - p).max(0.0).sqrt(), 0.0))
    };
    match (given(a.c1, a.c1_im), given(a.c2, a.c2_im)) {
        (Some(c1), Some(c2)) => {
            let n = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Failure::physical(format!(
                    "amplitudes ({c1}, {c2}) cannot be normalized"
                )));
            }
            Ok((c1 / n, c2 / n))
        }
        (Some(c1), None) => Ok((c1, complement(c1)?)),
        (None, Some(c2)) => Ok((complement(c2)?, c2)),
        (None, None) => {
            let h = Amplitude::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            Ok((h, h))
        }
    }
}

const NORM_COLUMNS: [&str; 10] = [
    "hbar",
    "dt_min",
    "delta_h",
    "dt_char",
    "norm_lim",
    "exact_norm",
    "ratio",
    "moment_estimate",
    "regime_ok",
    "satisfied",
];

fn norm_cells(cfg: &RunConfig, r: &NormLimitReport) -> Vec<Cell> {
    vec![
        cfg.hbar.into(),
        r.dt_min.into(),
        r.delta_h.into(),
        r.dt_char.into(),
        r.norm_lim.into(),
        r.exact_norm.into(),
        r.ratio().into(),
        r.moment_estimate.into(),
        r.regime_ok.into(),
        r.satisfied.into(),
    ]
}

fn verdict(r: &NormLimitReport) -> i32 {
    if !r.regime_ok {
        EXIT_REGIME
    } else if !r.satisfied {
        EXIT_VIOLATED
    } else {
        EXIT_PASS
    }
}

fn amplitude_cells(c1: Amplitude, c2: Amplitude) -> Vec<Cell> {
    vec![c1.re.into(), c1.im.into(), c2.re.into(), c2.im.into()]
}

const AMPLITUDE_COLUMNS: [&str; 4] = ["c1_re", "c1_im", "c2_re", "c2_im"];

fn model_two_state(a: &TwoStateArgs, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (c1, c2) = amplitudes(&a.amplitudes)?;
    let m = TwoStateModel::new(c1, c2, a.e1, a.e2)?;
    let r = verify_norm_inequality_with(&m.context(cfg.hbar)?, cfg.dt_min, &cfg.report())?;

    let columns: Vec<&str> = AMPLITUDE_COLUMNS
        .iter()
        .chain(&["e1", "e2"])
        .chain(&NORM_COLUMNS)
        .copied()
        .collect();
    let mut table = Table::new(&columns);
    let mut row = amplitude_cells(c1, c2);
    row.extend([a.e1.into(), a.e2.into()]);
    row.extend(norm_cells(cfg, &r));
    table.push(row);
    Ok(Outcome {
        table,
        code: verdict(&r),
        notes: Vec::new(),
    })
}

fn model_detector(a: &DetectorArgs, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (c1, c2) = amplitudes(&a.amplitudes)?;
    let m = DetectorModel::new(c1, c2, a.kappa)?;
    let r = verify_norm_inequality_with(&m.context(cfg.hbar)?, cfg.dt_min, &cfg.report())?;
    let t_meas = measurement_time(&m, cfg.hbar);
    let residual = if r.norm_lim > 0.0 {
        (r.exact_norm - r.norm_lim).abs() / r.norm_lim
    } else if r.exact_norm == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    let columns: Vec<&str> = AMPLITUDE_COLUMNS
        .iter()
        .chain(&["kappa"])
        .chain(&NORM_COLUMNS)
        .chain(&["t_meas", "residual"])
        .copied()
        .collect();
    let mut table = Table::new(&columns);
    let mut row = amplitude_cells(c1, c2);
    row.push(a.kappa.into());
    row.extend(norm_cells(cfg, &r));
    row.extend([
        (*t_meas.as_ref().unwrap_or(&f64::NAN)).into(),
        residual.into(),
    ]);
    table.push(row);

    let (code, notes) = match t_meas {
        Ok(_) => (verdict(&r), Vec::new()),
        Err(e) => (EXIT_PHYSICAL, vec![format!("error: {e}")]),
    };
    Ok(Outcome { table, code, notes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SampleStatus {
    Pass,
    Regime,
    Violated,
    /// The reference section is undefined somewhere on the interval.
    Undefined,
}

impl SampleStatus {
    fn as_str(self) -> &'static str {
        match self {
            SampleStatus::Pass => "pass",
            SampleStatus::Regime => "regime",
            SampleStatus::Violated => "violated",
            SampleStatus::Undefined => "undefined",
        }
    }
}

struct SampleRow {
    cells: Vec<Cell>,
    status: SampleStatus,
}

const VERIFY_COLUMNS: [&str; 17] = [
    "index",
    "dim",
    "delta_h",
    "second_moment_root",
    "dt_char",
    "dt_min",
    "norm_lim",
    "exact_norm",
    "moment_estimate",
    "min_gap",
    "rqsl_min_margin",
    "norm_ok",
    "moment_ok",
    "gap_ok",
    "rqsl_ok",
    "regime_ok",
    "status",
];

fn verify_sample(spec: &EnsembleSpec, index: u64, cfg: &RunConfig) -> Result<SampleRow, Failure> {
    let ctx = random_system(spec, index)?;
    let report = cfg.report();
    let norm = verify_norm_inequality_with(&ctx, cfg.dt_min, &report)?;
    let dt_char = norm.dt_char;
    let moment_ok = norm.norm_lim <= norm.moment_estimate + VERIFY_ABS_TOL;

    let durations: Vec<f64> = if dt_char.is_finite() {
        VERIFY_DURATION_FRACTIONS
            .iter()
            .map(|f| f * dt_char)
            .collect()
    } else {
        Vec::new()
    };
    let min_gap = std::iter::once(cfg.dt_min)
        .chain(durations.iter().copied())
        .map(|dt| ctx.overlap_diagnostics(dt).gap)
        .fold(f64::INFINITY, f64::min);
    let gap_ok = min_gap >= -VERIFY_ABS_TOL;

    let mut rqsl_ok = true;
    let mut undefined = false;
    let mut min_margin = f64::INFINITY;
    for &t in &durations {
        match rqsl_check_with(&ctx, t, &cfg.quadrature, &report) {
            Ok(b) => {
                rqsl_ok &= b.satisfied;
                min_margin = min_margin.min(b.margin);
            }
            // a stationary state: the bound is vacuous
            Err(Error::ZeroVariance) => {}
            Err(Error::OrthogonalOverlap { .. }) => undefined = true,
            Err(e) => return Err(e.into()),
        }
    }
    rqsl_ok &= !undefined;

    let status = if undefined {
        SampleStatus::Undefined
    } else if !(norm.satisfied && moment_ok && gap_ok && rqsl_ok) {
        SampleStatus::Violated
    } else if !norm.regime_ok {
        SampleStatus::Regime
    } else {
        SampleStatus::Pass
    };
    let cells = vec![
        index.into(),
        ctx.dim().into(),
        norm.delta_h.into(),
        ctx.second_moment_root().into(),
        dt_char.into(),
        norm.dt_min.into(),
        norm.norm_lim.into(),
        norm.exact_norm.into(),
        norm.moment_estimate.into(),
        min_gap.into(),
        min_margin.into(),
        norm.satisfied.into(),
        moment_ok.into(),
        gap_ok.into(),
        rqsl_ok.into(),
        norm.regime_ok.into(),
        status.as_str().into(),
    ];
    Ok(SampleRow { cells, status })
}

fn verify(a: &VerifyArgs, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = EnsembleSpec::new(a.dim, cfg.seed, a.count, a.energy_scale)?;
    let rows = (0..a.count as u64)
        .into_par_iter()
        .map(|i| verify_sample(&spec, i, cfg))
        .collect::<Result<Vec<_>, _>>()?;

    let count = |s: SampleStatus| rows.iter().filter(|r| r.status == s).count();
    let (pass, regime, violated, undefined) = (
        count(SampleStatus::Pass),
        count(SampleStatus::Regime),
        count(SampleStatus::Violated),
        count(SampleStatus::Undefined),
    );
    let code = if violated + undefined > 0 {
        EXIT_VIOLATED
    } else if regime > 0 {
        EXIT_REGIME
    } else {
        EXIT_PASS
    };
    let summary = format!(
        "verify: dim={} count={} seed={} pass={pass} regime={regime} violated={violated} \
         undefined={undefined} verdict={}",
        a.dim,
        a.count,
        cfg.seed,
        if code == EXIT_PASS { "PASS" } else { "FAIL" }
    );

    let mut table = Table::new(&VERIFY_COLUMNS);
    for r in rows {
        table.push(r.cells);
    }
    Ok(Outcome {
        table,
        code,
        notes: vec![summary],
    })
}

/// `n` points log-spaced over `[lo, hi]`, both ends included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Failure> {
    if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
        return Err(Failure::usage(format!(
            "empty grid: need 0 < min <= max, got [{lo}, {hi}]"
        )));
    }
    match n {
        0 => Err(Failure::usage("empty grid: points must be positive")),
        1 if lo == hi => Ok(vec![lo]),
        1 => Err(Failure::usage("a single grid point needs min == max")),
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            Ok((0..n)
                .map(|k| match k {
                    0 => lo,
                    k if k == n - 1 => hi,
                    k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
                })
                .collect())
        }
    }
}

pub const SWEEP_COLUMNS: [&str; 5] = [
    "dt",
    "exact_norm",
    "lower_bound",
    "discrete_length",
    "quadrature_length",
];

fn sweep(a: &SweepArgs, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let fractions = log_grid(a.min_fraction, a.max_fraction, a.points)?;
    let (c1, c2) = amplitudes(&a.amplitudes)?;
    let ctx: EvolutionContext = match a.model {
        SweepModel::TwoState => TwoStateModel::new(c1, c2, a.e1, a.e2)?.context(cfg.hbar)?,
        SweepModel::Detector => DetectorModel::new(c1, c2, a.kappa)?.context(cfg.hbar)?,
    };
    let Some(dt_char) = ctx.characteristic_time().finite() else {
        return Err(Failure::physical(
            "the Hamiltonian has no energy scale, so the grid relative to dt_char is undefined",
        ));
    };
    let delta_h = ctx.energy_variance()?;

    let rows = fractions
        .par_iter()
        .map(|f| {
            let dt = f * dt_char;
            let quad = match reference_section_length(&ctx, dt, &cfg.quadrature) {
                Ok(l) => Ok(l),
                Err(Error::OrthogonalOverlap { .. }) => Ok(f64::NAN),
                Err(e) => Err(Failure::from(e)),
            }?;
            Ok(vec![
                dt.into(),
                ctx.delta_psi(dt).norm().into(),
                norm_limit(delta_h, dt, cfg.hbar).into(),
                discrete_length(&ctx, dt).into(),
                quad.into(),
            ])
        })
        .collect::<Result<Vec<Vec<Cell>>, Failure>>()?;

    let mut notes = Vec::new();
    let undefined = rows
        .iter()
        .filter(|r| matches!(r[4], Cell::Float(x) if x.is_nan()))
        .count();
    if undefined > 0 {
        notes.push(format!(
            "sweep: reference section undefined (zero overlap) for {undefined} grid point(s)"
        ));
    }
    let mut table = Table::new(&SWEEP_COLUMNS);
    for r in rows {
        table.push(r);
    }
    Ok(Outcome {
        table,
        code: EXIT_PASS,
        notes,
    })
}

const PRECLUDE_COLUMNS: [&str; 12] = [
    "kind", "label", "norm", "survives", "re_0", "im_0", "re_1", "im_1", "re_2", "im_2", "re_3",
    "im_3",
];

fn amplitude_row(
    kind: &str,
    label: String,
    norm: f64,
    survives: bool,
    amps: &[Amplitude],
) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![kind.into(), label.into(), norm.into(), survives.into()];
    for a in amps {
        row.extend([a.re.into(), a.im.into()]);
    }
    row
}

fn preclude_branches(a: &PrecludeArgs, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (c1, c2) = amplitudes(&a.amplitudes)?;
    let m = DetectorModel::new(c1, c2, a.kappa)?;
    let t_meas = measurement_time(&m, cfg.hbar)?;
    let ctx = m.context(cfg.hbar)?;
    let norm_min = match a.norm_min {
        Some(n) if !(n >= 0.0 && n.is_finite()) => {
            return Err(Failure::usage(format!(
                "norm-min must be finite and non-negative, got {n}"
            )))
        }
        Some(n) => n,
        None => norm_limit(ctx.energy_variance()?, cfg.dt_min, cfg.hbar),
    };
    let branches = branch_decompose(&ctx.propagate(t_meas), &detector_sector_partition())?;
    let result = preclude(&branches, norm_min, !a.no_renormalize);

    let survived = |label: &str| match &result {
        Ok(p) => p.report.survived_labels.iter().any(|l| l == label),
        Err(_) => false,
    };
    let mut table = Table::new(&PRECLUDE_COLUMNS);
    for b in &branches {
        table.push(amplitude_row(
            "branch",
            b.label.clone(),
            b.norm,
            survived(&b.label),
            b.component.amplitudes(),
        ));
    }
    let mut notes = vec![format!("preclude: t_meas={t_meas} norm_min={norm_min}")];
    let code = match result {
        Ok(p) => {
            table.push(amplitude_row(
                "state",
                p.report.survived_labels.join("+"),
                p.state.norm(),
                true,
                p.state.amplitudes(),
            ));
            notes.push(format!(
                "preclude: survived={:?} removed={:?} survived_norm={}",
                p.report.survived_labels, p.report.removed_labels, p.report.survived_norm
            ));
            EXIT_PASS
        }
        Err(e @ Error::AllPrecluded { .. }) => {
            notes.push(format!("preclude: {e}"));
            EXIT_ALL_PRECLUDED
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome { table, code, notes })
}
