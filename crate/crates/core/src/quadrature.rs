//! Adaptive Simpson quadrature with a Richardson error estimate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Sum of the accepted per-panel estimates `|S₂ - S₁| / 15`.
    pub error_estimate: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// The interval is first cut into `initial_panels` equal pieces sharing the tolerance
/// by width; each piece is then bisected until `|S_left + S_right - S_whole| ≤ 15 tol`,
/// with the tolerance halved on every bisection. A panel that still fails at
/// `max_depth` yields [`Error::DepthExceeded`]. Errors from `f` propagate unchanged.
pub fn adaptive_simpson<F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
    initial_panels: usize,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "quadrature tolerance must be positive, got {abs_tol}"
        )));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let panels = initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut evaluations = 0usize;
    let mut eval = |x: f64, count: &mut usize| -> Result<f64> {
        *count += 1;
        f(x)
    };

    let mut stack = Vec::with_capacity(2 * max_depth as usize + panels);
    let mut left = a;
    let mut f_left = eval(a, &mut evaluations)?;
    for k in 0..panels {
        let right = if k + 1 == panels {
            b
        } else {
            a + width * (k + 1) as f64
        };
        let mid = 0.5 * (left + right);
        let fm = eval(mid, &mut evaluations)?;
        let f_right = eval(right, &mut evaluations)?;
        stack.push(Panel {
            a: left,
            b: right,
            fa: f_left,
            fm,
            fb: f_right,
            whole: simpson(left, right, f_left, fm, f_right),
            tol: abs_tol / panels as f64,
            depth: 0,
        });
        left = right;
        f_left = f_right;
    }
    // process in reverse so accumulation runs left to right
    stack.reverse();

    let mut value = 0.0;
    let mut error_estimate = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm, &mut evaluations)?;
        let frm = eval(rm, &mut evaluations)?;
        let sl = simpson(p.a, m, p.fa, flm, p.fm);
        let sr = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = sl + sr - p.whole;
        if delta.abs() <= 15.0 * p.tol {
            value += sl + sr + delta / 15.0;
            error_estimate += delta.abs() / 15.0;
            continue;
        }
        if p.depth + 1 >= max_depth || !(lm > p.a && rm < p.b) {
            return Err(Error::DepthExceeded {
                max_depth,
                a: p.a,
                b: p.b,
            });
        }
        let tol = 0.5 * p.tol;
        let depth = p.depth + 1;
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: sr,
            tol,
            depth,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: sl,
            tol,
            depth,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
    })
}
