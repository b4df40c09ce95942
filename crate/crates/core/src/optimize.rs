//! Derivative-free minimizers: golden-section search on an interval, a
//! scan-then-refine variant for multimodal objectives, and Nelder–Mead in
//! the plane.

use crate::error::{Error, Result};

/// `1/φ` with `φ` the golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `xtol`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Minimum {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    while hi - lo > xtol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Minimum {
        x,
        value,
        evaluations: evals,
    }
}

/// Evaluates `f` on `samples` evenly spaced points of `[a, b]`, then refines
/// the best grid cell with golden-section search. Never returns a point worse
/// than the best grid sample.
pub fn scan_then_golden<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, samples: usize, xtol: f64) -> Minimum {
    let samples = samples.max(3);
    let step = (b - a) / (samples - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..samples {
        let v = f(a + step * i as f64);
        if v < best.1 {
            best = (i, v);
        }
    }
    let i = best.0;
    let lo = a + step * i.saturating_sub(1) as f64;
    let hi = a + step * (i + 1).min(samples - 1) as f64;
    let refined = golden_section(&mut f, lo, hi, xtol);
    let evaluations = samples + refined.evaluations;
    if refined.value <= best.1 {
        Minimum {
            evaluations,
            ..refined
        }
    } else {
        Minimum {
            x: a + step * i as f64,
            value: best.1,
            evaluations,
        }
    }
}

/// Nelder–Mead on two variables.
pub fn nelder_mead_2d<F: FnMut([f64; 2]) -> f64>(
    mut f: F,
    start: [f64; 2],
    step: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<([f64; 2], f64)> {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut vals = simplex.map(&mut f);
    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        simplex = order.map(|i| simplex[i]);
        vals = order.map(|i| vals[i]);
        if (vals[2] - vals[0]).abs() <= ftol {
            return Ok((simplex[0], vals[0]));
        }
        let centroid = [(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                simplex[2] = xe;
                vals[2] = fe;
            } else {
                simplex[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            simplex[2] = xr;
            vals[2] = fr;
        } else {
            let xc = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc);
            if fc < vals[2].min(fr) {
                simplex[2] = xc;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = [
                        (simplex[0][0] + simplex[k][0]) / 2.0,
                        (simplex[0][1] + simplex[k][1]) / 2.0,
                    ];
                    vals[k] = f(simplex[k]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0);
    Err(Error::Optimizer(format!(
        "Nelder-Mead hit {max_iter} iterations; best so far f({:?}) = {}",
        simplex[best], vals[best]
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-9);
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_accepts_reversed_bracket() {
        let m = golden_section(|x| (x + 1.0).powi(2), 3.0, -4.0, 1e-9);
        assert!((m.x + 1.0).abs() < 1e-8);
    }

    #[test]
    fn scan_escapes_a_shallow_tail() {
        // global minimum at -2 (value -1), a decaying tail toward +inf
        let f = |x: f64| -(-(x + 2.0).powi(2) * 4.0).exp() + 0.5 * (-(x - 3.0).powi(2)).exp();
        let plain = golden_section(f, -4.0, 8.0, 1e-10);
        let scanned = scan_then_golden(f, -4.0, 8.0, 121, 1e-10);
        assert!((scanned.x + 2.0).abs() < 1e-7);
        assert!(scanned.value <= plain.value);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let (x, v) = nelder_mead_2d(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            [-1.2, 1.0],
            0.5,
            1e-16,
            5000,
        )
        .unwrap();
        assert!((x[0] - 1.0).abs() < 1e-3 && (x[1] - 1.0).abs() < 1e-3, "{x:?}");
        assert!(v < 1e-6);
    }

    #[test]
    fn nelder_mead_reports_iteration_cap() {
        let err = nelder_mead_2d(|p| p[0].powi(2) + p[1].powi(2), [5.0, 5.0], 1.0, 0.0, 3).unwrap_err();
        assert!(matches!(err, Error::Optimizer(_)));
    }
}
