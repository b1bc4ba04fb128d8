//! Real roots of a cubic inside a closed interval.

use std::f64::consts::PI;

/// Relative discriminant magnitude below which the closed form is not trusted.
const DISCRIMINANT_EPS: f64 = 1e-14;

/// Real roots of `c[3] x³ + c[2] x² + c[1] x + c[0]` lying in `[lo, hi]`,
/// ascending. Roots may repeat when they are (numerically) multiple.
pub fn real_roots_in(c: [f64; 4], lo: f64, hi: f64) -> Vec<f64> {
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let c = c.map(|v| v / scale);
    let mut roots = if c[3].abs() < 1e-12 {
        lower_degree_roots(c)
    } else {
        match closed_form(c) {
            Some(r) => r,
            None => bisection_roots(c, lo, hi),
        }
    };
    for r in roots.iter_mut() {
        *r = polish(c, *r);
    }
    let slack = 1e-9 * (hi - lo);
    roots.retain(|r| r.is_finite() && *r >= lo - slack && *r <= hi + slack);
    for r in roots.iter_mut() {
        *r = r.clamp(lo, hi);
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn eval(c: [f64; 4], x: f64) -> f64 {
    ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
}

fn eval_prime(c: [f64; 4], x: f64) -> f64 {
    (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1]
}

fn polish(c: [f64; 4], mut x: f64) -> f64 {
    for _ in 0..4 {
        let d = eval_prime(c, x);
        if d == 0.0 {
            break;
        }
        let next = x - eval(c, x) / d;
        if !next.is_finite() || (next - x).abs() > 1e-3 * (1.0 + x.abs()) {
            break;
        }
        x = next;
    }
    x
}

fn lower_degree_roots(c: [f64; 4]) -> Vec<f64> {
    let (a, b, k) = (c[2], c[1], c[0]);
    if a.abs() < 1e-12 {
        if b.abs() < 1e-300 {
            return Vec::new();
        }
        return vec![-k / b];
    }
    let disc = b * b - 4.0 * a * k;
    if disc < 0.0 {
        return Vec::new();
    }
    // numerically stable pair
    let s = -0.5 * (b + b.signum() * disc.sqrt());
    let mut out = vec![s / a];
    if s != 0.0 {
        out.push(k / s);
    }
    out
}

/// Trigonometric form for three real roots, Cardano for one. `None` when the
/// discriminant is too close to zero to classify.
fn closed_form(c: [f64; 4]) -> Option<Vec<f64>> {
    let a = c[2] / c[3];
    let b = c[1] / c[3];
    let d = c[0] / c[3];
    // depressed cubic t³ + p t + q with x = t - a/3
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let lead = (q / 2.0).powi(2).max((p / 3.0).abs().powi(3)).max(1e-300);
    if disc.abs() < DISCRIMINANT_EPS * lead {
        return None;
    }
    if disc < 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        Some(
            (0..3)
                .map(|i| r * (theta - 2.0 * PI * i as f64 / 3.0).cos() - shift)
                .collect(),
        )
    } else {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        Some(vec![u + v - shift])
    }
}

/// Roots by bisection on the monotone pieces between critical points.
fn bisection_roots(c: [f64; 4], lo: f64, hi: f64) -> Vec<f64> {
    let mut knots = vec![lo];
    let mut crit = lower_degree_roots([c[1], 2.0 * c[2], 3.0 * c[3], 0.0]);
    crit.retain(|x| *x > lo && *x < hi);
    crit.sort_by(f64::total_cmp);
    knots.extend(crit);
    knots.push(hi);
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (eval(c, a), eval(c, b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            // touching root at a critical point
            let m = if fa.abs() < fb.abs() { a } else { b };
            if eval(c, m).abs() < 1e-12 {
                out.push(m);
            }
            continue;
        }
        let mut fa = fa;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let fm = eval(c, mid);
            if fm == 0.0 || b - a < 1e-16 {
                a = mid;
                b = mid;
                break;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    if eval(c, hi) == 0.0 {
        out.push(hi);
    }
    out
}
