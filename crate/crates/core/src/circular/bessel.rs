//! Ratios of modified Bessel functions of the first kind, `I_n(κ) / I_0(κ)`.
//!
//! The von Mises moments only ever need these ratios, never `I_n` itself, so
//! nothing here overflows for large precision. Two regimes:
//!
//! * backward recurrence on `r_n = I_n / I_{n-1}` (the Perron continued
//!   fraction), started deep enough that the start error has contracted below
//!   machine precision by the time it reaches `n_max`;
//! * for very large `κ` relative to `n_max²`, the Hankel asymptotic series of
//!   the exponentially scaled functions, whose ratio is taken term by term.

/// Below this `κ` the asymptotic series is never used.
const ASYMPTOTIC_MIN_KAPPA: f64 = 1.0e5;

/// The asymptotic branch also requires `κ ≥ ASYMPTOTIC_ORDER_FACTOR · n_max²`.
const ASYMPTOTIC_ORDER_FACTOR: f64 = 1.0e3;

const ASYMPTOTIC_MAX_TERMS: usize = 40;

/// `I_n(κ) / I_0(κ)` for `n = 0..=n_max`. `κ` must be finite and non-negative.
pub fn bessel_ratios(kappa: f64, n_max: usize) -> Vec<f64> {
    debug_assert!(kappa >= 0.0 && kappa.is_finite());
    let mut out = vec![0.0; n_max + 1];
    out[0] = 1.0;
    if n_max == 0 || kappa == 0.0 {
        return out;
    }
    let n_max_f = n_max as f64;
    if kappa >= ASYMPTOTIC_MIN_KAPPA && kappa >= ASYMPTOTIC_ORDER_FACTOR * n_max_f * n_max_f {
        let s0 = hankel_sum(0.0, kappa);
        for (n, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = hankel_sum(n as f64, kappa) / s0;
        }
        return out;
    }

    // Contraction of the start error is prod r_n^2 ~ exp(-(N^2 - n^2)/kappa),
    // so 7 sqrt(kappa) extra terms past n_max is ample.
    let start = n_max + 16 + (7.0 * kappa.sqrt()).ceil() as usize;
    let mut ratios = vec![0.0; n_max + 1];
    let nf = (start + 1) as f64;
    let mut r = kappa / (nf - 0.5 + ((nf + 0.5) * (nf + 0.5) + kappa * kappa).sqrt());
    for n in (1..=start).rev() {
        r = kappa / (2.0 * n as f64 + kappa * r);
        if n <= n_max {
            ratios[n] = r;
        }
    }
    let mut acc = 1.0;
    for n in 1..=n_max {
        acc *= ratios[n];
        out[n] = acc;
    }
    out
}

/// `I_1(κ) / I_0(κ)`, the mean resultant length of a von Mises distribution.
pub fn mean_resultant_length(kappa: f64) -> f64 {
    bessel_ratios(kappa, 1)[1]
}

/// Derivative of `A(κ) = I_1/I_0` with respect to `κ`.
pub fn mean_resultant_length_derivative(kappa: f64, a: f64) -> f64 {
    if kappa == 0.0 {
        return 0.5;
    }
    1.0 - a / kappa - a * a
}

/// `e^{-x} I_0(x)`, finite for every non-negative `x`.
pub fn i0_scaled(x: f64) -> f64 {
    if x <= 40.0 {
        let half_sq = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..400 {
            term *= half_sq / (m as f64 * m as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        hankel_sum(0.0, x) / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// `sqrt(2πx) e^{-x} I_ν(x)` by the Hankel expansion.
fn hankel_sum(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=ASYMPTOTIC_MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (8.0 * k as f64 * x);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series for I_n(x), usable for moderate x.
    fn bessel_i_series(n: u32, x: f64) -> f64 {
        let half = 0.5 * x;
        let mut term = half.powi(n as i32);
        for k in 1..=n {
            term /= k as f64;
        }
        let mut sum = term;
        for m in 1..500 {
            term *= half * half / (m as f64 * (m + n) as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn matches_power_series_for_moderate_kappa() {
        for &kappa in &[0.01, 0.3, 1.0, 2.5, 7.0, 20.0, 60.0] {
            let ratios = bessel_ratios(kappa, 12);
            let i0 = bessel_i_series(0, kappa);
            for (n, &r) in ratios.iter().enumerate() {
                let expected = bessel_i_series(n as u32, kappa) / i0;
                assert!(
                    (r - expected).abs() <= 1e-13 * expected.max(1e-300) + 1e-300,
                    "kappa={kappa} n={n}: {r} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn known_value_at_one() {
        // I1(1) / I0(1)
        let a = mean_resultant_length(1.0);
        assert!((a - 0.565_159_103_992_485 / 1.266_065_877_752_008).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_and_recurrence_agree_at_the_seam() {
        let kappa = 2.0e5;
        let n_max = 10;
        let asym = bessel_ratios(kappa, n_max);
        // force the recurrence path by asking for more orders, then truncate
        let rec = bessel_ratios(kappa, 20);
        for n in 0..=n_max {
            assert!(
                (asym[n] - rec[n]).abs() < 1e-13,
                "n={n}: {} vs {}",
                asym[n],
                rec[n]
            );
        }
    }

    #[test]
    fn large_kappa_does_not_overflow() {
        let r = bessel_ratios(1.0e12, 3);
        assert!(r.iter().all(|v| v.is_finite()));
        assert!((1.0 - r[1] - 0.5e-12).abs() < 1e-15);
        let r = bessel_ratios(900.0, 150);
        assert!(r.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn scaled_i0_is_continuous_across_branches() {
        let series = i0_scaled(40.0);
        let asymptotic = hankel_sum(0.0, 40.0) / (2.0 * std::f64::consts::PI * 40.0).sqrt();
        assert!(
            (series - asymptotic).abs() < 1e-14 * series,
            "{series} {asymptotic}"
        );
        let x: f64 = 12.0;
        assert!((i0_scaled(x) - bessel_i_series(0, x) * (-x).exp()).abs() < 1e-15);
    }

    #[test]
    fn ratios_decrease_with_order() {
        let r = bessel_ratios(35.0, 200);
        for w in r.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }
}
