//! Log-space helpers shared by the analytic and tail computations.

/// Terms whose log weight falls below this contribute nothing representable.
const LOG_WEIGHT_FLOOR: f64 = -745.0;

#[inline]
pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln C(n, k)` via log-gamma; defined for `k <= n`.
#[inline]
pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `ln [C(n, k) p^k q^(n-k)]`.
#[inline]
pub fn ln_binomial_pmf(n: u64, k: u64, ln_p: f64, ln_q: f64) -> f64 {
    let mut out = ln_choose(n, k);
    if k > 0 {
        out += k as f64 * ln_p;
    }
    if k < n {
        out += (n - k) as f64 * ln_q;
    }
    out
}

/// `ln sum exp(x_i)` with the max-shift; `-inf` for an empty or all `-inf` input.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// `E[g(K)]` for `K ~ Binomial(n, p)`, with weights formed in log space.
///
/// Weights are renormalised by their computed sum, which removes the common
/// rounding error of `ln n!` for very large `n`. Terms below the exponent
/// floor are skipped; `g` is evaluated only on the surviving terms.
pub fn binomial_expectation(n: u64, p: f64, mut g: impl FnMut(u64) -> f64) -> f64 {
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mut weight_sum = 0.0;
    let mut acc = 0.0;
    for k in 0..=n {
        let lw = ln_binomial_pmf(n, k, ln_p, ln_q);
        if lw < LOG_WEIGHT_FLOOR {
            continue;
        }
        let w = lw.exp();
        weight_sum += w;
        acc += w * g(k);
    }
    acc / weight_sum
}
