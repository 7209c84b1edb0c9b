// Thin wrappers over libm so the rest of the crate reads like std code.

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}
#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}
#[inline]
pub fn atanh(x: f64) -> f64 {
    libm::atanh(x)
}

/// `x * ln(x / y)` with `0 ln 0 = 0`.
#[inline]
pub fn xlogxy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * ln(x / y)
    }
}

/// `x * ln(y)` with the product taken as zero when `x == 0`.
#[inline]
pub fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * ln(y)
    }
}

#[inline]
pub fn logit(t: f64) -> f64 {
    ln(t) - ln1p(-t)
}

#[inline]
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + exp(-u))
    } else {
        let e = exp(u);
        e / (1.0 + e)
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + ln(xs.iter().map(|&x| exp(x - m)).sum::<f64>())
}

/// In-place softmax of log-weights; returns the normalizer.
pub fn softmax_in_place(v: &mut [f64]) -> f64 {
    let lse = log_sum_exp(v);
    for x in v.iter_mut() {
        *x = exp(*x - lse);
    }
    lse
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
