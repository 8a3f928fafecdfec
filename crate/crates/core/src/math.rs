//! Float helpers that work without `std`.

/// `-p log2 p`, with `0 log 0 = 0`.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * libm::log2(p)
    } else {
        0.0
    }
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// Crossover of two cascaded binary symmetric channels, `a(1-b) + b(1-a)`.
pub fn bsc_cascade(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Clamp a provably nonnegative quantity: values in `[-tol, 0)` become zero.
#[inline]
pub fn clamp_nonneg(x: f64, tol: f64) -> f64 {
    if x < 0.0 && x >= -tol {
        0.0
    } else {
        x
    }
}
