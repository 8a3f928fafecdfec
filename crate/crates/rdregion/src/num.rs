//! Six-significant-digit output. Everything numeric that leaves the CLI goes
//! through [`fmt6`] (CSV) or [`round6`] (JSON) so files are byte-stable.

/// Magnitudes below this print as zero.
pub const SNAP: f64 = 1e-12;

pub fn fmt6(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.abs() < SNAP {
        return "0".into();
    }
    // the exponent after rounding to six digits decides the layout
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// `x` rounded to six significant digits (via its printed form).
pub fn round6(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt6(x).parse().unwrap_or(x)
}
