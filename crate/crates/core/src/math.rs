pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// `x log2 x` with the convention `0 log 0 = 0`.
pub(crate) fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * log2(x)
    }
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}
