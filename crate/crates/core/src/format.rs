//! Fixed float formatting shared by every text artifact.

/// Six significant digits in scientific notation, e.g. `1.23457e-3`.
pub fn sig6(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.5e}")
}

/// A fraction in `[0, 1]` as a percentage with one decimal.
pub fn percent1(fraction: f64) -> String {
    format!("{:.1}", fraction * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(sig6(0.00123456789), "1.23457e-3");
        assert_eq!(sig6(0.0), "0.00000e0");
        assert_eq!(sig6(f64::INFINITY), "inf");
        assert_eq!(percent1(0.9933), "99.3");
        assert_eq!(percent1(1.0), "100.0");
    }
}
