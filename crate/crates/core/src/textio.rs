//! Small helpers shared by the text formats.

/// Formats a float with 17 significant digits (round-trips every `f64`).
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Formats a boolean as `0`/`1`.
pub fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig17_round_trips() {
        for &x in &[0.0, 1.0 / 3.0, 0.1, 1e-300, 0.999_999_999_999_999_9, 123456.789] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
        assert_eq!(bit(true), "1");
    }
}
