use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::Float;

/// Floating-point type usable for measurement data.
pub trait Scalar: Float + FromStr + Display + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromStr + Display + Debug + Send + Sync + 'static {}

/// Shortest decimal rendering with at most four fractional digits
/// (`70`, `848.8`, `76.21`).
pub fn format_decimal<T: Scalar>(value: T) -> String {
    let s = format!("{value:.4}");
    match s.find('.') {
        Some(_) => s.trim_end_matches('0').trim_end_matches('.').to_string(),
        None => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(70.0f64), "70");
        assert_eq!(format_decimal((823.0f64 + 874.6) / 2.0), "848.8");
        assert_eq!(format_decimal(76.21f32), "76.21");
        assert_eq!(format_decimal(-0.5f64), "-0.5");
    }
}
