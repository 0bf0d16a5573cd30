//! Exact rational and double precision dense linear algebra.

pub mod float;
pub mod integer;
pub mod matrix;
pub mod ops;
pub mod rational;

pub use float::FloatMatrix;
pub use integer::IntMatrix;
pub use matrix::{Matrix, Scalar};
pub use ops::RationalMatrix;
pub use rational::Rational;

/// Arithmetic used by a scaling run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumericMode {
    /// Exact rationals with the truncation budget from the stability analysis.
    ExactCertified,
    /// Exact rationals truncated to a fixed number of fractional bits each step.
    ExactCapped(u64),
    /// IEEE double precision.
    Float64,
}

impl NumericMode {
    pub fn parse(text: &str) -> crate::Result<Self> {
        match text {
            "exact" | "exact-certified" | "certified" => Ok(Self::ExactCertified),
            "float" | "float64" => Ok(Self::Float64),
            _ => {
                let bits = text
                    .strip_prefix("exact-capped:")
                    .and_then(|b| b.parse::<u64>().ok())
                    .ok_or_else(|| crate::Error::OutOfRange(format!("unknown mode `{text}`")))?;
                if bits < 64 {
                    return Err(crate::Error::OutOfRange(format!(
                        "capped mode needs at least 64 bits, got {bits}"
                    )));
                }
                Ok(Self::ExactCapped(bits))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::ExactCertified => "exact-certified".into(),
            Self::ExactCapped(b) => format!("exact-capped:{b}"),
            Self::Float64 => "float64".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!(NumericMode::parse("exact").unwrap(), NumericMode::ExactCertified);
        assert_eq!(NumericMode::parse("exact-capped:256").unwrap(), NumericMode::ExactCapped(256));
        assert_eq!(NumericMode::parse("float").unwrap(), NumericMode::Float64);
        assert!(NumericMode::parse("exact-capped:32").is_err());
        assert!(NumericMode::parse("fast").is_err());
    }
}
