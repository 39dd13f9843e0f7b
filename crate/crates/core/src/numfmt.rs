//! Lossless decimal formatting shared by the file writers.

use crate::error::{Error, Result};

/// Formats `x` with 17 significant digits, which round-trips every `f64`.
/// The output is a valid JSON number.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn finite_sig17(x: f64, what: &'static str) -> Result<String> {
    if x.is_finite() {
        Ok(sig17(x))
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn json_array(values: &[f64], what: &'static str) -> Result<String> {
    let parts = values
        .iter()
        .map(|&v| finite_sig17(v, what))
        .collect::<Result<Vec<_>>>()?;
    Ok(format!("[{}]", parts.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sig17(0.1), "1.0000000000000001e-1");
        assert_eq!(sig17(-2.0), "-2.0000000000000000e0");
        assert!(finite_sig17(f64::NAN, "x").is_err());
    }

    proptest! {
        #[test]
        fn round_trips_through_json(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = serde_json::from_str(&sig17(x)).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
