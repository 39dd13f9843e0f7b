//! Exact integer combinatorics with overflow detection.

use crate::error::{Error, Result};

pub fn factorial(n: u32) -> Result<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| {
        acc.checked_mul(k).ok_or(Error::Overflow("factorial"))
    })
}

pub fn binomial(n: u32, k: u32) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = 1u64;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc
            .checked_mul(n - i)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / (i + 1);
    }
    Ok(acc)
}

/// `n! / (m_0! m_1! ... m_k!)` where `n = sum(parts)`.
pub fn multinomial(parts: &[u32]) -> Result<u64> {
    let mut acc = 1u64;
    let mut total = 0u32;
    for &m in parts {
        total += m;
        acc = acc
            .checked_mul(binomial(total, m)?)
            .ok_or(Error::Overflow("multinomial coefficient"))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0).unwrap(), 1);
        assert_eq!(factorial(10).unwrap(), 3_628_800);
        assert_eq!(factorial(20).unwrap(), 2_432_902_008_176_640_000);
        assert!(factorial(21).is_err());
    }

    #[test]
    fn binomial_matches_factorial_ratio() {
        for n in 0..=20 {
            for k in 0..=n {
                let expected =
                    factorial(n).unwrap() / (factorial(k).unwrap() * factorial(n - k).unwrap());
                assert_eq!(binomial(n, k).unwrap(), expected, "C({n},{k})");
            }
        }
        assert_eq!(binomial(3, 5).unwrap(), 0);
    }

    #[test]
    fn multinomial_matches_factorials() {
        assert_eq!(multinomial(&[2, 1, 1]).unwrap(), 12);
        assert_eq!(multinomial(&[]).unwrap(), 1);
        assert_eq!(multinomial(&[0, 0, 3]).unwrap(), 1);
        let parts = [3u32, 2, 4, 1];
        let denom: u64 = parts.iter().map(|&m| factorial(m).unwrap()).product();
        assert_eq!(multinomial(&parts).unwrap(), factorial(10).unwrap() / denom);
    }
}
