use crate::graph::Cost;

/// A non-negative decimal literal as `mantissa * 10^-digits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Decimal {
    pub mantissa: u64,
    pub digits: u32,
}

impl Decimal {
    /// Parses `123`, `123.`, `123.45` or `.5`. Signs and exponents are
    /// rejected.
    pub fn parse(token: &str) -> Result<Self, String> {
        if token.starts_with('-') {
            return Err(format!("negative weight {token}"));
        }
        let (int, frac) = token.split_once('.').unwrap_or((token, ""));
        let valid = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if (int.is_empty() && frac.is_empty()) || !valid(int) || !valid(frac) {
            return Err(format!("malformed number {token:?}"));
        }
        let digits = frac.len() as u32;
        let joined = format!("{int}{frac}");
        let mantissa = if joined.is_empty() {
            0
        } else {
            joined
                .parse::<u64>()
                .map_err(|_| format!("number {token} is too large"))?
        };
        Ok(Decimal { mantissa, digits })
    }

    /// The value in units of `10^-scale`; `scale` must be at least `digits`.
    pub fn scaled(&self, scale: u32) -> Option<Cost> {
        let factor = 10u64.checked_pow(scale.checked_sub(self.digits)?)?;
        self.mantissa.checked_mul(factor)
    }
}
