//! Exact integer amounts.
//!
//! Values are always held in the smallest subunit of their currency family
//! (satoshi, wei, drop, iota). Whole-coin units exist only as conversion
//! targets and as input formats for decimal strings.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmountError {
    #[error("cannot convert {from} into {to}: different currency families")]
    IncompatibleUnits { from: String, to: String },
    #[error("conversion of {value} {from} into {to} is not integral")]
    NonIntegral {
        value: i128,
        from: String,
        to: String,
    },
    #[error("amount arithmetic overflowed")]
    Overflow,
    #[error("unit mismatch: {left} vs {right}")]
    UnitMismatch { left: String, right: String },
    #[error("issued currency code must be 3 or 40 characters, got {0:?}")]
    InvalidCurrencyCode(String),
    #[error("invalid decimal amount {0:?}")]
    InvalidDecimal(String),
}

/// A user-issued currency on a credit network, e.g. `USD.rGateway`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IssuedCurrency {
    code: String,
    issuer: String,
}

impl IssuedCurrency {
    pub fn new(code: impl Into<String>, issuer: impl Into<String>) -> Result<Self, AmountError> {
        let code = code.into();
        let len = code.chars().count();
        if len != 3 && len != 40 {
            return Err(AmountError::InvalidCurrencyCode(code));
        }
        Ok(IssuedCurrency {
            code,
            issuer: issuer.into(),
        })
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn issuer(&self) -> &str {
        &self.issuer
    }
}

/// Unit tag attached to an [`Amount`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unit {
    Btc,
    Satoshi,
    Ether,
    Gwei,
    Wei,
    Xrp,
    Drop,
    Miota,
    IotaToken,
    Issued(IssuedCurrency),
}

/// Currency family. Conversions are only defined inside one family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    Bitcoin,
    Ether,
    Xrp,
    Iota,
    Issued(IssuedCurrency),
}

impl Unit {
    pub fn family(&self) -> Family {
        match self {
            Unit::Btc | Unit::Satoshi => Family::Bitcoin,
            Unit::Ether | Unit::Gwei | Unit::Wei => Family::Ether,
            Unit::Xrp | Unit::Drop => Family::Xrp,
            Unit::Miota | Unit::IotaToken => Family::Iota,
            Unit::Issued(c) => Family::Issued(c.clone()),
        }
    }

    /// Power of ten between this unit and the family's smallest subunit.
    pub fn decimals(&self) -> u32 {
        match self {
            Unit::Btc => 8,
            Unit::Ether => 18,
            Unit::Gwei => 9,
            Unit::Xrp => 6,
            Unit::Miota => 6,
            Unit::Satoshi | Unit::Wei | Unit::Drop | Unit::IotaToken | Unit::Issued(_) => 0,
        }
    }

    /// The smallest subunit of this unit's family.
    pub fn base(&self) -> Unit {
        match self.family() {
            Family::Bitcoin => Unit::Satoshi,
            Family::Ether => Unit::Wei,
            Family::Xrp => Unit::Drop,
            Family::Iota => Unit::IotaToken,
            Family::Issued(c) => Unit::Issued(c),
        }
    }

    fn label(&self) -> String {
        match self {
            Unit::Issued(c) => format!("{}.{}", c.code, c.issuer),
            other => format!("{other:?}").to_lowercase(),
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Signed integer amount tagged with its unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Amount {
    pub value: i128,
    pub unit: Unit,
}

fn pow10(exp: u32) -> Result<i128, AmountError> {
    10i128.checked_pow(exp).ok_or(AmountError::Overflow)
}

impl Amount {
    pub fn new(value: i128, unit: Unit) -> Self {
        Amount { value, unit }
    }

    pub fn sat(value: i128) -> Self {
        Amount::new(value, Unit::Satoshi)
    }

    pub fn wei(value: i128) -> Self {
        Amount::new(value, Unit::Wei)
    }

    pub fn drops(value: i128) -> Self {
        Amount::new(value, Unit::Drop)
    }

    pub fn iota(value: i128) -> Self {
        Amount::new(value, Unit::IotaToken)
    }

    pub fn zero(unit: Unit) -> Self {
        Amount::new(0, unit)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Parse a decimal string such as `"0.9"` given in `unit` and return it in
    /// the family's smallest subunit. Errors when the string carries more
    /// fractional digits than the unit has decimals.
    pub fn parse_decimal(text: &str, unit: &Unit) -> Result<Amount, AmountError> {
        let bad = || AmountError::InvalidDecimal(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let decimals = unit.decimals();
        let frac_trimmed = frac.trim_end_matches('0');
        if frac_trimmed.len() as u32 > decimals {
            return Err(AmountError::NonIntegral {
                value: 0,
                from: text.to_string(),
                to: unit.base().to_string(),
            });
        }
        let whole_val: i128 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let mut frac_val: i128 = if frac_trimmed.is_empty() {
            0
        } else {
            frac_trimmed.parse().map_err(|_| bad())?
        };
        frac_val = frac_val
            .checked_mul(pow10(decimals - frac_trimmed.len() as u32)?)
            .ok_or(AmountError::Overflow)?;
        let mut value = whole_val
            .checked_mul(pow10(decimals)?)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or(AmountError::Overflow)?;
        if negative {
            value = -value;
        }
        Ok(Amount::new(value, unit.base()))
    }

    /// Exact conversion inside one currency family.
    pub fn convert(&self, target: &Unit) -> Result<Amount, AmountError> {
        if self.unit.family() != target.family() {
            return Err(AmountError::IncompatibleUnits {
                from: self.unit.to_string(),
                to: target.to_string(),
            });
        }
        let from = self.unit.decimals();
        let to = target.decimals();
        let value = if from >= to {
            self.value
                .checked_mul(pow10(from - to)?)
                .ok_or(AmountError::Overflow)?
        } else {
            let divisor = pow10(to - from)?;
            if self.value % divisor != 0 {
                return Err(AmountError::NonIntegral {
                    value: self.value,
                    from: self.unit.to_string(),
                    to: target.to_string(),
                });
            }
            self.value / divisor
        };
        Ok(Amount::new(value, target.clone()))
    }

    fn same_unit(&self, other: &Amount) -> Result<(), AmountError> {
        if self.unit != other.unit {
            return Err(AmountError::UnitMismatch {
                left: self.unit.to_string(),
                right: other.unit.to_string(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Amount) -> Result<Amount, AmountError> {
        self.same_unit(other)?;
        let value = self
            .value
            .checked_add(other.value)
            .ok_or(AmountError::Overflow)?;
        Ok(Amount::new(value, self.unit.clone()))
    }

    pub fn checked_sub(&self, other: &Amount) -> Result<Amount, AmountError> {
        self.same_unit(other)?;
        let value = self
            .value
            .checked_sub(other.value)
            .ok_or(AmountError::Overflow)?;
        Ok(Amount::new(value, self.unit.clone()))
    }
}

/// `convert_unit` as a free function.
pub fn convert_unit(amount: &Amount, target: &Unit) -> Result<Amount, AmountError> {
    amount.convert(target)
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}
