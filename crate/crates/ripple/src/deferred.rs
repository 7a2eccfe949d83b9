//! Checks and escrows: payments that settle later.

use crate::ledger::{RippleError, RippleLedger};
use crate::offers::Asset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub id: u64,
    pub sender: String,
    pub receiver: String,
    pub asset: Asset,
    pub face: i128,
    pub remaining: i128,
    pub expiration: u64,
}

/// XRP set aside for a receiver, releasable in `[release_time, expiry)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Escrow {
    pub id: u64,
    pub sender: String,
    pub receiver: String,
    pub drops: i128,
    pub release_time: u64,
    pub expiry: u64,
}

impl RippleLedger {
    pub fn check(&self, id: u64) -> Option<&Check> {
        self.checks.get(&id)
    }

    pub fn escrow(&self, id: u64) -> Option<&Escrow> {
        self.escrows.get(&id)
    }

    /// Writes a check. Funds are not checked until it is cashed.
    pub fn write_check(
        &mut self,
        sender: &str,
        receiver: &str,
        asset: Asset,
        face: i128,
        expiration: u64,
    ) -> Result<u64, RippleError> {
        if sender == receiver {
            return Err(RippleError::SelfCheck);
        }
        if face <= 0 {
            return Err(RippleError::Negative);
        }
        if self.account(receiver).is_none() {
            return Err(RippleError::UnknownAccount(receiver.to_string()));
        }
        self.charge_object(sender)?;
        let id = self.next_seq();
        self.checks.insert(
            id,
            Check {
                id,
                sender: sender.to_string(),
                receiver: receiver.to_string(),
                asset,
                face,
                remaining: face,
                expiration,
            },
        );
        Ok(id)
    }

    /// Cashes part or all of a check. What is left stays cashable.
    pub fn cash_check(
        &mut self,
        id: u64,
        by: &str,
        amount: i128,
        now: u64,
    ) -> Result<i128, RippleError> {
        let check = self
            .checks
            .get(&id)
            .ok_or(RippleError::UnknownObject { kind: "check", id })?
            .clone();
        if by != check.receiver {
            return Err(RippleError::NotParty(by.to_string()));
        }
        if now >= check.expiration {
            return Err(RippleError::Expired);
        }
        if amount <= 0 {
            return Err(RippleError::Negative);
        }
        if amount > check.remaining {
            return Err(RippleError::ExceedsFace {
                amount,
                remaining: check.remaining,
            });
        }
        if self.holding(&check.sender, &check.asset) < amount {
            return Err(RippleError::SenderUnfunded(check.sender.clone()));
        }
        self.move_asset(&check.sender, &check.receiver, &check.asset, amount);
        let left = check.remaining - amount;
        if left == 0 {
            self.checks.remove(&id);
            self.release_object(&check.sender);
        } else {
            self.checks.get_mut(&id).expect("present").remaining = left;
        }
        Ok(amount)
    }

    /// Either party may cancel; anyone may clear an expired check.
    pub fn cancel_check(&mut self, id: u64, by: &str, now: u64) -> Result<(), RippleError> {
        let check = self
            .checks
            .get(&id)
            .ok_or(RippleError::UnknownObject { kind: "check", id })?;
        if by != check.sender && by != check.receiver && now < check.expiration {
            return Err(RippleError::NotParty(by.to_string()));
        }
        let sender = check.sender.clone();
        self.checks.remove(&id);
        self.release_object(&sender);
        Ok(())
    }

    /// Locks XRP right away. Sending to oneself is allowed.
    pub fn create_escrow(
        &mut self,
        sender: &str,
        receiver: &str,
        drops: i128,
        release_time: u64,
        expiry: u64,
    ) -> Result<u64, RippleError> {
        if drops <= 0 {
            return Err(RippleError::Negative);
        }
        if self.account(receiver).is_none() {
            return Err(RippleError::UnknownAccount(receiver.to_string()));
        }
        let reserve_after = self.reserve(sender) + self.config.owner_reserve;
        let acct = self
            .account(sender)
            .ok_or_else(|| RippleError::UnknownAccount(sender.to_string()))?;
        let left = acct.xrp_balance - drops;
        if left < reserve_after {
            return Err(RippleError::BelowReserve {
                account: sender.to_string(),
                left,
                reserve: reserve_after,
            });
        }
        self.charge_object(sender)?;
        self.account_mut(sender)?.xrp_balance -= drops;
        let id = self.next_seq();
        self.escrows.insert(
            id,
            Escrow {
                id,
                sender: sender.to_string(),
                receiver: receiver.to_string(),
                drops,
                release_time,
                expiry,
            },
        );
        Ok(id)
    }

    pub fn finish_escrow(&mut self, id: u64, now: u64) -> Result<i128, RippleError> {
        let e = self
            .escrows
            .get(&id)
            .ok_or(RippleError::UnknownObject { kind: "escrow", id })?;
        if now < e.release_time {
            return Err(RippleError::NotYetReleasable);
        }
        if now >= e.expiry {
            return Err(RippleError::Expired);
        }
        let e = self.escrows.remove(&id).expect("present");
        self.ensure_account(&e.receiver).xrp_balance += e.drops;
        self.release_object(&e.sender);
        Ok(e.drops)
    }

    /// Returns the XRP to the sender once the escrow has expired.
    pub fn cancel_escrow(&mut self, id: u64, now: u64) -> Result<i128, RippleError> {
        let e = self
            .escrows
            .get(&id)
            .ok_or(RippleError::UnknownObject { kind: "escrow", id })?;
        if now < e.expiry {
            return Err(RippleError::EscrowActive);
        }
        let e = self.escrows.remove(&id).expect("present");
        self.ensure_account(&e.sender).xrp_balance += e.drops;
        self.release_object(&e.sender);
        Ok(e.drops)
    }
}

#[cfg(test)]
mod tests {
    use crate::ledger::{RippleConfig, RippleLedger, DROPS_PER_XRP};
    use crate::offers::Asset;

    fn ledger() -> RippleLedger {
        let mut l = RippleLedger::new(RippleConfig::default());
        l.fund("s", 1000 * DROPS_PER_XRP);
        l.fund("r", 50 * DROPS_PER_XRP);
        l
    }

    #[test]
    fn partial_cash_leaves_remainder() {
        let mut l = ledger();
        let id = l.write_check("s", "r", Asset::Xrp, 100, 10).unwrap();
        assert_eq!(l.cash_check(id, "r", 40, 1), Ok(40));
        assert_eq!(l.check(id).unwrap().remaining, 60);
        assert_eq!(
            l.cash_check(id, "r", 61, 2).unwrap_err().code(),
            "ripple.exceeds-face"
        );
        assert_eq!(l.cash_check(id, "r", 60, 2), Ok(60));
        assert!(l.check(id).is_none());
        assert_eq!(l.account("s").unwrap().owned_objects, 0);
    }

    #[test]
    fn expired_check_cannot_be_cashed() {
        let mut l = ledger();
        let id = l.write_check("s", "r", Asset::Xrp, 100, 10).unwrap();
        assert_eq!(
            l.cash_check(id, "r", 1, 10).unwrap_err().code(),
            "ripple.expired"
        );
        assert!(l.cancel_check(id, "stranger", 11).is_ok());
    }

    #[test]
    fn funds_checked_only_when_cashing() {
        let mut l = ledger();
        let id = l
            .write_check("s", "r", Asset::issued("USD", "gw"), 30, 10)
            .unwrap();
        assert_eq!(
            l.cash_check(id, "r", 30, 1).unwrap_err().code(),
            "ripple.sender-unfunded-at-cash"
        );
        l.shift_debt("gw", "s", "USD", 30);
        assert_eq!(l.cash_check(id, "r", 30, 1), Ok(30));
        assert_eq!(l.owed("gw", "r", "USD"), 30);
    }

    #[test]
    fn self_checks_rejected_self_escrow_allowed() {
        let mut l = ledger();
        assert_eq!(
            l.write_check("s", "s", Asset::Xrp, 1, 5)
                .unwrap_err()
                .code(),
            "ripple.self-check"
        );
        let id = l.create_escrow("s", "s", 10, 1, 5).unwrap();
        assert_eq!(l.finish_escrow(id, 2), Ok(10));
    }

    #[test]
    fn escrow_lifecycle() {
        let mut l = ledger();
        let total = l.total_xrp();
        let before = l.account("r").unwrap().xrp_balance;
        let id = l.create_escrow("s", "r", 7 * DROPS_PER_XRP, 5, 10).unwrap();
        assert_eq!(l.total_xrp(), total);
        assert_eq!(
            l.finish_escrow(id, 4).unwrap_err().code(),
            "ripple.not-yet-releasable"
        );
        assert_eq!(
            l.cancel_escrow(id, 6).unwrap_err().code(),
            "ripple.escrow-active"
        );
        assert_eq!(l.finish_escrow(id, 5), Ok(7 * DROPS_PER_XRP));
        assert_eq!(
            l.account("r").unwrap().xrp_balance,
            before + 7 * DROPS_PER_XRP
        );

        let id = l.create_escrow("s", "r", 3, 5, 10).unwrap();
        assert_eq!(
            l.finish_escrow(id, 10).unwrap_err().code(),
            "ripple.expired"
        );
        let s_before = l.account("s").unwrap().xrp_balance;
        assert_eq!(l.cancel_escrow(id, 10), Ok(3));
        assert_eq!(l.account("s").unwrap().xrp_balance, s_before + 3);
        assert_eq!(l.total_xrp(), total);
    }
}
