//! Lower bounds on the critical values, valid under super-uniformity.

use super::config::Procedure;
use crate::scalar::Scalar;

/// Real-valued threshold whose floor in the merged support bounds `τ_k`
/// from below. Step-up procedures need `tau_m` for `k < m`.
pub fn tau_min_threshold<T: Scalar>(
    procedure: Procedure,
    k: usize,
    m: usize,
    alpha: T,
    lambda: T,
    tau_m: T,
) -> T {
    let one = T::one();
    let kt = T::count(k);
    let mt = T::count(m);
    let bh = alpha * kt / mt;
    match procedure {
        Procedure::DbhSu => bh / (one + alpha),
        Procedure::DbhSd => bh / (one + bh),
        Procedure::AdbhSu if k == m => alpha / (one + alpha),
        Procedure::AdbhSu => tau_m.min((one - tau_m) * alpha * kt / (mt - kt + one)),
        Procedure::AdbhSd => alpha * kt / (mt - (one - alpha) * kt + one),
        Procedure::Dbr => lambda.min((one - lambda) * alpha * kt / (mt - kt + one)),
    }
}
