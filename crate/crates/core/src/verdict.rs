//! Outcomes of identity checks.

use crate::error::Result;
use crate::formal_calculus::series::format_monomial;
use crate::formal_calculus::{Coeff, Series, Window};
use serde::{Deserialize, Serialize};

/// Where two sides of an identity first disagree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MismatchInfo {
    pub identity: String,
    pub monomial: String,
    pub left: String,
    pub right: String,
}

/// `None` when the identity holds on the window.
pub type Verdict = Result<Option<MismatchInfo>>;

/// Compares two series on a window over their merged variables.
pub fn compare_series<C: Coeff>(
    identity: &str,
    a: &Series<C>,
    b: &Series<C>,
    window: &Window,
    show: impl Fn(&C) -> String,
) -> Verdict {
    Ok(a.first_mismatch(b, window)?.map(|m| MismatchInfo {
        identity: identity.to_string(),
        monomial: format_monomial(&m.vars, &m.monomial),
        left: show(&m.left),
        right: show(&m.right),
    }))
}

/// A mismatch that is not tied to a series monomial.
pub fn mismatch(identity: &str, at: impl Into<String>, left: impl Into<String>, right: impl Into<String>) -> Option<MismatchInfo> {
    Some(MismatchInfo { identity: identity.to_string(), monomial: at.into(), left: left.into(), right: right.into() })
}

/// Runs checks in order and returns the first failure.
pub fn first_failure(checks: impl IntoIterator<Item = Verdict>) -> Verdict {
    for c in checks {
        if let Some(m) = c? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}
