//! Numerical verdicts for the proposition-level facts.
//!
//! Each check returns a [`Verdict`] whose `pass` field is the documented
//! comparison between `lhs` and `rhs`.

use serde::Serialize;

mod ballot;
mod barrier;
mod lower;
mod martingale;
mod moments;
mod parseval;
mod tails;

pub use ballot::{ballot_probe, BallotConfig, HTag, VarianceProfile, BALLOT_BAND};
pub use barrier::{
    barrier_event_eval, barrier_failure_probe, BarrierConfig, BarrierEvent, BarrierProbe, BarrierRow,
};
pub use lower::{deterministic_term, lower_bound_trig_check, trig_identity_check, TrigIntegrals};
pub use martingale::{submartingale_step_y, supermartingale_factor, supermartingale_factor_toy};
pub use moments::hypercontractive_check;
pub use parseval::{parseval_check, parseval_check_auto, DirichletPolynomial, ParsevalParts};
pub use tails::{chernoff_admissible_max, chernoff_tail_probe, euler_barrier_probe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictClass {
    /// Both sides are the same quantity computed two ways.
    IdentityExact,
    /// An inequality with an explicit constant.
    BoundKnownConstant,
    /// An asymptotic with unspecified constants, judged against a recorded band.
    Band,
    /// A desk-scale probe of an asymptotic statement; not evidence either way.
    Qualitative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub class: VerdictClass,
    pub diagnostics: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, class: VerdictClass, lhs: f64, rhs: f64, tolerance: f64, pass: bool) -> Self {
        Self { name: name.into(), lhs, rhs, tolerance, pass, class, diagnostics: String::new() }
    }

    pub fn with_diagnostics(mut self, d: impl Into<String>) -> Self {
        self.diagnostics = d.into();
        self
    }

    /// One line for logs and the acceptance output.
    pub fn summary(&self) -> String {
        format!(
            "[{}] {} ({:?}): lhs={:.9e} rhs={:.9e} tol={:.1e}{}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.class,
            self.lhs,
            self.rhs,
            self.tolerance,
            if self.diagnostics.is_empty() { String::new() } else { format!(" | {}", self.diagnostics) }
        )
    }
}
