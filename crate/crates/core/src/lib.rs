//! Record-height statistics of set partitions in restricted-growth form.
//!
//! Four independent routes to the same numbers:
//!
//! * [`oracle`] enumerates every partition and counts,
//! * [`closedform`] evaluates the exact Stirling/Bell formulas,
//! * [`series`] expands the product generating functions and reads off
//!   coefficients,
//! * [`asym`] gives the large-`n` estimates.
//!
//! [`cli`] ties them together into tables, cross-verification reports and
//! asymptotic reports.

pub mod asym;
pub mod cli;
pub mod closedform;
pub mod combinum;
pub mod oracle;
pub mod rgf;
pub mod series;
