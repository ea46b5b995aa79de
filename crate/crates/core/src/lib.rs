//! Verified positivity kernel for the trigonometric family `G` and its
//! hyperbolic mirror `F`: scalar evaluation, exact identity ledger, interval
//! enclosures, branch-and-bound certification and critical point search.
#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exec;
pub mod expr;
pub mod hp;
pub mod identities;
pub mod interval;
pub mod oracle;
pub mod certifier;
pub mod critical;
pub mod poly;
pub mod quasi;
pub mod scalar;

/// Engine version recorded in certificates and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
