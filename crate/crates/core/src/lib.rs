//! Workbench for distinguishing and search attacks on non-dual discrete
//! Ring-LWE modulo a prime of residue degree two, plus Fourier-analytic
//! uniformity estimates for 2-power cyclotomic rings.
//!
//! Module map:
//!
//! * [`ffield`] — `F_q` and `F_{q^2}` arithmetic, Legendre symbols, primality.
//! * [`numberring`] — the `Q(ζ_p, √d)` family ring and 2-power cyclotomic
//!   rings: multiplication in `R/qR`, canonical embedding, reduction mod a prime.
//! * [`sampler`] — discrete Gaussians on `Z` and on `ι(R)`, shifted binomials,
//!   and the tail bounds used by the family theorem.
//! * [`oracle`] — RLWE sample sets and their JSONL file format.
//! * [`attack`] — the two-bin and coset chi-square attacks.
//! * [`family`] — validation and search of vulnerable `(p, d, q)` triples.
//! * [`estimator`] — `ε(m, q, k)` in residue degree 1 and 2, the Gauss-sum
//!   bound, and brute-force oracles.
//! * [`cli`] — the `rlwe` command line.

pub mod attack;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod family;
pub mod ffield;
pub mod numberring;
pub mod oracle;
pub mod sampler;

pub use error::{Error, Result};
pub use ffield::{FieldCtx, Fq2};
pub use numberring::{CycloRing, FamilyRing, Ring, RingElem};
