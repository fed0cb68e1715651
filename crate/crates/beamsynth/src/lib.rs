//! Excitation synthesis for a half-wavelength uniform linear array.
//!
//! The crate turns a beam-pointing task into quadratic spin problems,
//! runs a portfolio of spin-dynamics heuristics over them, distills the
//! candidate pool by clustering, polishes survivors with an analytic
//! gradient branch, and scores the synthesized far-field pattern against
//! a pointing/beamwidth/sidelobe rubric.
//!
//! Module map:
//!
//! * [`array`]: far-field model (element factor, steering, patterns).
//! * [`encoding`]: spin-to-phase and spin-to-amplitude codes.
//! * [`ising`]: blended mainlobe/sidelobe spin objectives.
//! * [`solvers`]: seven batched spin-dynamics heuristics plus brute force.
//! * [`refine`]: candidate dedup and agglomerative distillation.
//! * [`gradient`]: analytic ratio loss, Adam, and the classical branch.
//! * [`scoring`]: competition-style scoring of synthesized patterns.
//! * [`cases`]: benchmark case specs and their generator.
//! * [`config`]: run configuration (TOML-backed) and fingerprinting.
//! * [`pipeline`]: budgeted per-case orchestration of all of the above.
//! * [`io`]: file formats (cases, results, summaries, pattern CSV).
//!
//! Angles are degrees at every public boundary. Spins are `i8` values in
//! `{-1, +1}`. Every randomized component takes an explicit seed and is
//! reproducible bit-for-bit on one platform.

pub mod array;
pub mod cases;
pub mod config;
pub mod encoding;
pub mod error;
pub mod gradient;
pub mod io;
pub mod ising;
pub mod pipeline;
pub mod refine;
pub mod scoring;
pub mod seed;
pub mod solvers;

pub use error::{Error, Result};
