//! Cross Learning, voter populations and replicator dynamics on stateless
//! multi-armed bandits.
//!
//! The same probability vector can be read as a learner's policy or as the
//! type shares of a population. This crate simulates three views of its
//! evolution and lets them be compared on identical bandits:
//!
//! * single-agent updates ([`policy`]): Cross Learning, Maynard-Cross
//!   Learning and their batched variants;
//! * finite populations ([`population`]): the voter rule and the weighted
//!   voter rule;
//! * the mean-field limits ([`replicator`]): Taylor and Maynard Smith
//!   replicator dynamics, integrated on privileged reward means.
//!
//! [`harness`] runs seeded experiments over all of them and writes
//! aggregate CSVs; [`cli`] is the command-line front end.
//!
//! ```
//! use swarmrl::env::{make_env, EnvFamily};
//! use swarmrl::policy::{cl_update, expected_cl_direction, Simplex};
//!
//! let env = make_env(EnvFamily::Spread, 4, 1.0, 7)?;
//! let q = env.estimate_q(10_000)?;
//! let pi = Simplex::uniform(4);
//! let drift = expected_cl_direction(&pi, &q);
//! assert!(drift.iter().sum::<f64>().abs() < 1e-12);
//!
//! let next = cl_update(&pi, 2, 0.5, 0.1)?;
//! assert!((next.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! # Ok::<(), swarmrl::Error>(())
//! ```

pub mod cli;
pub mod env;
mod error;
pub mod harness;
pub mod policy;
pub mod population;
pub mod replicator;
pub mod rng;
pub mod rule;
pub mod trajectory;

pub use error::{Error, Result};
pub use rule::Rule;

// Chapters of the guide in `book/`; their code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/environments.md")]
    mod environments {}
    #[doc = include_str!("../../../book/src/learners.md")]
    mod learners {}
    #[doc = include_str!("../../../book/src/populations.md")]
    mod populations {}
    #[doc = include_str!("../../../book/src/replicator.md")]
    mod replicator {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
