//! Noise channel of an expanding cosmological horizon on truncated Fock
//! spaces, and the entanglement measures of three-party states pushed
//! through it.
//!
//! An observer in an exponentially expanding spacetime sees the vacuum of a
//! global mode as a two-mode squeezed state over paired number states,
//!
//! ```text
//! |0>  ->  (1/cosh g) sum_n tanh^n g |n, n>
//! |1>  ->  (1/cosh^2 g) sum_n tanh^n g sqrt(n+1) |n+1, n>
//! ```
//!
//! with the squeezing parameter g ("expansion rate") set by the horizon
//! scale. Tracing the hidden partner mode turns the qubit {|0>, |1>} into
//! the input of a noisy bosonic channel with Kraus operators
//!
//! ```text
//! A_n = (tanh^n g / (sqrt(n!) cosh g)) (b+)^n (1/cosh g)^(b+ b)
//! ```
//!
//! The crate truncates everything at occupation N, chosen so the discarded
//! squeezed-series tail tanh^(2(N+1)) g sits below a tolerance, and then
//! asks what the channel does to one leg of a GHZ or W state: entanglement
//! fidelity, bipartite and tripartite mutual information, and negativity of
//! the partial transpose, each as a function of the rate.
//!
//! Layout of the crate:
//!
//! * [`fock`]: multimode kets, density operators, partial trace and partial
//!   transpose, and a block-splitting symmetric eigensolver.
//! * [`channel`]: truncation selection, the squeezed images of |0> and |1>,
//!   the banded Kraus family, channel application and the Choi spectrum.
//! * [`states`]: GHZ and W states, their purified evolution under the
//!   channel, and the directly assembled two-party output states.
//! * [`measures`]: the numeric measures, their printed closed-form
//!   counterparts, and the negativity threshold bisection.
//! * [`sweep`]: rate sweeps with deterministic CSV/JSON emission, the
//!   threshold report and the channel verification report.
//!
//! Numeric values computed from the truncated operators are the ground
//! truth throughout; closed forms ride along as an audit overlay and the
//! sweep reports the per-row difference, because the two genuinely disagree
//! for several measures. Every sweep is deterministic: identical
//! configurations produce byte-identical output whether or not the
//! `parallel` feature (rayon) is enabled.

pub mod error;
pub mod channel;
pub mod fock;
pub mod measures;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
