//! Exact symbolic layer: free-group words, the integral group ring, Fox
//! derivatives, surface presentations and 2-chains in the normalized bar
//! resolution.

mod chain;
mod group_ring;
mod presentation;
mod word;

pub use chain::TwoChain;
pub use group_ring::GroupRingElement;
pub use presentation::{RelatorLayout, SurfacePresentation};
pub use word::{reduce_word, Letter, Word};
