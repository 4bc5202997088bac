//! Exact symbolic layer: multivariate polynomials in x and the odd times,
//! linear phases, exponential-polynomial sums, tau-functions, and the
//! rational-in-(x-y) expressions built from them.
//!
//! Variable indexing convention used by the whole module tree: variable `j`
//! (j >= 1) stands for the time s_{2j-1}, and j = 1 is x itself (x and s_1 are
//! identified; shifting s_1 shifts x).

pub mod phase;
pub mod poly;
pub mod ratexp;
pub mod tau;
