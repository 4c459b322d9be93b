//! Estimating the number of communities in a stochastic block model.
//!
//! The main entry point is [`selector::select_k`]: for each candidate `k` it
//! runs adjacency spectral clustering, computes the block statistics of the
//! resulting labels, and scores them with a penalized criterion. The default
//! criterion is the decomposed normalized maximum likelihood (DNML), whose
//! normalizers reduce to products of multinomial stochastic complexities and
//! are therefore exact and cheap. Corrected BIC and integrated likelihood are
//! provided as baselines.
//!
//! ```
//! use dnml_sbm::{select_k, DetectorConfig, Graph, Method, PenaltyConfig};
//!
//! let edges = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j)));
//! let shifted = edges.clone().map(|(i, j)| (i + 5, j + 5));
//! let graph = Graph::from_edges(10, edges.chain(shifted)).unwrap();
//! let result = select_k(
//!     &graph,
//!     4,
//!     Method::Dnml,
//!     &PenaltyConfig::default(),
//!     &DetectorConfig::default(),
//! )
//! .unwrap();
//! assert!(result.k_hat >= 1 && result.k_hat <= 4);
//! ```

pub mod criteria;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod sampler;
pub mod selector;
pub mod simulate;
pub mod special;
pub mod spectral;

pub use criteria::{CriterionScore, Method, PenaltyConfig};
pub use error::{Error, Result};
pub use graph::{block_stats, BlockStats, Graph, Labeling};
pub use sampler::{SbmParams, Seed};
pub use selector::{select_k, select_k_all, SelectionResult};
pub use spectral::DetectorConfig;
