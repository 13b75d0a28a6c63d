//! Elicit which constructor properties (reflexivity, commutativity, ...) the
//! items of a small formal library actually need.
//!
//! The pipeline: [`frontend`] reads a corpus, [`verifier`] decides whether an
//! item verifies under an environment of property attachments, [`elicitor`]
//! detaches attachments one at a time to find direct needs, [`depgraph`]
//! closes them over the item reference graph, and [`driver`] turns the result
//! into reports and a CLI.

pub mod corpus;
pub mod frontend;
pub mod verifier;
pub mod elicitor;
pub mod depgraph;
pub mod driver;
