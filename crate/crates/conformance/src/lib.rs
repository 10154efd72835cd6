//! Reference oracles, formula corpora and the exhaustive property suites
//! that cross-check `ccmu` against them.

pub mod corpus;
pub mod oracle;
pub mod report;
pub mod suites;
pub mod universe;
