//! Command-line front end for the reputation toolkit: argument types, the
//! command implementations, and the small CSV/manifest formats they share.
//! Split out as a library so integration tests can exercise the pieces
//! directly instead of scraping binary output.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod scores;
pub mod truth;
