//! Command-line front end and file formats for `sumfree-core`.

pub mod app;
pub mod formats;
