//! File formats, the LfD/SaLfD metrics harness, and the HTTP service around
//! [`salfd_core`].

pub mod metrics;
pub mod planfile;
pub mod server;
pub mod tracefile;
