//! Command-line front end for `tracelab`: argument model, command runners,
//! output rendering and the acceptance suite.

// `!(x > 0.0)` guards are how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use commands::{run, Outcome};
pub use config::RunConfig;

/// Caps the global rayon pool at `TRACELAB_THREADS` workers when set.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("TRACELAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("TRACELAB_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            anyhow::bail!("TRACELAB_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
