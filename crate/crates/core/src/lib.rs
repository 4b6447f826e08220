pub mod bench;
pub mod envy;
pub mod error;
pub mod io;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod random;
pub mod reductions;
pub mod welfare;

/// Node budget for the exponential searches; `SHARE_ALLOC_NODE_CAP`
/// overrides the default of ten million.
pub fn node_cap() -> u64 {
    std::env::var("SHARE_ALLOC_NODE_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(10_000_000)
}
