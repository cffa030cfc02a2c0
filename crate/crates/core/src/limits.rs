/// Size guards for the exhaustive parts of the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest history space `enumerate` will build.
    pub max_histories: usize,
    /// Largest count-vector lattice (product of `count_i + 1` per sector).
    pub max_count_vectors: u64,
    /// Subsets walked by the brute-force precluded-event counter.
    pub max_count_subsets: u64,
    /// Subsets walked by the brute-force primitive enumerator.
    pub max_primitive_subsets: u64,
    /// Explicit supports materialized by primitive expansion.
    pub max_supports: u64,
}

/// Environment variable overriding both brute-force subset caps.
pub const MAX_SUBSETS_ENV: &str = "COEVENT_MAX_SUBSETS";

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_histories: 1 << 24,
            max_count_vectors: 1 << 24,
            max_count_subsets: 1 << 27,
            max_primitive_subsets: 1 << 20,
            max_supports: 1 << 22,
        }
    }
}

impl Limits {
    /// Defaults, with `COEVENT_MAX_SUBSETS` applied when set and parseable.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(cap) = std::env::var(MAX_SUBSETS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            limits.max_count_subsets = cap;
            limits.max_primitive_subsets = cap;
        }
        limits
    }
}
