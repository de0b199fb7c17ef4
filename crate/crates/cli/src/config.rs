use serde::Deserialize;

use fibcat::free_product::Strategy;

/// Enumeration bounds and defaults, read from `--config`.
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Cap on closure vertex bounds; also the bound used when a fibration
    /// file gives none.
    pub max_vertices: usize,
    pub partition_bound: usize,
    /// Cap on `n^(k+l)` for orbit and dimension queries.
    pub tuple_bound: usize,
    /// Strategy for closure specs and fibrations that do not name one.
    pub strategy: Strategy,
    pub coset_limit: usize,
    pub bigint: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_vertices: 6,
            partition_bound: fibcat::partition::DEFAULT_PARTITION_BOUND,
            tuple_bound: fibcat::rep::DEFAULT_TUPLE_BOUND,
            strategy: Strategy::Auto,
            coset_limit: fibcat::free_product::DEFAULT_COSET_LIMIT,
            bigint: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), String> {
        let bounds = [
            ("max_vertices", self.max_vertices),
            ("partition_bound", self.partition_bound),
            ("tuple_bound", self.tuple_bound),
            ("coset_limit", self.coset_limit),
        ];
        match bounds.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(format!("config: {name} must be positive")),
            None => Ok(()),
        }
    }
}
