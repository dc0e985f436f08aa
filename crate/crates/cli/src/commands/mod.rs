pub mod lambda;
pub mod needle;
pub mod plot;
pub mod verify;

use crate::config::RunConfig;

/// Degrees from `--n`, or `default` when none were given.
pub fn degrees(config: &RunConfig, default: &[usize]) -> Vec<usize> {
    if config.degrees.is_empty() {
        default.to_vec()
    } else {
        config.degrees.clone()
    }
}

/// Shortest round-trip rendering; empty for missing values.
pub fn num(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}
