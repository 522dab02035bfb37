//! Config-driven sweeps over the `udw-core` experiments, written as CSV with
//! a commented metadata header.

pub mod config;
pub mod run;

pub use config::{SweepConfig, Violation};
pub use run::{run, ResultTable, THREADS_ENV};

/// Presets shipped with the binary, by name.
pub const PRESETS: [(&str, &str); 6] = [
    ("fig1", include_str!("../presets/fig1.toml")),
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4a", include_str!("../presets/fig4a.toml")),
    ("fig4b", include_str!("../presets/fig4b.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for (name, text) in PRESETS {
            if let Err(v) = SweepConfig::parse(text) {
                panic!("{name}: {v:?}");
            }
        }
    }
}
