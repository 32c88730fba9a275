//! Scenario files shipped with the crate, one per reference study, named after the study it reproduces.

/// `(name, document)` pairs.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("fig2_tau14", include_str!("../scenarios/fig2_tau14.scenario")),
    ("fig2_tau30", include_str!("../scenarios/fig2_tau30.scenario")),
    ("fig3", include_str!("../scenarios/fig3.scenario")),
    ("fig4", include_str!("../scenarios/fig4.scenario")),
    ("fig6_mixed", include_str!("../scenarios/fig6_mixed.scenario")),
    ("fig7", include_str!("../scenarios/fig7.scenario")),
    ("fig8_regions", include_str!("../scenarios/fig8_regions.scenario")),
];

/// Document of a bundled scenario by name.
pub fn document(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, doc)| *doc)
}

/// Parsed bundled scenario.
pub fn scenario(name: &str) -> crate::Result<crate::Scenario> {
    let doc = document(name).ok_or_else(|| crate::Error::Scenario(format!("no bundled scenario named '{name}'")))?;
    crate::parse_scenario(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ScenarioFile;

    #[test]
    fn bundled_files_parse_and_write_back_unchanged() {
        for (name, doc) in SCENARIOS {
            let parsed = ScenarioFile::parse(doc).unwrap();
            parsed.to_scenario().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&parsed.to_toml(), doc, "{name}");
            let via_scenario = ScenarioFile::from_scenario(&parsed.to_scenario().unwrap());
            assert_eq!(&via_scenario.to_toml(), doc, "{name}");
        }
    }

    #[test]
    fn unknown_name() {
        assert!(scenario("missing").is_err());
        assert!(scenario("fig3").is_ok());
    }
}
