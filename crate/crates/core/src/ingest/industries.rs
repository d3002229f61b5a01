/// Industry grouping used for the monthly employment responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Industry {
    /// Key used in the `industry` column of employment files.
    pub key: &'static str,
    pub name: &'static str,
    pub naics: &'static [&'static str],
}

pub const INDUSTRIES: &[Industry] = &[
    Industry {
        key: "oil_drilling_extraction",
        name: "Oil Drilling & Extraction",
        naics: &["211", "213111", "213112"],
    },
    Industry {
        key: "mining_quarrying",
        name: "Mining & Quarrying",
        naics: &["212", "213113", "213114", "213115"],
    },
    Industry {
        key: "clean_energy_generation",
        name: "Clean Energy Generation",
        naics: &["221111", "221112", "221113", "221114", "221115", "221116"],
    },
    Industry {
        key: "aerospace_manufacturing",
        name: "Aerospace Manufacturing",
        naics: &["3364"],
    },
    Industry {
        key: "ship_manufacturing",
        name: "Ship Manufacturing",
        naics: &["336992"],
    },
    Industry {
        key: "tank_manufacturing",
        name: "Tank Manufacturing",
        naics: &["3366"],
    },
];

impl Industry {
    pub fn by_key(key: &str) -> Option<&'static Industry> {
        INDUSTRIES.iter().find(|i| i.key == key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_unique_and_codes_disjoint() {
        for (i, a) in INDUSTRIES.iter().enumerate() {
            for b in &INDUSTRIES[i + 1..] {
                assert_ne!(a.key, b.key);
                assert!(a.naics.iter().all(|c| !b.naics.contains(c)));
            }
        }
        assert_eq!(Industry::by_key("aerospace_manufacturing").unwrap().naics, &["3364"]);
    }
}
