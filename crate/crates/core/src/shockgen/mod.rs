//! Election-shock construction.
//!
//! The Republican win probability is regressed on five daily lags of itself,
//! on contemporaneous and lagged financial/macro news and on the news
//! interacted with the incumbent-party dummy. The residual, in percentage
//! points, is the election shock. Narrative, crude-outcome and monthly
//! variants are derived from it.

mod design;
mod events;
mod news;
mod shocks;

pub use design::{
    build_election_design, build_onestep_design, column_labels, resolve_outcomes, ElectionDesign,
    DesignOptions, LAGS,
};
pub use events::{parse_events_file, parse_events_str, NarrativeEvent, NarrativeEventList};
pub use news::{IndicatorMode, NewsComponent, NewsInputs, NewsPanel, COMPONENTS};
pub use shocks::{
    crude_outcome_series, estimate_shocks, extract_shocks, monthly_aggregate, narrative_shocks,
    ShockEstimate, ShockSeries,
};
