//! Parsers for prediction-market quotes, asset prices, vintage-stamped macro
//! data, the release calendar and monthly employment files.
//!
//! Every CSV reader accepts `#` comment lines, so files written by the CLI
//! (which carry a provenance header) parse back unchanged.

pub(crate) mod csvio;
mod industries;
mod market;
mod series;
mod vintage;

pub use industries::{Industry, INDUSTRIES};
pub use market::{
    contract_party_year, daily_weight, implied_probabilities, market_panel, monthly_volume,
    parse_market_file, parse_market_str, write_market_csv, ContractQuote, MarketPanel, VolumeRule,
};
pub use series::{
    parse_asset_file, parse_asset_str, parse_employment_file, parse_employment_str,
    parse_monthly_file, parse_monthly_str, write_asset_csv, write_employment_csv,
    write_monthly_csv, AssetPrices,
};
pub use vintage::{
    parse_release_file, parse_release_str, parse_vintage_file, parse_vintage_str,
    write_release_csv, write_vintage_csv, ReleaseCalendar, VintageRecord, VintageStore,
};
