use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::csvio;

const HEADER: &[&str] = &["date", "label", "description"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NarrativeEvent {
    pub date: NaiveDate,
    pub label: String,
    pub description: String,
}

/// Campaign events with unique dates, kept in date order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NarrativeEventList {
    events: Vec<NarrativeEvent>,
}

impl NarrativeEventList {
    pub fn new(mut events: Vec<NarrativeEvent>) -> Result<Self> {
        events.sort_by_key(|e| e.date);
        if let Some(w) = events.windows(2).find(|w| w[0].date == w[1].date) {
            return Err(Error::InvalidConfig(format!("two narrative events on {}", w[0].date)));
        }
        Ok(Self { events })
    }

    pub fn events(&self) -> &[NarrativeEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Event closest to `date` (ties go to the earlier one).
    pub fn nearest(&self, date: NaiveDate) -> Option<&NarrativeEvent> {
        self.events.iter().min_by_key(|e| ((e.date - date).num_days().abs(), e.date))
    }
}

pub fn parse_events_str(text: &str, label: &str) -> Result<NarrativeEventList> {
    let mut events = Vec::new();
    for (line, rec) in csvio::records(text, label, HEADER)? {
        let date = csvio::date_field(&rec, 0, "date", label, line)?;
        events.push(NarrativeEvent {
            date,
            label: rec.get(1).unwrap_or("").to_string(),
            description: rec.get(2).unwrap_or("").to_string(),
        });
    }
    NarrativeEventList::new(events).map_err(|e| Error::Value {
        path: label.into(),
        line: 0,
        msg: e.to_string(),
    })
}

pub fn parse_events_file(path: impl AsRef<Path>) -> Result<NarrativeEventList> {
    let path = path.as_ref();
    parse_events_str(&csvio::read_file(path)?, &path.display().to_string())
}
