//! Loading, validation, and alignment of the exogenous time series the
//! simulator consumes, plus baseline-history extraction and normalization
//! statistics.
//!
//! All series are hourly, start at midnight, and cover whole days. The six
//! input files share one timestamp axis; any gap, duplicate, or mismatch is
//! rejected at load time so everything downstream can index by slot without
//! checking.

pub mod synth;

use std::fmt;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economics::HOURS_PER_DAY;

/// Preceding similar days averaged into the baseline, working days.
pub const BASELINE_DAYS_WORKING: usize = 5;
/// Preceding similar days averaged into the baseline, non-working days.
pub const BASELINE_DAYS_NONWORKING: usize = 3;

/// Number of observation channels.
pub const STATE_DIM: usize = 9;

/// Timestamp format used by every CSV in and out.
pub const TIMESTAMP_FMT: &str = "%Y-%m-%dT%H:%M:%S";
/// Date format for the per-day schedule files.
pub const DATE_FMT: &str = "%Y-%m-%d";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{file}: missing column '{column}'")]
    MissingColumn { file: String, column: String },
    #[error("{file}: non-contiguous timestamps at row {row}: expected {expected}, found {found}")]
    NonContiguousTimestamps {
        file: String,
        row: usize,
        expected: String,
        found: String,
    },
    #[error("{file}: column '{column}' row {row}: value {value} must be {requirement}")]
    NegativeValue {
        file: String,
        column: String,
        row: usize,
        value: f64,
        requirement: &'static str,
    },
    #[error("{file}: series misaligned with loads.csv: {detail}")]
    MisalignedSeries { file: String, detail: String },
    #[error("{file}: column '{column}' row {row}: {detail}")]
    InvalidValue {
        file: String,
        column: String,
        row: usize,
        detail: String,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("day {day} needs {needed} preceding similar days, found {found}")]
    InsufficientHistory {
        day: usize,
        needed: usize,
        found: usize,
    },
    #[error("{file}: {source}")]
    Io {
        file: String,
        source: std::io::Error,
    },
    #[error("{file}: row {row}: {source}")]
    Csv {
        file: String,
        row: usize,
        source: csv::Error,
    },
}

/// Working / non-working calendar flag, as recorded in the load file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DayType {
    Working,
    NonWorking,
}

impl DayType {
    pub fn code(self) -> &'static str {
        match self {
            DayType::Working => "W",
            DayType::NonWorking => "N",
        }
    }

    /// Baseline history depth for this day type.
    pub fn baseline_days(self) -> usize {
        match self {
            DayType::Working => BASELINE_DAYS_WORKING,
            DayType::NonWorking => BASELINE_DAYS_NONWORKING,
        }
    }
}

impl fmt::Display for DayType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// One demand-response dispatch window. Slots are global hourly indices and
/// the window is inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrEvent {
    pub start_slot: usize,
    pub end_slot: usize,
    /// Invited response load, kWh.
    pub invited_load: f64,
    /// Declared unit compensation price, RMB/kWh.
    pub unit_price: f64,
}

impl DrEvent {
    pub fn contains(&self, slot: usize) -> bool {
        (self.start_slot..=self.end_slot).contains(&slot)
    }
}

/// The EV fleet's single daily presence interval. The vehicle is on site
/// during hours `arrival_hour..departure_hour` and leaves at the start of
/// `departure_hour`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvWindow {
    pub arrival_hour: usize,
    pub departure_hour: usize,
    /// SoC the pack returns with, after the day's driving.
    pub arrival_soc: f64,
}

/// Aligned hourly dataset for the whole horizon. Immutable after
/// construction; share it read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct ParkDataset {
    pub timestamps: Vec<NaiveDateTime>,
    /// Production-zone load per slot, kWh.
    pub production_load: Vec<f64>,
    /// Office-zone load per slot, kWh.
    pub office_load: Vec<f64>,
    /// PV energy per slot, kWh.
    pub pv_energy: Vec<f64>,
    /// Electricity price per slot, RMB/kWh.
    pub price: Vec<f64>,
    /// Outdoor temperature per slot, degC.
    pub outdoor_temp: Vec<f64>,
    /// Calendar flag per day.
    pub day_types: Vec<DayType>,
    /// EV presence window per day, absent when the fleet stays away.
    pub ev_days: Vec<Option<EvWindow>>,
    /// All DR dispatch windows, sorted by start slot.
    pub dr_events: Vec<DrEvent>,
}

/// Where the six input files live.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataPaths {
    pub loads: PathBuf,
    pub pv: PathBuf,
    pub price: PathBuf,
    pub weather: PathBuf,
    pub ev_schedule: PathBuf,
    pub dr_events: PathBuf,
}

impl DataPaths {
    /// Conventional file names under one directory.
    pub fn in_dir(dir: &Path) -> Self {
        DataPaths {
            loads: dir.join("loads.csv"),
            pv: dir.join("pv.csv"),
            price: dir.join("price.csv"),
            weather: dir.join("weather.csv"),
            ev_schedule: dir.join("ev_schedule.csv"),
            dr_events: dir.join("dr_events.csv"),
        }
    }
}

impl ParkDataset {
    pub fn num_slots(&self) -> usize {
        self.timestamps.len()
    }

    pub fn num_days(&self) -> usize {
        self.timestamps.len() / HOURS_PER_DAY
    }

    pub fn slot(&self, day: usize, hour: usize) -> usize {
        day * HOURS_PER_DAY + hour
    }

    pub fn date(&self, day: usize) -> NaiveDate {
        self.timestamps[self.slot(day, 0)].date()
    }

    pub fn day_type(&self, day: usize) -> DayType {
        self.day_types[day]
    }

    pub fn ev_window(&self, day: usize) -> Option<EvWindow> {
        self.ev_days[day]
    }

    /// DR event covering a global slot, if any.
    pub fn dr_event_at(&self, slot: usize) -> Option<&DrEvent> {
        self.dr_events.iter().find(|e| e.contains(slot))
    }

    pub fn day_has_dr(&self, day: usize) -> bool {
        let lo = self.slot(day, 0);
        let hi = lo + HOURS_PER_DAY - 1;
        self.dr_events
            .iter()
            .any(|e| e.start_slot <= hi && e.end_slot >= lo)
    }

    /// Days that satisfy the baseline-history precondition and can host an
    /// episode.
    pub fn eligible_days(&self, exclude_dr_days: bool) -> Vec<usize> {
        (0..self.num_days())
            .filter(|&d| baseline_history(self, d, exclude_dr_days).is_ok())
            .collect()
    }
}

fn io_err(file: &Path, source: std::io::Error) -> DataError {
    DataError::Io {
        file: file.display().to_string(),
        source,
    }
}

struct ColumnIndex {
    file: String,
    indices: Vec<usize>,
}

/// Resolves required header names to column positions.
fn resolve_columns(
    file: &Path,
    headers: &csv::StringRecord,
    names: &[&str],
) -> Result<ColumnIndex, DataError> {
    let mut indices = Vec::with_capacity(names.len());
    for name in names {
        let pos = headers.iter().position(|h| h.trim() == *name).ok_or_else(|| {
            DataError::MissingColumn {
                file: file.display().to_string(),
                column: name.to_string(),
            }
        })?;
        indices.push(pos);
    }
    Ok(ColumnIndex {
        file: file.display().to_string(),
        indices,
    })
}

impl ColumnIndex {
    fn get<'r>(&self, record: &'r csv::StringRecord, col: usize, row: usize, name: &str) -> Result<&'r str, DataError> {
        record
            .get(self.indices[col])
            .map(str::trim)
            .ok_or_else(|| DataError::InvalidValue {
                file: self.file.clone(),
                column: name.to_string(),
                row,
                detail: "row too short".to_string(),
            })
    }
}

fn parse_f64(file: &str, column: &str, row: usize, raw: &str) -> Result<f64, DataError> {
    raw.parse::<f64>().map_err(|_| DataError::InvalidValue {
        file: file.to_string(),
        column: column.to_string(),
        row,
        detail: format!("cannot parse '{raw}' as a number"),
    })
}

fn parse_timestamp(file: &str, row: usize, raw: &str) -> Result<NaiveDateTime, DataError> {
    NaiveDateTime::parse_from_str(raw, TIMESTAMP_FMT).map_err(|_| DataError::InvalidValue {
        file: file.to_string(),
        column: "timestamp".to_string(),
        row,
        detail: format!("cannot parse '{raw}' as an ISO-8601 hour"),
    })
}

fn parse_date(file: &str, row: usize, raw: &str) -> Result<NaiveDate, DataError> {
    NaiveDate::parse_from_str(raw, DATE_FMT).map_err(|_| DataError::InvalidValue {
        file: file.to_string(),
        column: "date".to_string(),
        row,
        detail: format!("cannot parse '{raw}' as a date"),
    })
}

fn open_reader(file: &Path) -> Result<csv::Reader<File>, DataError> {
    let f = File::open(file).map_err(|e| io_err(file, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(f))
}

/// Checks that a timestamp column is contiguous hourly and matches the
/// reference axis (when one is given).
fn check_axis(
    file: &str,
    timestamps: &[NaiveDateTime],
    reference: Option<&[NaiveDateTime]>,
) -> Result<(), DataError> {
    if timestamps.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    for (i, pair) in timestamps.windows(2).enumerate() {
        let expected = pair[0] + Duration::hours(1);
        if pair[1] != expected {
            return Err(DataError::NonContiguousTimestamps {
                file: file.to_string(),
                row: i + 2,
                expected: expected.format(TIMESTAMP_FMT).to_string(),
                found: pair[1].format(TIMESTAMP_FMT).to_string(),
            });
        }
    }
    if let Some(reference) = reference {
        if timestamps.len() != reference.len() {
            return Err(DataError::MisalignedSeries {
                file: file.to_string(),
                detail: format!(
                    "{} rows, expected {}",
                    timestamps.len(),
                    reference.len()
                ),
            });
        }
        if timestamps[0] != reference[0] {
            return Err(DataError::MisalignedSeries {
                file: file.to_string(),
                detail: format!(
                    "starts at {}, expected {}",
                    timestamps[0].format(TIMESTAMP_FMT),
                    reference[0].format(TIMESTAMP_FMT)
                ),
            });
        }
    }
    Ok(())
}

/// One value series keyed by timestamp (pv, price, weather all share this
/// shape).
fn load_value_series(
    file: &Path,
    value_column: &str,
    requirement: Option<&'static str>,
    reference: &[NaiveDateTime],
) -> Result<Vec<f64>, DataError> {
    let mut reader = open_reader(file)?;
    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv {
            file: file.display().to_string(),
            row: 1,
            source: e,
        })?
        .clone();
    let cols = resolve_columns(file, &headers, &["timestamp", value_column])?;
    let fname = file.display().to_string();

    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| DataError::Csv {
            file: fname.clone(),
            row,
            source: e,
        })?;
        let ts = parse_timestamp(&fname, row, cols.get(&record, 0, row, "timestamp")?)?;
        let v = parse_f64(&fname, value_column, row, cols.get(&record, 1, row, value_column)?)?;
        match requirement {
            Some(req @ ">= 0") if v < 0.0 => {
                return Err(DataError::NegativeValue {
                    file: fname,
                    column: value_column.to_string(),
                    row,
                    value: v,
                    requirement: req,
                })
            }
            Some(req @ "> 0") if v <= 0.0 => {
                return Err(DataError::NegativeValue {
                    file: fname,
                    column: value_column.to_string(),
                    row,
                    value: v,
                    requirement: req,
                })
            }
            _ => {}
        }
        timestamps.push(ts);
        values.push(v);
    }
    check_axis(&fname, &timestamps, Some(reference))?;
    Ok(values)
}

/// Loads, validates, and aligns all six input files into a [`ParkDataset`].
pub fn load_dataset(paths: &DataPaths) -> Result<ParkDataset, DataError> {
    // loads.csv defines the timestamp axis and the calendar.
    let mut reader = open_reader(&paths.loads)?;
    let fname = paths.loads.display().to_string();
    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv {
            file: fname.clone(),
            row: 1,
            source: e,
        })?
        .clone();
    let cols = resolve_columns(
        &paths.loads,
        &headers,
        &["timestamp", "production_kwh", "office_kwh", "day_type"],
    )?;

    let mut timestamps = Vec::new();
    let mut production = Vec::new();
    let mut office = Vec::new();
    let mut row_day_types = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| DataError::Csv {
            file: fname.clone(),
            row,
            source: e,
        })?;
        timestamps.push(parse_timestamp(
            &fname,
            row,
            cols.get(&record, 0, row, "timestamp")?,
        )?);
        for (col, name, dst) in [
            (1usize, "production_kwh", &mut production),
            (2usize, "office_kwh", &mut office),
        ] {
            let v = parse_f64(&fname, name, row, cols.get(&record, col, row, name)?)?;
            if v < 0.0 {
                return Err(DataError::NegativeValue {
                    file: fname,
                    column: name.to_string(),
                    row,
                    value: v,
                    requirement: ">= 0",
                });
            }
            dst.push(v);
        }
        let dt = match cols.get(&record, 3, row, "day_type")? {
            "W" => DayType::Working,
            "N" => DayType::NonWorking,
            other => {
                return Err(DataError::InvalidValue {
                    file: fname,
                    column: "day_type".to_string(),
                    row,
                    detail: format!("expected W or N, got '{other}'"),
                })
            }
        };
        row_day_types.push(dt);
    }
    check_axis(&fname, &timestamps, None)?;

    if timestamps[0].hour() != 0 || timestamps[0].minute() != 0 {
        return Err(DataError::MisalignedSeries {
            file: fname,
            detail: format!(
                "first slot {} is not midnight; datasets cover whole days",
                timestamps[0].format(TIMESTAMP_FMT)
            ),
        });
    }
    if timestamps.len() % HOURS_PER_DAY != 0 {
        return Err(DataError::MisalignedSeries {
            file: fname,
            detail: format!(
                "{} rows is not a whole number of days",
                timestamps.len()
            ),
        });
    }

    // One calendar flag per day; every row of a day must agree.
    let num_days = timestamps.len() / HOURS_PER_DAY;
    let mut day_types = Vec::with_capacity(num_days);
    for day in 0..num_days {
        let first = row_day_types[day * HOURS_PER_DAY];
        for h in 1..HOURS_PER_DAY {
            let row = day * HOURS_PER_DAY + h;
            if row_day_types[row] != first {
                return Err(DataError::InvalidValue {
                    file: fname,
                    column: "day_type".to_string(),
                    row: row + 1,
                    detail: format!(
                        "day {} mixes W and N flags",
                        timestamps[row].date()
                    ),
                });
            }
        }
        day_types.push(first);
    }

    let pv_energy = load_value_series(&paths.pv, "pv_kwh", Some(">= 0"), &timestamps)?;
    let price = load_value_series(&paths.price, "price_rmb_per_kwh", Some("> 0"), &timestamps)?;
    let outdoor_temp = load_value_series(&paths.weather, "temp_c", None, &timestamps)?;

    let ev_days = load_ev_schedule(&paths.ev_schedule, &timestamps, num_days)?;
    let dr_events = load_dr_events(&paths.dr_events, &timestamps, num_days)?;

    Ok(ParkDataset {
        timestamps,
        production_load: production,
        office_load: office,
        pv_energy,
        price,
        outdoor_temp,
        day_types,
        ev_days,
        dr_events,
    })
}

fn day_index_of(date: NaiveDate, timestamps: &[NaiveDateTime], num_days: usize) -> Option<usize> {
    let first = timestamps[0].date();
    let offset = (date - first).num_days();
    if offset < 0 || offset as usize >= num_days {
        None
    } else {
        Some(offset as usize)
    }
}

fn load_ev_schedule(
    file: &Path,
    timestamps: &[NaiveDateTime],
    num_days: usize,
) -> Result<Vec<Option<EvWindow>>, DataError> {
    let mut reader = open_reader(file)?;
    let fname = file.display().to_string();
    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv {
            file: fname.clone(),
            row: 1,
            source: e,
        })?
        .clone();
    let cols = resolve_columns(
        file,
        &headers,
        &["date", "arrival_hour", "departure_hour", "arrival_soc"],
    )?;

    let mut ev_days: Vec<Option<EvWindow>> = vec![None; num_days];
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| DataError::Csv {
            file: fname.clone(),
            row,
            source: e,
        })?;
        let date = parse_date(&fname, row, cols.get(&record, 0, row, "date")?)?;
        let day = day_index_of(date, timestamps, num_days).ok_or_else(|| {
            DataError::InvalidValue {
                file: fname.clone(),
                column: "date".to_string(),
                row,
                detail: format!("{date} is outside the dataset horizon"),
            }
        })?;
        let arrival =
            parse_f64(&fname, "arrival_hour", row, cols.get(&record, 1, row, "arrival_hour")?)?
                as usize;
        let departure = parse_f64(
            &fname,
            "departure_hour",
            row,
            cols.get(&record, 2, row, "departure_hour")?,
        )? as usize;
        let soc = parse_f64(&fname, "arrival_soc", row, cols.get(&record, 3, row, "arrival_soc")?)?;
        if arrival >= departure || departure > 23 {
            return Err(DataError::InvalidValue {
                file: fname,
                column: "arrival_hour".to_string(),
                row,
                detail: format!(
                    "presence interval must satisfy arrival < departure <= 23, got {arrival}..{departure}"
                ),
            });
        }
        if !(0.0..=1.0).contains(&soc) {
            return Err(DataError::InvalidValue {
                file: fname,
                column: "arrival_soc".to_string(),
                row,
                detail: format!("SoC {soc} outside [0, 1]"),
            });
        }
        if ev_days[day].is_some() {
            return Err(DataError::InvalidValue {
                file: fname,
                column: "date".to_string(),
                row,
                detail: format!("{date} has more than one presence interval"),
            });
        }
        ev_days[day] = Some(EvWindow {
            arrival_hour: arrival,
            departure_hour: departure,
            arrival_soc: soc,
        });
    }
    Ok(ev_days)
}

fn load_dr_events(
    file: &Path,
    timestamps: &[NaiveDateTime],
    num_days: usize,
) -> Result<Vec<DrEvent>, DataError> {
    let mut reader = open_reader(file)?;
    let fname = file.display().to_string();
    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv {
            file: fname.clone(),
            row: 1,
            source: e,
        })?
        .clone();
    let cols = resolve_columns(
        file,
        &headers,
        &["date", "start_hour", "end_hour", "invited_kwh", "price_rmb_per_kwh"],
    )?;

    let mut events = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| DataError::Csv {
            file: fname.clone(),
            row,
            source: e,
        })?;
        let date = parse_date(&fname, row, cols.get(&record, 0, row, "date")?)?;
        let day = day_index_of(date, timestamps, num_days).ok_or_else(|| {
            DataError::InvalidValue {
                file: fname.clone(),
                column: "date".to_string(),
                row,
                detail: format!("{date} is outside the dataset horizon"),
            }
        })?;
        let start =
            parse_f64(&fname, "start_hour", row, cols.get(&record, 1, row, "start_hour")?)? as usize;
        let end = parse_f64(&fname, "end_hour", row, cols.get(&record, 2, row, "end_hour")?)? as usize;
        let invited =
            parse_f64(&fname, "invited_kwh", row, cols.get(&record, 3, row, "invited_kwh")?)?;
        let price = parse_f64(
            &fname,
            "price_rmb_per_kwh",
            row,
            cols.get(&record, 4, row, "price_rmb_per_kwh")?,
        )?;
        if start > end || end > 23 {
            return Err(DataError::InvalidValue {
                file: fname,
                column: "start_hour".to_string(),
                row,
                detail: format!("window must satisfy start <= end <= 23, got {start}..{end}"),
            });
        }
        if invited <= 0.0 {
            return Err(DataError::NegativeValue {
                file: fname,
                column: "invited_kwh".to_string(),
                row,
                value: invited,
                requirement: "> 0",
            });
        }
        if price <= 0.0 {
            return Err(DataError::NegativeValue {
                file: fname,
                column: "price_rmb_per_kwh".to_string(),
                row,
                value: price,
                requirement: "> 0",
            });
        }
        events.push(DrEvent {
            start_slot: day * HOURS_PER_DAY + start,
            end_slot: day * HOURS_PER_DAY + end,
            invited_load: invited,
            unit_price: price,
        });
    }
    events.sort_by_key(|e| e.start_slot);
    for pair in events.windows(2) {
        if pair[1].start_slot <= pair[0].end_slot {
            return Err(DataError::InvalidValue {
                file: fname,
                column: "start_hour".to_string(),
                row: 0,
                detail: format!(
                    "DR windows overlap: slots {}..={} and {}..={}",
                    pair[0].start_slot, pair[0].end_slot, pair[1].start_slot, pair[1].end_slot
                ),
            });
        }
    }
    Ok(events)
}

/// Writes a dataset back out as the six canonical CSVs. Reloading the
/// written files reproduces the dataset exactly.
pub fn write_dataset(ds: &ParkDataset, dir: &Path) -> Result<(), DataError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let write = |name: &str, content: String| -> Result<(), DataError> {
        let path = dir.join(name);
        let mut f = File::create(&path).map_err(|e| io_err(&path, e))?;
        f.write_all(content.as_bytes()).map_err(|e| io_err(&path, e))
    };

    let mut loads = String::from("timestamp,production_kwh,office_kwh,day_type\n");
    let mut pv = String::from("timestamp,pv_kwh\n");
    let mut price = String::from("timestamp,price_rmb_per_kwh\n");
    let mut weather = String::from("timestamp,temp_c\n");
    for (i, ts) in ds.timestamps.iter().enumerate() {
        let stamp = ts.format(TIMESTAMP_FMT);
        let day = i / HOURS_PER_DAY;
        loads.push_str(&format!(
            "{},{},{},{}\n",
            stamp, ds.production_load[i], ds.office_load[i], ds.day_types[day]
        ));
        pv.push_str(&format!("{},{}\n", stamp, ds.pv_energy[i]));
        price.push_str(&format!("{},{}\n", stamp, ds.price[i]));
        weather.push_str(&format!("{},{}\n", stamp, ds.outdoor_temp[i]));
    }
    write("loads.csv", loads)?;
    write("pv.csv", pv)?;
    write("price.csv", price)?;
    write("weather.csv", weather)?;

    let mut ev = String::from("date,arrival_hour,departure_hour,arrival_soc\n");
    for (day, window) in ds.ev_days.iter().enumerate() {
        if let Some(w) = window {
            ev.push_str(&format!(
                "{},{},{},{}\n",
                ds.date(day).format(DATE_FMT),
                w.arrival_hour,
                w.departure_hour,
                w.arrival_soc
            ));
        }
    }
    write("ev_schedule.csv", ev)?;

    let mut dr = String::from("date,start_hour,end_hour,invited_kwh,price_rmb_per_kwh\n");
    for e in &ds.dr_events {
        let day = e.start_slot / HOURS_PER_DAY;
        dr.push_str(&format!(
            "{},{},{},{},{}\n",
            ds.date(day).format(DATE_FMT),
            e.start_slot % HOURS_PER_DAY,
            e.end_slot % HOURS_PER_DAY,
            e.invited_load,
            e.unit_price
        ));
    }
    write("dr_events.csv", dr)
}

/// Per-hour baseline inputs for one day: for each hour, the production
/// loads of the `N` most recent preceding days of the same type (most
/// recent first). `exclude_dr_days` drops preceding days that hosted a DR
/// event before counting.
pub fn baseline_history(
    ds: &ParkDataset,
    day: usize,
    exclude_dr_days: bool,
) -> Result<Vec<Vec<f64>>, DataError> {
    let needed = ds.day_type(day).baseline_days();
    let mut similar = Vec::with_capacity(needed);
    for prev in (0..day).rev() {
        if ds.day_type(prev) != ds.day_type(day) {
            continue;
        }
        if exclude_dr_days && ds.day_has_dr(prev) {
            continue;
        }
        similar.push(prev);
        if similar.len() == needed {
            break;
        }
    }
    if similar.len() < needed {
        return Err(DataError::InsufficientHistory {
            day,
            needed,
            found: similar.len(),
        });
    }
    Ok((0..HOURS_PER_DAY)
        .map(|h| {
            similar
                .iter()
                .map(|&d| ds.production_load[ds.slot(d, h)])
                .collect()
        })
        .collect())
}

/// Per-channel min/max of the nine observation channels, computed on the
/// training split. Constant channels normalize to 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub min: [f64; STATE_DIM],
    pub max: [f64; STATE_DIM],
}

/// Observation channel order. Everything that builds or consumes the
/// 9-vector goes through these indices.
pub mod channel {
    pub const PRODUCTION_LOAD: usize = 0;
    pub const OFFICE_LOAD: usize = 1;
    pub const BASELINE_LOAD: usize = 2;
    pub const OUTDOOR_TEMP: usize = 3;
    pub const INDOOR_TEMP: usize = 4;
    pub const PV_ENERGY: usize = 5;
    pub const PRICE: usize = 6;
    pub const SOC_ESS: usize = 7;
    pub const SOC_EV: usize = 8;
}

impl NormStats {
    pub fn is_constant(&self, ch: usize) -> bool {
        self.min[ch] == self.max[ch]
    }

    /// Min-max maps one channel value into [0, 1], clamping out-of-range
    /// inputs; constant channels map to 0.5.
    pub fn normalize(&self, ch: usize, value: f64) -> f64 {
        if self.is_constant(ch) {
            0.5
        } else {
            ((value - self.min[ch]) / (self.max[ch] - self.min[ch])).clamp(0.0, 1.0)
        }
    }
}

fn series_min_max(series: &[f64]) -> (f64, f64) {
    series.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// Computes normalization statistics from a dataset.
///
/// Load, PV, price, and outdoor-temperature channels take the observed
/// min/max; the baseline channel shares the production-load range (a
/// baseline is a mean of production loads); SoC channels use the battery
/// limits; the indoor channel spans the comfort band padded by 5 degC,
/// widened to include the initial temperature if it starts outside.
pub fn compute_norm_stats(
    ds: &ParkDataset,
    init_temp: f64,
    comfort: (f64, f64),
    soc_ess_bounds: (f64, f64),
    soc_ev_bounds: (f64, f64),
) -> Result<NormStats, DataError> {
    if ds.timestamps.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let mut min = [0.0; STATE_DIM];
    let mut max = [0.0; STATE_DIM];
    let mut set = |ch: usize, bounds: (f64, f64)| {
        min[ch] = bounds.0;
        max[ch] = bounds.1;
    };
    set(channel::PRODUCTION_LOAD, series_min_max(&ds.production_load));
    set(channel::OFFICE_LOAD, series_min_max(&ds.office_load));
    set(channel::BASELINE_LOAD, series_min_max(&ds.production_load));
    set(channel::OUTDOOR_TEMP, series_min_max(&ds.outdoor_temp));
    set(
        channel::INDOOR_TEMP,
        (
            (comfort.0 - 5.0).min(init_temp),
            (comfort.1 + 5.0).max(init_temp),
        ),
    );
    set(channel::PV_ENERGY, series_min_max(&ds.pv_energy));
    set(channel::PRICE, series_min_max(&ds.price));
    set(channel::SOC_ESS, soc_ess_bounds);
    set(channel::SOC_EV, soc_ev_bounds);
    Ok(NormStats { min, max })
}
