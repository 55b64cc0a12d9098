//! Reader and writer for the fixed-column Solomon VRPTW benchmark layout:
//!
//! ```text
//! C201
//!
//! VEHICLE
//! NUMBER     CAPACITY
//!   25         700
//!
//! CUSTOMER
//! CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME
//!
//!     0      40         50          0          0       3390          0
//!     1      52         75         10        ...
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use thiserror::Error;

use crate::model::InstanceClass;
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct SolomonRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolomonData {
    pub name: String,
    pub vehicles: usize,
    pub capacity: f64,
    /// Depot first, then customers in file order.
    pub records: Vec<SolomonRecord>,
}

impl SolomonData {
    pub fn depot(&self) -> &SolomonRecord {
        &self.records[0]
    }

    pub fn customers(&self) -> &[SolomonRecord] {
        &self.records[1..]
    }

    /// Planning horizon: the depot's due date.
    pub fn horizon(&self) -> f64 {
        self.depot().due
    }

    pub fn class(&self) -> InstanceClass {
        InstanceClass::from_name(&self.name)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolomonError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("no VEHICLE section")]
    MissingVehicle,
    #[error("no customer rows")]
    NoCustomers,
    #[error("line {line}: first customer row must be the depot (id 0), found id {found}")]
    MissingDepot { line: usize, found: usize },
    #[error("line {line}: customer id {found} does not follow {prev}")]
    NonMonotone {
        line: usize,
        prev: usize,
        found: usize,
    },
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<f64>, SolomonError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| SolomonError::Syntax {
                line: lineno,
                msg: format!("expected a number, found {tok:?}"),
            })
        })
        .collect()
}

pub fn parse(text: &str) -> Result<SolomonData, SolomonError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let name = loop {
        match lines.next() {
            Some((_, "")) => continue,
            Some((_, l)) => break l.to_string(),
            None => return Err(SolomonError::Empty),
        }
    };

    let mut vehicles = None;
    let mut in_customers = false;
    let mut records: Vec<SolomonRecord> = Vec::new();
    while let Some((lineno, line)) = lines.next() {
        if line.is_empty() {
            continue;
        }
        let upper = line.to_ascii_uppercase();
        if upper.starts_with("VEHICLE") {
            // header row, then "<number> <capacity>"
            let mut data = None;
            for (no, l) in lines.by_ref() {
                if l.is_empty() || l.to_ascii_uppercase().starts_with("NUMBER") {
                    continue;
                }
                data = Some((no, l));
                break;
            }
            let (no, l) = data.ok_or(SolomonError::MissingVehicle)?;
            let v = numbers(l, no)?;
            if v.len() != 2 {
                return Err(SolomonError::Syntax {
                    line: no,
                    msg: "VEHICLE row needs NUMBER and CAPACITY".into(),
                });
            }
            vehicles = Some((v[0] as usize, v[1]));
            continue;
        }
        if upper.starts_with("CUSTOMER") {
            in_customers = true;
            continue;
        }
        if upper.starts_with("CUST") {
            continue;
        }
        if !in_customers {
            return Err(SolomonError::Syntax {
                line: lineno,
                msg: format!("unexpected line {line:?}"),
            });
        }
        let v = numbers(line, lineno)?;
        if v.len() != 7 {
            return Err(SolomonError::Syntax {
                line: lineno,
                msg: format!("customer row needs 7 columns, found {}", v.len()),
            });
        }
        if v[0] < 0.0 || v[0].fract() != 0.0 {
            return Err(SolomonError::Syntax {
                line: lineno,
                msg: format!("bad customer id {}", v[0]),
            });
        }
        let id = v[0] as usize;
        match records.last() {
            None if id != 0 => {
                return Err(SolomonError::MissingDepot {
                    line: lineno,
                    found: id,
                })
            }
            Some(prev) if id != prev.id + 1 => {
                return Err(SolomonError::NonMonotone {
                    line: lineno,
                    prev: prev.id,
                    found: id,
                })
            }
            _ => {}
        }
        records.push(SolomonRecord {
            id,
            x: v[1],
            y: v[2],
            demand: v[3],
            ready: v[4],
            due: v[5],
            service: v[6],
        });
    }
    let (vehicles, capacity) = vehicles.ok_or(SolomonError::MissingVehicle)?;
    if records.len() < 2 {
        return Err(SolomonError::NoCustomers);
    }
    Ok(SolomonData {
        name,
        vehicles,
        capacity,
        records,
    })
}

/// Renders data in the standard layout; [`parse`] reads it back unchanged.
pub fn to_text(data: &SolomonData) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}\n\nVEHICLE\nNUMBER     CAPACITY", data.name);
    let _ = writeln!(s, "{:>5}{:>13}\n", data.vehicles, data.capacity);
    let _ = writeln!(
        s,
        "CUSTOMER\nCUST NO.  XCOORD.    YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n"
    );
    for r in &data.records {
        let _ = writeln!(
            s,
            "{:>5}{:>11}{:>11}{:>11}{:>11}{:>11}{:>11}",
            r.id, r.x, r.y, r.demand, r.ready, r.due, r.service
        );
    }
    s
}

/// Names of the 27 long-horizon Solomon benchmarks (R2, C2, RC2).
pub fn standard_sources() -> Vec<String> {
    let mut v = Vec::with_capacity(27);
    v.extend((1..=11).map(|i| format!("R2{i:02}")));
    v.extend((1..=8).map(|i| format!("C2{i:02}")));
    v.extend((1..=8).map(|i| format!("RC2{i:02}")));
    v
}

/// Deterministic Solomon-like stand-in for a benchmark file that is not
/// available locally. Geometry, horizon, service times and capacity follow
/// the published class conventions (R2: uniform, T = 1000; C2: clustered,
/// T = 3390, service 90; RC2: mixed, T = 960); windows are drawn so that
/// every customer is reachable alone from the depot. The returned name is
/// `<name>-syn` so generated instances never pass for the real benchmark.
pub fn synthetic(name: &str, customers: usize) -> SolomonData {
    let class = InstanceClass::from_name(name);
    let mut rng = rng::stream(0x5a10_3011, &format!("{name}/synthetic"));
    let (horizon, service, capacity, depot) = match class {
        InstanceClass::C2 => (3390.0, 90.0, 700.0, (40.0, 50.0)),
        InstanceClass::RC2 => (960.0, 10.0, 1000.0, (40.0, 50.0)),
        _ => (1000.0, 10.0, 1000.0, (35.0, 35.0)),
    };
    let centres: Vec<(f64, f64)> = (0..8)
        .map(|_| (rng.gen_range(15..=85) as f64, rng.gen_range(15..=85) as f64))
        .collect();
    let mut records = vec![SolomonRecord {
        id: 0,
        x: depot.0,
        y: depot.1,
        demand: 0.0,
        ready: 0.0,
        due: horizon,
        service: 0.0,
    }];
    for id in 1..=customers {
        let clustered = match class {
            InstanceClass::C2 => true,
            InstanceClass::RC2 => id % 2 == 0,
            _ => false,
        };
        let (x, y) = if clustered {
            let c = centres[rng.gen_range(0..centres.len())];
            (
                (c.0 + rng.gen_range(-8..=8) as f64).clamp(0.0, 100.0),
                (c.1 + rng.gen_range(-8..=8) as f64).clamp(0.0, 100.0),
            )
        } else {
            (rng.gen_range(0..=100) as f64, rng.gen_range(0..=100) as f64)
        };
        let demand = match class {
            InstanceClass::C2 => 10.0 * rng.gen_range(1..=4) as f64,
            _ => rng.gen_range(1..=40) as f64,
        };
        let reach = (x - depot.0).hypot(y - depot.1);
        let first = reach.ceil();
        let last = (horizon - service - reach).floor();
        let centre = rng.gen_range(first..=last);
        let half = match class {
            InstanceClass::C2 => 80.0 * rng.gen_range(1..=4) as f64,
            _ => rng.gen_range(30.0..=240.0_f64).round(),
        };
        let ready = (centre - half).max(0.0).floor();
        let due = (centre + half).min(last).ceil().max(first).min(last);
        records.push(SolomonRecord {
            id,
            x,
            y,
            demand,
            ready,
            due,
            service,
        });
    }
    SolomonData {
        name: format!("{name}-syn"),
        vehicles: 25,
        capacity,
        records,
    }
}

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: SolomonError },
    #[error("missing benchmark files: {}", .0.join(", "))]
    Missing(Vec<String>),
}

fn find_file(dir: &Path, name: &str) -> Option<PathBuf> {
    [name.to_string(), name.to_ascii_lowercase()]
        .into_iter()
        .map(|stem| dir.join(format!("{stem}.txt")))
        .find(|p| p.is_file())
}

/// One source by name, read from `dir` as `<NAME>.txt` or `<name>.txt`.
/// Returns `Ok(None)` when no file exists and `fill_synthetic` is off.
pub fn load_source(
    dir: Option<&Path>,
    name: &str,
    fill_synthetic: bool,
) -> Result<Option<SolomonData>, SourceError> {
    match dir.and_then(|d| find_file(d, name)) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|source| SourceError::Io {
                path: path.clone(),
                source,
            })?;
            let data = parse(&text).map_err(|source| SourceError::Parse { path, source })?;
            Ok(Some(data))
        }
        None if fill_synthetic => Ok(Some(synthetic(name, 100))),
        None => Ok(None),
    }
}

/// The 27 long-horizon sources in benchmark order, loaded with
/// [`load_source`].
pub fn load_sources(
    dir: Option<&Path>,
    fill_synthetic: bool,
) -> Result<Vec<SolomonData>, SourceError> {
    let mut out = Vec::new();
    let mut missing = Vec::new();
    for name in standard_sources() {
        match load_source(dir, &name, fill_synthetic)? {
            Some(data) => out.push(data),
            None => missing.push(name),
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(SourceError::Missing(missing))
    }
}
