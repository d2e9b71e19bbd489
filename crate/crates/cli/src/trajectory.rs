//! Trajectory CSV: header `time,specie,count`, then one row per live specie
//! per snapshot with species in lexicographic order. A snapshot with no live
//! species is written as the single row `t,,0`.
//!
//! Times are printed with Rust's shortest round-trip float formatting, so
//! parsing an emitted file gives back the exact snapshots.

use std::collections::BTreeMap;
use std::io::{self, Write};

use thiserror::Error;

pub const HEADER: &str = "time,specie,count";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub counts: BTreeMap<String, u64>,
}

impl Snapshot {
    pub fn new<K: ToString>(time: f64, counts: impl IntoIterator<Item = (K, u64)>) -> Self {
        Snapshot { time, counts: counts.into_iter().map(|(k, n)| (k.to_string(), n)).collect() }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrajectoryError {
    #[error("missing or wrong header; expected {HEADER:?}")]
    Header,
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

pub fn write_snapshot<W: Write>(out: &mut W, snapshot: &Snapshot) -> io::Result<()> {
    if snapshot.counts.is_empty() {
        return writeln!(out, "{},,0", snapshot.time);
    }
    for (specie, n) in &snapshot.counts {
        writeln!(out, "{},{},{}", snapshot.time, specie, n)?;
    }
    Ok(())
}

pub fn emit(snapshots: &[Snapshot]) -> String {
    let mut buf = Vec::new();
    writeln!(buf, "{HEADER}").expect("write to Vec");
    for s in snapshots {
        write_snapshot(&mut buf, s).expect("write to Vec");
    }
    String::from_utf8(buf).expect("ascii output")
}

/// Rows are grouped into snapshots by time; times must not decrease and
/// species must be strictly increasing inside a snapshot.
pub fn parse(text: &str) -> Result<Vec<Snapshot>, TrajectoryError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(HEADER) {
        return Err(TrajectoryError::Header);
    }
    let mut out: Vec<Snapshot> = Vec::new();
    let mut last_was_empty = false;
    for (i, row) in lines.enumerate() {
        let line = i + 2;
        let err = |message: String| TrajectoryError::Row { line, message };
        let fields: Vec<&str> = row.split(',').collect();
        let [t, specie, n] = fields[..] else {
            return Err(err(format!("expected 3 fields, got {}", fields.len())));
        };
        let time: f64 = t.parse().map_err(|_| err(format!("bad time {t:?}")))?;
        let count: u64 = n.parse().map_err(|_| err(format!("bad count {n:?}")))?;
        if let Some(prev) = out.last() {
            if time < prev.time {
                return Err(err(format!("time {time} decreases")));
            }
        }
        let same_snapshot = !last_was_empty && out.last().map(|s| s.time == time).unwrap_or(false);
        if specie.is_empty() {
            if count != 0 {
                return Err(err("empty snapshot row must have count 0".to_string()));
            }
            if same_snapshot {
                return Err(err("empty snapshot marker inside a snapshot".to_string()));
            }
            out.push(Snapshot { time, counts: BTreeMap::new() });
            last_was_empty = true;
            continue;
        }
        if count == 0 {
            return Err(err(format!("zero count for live specie {specie}")));
        }
        if same_snapshot {
            let snap = out.last_mut().expect("checked");
            if snap.counts.keys().next_back().map(|k| k.as_str() >= specie).unwrap_or(false) {
                return Err(err(format!("specie {specie} out of order")));
            }
            snap.counts.insert(specie.to_string(), count);
        } else {
            out.push(Snapshot { time, counts: [(specie.to_string(), count)].into_iter().collect() });
        }
        last_was_empty = false;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let snaps = vec![
            Snapshot::new(0.0, [("P2", 3), ("P1", 5)]),
            Snapshot::new(0.5, Vec::<(&str, u64)>::new()),
            Snapshot::new(1.25, [("A", 1)]),
        ];
        let text = emit(&snaps);
        assert_eq!(text, "time,specie,count\n0,P1,5\n0,P2,3\n0.5,,0\n1.25,A,1\n");
        assert_eq!(parse(&text).unwrap(), snaps);
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(parse("t,s,n\n"), Err(TrajectoryError::Header));
        assert!(parse("time,specie,count\n1,A\n").is_err());
        assert!(parse("time,specie,count\n1,A,x\n").is_err());
        assert!(parse("time,specie,count\n1,A,1\n0.5,A,1\n").is_err());
        assert!(parse("time,specie,count\n1,B,1\n1,A,1\n").is_err());
        assert!(parse("time,specie,count\n1,A,0\n").is_err());
        assert!(parse("time,specie,count\n1,,3\n").is_err());
    }

    fn snapshots() -> impl Strategy<Value = Vec<Snapshot>> {
        let counts = prop::collection::btree_map("[A-Za-z][A-Za-z0-9.]{0,6}", 1u64..1_000_000, 0..6);
        prop::collection::vec((0.001f64..10.0, counts), 0..12).prop_map(|steps| {
            let mut t = 0.0;
            steps
                .into_iter()
                .map(|(dt, counts)| {
                    t += dt;
                    Snapshot { time: t, counts }
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn round_trips(snaps in snapshots()) {
            prop_assert_eq!(parse(&emit(&snaps)).unwrap(), snaps);
        }
    }
}
