use std::collections::{HashMap, HashSet};
use std::io::Read;

use chrono::NaiveDate;

use super::Release;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReleaseImport {
    pub releases: Vec<Release>,
    pub rejected: Vec<Rejection>,
}

/// Parses a release CSV with header `app_id,version,date,notes` (dates as
/// `YYYY-MM-DD`). Bad rows are rejected individually; the first occurrence
/// of an `(app_id, version)` pair wins. A release dated before the previous
/// release of the same app in file order is also rejected.
pub fn import_releases<R: Read>(reader: R) -> Result<ReleaseImport, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut out = ReleaseImport::default();
    let (Some(c_app), Some(c_ver), Some(c_date)) = (col("app_id"), col("version"), col("date"))
    else {
        out.rejected.push(Rejection {
            line: 1,
            reason: format!(
                "header must be app_id,version,date,notes; found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
        return Ok(out);
    };
    let c_notes = col("notes");

    let mut seen = HashSet::new();
    let mut latest: HashMap<String, NaiveDate> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |c: usize| record.get(c).map(str::trim).unwrap_or("");
        let mut reject = |reason: String| out.rejected.push(Rejection { line, reason });

        let (app_id, version, date_str) = (field(c_app), field(c_ver), field(c_date));
        if app_id.is_empty() || version.is_empty() {
            reject("missing app_id or version".into());
            continue;
        }
        let date = match NaiveDate::parse_from_str(date_str, "%Y-%m-%d") {
            Ok(d) => d,
            Err(_) => {
                reject(format!("bad date {date_str:?}, expected YYYY-MM-DD"));
                continue;
            }
        };
        if !seen.insert((app_id.to_string(), version.to_string())) {
            reject(format!("duplicate release {app_id} {version}"));
            continue;
        }
        if let Some(prev) = latest.get(app_id).filter(|prev| date < **prev) {
            reject(format!("{app_id} {version} dated {date} before earlier release on {prev}"));
            continue;
        }
        latest.insert(app_id.to_string(), date);
        out.releases.push(Release {
            app_id: app_id.to_string(),
            version: version.to_string(),
            date,
            notes: c_notes.map(|c| field(c).to_string()).unwrap_or_default(),
        });
    }
    Ok(out)
}
