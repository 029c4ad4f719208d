//! CSV file formats.
//!
//! * vector file: header `value`, one number per row
//! * ensemble file: header `subject,<id1>,<id2>,…`, one row per subject
//! * tags sidecar: header `id,tag`
//! * curve: header `n,probability`
//! * disc: header `id,tag,p1,p2`
//!
//! Reals are written with 17 significant digits so they read back bit-exact.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_real(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse(format!("{what}: cannot parse {s:?} as a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what}: non-finite value {s:?}")));
    }
    Ok(v)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str], what: &str) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse(format!("{what}: expected header {:?}, got {:?}", expected.join(","), header)));
    }
    Ok(())
}

pub fn read_vector<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &["value"], "vector file")?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            parse_real(&rec[0], "vector file")
        })
        .collect()
}

pub fn read_vector_file(path: &Path) -> Result<Vec<f64>> {
    read_vector(open(path)?)
}

pub fn write_vector<W: Write>(w: W, values: &[f64]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["value"])?;
    for v in values {
        wtr.write_record([fmt_real(*v)])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_vector_file(path: &Path, values: &[f64]) -> Result<()> {
    write_vector(create(path)?, values)
}

/// Detector outputs, one column per detector.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTable {
    pub ids: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_ensemble<R: Read>(r: R) -> Result<EnsembleTable> {
    let mut rdr = reader(r);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("subject") {
        return Err(Error::Parse("ensemble file: first column must be `subject`".into()));
    }
    let ids: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    if ids.is_empty() {
        return Err(Error::Parse("ensemble file: no detector columns".into()));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
        return Err(Error::Parse(format!("ensemble file: duplicate id {dup:?}")));
    }
    let mut columns = vec![Vec::new(); ids.len()];
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != ids.len() + 1 {
            return Err(Error::Parse(format!("ensemble file: row has {} fields, expected {}", rec.len(), ids.len() + 1)));
        }
        for (col, field) in columns.iter_mut().zip(rec.iter().skip(1)) {
            col.push(parse_real(field, "ensemble file")?);
        }
    }
    Ok(EnsembleTable { ids, columns })
}

pub fn read_ensemble_file(path: &Path) -> Result<EnsembleTable> {
    read_ensemble(open(path)?)
}

pub fn write_ensemble<W: Write>(w: W, table: &EnsembleTable) -> Result<()> {
    let n = table.columns.first().map_or(0, Vec::len);
    if table.columns.iter().any(|c| c.len() != n) || table.ids.len() != table.columns.len() {
        return Err(Error::InvalidParams("ensemble columns have unequal lengths".into()));
    }
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["subject".to_owned()];
    header.extend(table.ids.iter().cloned());
    wtr.write_record(&header)?;
    for i in 0..n {
        let mut row = vec![i.to_string()];
        row.extend(table.columns.iter().map(|c| fmt_real(c[i])));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_ensemble_file(path: &Path, table: &EnsembleTable) -> Result<()> {
    write_ensemble(create(path)?, table)
}

pub fn read_tags<R: Read>(r: R) -> Result<HashMap<String, String>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &["id", "tag"], "tags file")?;
    let mut tags = HashMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        tags.insert(rec[0].to_owned(), rec[1].to_owned());
    }
    Ok(tags)
}

pub fn read_tags_file(path: &Path) -> Result<HashMap<String, String>> {
    read_tags(open(path)?)
}

pub fn write_tags<W: Write>(w: W, rows: &[(String, String)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["id", "tag"])?;
    for (id, tag) in rows {
        wtr.write_record([id, tag])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_tags_file(path: &Path, rows: &[(String, String)]) -> Result<()> {
    write_tags(create(path)?, rows)
}

pub fn write_curve<W: Write>(w: W, curve: &[(usize, f64)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["n", "probability"])?;
    for (n, p) in curve {
        wtr.write_record([n.to_string(), fmt_real(*p)])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_curve<R: Read>(r: R) -> Result<Vec<(usize, f64)>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &["n", "probability"], "curve file")?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let n = rec[0].parse().map_err(|_| Error::Parse(format!("curve file: bad n {:?}", &rec[0])))?;
            Ok((n, parse_real(&rec[1], "curve file")?))
        })
        .collect()
}

/// One projected point of a disc view.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscRow {
    pub id: String,
    pub tag: String,
    pub p1: f64,
    pub p2: f64,
}

pub fn write_disc<W: Write>(w: W, rows: &[DiscRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["id", "tag", "p1", "p2"])?;
    for r in rows {
        wtr.write_record([r.id.clone(), r.tag.clone(), fmt_real(r.p1), fmt_real(r.p2)])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_disc<R: Read>(r: R) -> Result<Vec<DiscRow>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &["id", "tag", "p1", "p2"], "disc file")?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(DiscRow {
                id: rec[0].to_owned(),
                tag: rec[1].to_owned(),
                p1: parse_real(&rec[2], "disc file")?,
                p2: parse_real(&rec[3], "disc file")?,
            })
        })
        .collect()
}
