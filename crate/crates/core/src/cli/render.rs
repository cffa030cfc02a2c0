//! Output formats shared by the subcommands.

use std::fmt::Write as _;

use clap::ValueEnum;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Largest integer every JSON consumer reads exactly.
const JSON_SAFE: u64 = 1 << 53;

/// An integer as a JSON number, or as a decimal string past 2^53.
pub fn big_json(v: &BigUint) -> Value {
    match v.to_u64() {
        Some(x) if x <= JSON_SAFE => Value::from(x),
        _ => Value::String(v.to_string()),
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: ToString>(&mut self, row: &[S]) {
        self.rows.push(row.iter().map(|c| c.to_string()).collect());
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Output(e.to_string());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Output(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Left-aligned columns separated by two spaces.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (i, c) in r.iter().enumerate() {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
        let mut s = String::new();
        for r in std::iter::once(&self.header).chain(&self.rows) {
            let line: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let pad = widths[i] - c.chars().count();
                    format!("{c}{}", " ".repeat(pad))
                })
                .collect();
            let _ = writeln!(s, "{}", line.join("  ").trim_end());
        }
        s
    }
}

/// One command result in all three renderings.
#[derive(Clone, Debug)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub table: Table,
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.table.to_csv()?,
        })
    }
}

pub fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(sep)
}
