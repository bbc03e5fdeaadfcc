//! Plain-text and CSV rendering.

use catastroagri_core::ingest::{export_csv, Table as CsvTable};
use rust_decimal::Decimal;

/// Up to six decimals, trailing zeros dropped.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn fmt_decimal(d: Decimal) -> String {
    d.normalize().to_string()
}

/// Column-aligned text table; the first `text_columns` columns are
/// left-aligned, the rest right-aligned.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    footer: Option<Vec<String>>,
    text_columns: usize,
}

impl Table {
    pub fn new(header: Vec<String>, text_columns: usize) -> Self {
        Self {
            header,
            rows: Vec::new(),
            footer: None,
            text_columns,
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn push_footer(&mut self, row: Vec<String>) {
        self.footer = Some(row);
    }

    pub fn render(&self) -> String {
        let all = std::iter::once(&self.header)
            .chain(&self.rows)
            .chain(self.footer.as_ref());
        let mut widths = vec![0; self.header.len()];
        for row in all {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |row: &Vec<String>| {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, &w))| {
                    if i < self.text_columns {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            format!("{}\n", cells.join("  ").trim_end())
        };
        let rule = format!("{}\n", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        let mut out = line(&self.header);
        out.push_str(&rule);
        for row in &self.rows {
            out.push_str(&line(row));
        }
        if let Some(footer) = &self.footer {
            out.push_str(&rule);
            out.push_str(&line(footer));
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut t = CsvTable::new(self.header.clone());
        for row in self.rows.iter().chain(self.footer.as_ref()) {
            t.push_row(row.clone());
        }
        String::from_utf8(export_csv(&t)).expect("CSV writer emits UTF-8")
    }
}

pub fn csv_table(header: &[&str]) -> Table {
    Table::new(header.iter().map(|s| s.to_string()).collect(), header.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_trim_cleanly() {
        assert_eq!(fmt_num(8.000000000000002), "8");
        assert_eq!(fmt_num(0.8922), "0.8922");
        assert_eq!(fmt_num(-0.0000001), "0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn alignment() {
        let mut t = Table::new(vec!["NAME".into(), "N".into()], 1);
        t.push(vec!["a".into(), "100".into()]);
        t.push_footer(vec!["TOTAL".into(), "100".into()]);
        assert_eq!(t.render(), "NAME     N\n-----  ---\na      100\n-----  ---\nTOTAL  100\n");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let mut t = csv_table(&["A", "B"]);
        t.push(vec!["x,y".into(), "1".into()]);
        assert_eq!(t.render_csv(), "A,B\n\"x,y\",1\n");
    }
}
