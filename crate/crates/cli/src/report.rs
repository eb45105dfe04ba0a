use std::fmt::Write;

pub const CSV_VERSION: u32 = 1;

/// Accumulates a CSV document: one versioned `#` comment, a column header,
/// rows, and optional `#` footer lines.
pub struct Csv {
    buf: String,
    width: usize,
}

impl Csv {
    pub fn new(kind: &str, params: &[(&str, String)], columns: &[&str]) -> Self {
        let mut buf = format!("# sfett-csv v{CSV_VERSION} {kind}");
        for (k, v) in params {
            write!(buf, " {k}={v}").unwrap();
        }
        buf.push('\n');
        buf.push_str(&columns.join(","));
        buf.push('\n');
        Self { buf, width: columns.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.width, "CSV row width");
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn footer(&mut self, line: &str) {
        self.buf.push_str("# ");
        self.buf.push_str(line);
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn join_ranks(r: &[usize]) -> String {
    r.iter().map(usize::to_string).collect::<Vec<_>>().join(":")
}

/// Drops the `time_ms` column and `# timing` footer lines so two runs of the
/// same command can be compared byte for byte.
pub fn without_timing(csv: &str) -> String {
    let mut lines = csv.lines();
    let mut out = String::new();
    let mut skip = None;
    for line in lines.by_ref() {
        if line.starts_with('#') {
            if !line.starts_with("# timing") {
                out.push_str(line);
                out.push('\n');
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if skip.is_none() {
            skip = cols.iter().position(|&c| c == "time_ms");
        }
        let kept: Vec<&str> = cols
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, c)| *c)
            .collect();
        out.push_str(&kept.join(","));
        out.push('\n');
    }
    out
}
