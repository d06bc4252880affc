use std::fmt;
use std::io::{self, Write};

/// Outcome of one check with the numbers behind the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub constants: Vec<(String, f64)>,
    pub tolerances: Vec<(String, f64)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        CheckReport {
            name: name.to_string(),
            passed: true,
            constants: Vec::new(),
            tolerances: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a table row; a failing row fails the report.
    pub fn row(&mut self, values: Vec<f64>, ok: bool) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
        self.passed &= ok;
    }

    pub fn require(&mut self, ok: bool, note: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(note.into());
        }
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.constants.push((name.to_string(), value));
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.push((name.to_string(), value));
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}]", self.name)?;
        writeln!(f, "verdict = {}", self.verdict())?;
        for (k, v) in &self.constants {
            writeln!(f, "constant {k} = {v:.10e}")?;
        }
        for (k, v) in &self.tolerances {
            writeln!(f, "tolerance {k} = {v:e}")?;
        }
        for n in &self.notes {
            writeln!(f, "note {n}")?;
        }
        if !self.columns.is_empty() {
            writeln!(f, "table {}", self.columns.join(","))?;
            for r in &self.rows {
                let cells: Vec<String> = r.iter().map(|v| format!("{v:.10e}")).collect();
                writeln!(f, "{}", cells.join(","))?;
            }
        }
        Ok(())
    }
}

/// Writes reports as consecutive sections separated by blank lines.
pub fn write_reports<W: Write>(mut w: W, reports: &[CheckReport]) -> io::Result<()> {
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        write!(w, "{r}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_row_fails_report() {
        let mut r = CheckReport::new("x", &["a"]);
        r.row(vec![1.0], true);
        assert!(r.passed);
        r.row(vec![2.0], false);
        assert!(!r.passed);
        assert!(r.to_string().contains("verdict = fail"));
    }

    #[test]
    fn sections_are_separated() {
        let mut a = CheckReport::new("a", &[]);
        a.constant("m", 2.0);
        let mut buf = Vec::new();
        write_reports(&mut buf, &[a.clone(), a]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.matches("[a]").count(), 2);
        assert!(s.contains("constant m = 2.0000000000e0"));
    }
}
