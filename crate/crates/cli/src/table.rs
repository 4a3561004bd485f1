//! Fixed-width text tables and their tab-separated twins.

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// First column left-aligned, the rest right-aligned.
    pub fn render(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].len())
                    .chain([self.header[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (c, cell) in cells.iter().enumerate() {
                if c == 0 {
                    s += &format!("{cell:<w$}", w = widths[0]);
                } else {
                    s += &format!("  {cell:>w$}", w = widths[c]);
                }
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        for r in &self.rows {
            out += &line(r);
        }
        out
    }

    pub fn tsv(&self) -> String {
        let mut out = self.header.join("\t") + "\n";
        for r in &self.rows {
            out += &(r.join("\t") + "\n");
        }
        out
    }
}

pub fn f(v: f64, digits: usize) -> String {
    format!("{v:.digits$}")
}

pub fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| f(x, digits))
}
