use std::fmt::Write;

/// Shortest representation that parses back to the same `f64`. `Debug`
/// switches to exponent form for very small and very large magnitudes.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

/// Accumulates CSV rows with `\n` line endings. All cells are numeric or
/// fixed identifiers, so nothing is quoted.
#[derive(Debug, Default)]
pub struct Table {
    buf: String,
}

impl Table {
    pub fn with_header(cols: &[&str]) -> Self {
        let mut t = Table::default();
        t.line(cols.iter().copied());
        t
    }

    pub fn line<S: AsRef<str>>(&mut self, cells: impl IntoIterator<Item = S>) {
        let mut first = true;
        for c in cells {
            if !first {
                self.buf.push(',');
            }
            first = false;
            self.buf.push_str(c.as_ref());
        }
        self.buf.push('\n');
    }

    pub fn floats(&mut self, values: &[f64]) {
        self.line(values.iter().map(|v| float(*v)));
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.buf, "# {text}");
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.5, -2.7681263071970003, 1e-11, 3.0f64.sqrt(), 5.19672801e-10, 0.0] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(0.0078125), "0.0078125");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::with_header(&["a", "b"]);
        t.floats(&[1.0, -0.25]);
        t.line(["x", ""]);
        assert_eq!(t.finish(), "a,b\n1.0,-0.25\nx,\n");
    }
}
