//! CSV tables with fixed headers and shortest round-trip numbers.

use std::fmt::Write;

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<&'static str>,
    body: String,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            body: String::new(),
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut count = 0;
        for (i, c) in cells.into_iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            self.body.push_str(c.as_ref());
            count += 1;
        }
        debug_assert_eq!(count, self.header.len());
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(self.body.len() + 64);
        let _ = writeln!(s, "{}", self.header.join(","));
        s.push_str(&self.body);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(num(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(num(1.0), "1");
        assert_eq!(opt(None), "");
        let mut t = Table::new(&["a", "b"]);
        t.row([num(0.5), opt(None)]);
        assert_eq!(t.render(), "a,b\n0.5,\n");
    }
}
