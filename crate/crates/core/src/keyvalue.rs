//! Line-oriented `key=value` text used by potential and field spec files.
//!
//! Pairs are separated by whitespace or newlines, `#` starts a comment.
//! Every key must be consumed; leftovers are reported as unknown.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    used: bool,
}

#[derive(Debug, Clone)]
pub struct KeyValues {
    entries: Vec<Entry>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<Entry> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("");
            for tok in body.split_whitespace() {
                let Some((k, v)) = tok.split_once('=') else {
                    return Err(Error::Schema { line, field: tok.into(), message: "expected key=value".into() });
                };
                if k.is_empty() {
                    return Err(Error::Schema { line, field: tok.into(), message: "empty key".into() });
                }
                if entries.iter().any(|e| e.key == k) {
                    return Err(Error::Schema { line, field: k.into(), message: "duplicate key".into() });
                }
                entries.push(Entry { key: k.into(), value: v.into(), line, used: false });
            }
        }
        Ok(KeyValues { entries })
    }

    fn find(&mut self, key: &str) -> Option<&mut Entry> {
        self.entries.iter_mut().find(|e| e.key == key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.iter().any(|e| e.key == key)
    }

    pub fn opt_str(&mut self, key: &str) -> Option<(String, usize)> {
        self.find(key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    pub fn str(&mut self, key: &str) -> Result<String> {
        self.opt_str(key)
            .map(|(v, _)| v)
            .ok_or_else(|| Error::Schema { line: 0, field: key.into(), message: "missing required key".into() })
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.opt_str(key) {
            None => Ok(None),
            Some((v, line)) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(Error::Schema { line, field: key.into(), message: format!("`{v}` is not a finite number") }),
            },
        }
    }

    pub fn f64(&mut self, key: &str) -> Result<f64> {
        self.opt_f64(key)?
            .ok_or_else(|| Error::Schema { line: 0, field: key.into(), message: "missing required key".into() })
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn opt_u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.opt_str(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<u64>().map(Some).map_err(|_| Error::Schema {
                line,
                field: key.into(),
                message: format!("`{v}` is not a non-negative integer"),
            }),
        }
    }

    /// Comma-separated reals.
    pub fn opt_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.opt_str(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|t| match t.trim().parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(Error::Schema { line, field: key.into(), message: format!("`{t}` is not a finite number") }),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// Rejects keys nobody asked for.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().find(|e| !e.used) {
            Some(e) => Err(Error::Schema { line: e.line, field: e.key, message: "unknown key".into() }),
            None => Ok(()),
        }
    }
}
