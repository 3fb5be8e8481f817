//! A command's result in every format it supports.

use std::io::Write;

use serde_json::Value;

use crate::config::Format;
use crate::error::Error;

#[derive(Clone, Debug, Default)]
pub struct Output {
    pub json: Value,
    pub text: String,
    /// Header row first.
    pub csv: Option<Vec<Vec<String>>>,
    pub dot: Option<String>,
    /// A cap cut the result short.
    pub truncated: bool,
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String, Error> {
        match format {
            Format::Text => {
                let mut s = self.text.clone();
                if self.truncated {
                    s.push_str("TRUNCATED: a cap was reached; output is partial\n");
                }
                Ok(s)
            }
            Format::Json => {
                let mut v = self.json.clone();
                if let Value::Object(m) = &mut v {
                    m.insert("truncated".into(), Value::Bool(self.truncated));
                }
                let mut s = serde_json::to_string_pretty(&v)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let rows = self.csv.as_ref().ok_or_else(|| Error::Usage("csv output is not available here".into()))?;
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in rows {
                    w.write_record(r)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("utf-8"))
            }
            Format::Dot => self.dot.clone().ok_or_else(|| Error::Usage("dot output is not available here".into())),
        }
    }

    pub fn write_to(&self, format: Format, out: &mut dyn Write) -> Result<(), Error> {
        let s = self.render(format)?;
        out.write_all(s.as_bytes()).map_err(|source| Error::Io {
            path: "<output>".into(),
            source,
        })
    }
}
