use std::io::Write;
use std::path::Path;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// One report, renderable in every format. `status` is the process exit code.
pub struct Output {
    pub json: serde_json::Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub text: String,
    pub status: u8,
}

impl Output {
    pub fn new(json: serde_json::Value, header: &[&str], rows: Vec<Vec<String>>, text: String) -> Self {
        Output { json, header: header.iter().map(ToString::to_string).collect(), rows, text, status: 0 }
    }

    fn render(&self, format: Format) -> Result<Vec<u8>, Box<dyn std::error::Error>> {
        Ok(match format {
            Format::Text => format!("{}\n", self.text).into_bytes(),
            Format::Json => {
                let mut s = serde_json::to_vec_pretty(&self.json)?;
                s.push(b'\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.into_inner()?
            }
        })
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<(), Box<dyn std::error::Error>> {
        let bytes = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, bytes)?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }
}
