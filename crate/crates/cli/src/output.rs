use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;

/// Run description echoed at the top of every output.
#[derive(Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub flags: Value,
}

impl Header {
    pub fn new(command: &'static str, seed: u64, flags: Value) -> Self {
        Header { tool: "bsft", version: env!("CARGO_PKG_VERSION"), command, seed, flags }
    }
}

pub struct Sink {
    w: Box<dyn Write>,
    format: Format,
}

impl Sink {
    pub fn open(path: Option<&Path>, format: Format) -> io::Result<Self> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Sink { w, format })
    }

    /// Whole-document output: `{header, result}` for JSON, a `#` header line
    /// then `rows` for CSV.
    pub fn document<T: Serialize>(mut self, header: &Header, result: &T, rows: Rows) -> io::Result<()> {
        match self.format {
            Format::Json => {
                let doc = json!({ "header": header, "result": result });
                serde_json::to_writer_pretty(&mut self.w, &doc)?;
                writeln!(self.w)?;
            }
            Format::Csv => {
                self.csv_header(header)?;
                let mut w = csv::Writer::from_writer(&mut self.w);
                w.write_record(rows.columns)?;
                for r in rows.records {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
        }
        self.w.flush()
    }

    fn csv_header(&mut self, header: &Header) -> io::Result<()> {
        writeln!(self.w, "# {}", serde_json::to_string(header)?)
    }

    /// Starts a row stream; every `row` call is flushed before returning.
    pub fn stream(mut self, header: &Header, columns: &[&str]) -> io::Result<Stream> {
        match self.format {
            Format::Json => {
                write!(self.w, "{{\"header\":{},\"rows\":[", serde_json::to_string(header)?)?;
            }
            Format::Csv => {
                self.csv_header(header)?;
                let mut w = csv::Writer::from_writer(&mut self.w);
                w.write_record(columns)?;
                w.flush()?;
            }
        }
        self.w.flush()?;
        Ok(Stream { sink: self, rows: 0 })
    }
}

pub struct Rows {
    pub columns: Vec<&'static str>,
    pub records: Vec<Vec<String>>,
}

pub struct Stream {
    sink: Sink,
    rows: usize,
}

impl Stream {
    pub fn row<T: Serialize>(&mut self, row: &T) -> io::Result<()> {
        let w = &mut self.sink.w;
        match self.sink.format {
            Format::Json => {
                if self.rows > 0 {
                    write!(w, ",")?;
                }
                write!(w, "\n{}", serde_json::to_string(row)?)?;
            }
            Format::Csv => {
                let mut c = csv::WriterBuilder::new().has_headers(false).from_writer(&mut *w);
                c.serialize(row)?;
                c.flush()?;
            }
        }
        self.rows += 1;
        w.flush()
    }

    pub fn finish(mut self) -> io::Result<()> {
        if self.sink.format == Format::Json {
            writeln!(self.sink.w, "\n]}}")?;
        }
        self.sink.w.flush()
    }
}
