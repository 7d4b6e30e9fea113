//! Output plumbing: fixed-precision formatting, CSV quoting, and the
//! stdout-or-file sink.

use std::io::Write;
use std::path::Path;

/// Destination of the main command output.
pub struct Sink {
    target: Target,
}

enum Target {
    Stdout,
    File(std::fs::File),
}

impl Sink {
    pub fn new(path: Option<&Path>) -> std::io::Result<Self> {
        let target = match path {
            None => Target::Stdout,
            Some(p) => Target::File(std::fs::File::create(p)?),
        };
        Ok(Self { target })
    }

    pub fn write_all(&mut self, text: &str) -> std::io::Result<()> {
        match &mut self.target {
            Target::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()
            }
            Target::File(f) => {
                f.write_all(text.as_bytes())?;
                f.flush()
            }
        }
    }
}

/// Fixed number of decimals; the default 7 matches the reference captions.
pub fn num(x: f64, precision: usize) -> String {
    format!("{x:.precision$}")
}

/// RFC-4180-style quoting for fields that contain the delimiter.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Versioned schema comment; the first line of every CSV output.
pub fn csv_header(command: &str) -> String {
    format!("# alloc-design v{} {command}\n", env!("CARGO_PKG_VERSION"))
}
