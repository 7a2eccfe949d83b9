//! Writes command artifacts into the output directory.

use crate::error::CliError;
use ledgergraph_core::{
    export_edge_list, export_hypergraph, write_matrix_csv, EdgeList, ExportFormat, Hypergraph,
};
use serde::Serialize;
use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub struct Output {
    dir: PathBuf,
    format: ExportFormat,
    written: Vec<String>,
}

fn io_err(path: &Path, e: impl Display) -> CliError {
    CliError::io("cli.io", format!("{}: {e}", path.display()))
}

impl Output {
    pub fn new(dir: &Path, format: ExportFormat) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn format(&self) -> ExportFormat {
        self.format
    }

    fn ext(&self) -> &'static str {
        match self.format {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }

    /// Files written so far, relative to the output directory.
    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Runs `body` against a buffered file named `name`.
    pub fn file<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut w = BufWriter::new(f);
        body(&mut w)?;
        w.flush().map_err(|e| io_err(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn edges(&mut self, stem: &str, g: &EdgeList) -> Result<(), CliError> {
        let (name, fmt) = (format!("{stem}.{}", self.ext()), self.format);
        self.file(&name, |w| Ok(export_edge_list(g, fmt, w)?))
    }

    pub fn hyperedges(&mut self, stem: &str, h: &Hypergraph) -> Result<(), CliError> {
        let (name, fmt) = (format!("{stem}.{}", self.ext()), self.format);
        self.file(&name, |w| Ok(export_hypergraph(h, fmt, w)?))
    }

    /// Matrices are always CSV.
    pub fn matrix<T: Display + Serialize>(
        &mut self,
        stem: &str,
        rows: &[Vec<T>],
    ) -> Result<(), CliError> {
        self.file(&format!("{stem}.csv"), |w| Ok(write_matrix_csv(rows, w)?))
    }

    /// Records as CSV with a fixed header (so an empty table still has one)
    /// or as a JSON array.
    pub fn table<R: Serialize>(
        &mut self,
        stem: &str,
        header: &[&str],
        rows: &[R],
    ) -> Result<(), CliError> {
        let name = format!("{stem}.{}", self.ext());
        match self.format {
            ExportFormat::Csv => self.file(&name, |w| {
                let mut c = csv::WriterBuilder::new()
                    .has_headers(false)
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(w);
                let err = |e: csv::Error| CliError::io("cli.export", e);
                c.write_record(header).map_err(err)?;
                for r in rows {
                    c.serialize(r).map_err(err)?;
                }
                c.flush()?;
                Ok(())
            }),
            ExportFormat::Json => self.json(&name, &rows),
        }
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)
                .map_err(|e| CliError::io("cli.export", e))?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }

    /// One JSON document per line.
    pub fn jsonl<T: Serialize>(&mut self, name: &str, items: &[T]) -> Result<(), CliError> {
        self.file(name, |w| {
            for it in items {
                serde_json::to_writer(&mut *w, it).map_err(|e| CliError::io("cli.export", e))?;
                w.write_all(b"\n")?;
            }
            Ok(())
        })
    }
}
