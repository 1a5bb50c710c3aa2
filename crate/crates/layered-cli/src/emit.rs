//! Output formatting: tab-separated (default) or JSON lines.

use std::io::Write;

use clap::ValueEnum;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Tab-separated fields.
    Tsv,
    /// One JSON object per line.
    JsonLines,
}

pub struct Out<'a> {
    pub format: Format,
    pub w: &'a mut dyn Write,
}

impl Out<'_> {
    /// A summary record. Tsv prints tab-joined `key=value` pairs;
    /// json-lines prints an object.
    pub fn record(&mut self, fields: &[(&str, &str)]) {
        match self.format {
            Format::Tsv => {
                let line: Vec<String> =
                    fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(self.w, "{}", line.join("\t")).expect("stdout write");
            }
            Format::JsonLines => self.json(fields),
        }
    }

    /// A data row with a fixed column grammar (element lines,
    /// `value<TAB>term` span lines). Tsv prints the bare values tab-joined.
    pub fn row(&mut self, fields: &[(&str, &str)]) {
        match self.format {
            Format::Tsv => {
                let line: Vec<&str> = fields.iter().map(|(_, v)| *v).collect();
                writeln!(self.w, "{}", line.join("\t")).expect("stdout write");
            }
            Format::JsonLines => self.json(fields),
        }
    }

    /// A single bare value.
    pub fn line(&mut self, key: &str, value: &str) {
        self.row(&[(key, value)]);
    }

    fn json(&mut self, fields: &[(&str, &str)]) {
        let mut obj = serde_json::Map::new();
        for (k, v) in fields {
            obj.insert((*k).into(), serde_json::Value::String((*v).into()));
        }
        writeln!(self.w, "{}", serde_json::Value::Object(obj)).expect("stdout write");
    }
}

/// `[1,2]`-style bracketed list used by term texts.
pub fn bracketed(values: &[u32]) -> String {
    let items: Vec<String> = values.iter().map(u32::to_string).collect();
    format!("[{}]", items.join(","))
}

/// `[cuts] [indices] map ; map` witness-term text, cuts optional.
pub fn term_text(cuts: Option<&[u32]>, indices: &[u32], maps: &[String]) -> String {
    let mut out = String::new();
    if let Some(c) = cuts {
        out.push_str(&bracketed(c));
        out.push(' ');
    }
    out.push_str(&bracketed(indices));
    out.push(' ');
    out.push_str(&maps.join(" ; "));
    out
}
