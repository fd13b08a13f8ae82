//! Line-oriented output: a two-line header, then one tab-separated row per record.

use std::fmt;

pub const SCHEMA: &str = "eigentransfer-table v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub kind: String,
    pub fields: Vec<(String, String)>,
}

impl Row {
    pub fn new(kind: &str) -> Self {
        Row { kind: kind.to_string(), fields: vec![] }
    }

    pub fn field(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(command: &str, config: Vec<(String, String)>) -> Self {
        Table { command: command.to_string(), config, rows: vec![] }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn rows_of<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.kind == kind)
    }

    pub fn parse(text: &str) -> Result<Table, String> {
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| lines.next().ok_or_else(|| format!("missing {what}"));
        let (_, schema) = next("schema line")?;
        if schema != format!("# {SCHEMA}") {
            return Err(format!("line 1: unknown schema '{schema}'"));
        }
        let (_, cmd) = next("command line")?;
        let command = cmd.strip_prefix("# command\t").ok_or("line 2: expected command")?.to_string();
        let (_, cfg) = next("config line")?;
        let cfg = cfg.strip_prefix("# config").ok_or("line 3: expected config")?;
        let config = split_fields(cfg, 3)?;
        let mut rows = vec![];
        for (i, line) in lines {
            let (kind, rest) = line.split_once('\t').unwrap_or((line, ""));
            let fields = split_fields(if rest.is_empty() { "" } else { &line[kind.len()..] }, i + 1)?;
            rows.push(Row { kind: kind.to_string(), fields });
        }
        Ok(Table { command, config, rows })
    }
}

fn split_fields(s: &str, line: usize) -> Result<Vec<(String, String)>, String> {
    s.split('\t')
        .filter(|w| !w.is_empty())
        .map(|w| {
            w.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).ok_or_else(|| format!("line {line}: expected key=value, got '{w}'"))
        })
        .collect()
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {SCHEMA}")?;
        writeln!(f, "# command\t{}", self.command)?;
        write!(f, "# config")?;
        for (k, v) in &self.config {
            write!(f, "\t{k}={v}")?;
        }
        writeln!(f)?;
        for r in &self.rows {
            write!(f, "{}", r.kind)?;
            for (k, v) in &r.fields {
                write!(f, "\t{k}={v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
