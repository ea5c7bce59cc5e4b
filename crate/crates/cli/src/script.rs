//! Batch execution of scripts: one command per line, one record per command.

use serde::Serialize;
use serde_json::Value as Json;

use crate::eval::{Checker, Config, Outcome, Session};
use crate::syntax::{parse_command, strip_comment, Command, Diagnostic};
use crate::value::{show, to_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    /// 1-based position among the script's commands.
    pub index: usize,
    pub line: usize,
    pub command: String,
    pub input: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Json>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Record {
    fn error(index: usize, line: usize, command: &str, input: &str, d: &Diagnostic) -> Self {
        Record {
            index,
            line,
            command: command.into(),
            input: input.into(),
            status: Status::Error,
            name: None,
            value: None,
            text: None,
            message: Some(d.to_string()),
        }
    }

    /// One line of human-readable output.
    pub fn human(&self) -> String {
        match (self.status, &self.name, &self.text, &self.message) {
            (Status::Error, _, _, Some(m)) => format!("error: {m}"),
            (Status::Error, _, _, None) => format!("line {}: error", self.line),
            (Status::Ok, Some(n), Some(t), _) => format!("{n} = {t}"),
            (Status::Ok, None, Some(t), _) if self.command == "eval" => t.clone(),
            (Status::Ok, _, _, _) => format!("line {}: {} ok", self.line, self.command),
            (Status::Fail, _, t, _) => {
                format!("line {}: {} FAILED: {}", self.line, self.command, t.as_deref().unwrap_or(""))
            }
        }
    }
}

/// Result of a script run.
#[derive(Clone, Debug)]
pub struct Run {
    pub records: Vec<Record>,
    /// 0 when every assertion held, 1 on a failed assertion, 2 on a
    /// parse, type or evaluation error.
    pub exit_code: i32,
}

/// Parses and type-checks the whole script before evaluating anything.
pub fn run_script(text: &str, config: Config) -> Run {
    let mut commands: Vec<(usize, &str, Command)> = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        match parse_command(raw, line) {
            Ok(Some(cmd)) => commands.push((line, raw, cmd)),
            Ok(None) => {}
            Err(d) => errors.push(Record::error(
                commands.len() + errors.len() + 1,
                line,
                "parse",
                strip_comment(raw).trim(),
                &d,
            )),
        }
    }
    if errors.is_empty() {
        let mut checker = Checker::new(config.dim);
        for (i, (line, raw, cmd)) in commands.iter().enumerate() {
            if let Err((span, msg)) = checker.command(cmd) {
                let d = Diagnostic::at(raw, *line, span, msg);
                errors.push(Record::error(i + 1, *line, cmd.name(), strip_comment(raw).trim(), &d));
                break;
            }
        }
    }
    if !errors.is_empty() {
        return Run { records: errors, exit_code: 2 };
    }

    let mut session = match Session::new(config) {
        Ok(s) => s,
        Err(m) => {
            let d = Diagnostic { line: 0, column: 1, message: m };
            return Run { records: vec![Record::error(0, 0, "config", "", &d)], exit_code: 2 };
        }
    };
    let mut records = Vec::new();
    let mut exit_code = 0;
    for (i, (line, raw, cmd)) in commands.iter().enumerate() {
        let input = strip_comment(raw).trim();
        match session.execute(cmd) {
            Ok(out) => {
                let r = record(i + 1, *line, cmd, input, out, &session);
                if r.status == Status::Fail {
                    exit_code = 1;
                }
                records.push(r);
            }
            Err((span, msg)) => {
                let d = Diagnostic::at(raw, *line, span, msg);
                records.push(Record::error(i + 1, *line, cmd.name(), input, &d));
                return Run { records, exit_code: 2 };
            }
        }
    }
    Run { records, exit_code }
}

pub fn record(index: usize, line: usize, cmd: &Command, input: &str, out: Outcome, session: &Session) -> Record {
    let style = session.config.style;
    let mut r = Record {
        index,
        line,
        command: cmd.name().into(),
        input: input.into(),
        status: Status::Ok,
        name: None,
        value: None,
        text: None,
        message: None,
    };
    match out {
        Outcome::Value(v) => {
            r.text = Some(show(&v, style));
            r.value = Some(to_json(&v));
        }
        Outcome::Bound(name, v) => {
            r.name = Some(name);
            r.text = Some(show(&v, style));
            r.value = Some(to_json(&v));
        }
        Outcome::Assert { passed, detail } => {
            r.status = if passed { Status::Ok } else { Status::Fail };
            r.text = Some(detail);
        }
        Outcome::Dim(n) => r.text = Some(format!("dimension {n}")),
    }
    r
}
