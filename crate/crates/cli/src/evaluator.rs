use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use anyhow::{Context, Result};

use mmo_core::{Bounds, Objective};

struct Process {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    line: String,
}

/// An objective computed by a long-running shell command.
///
/// Each evaluation writes the point as one line of space-separated
/// coordinates to the command's stdin and reads one line holding the fitness
/// from its stdout. After the first failure every further evaluation returns
/// NaN without touching the process, and [`ExternalObjective::failure`]
/// reports what went wrong.
pub struct ExternalObjective {
    bounds: Bounds,
    process: Mutex<Process>,
    failure: Mutex<Option<String>>,
}

impl ExternalObjective {
    pub fn spawn(command: &str, bounds: Bounds) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .with_context(|| format!("cannot start evaluator `{command}`"))?;
        let stdin = child.stdin.take();
        let stdout = BufReader::new(child.stdout.take().context("evaluator stdout unavailable")?);
        Ok(Self {
            bounds,
            process: Mutex::new(Process {
                child,
                stdin,
                stdout,
                line: String::new(),
            }),
            failure: Mutex::new(None),
        })
    }

    pub fn failure(&self) -> Option<String> {
        self.failure.lock().expect("failure lock").clone()
    }

    fn query(process: &mut Process, x: &[f64]) -> std::result::Result<f64, String> {
        let request = x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        let stdin = process.stdin.as_mut().ok_or("evaluator stdin is closed")?;
        writeln!(stdin, "{request}")
            .and_then(|_| stdin.flush())
            .map_err(|e| format!("cannot write to evaluator: {e}"))?;
        process.line.clear();
        let read = process
            .stdout
            .read_line(&mut process.line)
            .map_err(|e| format!("cannot read from evaluator: {e}"))?;
        if read == 0 {
            return Err("evaluator exited before answering".into());
        }
        let reply = process.line.trim();
        reply
            .parse::<f64>()
            .map_err(|_| format!("evaluator replied '{reply}', expected a number"))
    }
}

impl Objective for ExternalObjective {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        if self.failure.lock().expect("failure lock").is_some() {
            return f64::NAN;
        }
        let mut process = self.process.lock().expect("process lock");
        match Self::query(&mut process, x) {
            Ok(v) => v,
            Err(message) => {
                let mut failure = self.failure.lock().expect("failure lock");
                failure.get_or_insert(message);
                f64::NAN
            }
        }
    }

    fn name(&self) -> &str {
        "external"
    }
}

impl Drop for ExternalObjective {
    fn drop(&mut self) {
        if let Ok(process) = self.process.get_mut() {
            process.stdin.take();
            if !matches!(process.child.try_wait(), Ok(Some(_))) {
                let _ = process.child.kill();
            }
            let _ = process.child.wait();
        }
    }
}
