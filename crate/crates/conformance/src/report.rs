use std::fmt;
use std::time::{Duration, Instant};

/// Outcome of one property suite: how many checks ran, how many failed, and
/// the first few failures spelled out.
#[derive(Debug, Clone)]
pub struct Report {
    pub id: u8,
    pub title: &'static str,
    pub checked: u64,
    pub violations: u64,
    pub examples: Vec<String>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
    started: Instant,
}

const KEEP: usize = 8;

impl Report {
    pub fn new(id: u8, title: &'static str) -> Report {
        Report {
            id,
            title,
            checked: 0,
            violations: 0,
            examples: Vec::new(),
            notes: Vec::new(),
            elapsed: Duration::ZERO,
            started: Instant::now(),
        }
    }

    /// Counts one check; `describe` is only called for a failure that is
    /// still worth printing.
    pub fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < KEEP {
                self.examples.push(describe());
            }
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn finish(mut self) -> Report {
        self.elapsed = self.started.elapsed();
        self
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checked > 0
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} [{}] {}: {} checks, {} violations (tolerance 0), {:.1}s",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checked,
            self.violations,
            self.elapsed.as_secs_f64()
        )?;
        for n in &self.notes {
            write!(f, "\n    note: {n}")?;
        }
        for e in &self.examples {
            write!(f, "\n    violation: {e}")?;
        }
        Ok(())
    }
}
