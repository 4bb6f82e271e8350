use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The outcome of one command: a human summary, the machine result and
/// whether every checked assertion held.
pub struct Report {
    pub command: &'static str,
    pub text: String,
    pub result: Value,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &'static str, text: String, result: Value) -> Self {
        Report { command, text, result, passed: true }
    }

    pub fn with_passed(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }

    /// JSON keys are emitted sorted, so equal results print identically.
    pub fn print(&self, json: bool) {
        if json {
            let v = json!({
                "birmod": VERSION,
                "command": self.command,
                "passed": self.passed,
                "result": self.result,
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
        } else {
            print!("{}", self.text);
            if !self.text.ends_with('\n') {
                println!();
            }
        }
    }
}
