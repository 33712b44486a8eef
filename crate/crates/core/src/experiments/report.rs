use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One named pass/fail assertion with a human-readable detail line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of one driver: its checks plus any data worth keeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report { name: name.to_string(), passed: true, checks: Vec::new(), data: Value::Object(Default::default()) }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.passed &= passed;
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
        passed
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut self.data {
            map.insert(key.to_string(), v);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per check, `PASS`/`FAIL` first.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| format!("{} {}::{} ({})", if c.passed { "PASS" } else { "FAIL" }, self.name, c.name, c.detail))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_check_fails_the_report() {
        let mut r = Report::new("demo");
        assert!(r.check("a", true, "ok"));
        assert!(!r.check("b", false, "bad"));
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
        r.put("x", 3);
        assert_eq!(r.data["x"], 3);
        assert_eq!(r.lines()[1], "FAIL demo::b (bad)");
    }
}
