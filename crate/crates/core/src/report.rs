//! Machine-readable verification reports.

use serde::Serialize;

#[derive(Serialize)]
pub struct CheckReport {
    pub check: String,
    pub status: String,
    pub details: serde_json::Value,
}

impl CheckReport {
    pub fn pass(check: &str, details: serde_json::Value) -> Self {
        CheckReport {
            check: check.into(),
            status: "pass".into(),
            details,
        }
    }

    pub fn fail(check: &str, details: serde_json::Value) -> Self {
        CheckReport {
            check: check.into(),
            status: "fail".into(),
            details,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub model: crate::model::ModelSpec,
    pub orders: serde_json::Value,
    pub checks: Vec<CheckReport>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn new(model: crate::model::ModelSpec, orders: serde_json::Value) -> Self {
        VerifyReport {
            model,
            orders,
            checks: Vec::new(),
            all_passed: true,
        }
    }

    pub fn push(&mut self, check: CheckReport) {
        self.all_passed &= check.passed();
        self.checks.push(check);
    }
}
