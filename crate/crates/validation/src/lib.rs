//! Minimal runner for named pass/fail checks that report a one-line verdict.

use std::panic::{catch_unwind, AssertUnwindSafe};

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

pub fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

pub type Check = (&'static str, fn() -> Verdict);

/// Runs every check whose label contains one of `filter` (all when empty),
/// printing `PASS`/`FAIL` per check. A panicking check counts as failed.
/// Returns the number of failures.
pub fn run_checks(checks: &[Check], filter: &[String]) -> usize {
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let label = format!("criterion {:>2}: {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += usize::from(!v.pass);
        println!(
            "{} {label} ({})",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    failed
}
