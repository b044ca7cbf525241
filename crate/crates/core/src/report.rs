//! Named pass/fail items shared by all verification reports.

use serde::{Deserialize, Serialize};

/// One named exact check with a human-readable detail line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckItem {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        CheckItem { name: name.to_string(), pass, detail }
    }
}

/// True iff every item passed.
pub fn all_pass(items: &[CheckItem]) -> bool {
    items.iter().all(|c| c.pass)
}
