//! Locale-independent number formatting for CSV and tables.

/// Scientific notation with 9 significant digits, e.g. `6.90775528e1`.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}
