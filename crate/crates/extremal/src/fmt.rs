//! Locale-independent number formatting for emitted documents.

/// Scientific notation with 17 significant digits, enough for exact `f64`
/// round-trips. Rust's `e` formatting never depends on the locale.
pub fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}
