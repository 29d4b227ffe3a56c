//! Text formatting shared by the CSV writers and report renderers.

/// Formats a float with 17 significant digits so that parsing the text back
/// recovers the exact f64 value.
pub(crate) fn float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Renders a slice as a bracketed list of lossless floats.
pub(crate) fn float_list(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().copied().map(float).collect();
    format!("[{}]", inner.join(", "))
}
