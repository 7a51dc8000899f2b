//! Fixed CSV number formatting: six significant digits, `INF` for
//! infinite exponents.

use marc_dmt::ExtReal;

/// Formats with six significant digits in plain decimal notation.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let prec = (5 - mag).max(0) as usize;
    format!("{:.*}", prec, x)
}

pub fn ext(x: &ExtReal) -> String {
    match x.value() {
        Some(v) => sig6(v),
        None => "INF".to_string(),
    }
}
