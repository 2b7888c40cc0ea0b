//! Fixed significant-digit formatting for CSV output.

/// Significant digits used for every numeric CSV field.
pub const CSV_SIG_DIGITS: usize = 6;

/// Formats `x` like C's `%.{sig}g`: fixed notation for moderate exponents,
/// scientific otherwise, with trailing zeros removed.
pub fn sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1);
    // Round first so the exponent reflects the rounded value (9.999995 -> 10).
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { "-" } else { "+" };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

/// [`sig`] at the CSV precision.
pub fn csv_num(x: f64) -> String {
    sig(x, CSV_SIG_DIGITS)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
