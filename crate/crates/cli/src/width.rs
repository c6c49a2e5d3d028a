use std::f64::consts::PI;

/// Parse widths and angles that are naturally multiples of π: `pi`, `pi/2`,
/// `2pi/3`, `sqrt2*pi`, `0.75pi`, or any plain float. The paper's width
/// thresholds sit exactly at π, so symbolic forms avoid rounding the
/// pitchfork/helicoid boundary.
pub fn parse_width(text: &str) -> Result<f64, String> {
    let s = text.trim().to_lowercase().replace(' ', "");
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let mut coef = 1.0f64;
    let mut rest = num;
    if let Some(r) = rest.strip_prefix("sqrt2*") {
        coef *= 2.0f64.sqrt();
        rest = r;
    } else if let Some(r) = rest.strip_prefix("sqrt2") {
        coef *= 2.0f64.sqrt();
        rest = r.strip_prefix('*').unwrap_or(r);
    }
    let rest = rest.strip_suffix("pi").ok_or_else(|| format!("cannot parse width '{text}'"))?;
    let rest = rest.strip_suffix('*').unwrap_or(rest);
    if !rest.is_empty() {
        coef *= rest.parse::<f64>().map_err(|_| format!("cannot parse width '{text}'"))?;
    }
    let mut value = coef * PI;
    if let Some(d) = den {
        let d: f64 = d.parse().map_err(|_| format!("cannot parse width '{text}'"))?;
        if d == 0.0 {
            return Err(format!("zero denominator in '{text}'"));
        }
        value /= d;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_widths() {
        assert_eq!(parse_width("pi").unwrap(), PI);
        assert_eq!(parse_width("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_width("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert!((parse_width("sqrt2*pi").unwrap() - 2.0f64.sqrt() * PI).abs() < 1e-15);
        assert_eq!(parse_width("0.75pi").unwrap(), 0.75 * PI);
        assert_eq!(parse_width("3.14").unwrap(), 3.14);
        assert!(parse_width("two pi").is_err());
    }
}
