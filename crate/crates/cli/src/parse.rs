use std::f64::consts::PI;

/// Parses a real number, allowing multiples and fractions of pi:
/// `0.3`, `pi`, `pi/4`, `3pi/4`, `3*pi/4`, `2/3`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim().to_ascii_lowercase().replace(['*', ' '], "");
    if s.is_empty() {
        return Err("empty number".into());
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.to_string(), Some(b.to_string())),
        None => (s.clone(), None),
    };
    let num = parse_pi_multiple(&num)?;
    let val = match den {
        Some(d) => {
            let d = parse_pi_multiple(&d)?;
            if d == 0.0 {
                return Err(format!("division by zero in {s:?}"));
            }
            num / d
        }
        None => num,
    };
    if !val.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(val)
}

fn parse_pi_multiple(s: &str) -> Result<f64, String> {
    if let Some(coef) = s.strip_suffix("pi") {
        let c = match coef {
            "" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|e| format!("bad coefficient {c:?}: {e}"))?,
        };
        return Ok(c * PI);
    }
    s.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_real).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(parse_real("0.3").unwrap(), 0.3);
        assert_eq!(parse_real("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_real("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_real("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_real("PI").unwrap(), PI);
        assert_eq!(parse_real("1/3").unwrap(), 1.0 / 3.0);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("foo").is_err());
        assert_eq!(parse_list("0.3,pi/4,1.2").unwrap(), vec![0.3, PI / 4.0, 1.2]);
    }
}
