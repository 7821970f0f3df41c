//! Complex literals: Cartesian `a+bi` and polar `r@theta`.

use sr_squeeze::C64;

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = || format!("cannot read {s:?} as a complex number (use a+bi or r@theta)");
    if let Some((r, th)) = t.split_once('@') {
        let r: f64 = r.parse().map_err(|_| bad())?;
        let th: f64 = th.parse().map_err(|_| bad())?;
        if !(r >= 0.0) {
            return Err(format!("polar modulus must be non-negative in {s:?}"));
        }
        return finite(C64::from_polar(r, th), s);
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return finite(C64::new(t.parse().map_err(|_| bad())?, 0.0), s);
    };
    // split before the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    finite(C64::new(re.parse().map_err(|_| bad())?, im), s)
}

fn finite(z: C64, s: &str) -> Result<C64, String> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("complex literal {s:?} is not finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(s: &str) -> C64 {
        parse_complex(s).unwrap()
    }

    #[test]
    fn cartesian_forms() {
        assert_eq!(ok("0"), C64::new(0.0, 0.0));
        assert_eq!(ok("1.5"), C64::new(1.5, 0.0));
        assert_eq!(ok("-2"), C64::new(-2.0, 0.0));
        assert_eq!(ok("1+2i"), C64::new(1.0, 2.0));
        assert_eq!(ok("1 - 2i"), C64::new(1.0, -2.0));
        assert_eq!(ok("-0.5-i"), C64::new(-0.5, -1.0));
        assert_eq!(ok("i"), C64::new(0.0, 1.0));
        assert_eq!(ok("-3j"), C64::new(0.0, -3.0));
        assert_eq!(ok("1e-3+2.5e+1i"), C64::new(1e-3, 25.0));
        assert_eq!(ok("2E-2i"), C64::new(0.0, 0.02));
    }

    #[test]
    fn polar_form() {
        let z = ok("0.5@1.5707963267948966");
        assert!((z - C64::new(0.0, 0.5)).norm() < 1e-16);
        assert_eq!(ok("2@0"), C64::new(2.0, 0.0));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1+", "1+2", "1@", "@2", "-1@0", "1++2i", "nan", "inf"] {
            assert!(parse_complex(s).is_err(), "{s:?} accepted");
        }
    }
}
