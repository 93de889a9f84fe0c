//! Attribute-value lexing and canonical rendering.

use crate::math::{ColorRGB, Rotation, Vec3};
use crate::scene::{FieldType, FieldValue};

/// Shortest decimal that parses back to the same `f64`. Exponent form is
/// used for very small and very large magnitudes; both zeros print `0`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if !(1e-6..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Splits on runs of whitespace and commas.
pub fn tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c.is_ascii_whitespace() || c == ',').filter(|t| !t.is_empty())
}

fn real(tok: &str) -> Result<f64, String> {
    let looks_numeric = tok
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E'));
    match tok.parse::<f64>() {
        Ok(v) if looks_numeric && v.is_finite() => Ok(v),
        _ => Err(format!("'{tok}' is not a finite number")),
    }
}

fn int(tok: &str) -> Result<i32, String> {
    let (neg, body) = match tok.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, tok.strip_prefix('+').unwrap_or(tok)),
    };
    let magnitude = if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        i64::from_str_radix(hex, 16)
    } else {
        body.parse::<i64>()
    }
    .map_err(|_| format!("'{tok}' is not an integer"))?;
    let v = if neg { -magnitude } else { magnitude };
    i32::try_from(v).map_err(|_| format!("'{tok}' does not fit in 32 bits"))
}

fn boolean(tok: &str) -> Result<bool, String> {
    match tok {
        "true" | "TRUE" => Ok(true),
        "false" | "FALSE" => Ok(false),
        _ => Err(format!("'{tok}' is not a boolean")),
    }
}

fn reals(s: &str, group: usize) -> Result<Vec<f64>, String> {
    let v = tokens(s).map(real).collect::<Result<Vec<_>, _>>()?;
    if v.len() % group != 0 {
        return Err(format!("{} numbers is not a multiple of {group}", v.len()));
    }
    Ok(v)
}

fn exactly(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v = reals(s, 1)?;
    if v.len() != n {
        return Err(format!("expected {n} numbers, found {}", v.len()));
    }
    Ok(v)
}

fn rotation(c: &[f64]) -> Result<Rotation, String> {
    Rotation::new(Vec3::new(c[0], c[1], c[2]), c[3]).map_err(|e| e.to_string())
}

fn color(c: &[f64]) -> Result<ColorRGB, String> {
    ColorRGB::new(c[0], c[1], c[2]).map_err(|e| e.to_string())
}

/// Parses the X3D form `"a" "b \"quoted\""`. A value with no leading quote
/// is taken as a single unquoted string.
pub fn parse_mfstring(s: &str) -> Result<Vec<String>, String> {
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    if !trimmed.starts_with('"') {
        return Ok(vec![trimmed.to_string()]);
    }
    let mut out = Vec::new();
    let mut chars = trimmed.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace() || *c == ',') {
            chars.next();
        }
        match chars.next() {
            None => return Ok(out),
            Some('"') => {}
            Some(c) => return Err(format!("unexpected '{c}' between quoted strings")),
        }
        let mut cur = String::new();
        loop {
            match chars.next() {
                None => return Err("unterminated quoted string".into()),
                Some('"') => break,
                Some('\\') => match chars.next() {
                    Some(c) => cur.push(c),
                    None => return Err("dangling escape".into()),
                },
                Some(c) => cur.push(c),
            }
        }
        out.push(cur);
    }
}

pub fn format_mfstring(v: &[String]) -> String {
    v.iter()
        .map(|s| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses an attribute value as the given field type.
pub fn parse_value(ty: FieldType, s: &str) -> Result<FieldValue, String> {
    Ok(match ty {
        FieldType::SFBool => {
            let t: Vec<_> = tokens(s).collect();
            if t.len() != 1 {
                return Err(format!("expected one boolean, found {}", t.len()));
            }
            FieldValue::Bool(boolean(t[0])?)
        }
        FieldType::SFInt32 => {
            let t: Vec<_> = tokens(s).collect();
            if t.len() != 1 {
                return Err(format!("expected one integer, found {}", t.len()));
            }
            FieldValue::Int(int(t[0])?)
        }
        FieldType::SFFloat => FieldValue::Float(exactly(s, 1)?[0]),
        FieldType::SFTime => FieldValue::Time(exactly(s, 1)?[0]),
        FieldType::SFString => FieldValue::String(s.to_string()),
        FieldType::SFVec3f => {
            let c = exactly(s, 3)?;
            FieldValue::Vec3(Vec3::new(c[0], c[1], c[2]))
        }
        FieldType::SFRotation => FieldValue::Rotation(rotation(&exactly(s, 4)?)?),
        FieldType::SFColor => FieldValue::Color(color(&exactly(s, 3)?)?),
        FieldType::MFBool => FieldValue::Bools(tokens(s).map(boolean).collect::<Result<_, _>>()?),
        FieldType::MFInt32 => FieldValue::Ints(tokens(s).map(int).collect::<Result<_, _>>()?),
        FieldType::MFFloat => FieldValue::Floats(reals(s, 1)?),
        FieldType::MFTime => FieldValue::Times(reals(s, 1)?),
        FieldType::MFString => FieldValue::Strings(parse_mfstring(s)?),
        FieldType::MFVec3f => {
            FieldValue::Vec3s(reals(s, 3)?.chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect())
        }
        FieldType::MFRotation => {
            FieldValue::Rotations(reals(s, 4)?.chunks(4).map(rotation).collect::<Result<_, _>>()?)
        }
        FieldType::MFColor => FieldValue::Colors(reals(s, 3)?.chunks(3).map(color).collect::<Result<_, _>>()?),
        FieldType::SFNode | FieldType::MFNode => {
            return Err("node-valued fields are written as child elements".into())
        }
    })
}

fn join_reals(it: impl IntoIterator<Item = f64>) -> String {
    it.into_iter().map(format_real).collect::<Vec<_>>().join(" ")
}

/// Canonical attribute text for a value. `None` for node values.
pub fn format_value(v: &FieldValue) -> Option<String> {
    let b = |x: bool| if x { "true" } else { "false" };
    Some(match v {
        FieldValue::Bool(x) => b(*x).to_string(),
        FieldValue::Int(x) => x.to_string(),
        FieldValue::Float(x) | FieldValue::Time(x) => format_real(*x),
        FieldValue::String(s) => s.clone(),
        FieldValue::Vec3(p) => join_reals(p.to_array()),
        FieldValue::Rotation(r) => join_reals(r.to_array()),
        FieldValue::Color(c) => join_reals(c.to_array()),
        FieldValue::Bools(v) => v.iter().map(|x| b(*x)).collect::<Vec<_>>().join(" "),
        FieldValue::Ints(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        FieldValue::Floats(v) | FieldValue::Times(v) => join_reals(v.iter().copied()),
        FieldValue::Strings(v) => format_mfstring(v),
        FieldValue::Vec3s(v) => join_reals(v.iter().flat_map(|p| p.to_array())),
        FieldValue::Rotations(v) => join_reals(v.iter().flat_map(|r| r.to_array())),
        FieldValue::Colors(v) => join_reals(v.iter().flat_map(|c| c.to_array())),
        FieldValue::Node(_) => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_rendering() {
        assert_eq!(format_real(0.5), "0.5");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(-500.0), "-500");
        assert_eq!(format_real(-0.0), "0");
        assert_eq!(format_real(1e-9), "1e-9");
        assert_eq!(format_real(2.5e20), "2.5e20");
        assert_eq!(format_real(0.1 + 0.2), "0.30000000000000004");
        for x in [1.2345678, 1e-300, 123456.789, f64::MAX, f64::MIN_POSITIVE, 0.000001] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn separators_and_types() {
        assert_eq!(parse_value(FieldType::SFVec3f, " 0,-500 ,  0 ").unwrap(), FieldValue::Vec3(Vec3::new(0.0, -500.0, 0.0)));
        assert_eq!(parse_value(FieldType::MFInt32, "0 1 2 -1, 0x10").unwrap(), FieldValue::Ints(vec![0, 1, 2, -1, 16]));
        assert_eq!(parse_value(FieldType::SFBool, "TRUE").unwrap(), FieldValue::Bool(true));
        assert!(parse_value(FieldType::SFVec3f, "1 2").is_err());
        assert!(parse_value(FieldType::MFVec3f, "1 2 3 4").is_err());
        assert!(parse_value(FieldType::SFFloat, "nan").is_err());
        assert!(parse_value(FieldType::SFFloat, "inf").is_err());
        assert!(parse_value(FieldType::SFInt32, "3000000000").is_err());
        assert!(parse_value(FieldType::SFRotation, "0 0 0 1").is_err());
        assert!(parse_value(FieldType::SFColor, "1 2 0").is_err());
    }

    #[test]
    fn rotation_lexical_mapping() {
        let FieldValue::Rotation(r) = parse_value(FieldType::SFRotation, "0 0 1 1.2345678").unwrap() else {
            panic!()
        };
        assert_eq!(r.axis(), Vec3::Z);
        assert_eq!(r.angle(), 1.2345678);
    }

    #[test]
    fn mfstring_forms() {
        assert_eq!(parse_mfstring(r#""a b" "c\"d" "e\\f""#).unwrap(), vec!["a b", "c\"d", "e\\f"]);
        assert_eq!(parse_mfstring("plain.x3d").unwrap(), vec!["plain.x3d"]);
        assert_eq!(parse_mfstring("  ").unwrap(), Vec::<String>::new());
        assert!(parse_mfstring(r#""open"#).is_err());
        let v = vec!["x\"y".to_string(), String::new(), "back\\slash".to_string()];
        assert_eq!(parse_mfstring(&format_mfstring(&v)).unwrap(), v);
    }
}
