//! Domain description files.
//!
//! One `key=value` per line; blank lines and text after `#` are ignored.
//!
//! | key | meaning |
//! |-----|---------|
//! | `shape` | `ball`, `ellipsoid`, `box`, `annulus`, `two_balls` or `implicit` |
//! | `dim` | dimension, 2 to 10 |
//! | `radius` | ball radius |
//! | `semiaxes` | ellipsoid semiaxes, comma separated |
//! | `sides` | box side lengths, comma separated |
//! | `inner`, `outer` | annulus radii |
//! | `center1`, `radius1`, `center2`, `radius2` | the two balls |
//! | `expr` | implicit membership: boolean, or numeric with inside meaning `≤ 0` |
//! | `bounds` | implicit bounding box, `lo:hi` per axis, comma separated |
//! | `volume` | implicit volume if known |
//! | `center` | translation applied to any shape |
//!
//! Expressions use `x1 .. xd`, with `x, y, z, w` as aliases for the first four.

use std::collections::HashMap;

use thiserror::Error;

use super::domain::{Domain, Implicit, Shape};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn required(&self, key: &str) -> Result<(usize, &str), ConfigError> {
        self.raw(key)
            .ok_or_else(|| ConfigError::Invalid(format!("missing key `{key}`")))
    }

    fn number(&self, key: &str) -> Result<f64, ConfigError> {
        let (line, v) = self.required(key)?;
        parse_number(v, line, key)
    }

    fn list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let (line, v) = self.required(key)?;
        v.split(',').map(|t| parse_number(t, line, key)).collect()
    }
}

fn parse_number(text: &str, line: usize, key: &str) -> Result<f64, ConfigError> {
    let t = text.trim();
    t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| ConfigError::Line {
        line,
        message: format!("`{key}` expects a finite number, got `{t}`"),
    })
}

const KEYS: [&str; 15] = [
    "shape", "dim", "radius", "semiaxes", "sides", "inner", "outer", "center", "center1", "center2", "radius1",
    "radius2", "expr", "bounds", "volume",
];

/// Parse a domain description.
pub fn parse_domain(text: &str) -> Result<Domain, ConfigError> {
    let mut map = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Line {
            line,
            message: format!("expected `key=value`, got `{content}`"),
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::Line {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        if map.insert(key.clone(), (line, value.trim().to_string())).is_some() {
            return Err(ConfigError::Line {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    let e = Entries { map };

    let (dline, dtext) = e.required("dim")?;
    let d: u32 = dtext.parse().map_err(|_| ConfigError::Line {
        line: dline,
        message: format!("`dim` expects an integer, got `{dtext}`"),
    })?;
    let (sline, name) = e.required("shape")?;
    let shape = match name.to_ascii_lowercase().as_str() {
        "ball" => Shape::Ball { radius: e.number("radius")? },
        "ellipsoid" | "ellipse" => Shape::Ellipsoid { semiaxes: e.list("semiaxes")? },
        "box" | "square" | "rectangle" => Shape::Box { sides: e.list("sides")? },
        "annulus" | "shell" => Shape::Annulus {
            inner: e.number("inner")?,
            outer: e.number("outer")?,
        },
        "two_balls" => Shape::TwoBalls {
            c1: e.list("center1")?,
            r1: e.number("radius1")?,
            c2: e.list("center2")?,
            r2: e.number("radius2")?,
        },
        "implicit" => {
            let (eline, expr) = e.required("expr")?;
            let (bline, btext) = e.required("bounds")?;
            let bounds = btext
                .split(',')
                .map(|pair| {
                    let (lo, hi) = pair.split_once(':').ok_or_else(|| ConfigError::Line {
                        line: bline,
                        message: format!("bounds entries are `lo:hi`, got `{}`", pair.trim()),
                    })?;
                    Ok((parse_number(lo, bline, "bounds")?, parse_number(hi, bline, "bounds")?))
                })
                .collect::<Result<Vec<_>, ConfigError>>()?;
            let volume = e.raw("volume").map(|(l, v)| parse_number(v, l, "volume")).transpose()?;
            let imp = Implicit::new(expr, bounds, volume).map_err(|err| ConfigError::Line {
                line: eline,
                message: err.to_string(),
            })?;
            Shape::Implicit(imp)
        }
        other => {
            return Err(ConfigError::Line {
                line: sline,
                message: format!("unknown shape `{other}`"),
            })
        }
    };
    let mut domain = Domain::new(d, shape).map_err(|err| ConfigError::Invalid(err.to_string()))?;
    if e.raw("center").is_some() {
        let c = e.list("center")?;
        if c.len() != d as usize {
            let (line, _) = e.required("center")?;
            return Err(ConfigError::Line {
                line,
                message: format!("`center` needs {d} entries, got {}", c.len()),
            });
        }
        domain = domain.translated(&c);
    }
    Ok(domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipse() {
        let d = parse_domain("# test\nshape=ellipsoid\nsemiaxes=2,0.5\ndim=2\n").unwrap();
        assert_eq!(d.shape, Shape::Ellipsoid { semiaxes: vec![2.0, 0.5] });
        assert!((d.exact_volume().unwrap() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn implicit_l_shape() {
        let text = "shape = implicit\ndim = 2\nexpr = !(x > 0 && y > 0)\nbounds = -1:1, -1:1\nvolume = 3\n";
        let d = parse_domain(text).unwrap();
        assert!(d.contains(&[-0.5, 0.5]));
        assert!(!d.contains(&[0.5, 0.5]));
        assert_eq!(d.exact_volume(), Some(3.0));
    }

    #[test]
    fn translated_ball() {
        let d = parse_domain("shape=ball\nradius=1\ndim=2\ncenter=0.3,0").unwrap();
        assert_eq!(d.as_ball().unwrap().0, vec![0.3, 0.0]);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let err = parse_domain("shape=ellipsoid\ndim=2\nsemiaxes=2,abc\n").unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        let err = parse_domain("shape=ball\nradius 1\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2:"), "{err}");
        let err = parse_domain("shape=implicit\ndim=2\nexpr=x +* y\nbounds=-1:1,-1:1").unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        assert!(parse_domain("shape=ball\nradius=1\n").is_err());
        assert!(parse_domain("shape=blob\ndim=2\n").is_err());
        assert!(parse_domain("shape=ellipsoid\ndim=3\nsemiaxes=1,2").is_err());
    }
}
