use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::plane::{H2Point, Isometry};
use crate::product::{ProductIsometry, ProductPoint};
use crate::tolerance::TOL;

const BUNDLED_DIAGONAL_SCHOTTKY: &str = include_str!("../../fixtures/diagonal_schottky.json");

/// One letter of a word: a generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

/// A finitely generated subgroup of `Isom(Z)`, `Z` a product of `r` planes.
///
/// Generators are kept sorted by name; that order fixes the letter order of
/// every enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    r: usize,
    names: Vec<String>,
    generators: Vec<ProductIsometry>,
    basepoint: ProductPoint,
    dedup_tolerance: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    r: usize,
    generators: BTreeMap<String, Vec<[[f64; 2]; 2]>>,
    basepoint: Option<Vec<[f64; 2]>>,
    dedup_tolerance: Option<f64>,
}

impl GroupSpec {
    pub fn new(
        generators: Vec<(String, ProductIsometry)>,
        basepoint: Option<ProductPoint>,
        dedup_tolerance: Option<f64>,
    ) -> Result<Self> {
        let Some((_, first)) = generators.first() else {
            return Err(Error::InvalidParameter("at least one generator is required".into()));
        };
        let r = first.dim();
        if r == 0 {
            return Err(Error::InvalidParameter("r must be at least 1".into()));
        }
        let mut sorted: BTreeMap<String, ProductIsometry> = BTreeMap::new();
        for (name, g) in generators {
            if g.dim() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: g.dim(),
                });
            }
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::InvalidParameter(format!("bad generator name {name:?}")));
            }
            if sorted.insert(name.clone(), g).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate generator {name}")));
            }
        }
        let basepoint = basepoint.unwrap_or_else(|| ProductPoint::basepoint(r));
        if basepoint.dim() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: basepoint.dim(),
            });
        }
        let dedup_tolerance = dedup_tolerance.unwrap_or(TOL.dedup);
        if !(dedup_tolerance > 0.0 && dedup_tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dedup_tolerance {dedup_tolerance}"
            )));
        }
        let (names, generators) = sorted.into_iter().unzip();
        Ok(Self {
            r,
            names,
            generators,
            basepoint,
            dedup_tolerance,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        if raw.r == 0 {
            return Err(Error::InvalidParameter("r must be at least 1".into()));
        }
        let mut generators = Vec::with_capacity(raw.generators.len());
        for (name, mats) in raw.generators {
            if mats.len() != raw.r {
                return Err(Error::DimensionMismatch {
                    expected: raw.r,
                    got: mats.len(),
                });
            }
            let factors = mats
                .iter()
                .map(|[[a, b], [c, d]]| {
                    Isometry::new(*a, *b, *c, *d)
                        .and_then(|_| Isometry::normalized(*a, *b, *c, *d))
                })
                .collect::<Result<Vec<_>>>()?;
            generators.push((name, ProductIsometry(factors)));
        }
        let basepoint = match raw.basepoint {
            None => None,
            Some(pts) => Some(ProductPoint::new(
                pts.iter()
                    .map(|[re, im]| H2Point::new(*re, *im))
                    .collect::<Result<Vec<_>>>()?,
            )?),
        };
        if generators.is_empty() {
            return Err(Error::InvalidParameter("at least one generator is required".into()));
        }
        let spec = Self::new(generators, basepoint, raw.dedup_tolerance)?;
        if spec.r != raw.r {
            return Err(Error::DimensionMismatch {
                expected: raw.r,
                got: spec.r,
            });
        }
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// The diagonally embedded two-generator Schottky group shipped with the crate.
    pub fn bundled_diagonal_schottky() -> Self {
        Self::from_json(BUNDLED_DIAGONAL_SCHOTTKY).expect("bundled fixture parses")
    }

    pub fn bundled_diagonal_schottky_json() -> &'static str {
        BUNDLED_DIAGONAL_SCHOTTKY
    }

    pub fn to_json(&self) -> String {
        let gens: BTreeMap<&str, Vec<[[f64; 2]; 2]>> = self
            .names
            .iter()
            .zip(&self.generators)
            .map(|(n, g)| {
                let mats = g
                    .0
                    .iter()
                    .map(|m| {
                        let [a, b, c, d] = m.entries();
                        [[a, b], [c, d]]
                    })
                    .collect();
                (n.as_str(), mats)
            })
            .collect();
        let base: Vec<[f64; 2]> = self.basepoint.0.iter().map(|p| [p.re(), p.im()]).collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "r": self.r,
            "generators": gens,
            "basepoint": base,
            "dedup_tolerance": self.dedup_tolerance,
        }))
        .expect("plain data serializes")
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[ProductIsometry] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&ProductIsometry> {
        self.names.iter().position(|n| n == name).map(|k| &self.generators[k])
    }

    pub fn basepoint(&self) -> &ProductPoint {
        &self.basepoint
    }

    pub fn dedup_tolerance(&self) -> f64 {
        self.dedup_tolerance
    }

    /// Letters in enumeration order: `g₀, g₀⁻¹, g₁, g₁⁻¹, …`.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.generators.len())
            .flat_map(|k| {
                [
                    Letter {
                        generator: k,
                        inverse: false,
                    },
                    Letter {
                        generator: k,
                        inverse: true,
                    },
                ]
            })
            .collect()
    }

    pub fn letter_matrix(&self, l: Letter) -> ProductIsometry {
        let g = &self.generators[l.generator];
        if l.inverse {
            g.inverse()
        } else {
            g.clone()
        }
    }

    pub fn word_matrix(&self, word: &[Letter]) -> ProductIsometry {
        word.iter().fold(ProductIsometry::identity(self.r), |acc, l| {
            &acc * &self.letter_matrix(*l)
        })
    }

    /// Space-separated letters, inverses written `name^-1`; `e` for the empty word.
    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "e".into();
        }
        word.iter()
            .map(|l| {
                let n = &self.names[l.generator];
                if l.inverse {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let text = text.trim();
        if text == "e" || text.is_empty() {
            return Ok(Vec::new());
        }
        text.split_whitespace()
            .map(|tok| {
                let (name, inverse) = match tok.strip_suffix("^-1") {
                    Some(n) => (n, true),
                    None => (tok, false),
                };
                self.names
                    .iter()
                    .position(|n| n == name)
                    .map(|generator| Letter { generator, inverse })
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown generator {name}")))
            })
            .collect()
    }

    /// Every generator replaced by `h g h⁻¹`; the basepoint is kept.
    pub fn conjugated(&self, h: &ProductIsometry) -> Result<Self> {
        if h.dim() != self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                got: h.dim(),
            });
        }
        Ok(Self {
            generators: self.generators.iter().map(|g| g.conjugate_by(h)).collect(),
            ..self.clone()
        })
    }

    /// The one-factor spec seen by factor `i`.
    pub fn factor(&self, i: usize) -> Result<Self> {
        if i >= self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                got: i + 1,
            });
        }
        Ok(Self {
            r: 1,
            names: self.names.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| ProductIsometry(vec![g.0[i]]))
                .collect(),
            basepoint: ProductPoint(vec![self.basepoint.0[i]]),
            dedup_tolerance: self.dedup_tolerance,
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r = {}, generators [{}]", self.r, self.names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fixture_loads() {
        let s = GroupSpec::bundled_diagonal_schottky();
        assert_eq!(s.r(), 2);
        assert_eq!(s.names(), ["a", "b"]);
        for g in s.generators() {
            for m in &g.0 {
                assert!((m.det() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = GroupSpec::from_json("{\n  \"r\": 2,\n  \"generators\": [\n").unwrap_err();
        match err {
            Error::SpecParse { line, .. } => assert!(line >= 3),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rejects_bad_determinant_and_counts() {
        let bad = r#"{"r": 1, "generators": {"a": [[[2, 0], [0, 2]]]}}"#;
        assert!(matches!(
            GroupSpec::from_json(bad),
            Err(Error::InvalidDeterminant { .. })
        ));
        let short = r#"{"r": 2, "generators": {"a": [[[2, 0], [0, 0.5]]]}}"#;
        assert!(matches!(
            GroupSpec::from_json(short),
            Err(Error::DimensionMismatch { .. })
        ));
        let none = r#"{"r": 1, "generators": {}}"#;
        assert!(GroupSpec::from_json(none).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = GroupSpec::bundled_diagonal_schottky();
        let t = GroupSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(s.names(), t.names());
        assert_eq!(s.basepoint(), t.basepoint());
        for (g, h) in s.generators().iter().zip(t.generators()) {
            assert!(g.psl_distance(h) < 1e-14);
        }
    }

    #[test]
    fn words_format_and_parse() {
        let s = GroupSpec::bundled_diagonal_schottky();
        let w = s.parse_word("a b^-1 a").unwrap();
        assert_eq!(s.format_word(&w), "a b^-1 a");
        assert_eq!(s.format_word(&[]), "e");
        assert!(s.parse_word("c").is_err());
    }
}
