//! JSON input files: assembly configurations and graphs with lengths.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use asmsym_core::assembly::{AssemblyConfiguration, Bunch};
use asmsym_core::cayley::Interval;
use asmsym_core::graph::Graph;
use asmsym_core::real::Real;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A number given either as a JSON number or as a string; strings may be
/// fractions like `"1/10"`. Both are read exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Text(String),
    Number(serde_json::Number),
}

impl Num {
    pub fn to_real(&self, field: &str) -> Result<Real, Error> {
        let text = match self {
            Num::Text(s) => s.clone(),
            Num::Number(n) => n.to_string(),
        };
        text.parse().map_err(|_| Error::Schema {
            field: field.to_string(),
            message: format!("`{text}` is not a number"),
        })
    }

    pub fn from_real(x: &Real) -> Num {
        Num::Text(x.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereFile {
    pub at: [Num; 3],
    pub color: String,
    pub radius: Num,
    pub annulus: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BunchFile {
    pub spheres: Vec<SphereFile>,
}

/// Either `bunches` of rigid clusters or `spheres`, each its own bunch.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bunches: Vec<BunchFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spheres: Vec<SphereFile>,
}

fn sphere_parts(s: &SphereFile, at: &str) -> Result<([Real; 3], Real, Real), Error> {
    let p = [
        s.at[0].to_real(&format!("{at}.at[0]"))?,
        s.at[1].to_real(&format!("{at}.at[1]"))?,
        s.at[2].to_real(&format!("{at}.at[2]"))?,
    ];
    Ok((p, s.radius.to_real(&format!("{at}.radius"))?, s.annulus.to_real(&format!("{at}.annulus"))?))
}

impl ConfigurationFile {
    pub fn to_configuration(&self) -> Result<AssemblyConfiguration, Error> {
        if !self.bunches.is_empty() && !self.spheres.is_empty() {
            return Err(Error::Schema {
                field: "spheres".into(),
                message: "give either `bunches` or `spheres`, not both".into(),
            });
        }
        let mut bunches = Vec::new();
        for (l, b) in self.bunches.iter().enumerate() {
            let (mut pts, mut colors, mut radii, mut annuli) = (vec![], vec![], vec![], vec![]);
            for (i, s) in b.spheres.iter().enumerate() {
                let (p, r, d) = sphere_parts(s, &format!("bunches[{l}].spheres[{i}]"))?;
                pts.push(p);
                colors.push(s.color.clone());
                radii.push(r);
                annuli.push(d);
            }
            bunches.push(Bunch::new(pts, colors, radii, annuli));
        }
        for (i, s) in self.spheres.iter().enumerate() {
            let (p, r, d) = sphere_parts(s, &format!("spheres[{i}]"))?;
            bunches.push(Bunch::sphere(p, &s.color, r, d));
        }
        Ok(AssemblyConfiguration::validated(bunches)?)
    }

    pub fn from_configuration(c: &AssemblyConfiguration) -> Self {
        let bunches = c
            .bunches
            .iter()
            .map(|b| BunchFile {
                spheres: (0..b.len())
                    .map(|i| SphereFile {
                        at: [Num::from_real(&b.points[i][0]), Num::from_real(&b.points[i][1]), Num::from_real(&b.points[i][2])],
                        color: b.colors[i].clone(),
                        radius: Num::from_real(&b.radii[i]),
                        annulus: Num::from_real(&b.annuli[i]),
                    })
                    .collect(),
            })
            .collect();
        ConfigurationFile {
            bunches,
            spheres: Vec::new(),
        }
    }
}

/// A length or a `[lo, hi]` interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LengthFile {
    Exact(Num),
    Range([Num; 2]),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    /// Keyed by `"u-v"`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lengths: BTreeMap<String, LengthFile>,
}

pub fn parse_pair(text: &str) -> Option<(usize, usize)> {
    let (u, v) = text.trim().split_once('-')?;
    let (u, v): (usize, usize) = (u.trim().parse().ok()?, v.trim().parse().ok()?);
    Some((u.min(v), u.max(v)))
}

/// `"0-2,1-3"`.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>, Error> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            parse_pair(t).ok_or_else(|| Error::Schema {
                field: "nonedges".into(),
                message: format!("`{t}` is not a pair like 0-2"),
            })
        })
        .collect()
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<Graph, Error> {
        let mut g = Graph::new(self.vertices);
        for (k, &[u, v]) in self.edges.iter().enumerate() {
            g.add_edge(u, v).map_err(|e| Error::Schema {
                field: format!("edges[{k}]"),
                message: e.to_string(),
            })?;
        }
        Ok(g)
    }

    pub fn intervals(&self) -> Result<BTreeMap<(usize, usize), Interval>, Error> {
        let mut out = BTreeMap::new();
        for (key, len) in &self.lengths {
            let field = format!("lengths.{key}");
            let pair = parse_pair(key).ok_or_else(|| Error::Schema {
                field: field.clone(),
                message: "key must look like 0-1".into(),
            })?;
            let interval = match len {
                LengthFile::Exact(x) => Interval::exact(x.to_real(&field)?),
                LengthFile::Range([lo, hi]) => Interval {
                    lo: lo.to_real(&field)?,
                    hi: hi.to_real(&field)?,
                },
            };
            out.insert(pair, interval);
        }
        Ok(out)
    }

    pub fn from_graph(g: &Graph) -> Self {
        GraphFile {
            vertices: g.vertex_count(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            lengths: BTreeMap::new(),
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Json {
        path: PathBuf::from(path),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_configuration(path: &Path) -> Result<AssemblyConfiguration, Error> {
    let file: ConfigurationFile = parse_json(&read(path)?, path)?;
    file.to_configuration()
}

pub fn load_graph(path: &Path) -> Result<GraphFile, Error> {
    parse_json(&read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configuration_round_trip() {
        let text = r#"{"spheres": [
            {"at": [0, 0, 0], "color": "a", "radius": 1, "annulus": "1/10"},
            {"at": ["2.05", 0, 0], "color": "a", "radius": "1", "annulus": 0.1}
        ]}"#;
        let file: ConfigurationFile = parse_json(text, Path::new("x")).unwrap();
        let c = file.to_configuration().unwrap();
        assert!(c.bunches[1].annuli[0].eq_tol(&Real::ratio(1, 10)));
        let back = ConfigurationFile::from_configuration(&c);
        let json = serde_json::to_string(&back).unwrap();
        let again: ConfigurationFile = parse_json(&json, Path::new("x")).unwrap();
        assert_eq!(again, back);
        assert!(again.to_configuration().unwrap().bunches[1].points[0][0].eq_tol(&"2.05".parse().unwrap()));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = parse_json::<ConfigurationFile>(r#"{"spheres": [], "extra": 1}"#, Path::new("f.json")).unwrap_err();
        assert!(matches!(err, Error::Json { line: 1, .. }), "{err}");
        let err = parse_json::<GraphFile>(r#"{"vertices": 2, "edges": [[0, 1]], "weights": {}}"#, Path::new("g")).unwrap_err();
        assert!(err.to_string().contains("weights"));
    }

    #[test]
    fn graphs_and_pairs() {
        let g: GraphFile = parse_json(r#"{"vertices": 3, "edges": [[0, 1], [1, 2]], "lengths": {"0-1": 3, "1-2": ["3.5", 4]}}"#, Path::new("g")).unwrap();
        assert_eq!(g.to_graph().unwrap().edge_count(), 2);
        let iv = g.intervals().unwrap();
        assert!(iv[&(1, 2)].lo.eq_tol(&Real::ratio(7, 2)));
        assert_eq!(parse_pairs("2-0, 1-3").unwrap(), [(0, 2), (1, 3)]);
        assert!(parse_pairs("0:2").is_err());
        let bad: GraphFile = parse_json(r#"{"vertices": 2, "edges": [[0, 5]]}"#, Path::new("g")).unwrap();
        assert!(bad.to_graph().is_err());
    }
}
