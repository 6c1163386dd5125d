use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::object::{Backend, DeclaredObject, SiteObject};
use super::span::{compose, DeclaredSpan, DeclaredWindow, SpanMorphism};
use super::square::{localization_square, DeclaredFlags, DistinguishedSquare, SquareKind};
use crate::error::{Error, Result};
use crate::toric::{Cone, Fan, FanFile, ToricObject};

/// A fan given by builtin name or inline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanRef {
    Builtin(String),
    Inline(FanFile),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendRef {
    pub fan: FanRef,
    /// Cones as lists of ray indices; absent means the whole fan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cones: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub name: String,
    #[serde(default)]
    pub dim: Option<i64>,
    #[serde(default)]
    pub compact: Option<bool>,
    #[serde(default)]
    pub backend_ref: Option<BackendRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub src: String,
    /// Object name of the window, `"empty"`, or absent for the whole source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    pub map: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareRecord {
    pub kind: SquareKind,
    /// `[E, Y, C, X]`, or `[X∖U, X, ∅, U]` for localization squares.
    pub corners: [String; 4],
    /// Map names `[top, left, p, i]`; declared backend only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<[String; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared: Option<DeclaredFlags>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refined_by: Vec<usize>,
}

/// A declared composite `second ∘ first = result`, by morphism name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionRecord {
    pub second: String,
    pub first: String,
    pub result: String,
}

/// A declared pullback of square `square` along morphism `morphism`,
/// itself given as square `pulled` over the source of the morphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackRecord {
    pub square: usize,
    pub morphism: String,
    pub pulled: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteFile {
    #[serde(default)]
    pub objects: Vec<ObjectRecord>,
    #[serde(default)]
    pub morphisms: Vec<MorphismRecord>,
    #[serde(default)]
    pub squares: Vec<SquareRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compositions: Vec<CompositionRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pullbacks: Vec<PullbackRecord>,
}

/// A finite site: objects, generating spans and distinguished squares.
#[derive(Clone, Debug, Default)]
pub struct SitePresentation {
    objects: Vec<(String, SiteObject)>,
    morphisms: Vec<(String, SpanMorphism)>,
    squares: Vec<DistinguishedSquare>,
    compositions: Vec<(usize, usize, usize)>,
    pullbacks: Vec<(usize, usize, usize)>,
}

impl SitePresentation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn objects(&self) -> &[(String, SiteObject)] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[(String, SpanMorphism)] {
        &self.morphisms
    }

    pub fn squares(&self) -> &[DistinguishedSquare] {
        &self.squares
    }

    pub fn backend(&self) -> Option<Backend> {
        self.objects.first().map(|(_, o)| o.backend())
    }

    pub fn object(&self, name: &str) -> Option<&SiteObject> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    pub fn morphism(&self, name: &str) -> Option<&SpanMorphism> {
        self.morphisms.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn name_of(&self, obj: &SiteObject) -> Option<&str> {
        self.objects.iter().find(|(_, o)| o == obj).map(|(n, _)| n.as_str())
    }

    /// Registers an object, returning its name; objects already present keep
    /// their first name.
    pub fn add_object(&mut self, name: Option<&str>, obj: SiteObject) -> String {
        if let Some(n) = self.name_of(&obj) {
            return n.to_owned();
        }
        let name = match name {
            Some(n) => n.to_owned(),
            None => match &obj {
                SiteObject::Declared(d) => d.name.clone(),
                SiteObject::Toric(_) => format!("o{}", self.objects.len()),
            },
        };
        self.objects.push((name.clone(), obj));
        name
    }

    pub fn add_morphism(&mut self, name: Option<&str>, m: SpanMorphism) -> String {
        if let Some((n, _)) = self.morphisms.iter().find(|(_, x)| x == &m) {
            return n.clone();
        }
        self.add_object(None, m.source());
        self.add_object(None, m.target());
        let name = name.map_or_else(|| format!("m{}", self.morphisms.len()), str::to_owned);
        self.morphisms.push((name.clone(), m));
        name
    }

    /// Adds a square with its corners and structure maps; returns its index.
    pub fn add_square(&mut self, sq: DistinguishedSquare) -> usize {
        if let Some(i) = self.squares.iter().position(|s| s == &sq) {
            return i;
        }
        for c in sq.corners() {
            self.add_object(None, c.clone());
        }
        for m in [&sq.top, &sq.left, &sq.p, &sq.i] {
            self.add_morphism(None, m.clone());
        }
        self.squares.push(sq);
        self.squares.len() - 1
    }

    pub fn squares_over<'a>(&'a self, obj: &'a SiteObject) -> impl Iterator<Item = &'a DistinguishedSquare> + 'a {
        self.squares.iter().filter(move |s| &s.x == obj)
    }

    pub fn morphisms_into<'a>(&'a self, obj: &'a SiteObject) -> impl Iterator<Item = &'a SpanMorphism> + 'a {
        self.morphisms.iter().map(|(_, m)| m).filter(move |m| &m.target() == obj)
    }

    pub fn declared_pullbacks(&self, sq: &DistinguishedSquare, f: &SpanMorphism) -> Vec<&DistinguishedSquare> {
        self.pullbacks
            .iter()
            .filter(|(s, m, _)| &self.squares[*s] == sq && &self.morphisms[*m].1 == f)
            .map(|(_, _, p)| &self.squares[*p])
            .collect()
    }

    /// Composition using declared composites where the pullback is not
    /// computable.
    pub fn compose(&self, second: &SpanMorphism, first: &SpanMorphism) -> Result<SpanMorphism> {
        match compose(second, first) {
            Err(Error::MissingPullback(msg)) => {
                let idx = |m: &SpanMorphism| self.morphisms.iter().position(|(_, x)| x == m);
                let (Some(s), Some(f)) = (idx(second), idx(first)) else {
                    return Err(Error::MissingPullback(msg));
                };
                self.compositions
                    .iter()
                    .find(|(a, b, _)| *a == s && *b == f)
                    .map(|(_, _, r)| self.morphisms[*r].1.clone())
                    .ok_or(Error::MissingPullback(msg))
            }
            other => other,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SiteFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &SiteFile) -> Result<Self> {
        let mut site = SitePresentation::new();
        let mut fans: BTreeMap<String, Arc<Fan>> = BTreeMap::new();
        let mut backend = None;
        for rec in &file.objects {
            let obj = load_object(rec, &mut fans)?;
            match backend {
                None => backend = Some(obj.backend()),
                Some(b) if b != obj.backend() => {
                    return Err(Error::BackendMismatch(format!("object `{}`", rec.name)));
                }
                _ => {}
            }
            if site.object(&rec.name).is_some() {
                return Err(Error::Schema(format!("duplicate object `{}`", rec.name)));
            }
            site.objects.push((rec.name.clone(), obj));
        }
        let get = |site: &SitePresentation, n: &str| {
            site.object(n)
                .cloned()
                .ok_or_else(|| Error::Schema(format!("unknown object `{n}`")))
        };
        for (k, rec) in file.morphisms.iter().enumerate() {
            let src = get(&site, &rec.src)?;
            let tgt = get(&site, &rec.tgt)?;
            let m = match (&src, &tgt) {
                (SiteObject::Toric(s), SiteObject::Toric(t)) => {
                    let w = match rec.window.as_deref() {
                        None => s.clone(),
                        Some("empty") => ToricObject::empty(s.fan().clone()),
                        Some(n) => get(&site, n)?
                            .as_toric()
                            .cloned()
                            .ok_or_else(|| Error::BackendMismatch(n.to_owned()))?,
                    };
                    SpanMorphism::toric(s, &w, t)?
                }
                (SiteObject::Declared(s), SiteObject::Declared(t)) => {
                    let window = match rec.window.as_deref() {
                        None => DeclaredWindow::Whole,
                        Some("empty") => DeclaredWindow::Empty,
                        Some(n) if n == s.name => DeclaredWindow::Whole,
                        Some(n) => {
                            get(&site, n)?;
                            DeclaredWindow::Open(n.to_owned())
                        }
                    };
                    let maps = if rec.map == "id" { vec![] } else { vec![rec.map.clone()] };
                    SpanMorphism::Declared(DeclaredSpan {
                        source: s.clone(),
                        window,
                        maps,
                        target: t.clone(),
                    })
                }
                _ => return Err(Error::BackendMismatch(format!("morphism #{k}"))),
            };
            let name = rec.name.clone().unwrap_or_else(|| format!("m{k}"));
            site.morphisms.push((name, m));
        }
        let mut loaded = Vec::new();
        for (k, rec) in file.squares.iter().enumerate() {
            let c: Vec<SiteObject> = rec.corners.iter().map(|n| get(&site, n)).collect::<Result<_>>()?;
            let sq = match backend {
                Some(Backend::Declared) => {
                    let d: Vec<DeclaredObject> = c.iter().map(|o| o.as_declared().cloned().expect("declared")).collect();
                    let maps = rec.maps.clone().unwrap_or_else(|| {
                        ["top", "left", "p", "i"].map(|m| format!("{m}{k}"))
                    });
                    DistinguishedSquare::declared(
                        rec.kind,
                        [d[0].clone(), d[1].clone(), d[2].clone(), d[3].clone()],
                        maps,
                        rec.declared.clone().unwrap_or_default(),
                    )
                }
                _ => {
                    let t: Vec<ToricObject> = c.iter().map(|o| o.as_toric().cloned().expect("toric")).collect();
                    if rec.kind == SquareKind::Localization {
                        let sq = localization_square(&t[1], &t[3])?;
                        if sq.e != c[0] || !c[2].is_empty() {
                            return Err(Error::Schema(format!("square #{k} is not (X∖U, X, ∅, U)")));
                        }
                        sq
                    } else {
                        DistinguishedSquare::toric_blowup(rec.kind, t[0].clone(), t[1].clone(), t[2].clone(), t[3].clone())?
                    }
                }
            };
            loaded.push(sq);
        }
        for (k, rec) in file.squares.iter().enumerate() {
            for &r in &rec.refined_by {
                let sq = loaded
                    .get(r)
                    .filter(|_| r != k)
                    .cloned()
                    .ok_or_else(|| Error::Schema(format!("square #{k} refined by unknown square #{r}")))?;
                loaded[k].refined_by.push(sq);
            }
        }
        site.squares = loaded;
        let midx = |site: &SitePresentation, n: &str| {
            site.morphisms
                .iter()
                .position(|(m, _)| m == n)
                .ok_or_else(|| Error::Schema(format!("unknown morphism `{n}`")))
        };
        for rec in &file.compositions {
            let t = (midx(&site, &rec.second)?, midx(&site, &rec.first)?, midx(&site, &rec.result)?);
            site.compositions.push(t);
        }
        for rec in &file.pullbacks {
            if rec.square >= site.squares.len() || rec.pulled >= site.squares.len() {
                return Err(Error::Schema("pullback references an unknown square".into()));
            }
            let m = midx(&site, &rec.morphism)?;
            site.pullbacks.push((rec.square, m, rec.pulled));
        }
        Ok(site)
    }

    pub fn to_file(&self) -> SiteFile {
        let objects = self
            .objects
            .iter()
            .map(|(name, o)| ObjectRecord {
                name: name.clone(),
                dim: Some(o.dim()),
                compact: Some(o.is_compact()),
                backend_ref: o.as_toric().map(|t| BackendRef {
                    fan: FanRef::Inline(t.fan().to_file()),
                    cones: (!t.is_whole()).then(|| {
                        t.cone_ids().iter().map(|&c| t.fan().cone(c).rays().to_vec()).collect()
                    }),
                }),
            })
            .collect();
        let obj_name = |o: &SiteObject| self.name_of(o).unwrap_or("?").to_owned();
        let morphisms = self
            .morphisms
            .iter()
            .map(|(name, m)| {
                let (window, map) = match m {
                    SpanMorphism::Toric(t) => (
                        if t.window() == t.source() {
                            None
                        } else if t.window().is_empty() {
                            Some("empty".to_owned())
                        } else {
                            Some(
                                self.name_of(&SiteObject::Toric(t.window().clone()))
                                    .map_or_else(|| t.window().describe(), str::to_owned),
                            )
                        },
                        "toric".to_owned(),
                    ),
                    SpanMorphism::Declared(d) => (
                        match &d.window {
                            DeclaredWindow::Whole => None,
                            DeclaredWindow::Empty => Some("empty".into()),
                            DeclaredWindow::Open(u) => Some(u.clone()),
                        },
                        if d.maps.is_empty() { "id".into() } else { d.maps.join("∘") },
                    ),
                };
                MorphismRecord {
                    name: Some(name.clone()),
                    src: obj_name(&m.source()),
                    window,
                    map,
                    tgt: obj_name(&m.target()),
                }
            })
            .collect();
        let squares = self
            .squares
            .iter()
            .map(|s| SquareRecord {
                kind: s.kind,
                corners: [obj_name(&s.e), obj_name(&s.y), obj_name(&s.c), obj_name(&s.x)],
                maps: None,
                declared: s.flags.clone(),
                refined_by: s
                    .refined_by
                    .iter()
                    .filter_map(|r| self.squares.iter().position(|x| x == r))
                    .collect(),
            })
            .collect();
        let mname = |i: usize| self.morphisms[i].0.clone();
        SiteFile {
            objects,
            morphisms,
            squares,
            compositions: self
                .compositions
                .iter()
                .map(|&(a, b, r)| CompositionRecord {
                    second: mname(a),
                    first: mname(b),
                    result: mname(r),
                })
                .collect(),
            pullbacks: self
                .pullbacks
                .iter()
                .map(|&(s, m, p)| PullbackRecord {
                    square: s,
                    morphism: mname(m),
                    pulled: p,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("site files serialize")
    }
}

fn load_object(rec: &ObjectRecord, fans: &mut BTreeMap<String, Arc<Fan>>) -> Result<SiteObject> {
    let Some(b) = &rec.backend_ref else {
        let dim = rec.dim.ok_or_else(|| Error::MissingDimension(rec.name.clone()))?;
        if dim < -1 {
            return Err(Error::Schema(format!("dimension of `{}` is below -1", rec.name)));
        }
        return Ok(SiteObject::Declared(DeclaredObject::new(&rec.name, dim, rec.compact.unwrap_or(false))));
    };
    let fan = match &b.fan {
        FanRef::Builtin(n) => Fan::builtin(n)?,
        FanRef::Inline(f) => Fan::from_file(f)?,
    };
    let fan = fans.entry(fan.key()).or_insert_with(|| Arc::new(fan)).clone();
    let obj = match &b.cones {
        None => ToricObject::whole(fan),
        Some(cs) => {
            let cones: Vec<Cone> = cs.iter().map(|c| Cone::new(c.clone())).collect();
            ToricObject::from_cones(fan, &cones)?
        }
    };
    if rec.dim.is_some_and(|d| d != obj.dim()) || rec.compact.is_some_and(|c| c != obj.is_compact()) {
        return Err(Error::Schema(format!(
            "declared dimension or compactness of `{}` disagrees with its fan",
            rec.name
        )));
    }
    Ok(SiteObject::Toric(obj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::site::{check_c_complete, validate_square, CheckStatus};

    const DECLARED: &str = r#"{
        "objects": [
            {"name": "X", "dim": 2, "compact": true},
            {"name": "Y", "dim": 2, "compact": true},
            {"name": "C", "dim": 0, "compact": true},
            {"name": "E", "dim": 1, "compact": true}
        ],
        "morphisms": [ {"name": "idX", "src": "X", "map": "id", "tgt": "X"} ],
        "squares": [
            {"kind": "abstract_blowup", "corners": ["E", "Y", "C", "X"],
             "declared": {"closed_immersion": true, "proper": true, "cartesian": true}}
        ]
    }"#;

    #[test]
    fn declared_site() {
        let site = SitePresentation::from_json(DECLARED).unwrap();
        assert_eq!(site.backend(), Some(Backend::Declared));
        let sq = &site.squares()[0];
        let r = validate_square(sq);
        assert!(r.failures().any(|e| e.status == CheckStatus::Fail("restriction-iso undeclared".into())));
        let id = site.morphism("idX").unwrap();
        assert!(check_c_complete(&site, sq, id, 3).found());
    }

    #[test]
    fn toric_site_round_trip() {
        let text = r#"{
            "objects": [
                {"name": "P1", "backend_ref": {"fan": "P1"}},
                {"name": "A1", "backend_ref": {"fan": "P1", "cones": [[], [1]]}},
                {"name": "pt", "backend_ref": {"fan": "P1", "cones": [[0]]}},
                {"name": "none", "backend_ref": {"fan": "P1", "cones": []}}
            ],
            "morphisms": [ {"src": "P1", "window": "A1", "map": "toric", "tgt": "A1"} ],
            "squares": [ {"kind": "localization", "corners": ["pt", "P1", "none", "A1"]} ]
        }"#;
        let site = SitePresentation::from_json(text).unwrap();
        assert_eq!(site.squares().len(), 1);
        assert!(validate_square(&site.squares()[0]).passed());
        let again = SitePresentation::from_json(&site.to_json()).unwrap();
        assert_eq!(again.squares(), site.squares());
        assert_eq!(again.objects().len(), site.objects().len());
    }

    #[test]
    fn schema_errors() {
        let missing = r#"{"objects": [{"name": "X"}]}"#;
        assert!(matches!(SitePresentation::from_json(missing), Err(Error::MissingDimension(_))));
        let bad = r#"{"objects": [{"name": "X", "dim": 1}], "morphisms": [{"src": "X", "map": "f", "tgt": "Z"}]}"#;
        assert!(matches!(SitePresentation::from_json(bad), Err(Error::Schema(_))));
    }
}
