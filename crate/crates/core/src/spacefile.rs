//! JSON space files: a ground space plus named convexity definitions.
//!
//! ```
//! use fractoconvex::spacefile::SpaceFile;
//!
//! let text = r#"{
//!   "n": 2, "size": 4,
//!   "convexities": [
//!     {"id": "G1", "kind": "interval"},
//!     {"id": "G2", "kind": "permuted_interval", "perm": [0, 2, 1, 3]}
//!   ]
//! }"#;
//! let space = SpaceFile::from_json(text)?.build()?;
//! assert_eq!(space.convexities().len(), 2);
//! # Ok::<(), fractoconvex::Error>(())
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::convexity::{make_convexity, BaseHull, Convexity};
use crate::error::{Error, Result};
use crate::registry::ConvexSpace;
use crate::space::{ElemSet, GroundSpace};
use crate::sphere::{cone_convexity, median_nn_chord, norm, SphereModel, Vec3};
use crate::zline::ZLineModel;

/// Tolerance on `|p| = 1` for sphere points read from a file.
const UNIT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub n: usize,
    pub size: usize,
    pub convexities: Vec<ConvexityDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConvexityDef {
    /// Generator table keyed by comma-joined ascending ids. `""` and
    /// singleton keys may be omitted.
    Explicit { id: String, hull: BTreeMap<String, Vec<usize>> },
    Interval { id: String },
    PermutedInterval { id: String, perm: Vec<usize> },
    /// Cone segments from `center` over the sample `points`; `tol` defaults
    /// to 1.5 times the median nearest-neighbor chord.
    Robinson {
        id: String,
        points: Vec<Vec3>,
        center: Vec3,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
}

impl ConvexityDef {
    pub fn id(&self) -> &str {
        match self {
            ConvexityDef::Explicit { id, .. }
            | ConvexityDef::Interval { id }
            | ConvexityDef::PermutedInterval { id, .. }
            | ConvexityDef::Robinson { id, .. } => id,
        }
    }

    fn build(&self, space: &GroundSpace) -> Result<Convexity> {
        let id = self.id().to_string();
        match self {
            ConvexityDef::Explicit { hull, .. } => {
                let entries = hull
                    .iter()
                    .map(|(key, h)| Ok((parse_key(key, space)?, to_set(h, space)?)))
                    .collect::<Result<Vec<_>>>()?;
                make_convexity(space, BaseHull::from_entries(space, entries)?, id)
            }
            ConvexityDef::Interval { .. } => Ok(Convexity::interval(space, id)),
            ConvexityDef::PermutedInterval { perm, .. } => Convexity::permuted_interval(space, id, perm),
            ConvexityDef::Robinson { points, center, tol, .. } => {
                if points.len() != space.size() {
                    return Err(Error::SpaceFile(format!(
                        "`{id}` has {} points for a space of size {}",
                        points.len(),
                        space.size()
                    )));
                }
                if space.arity() < 2 {
                    return Err(Error::SpaceFile(format!("`{id}` is binary and needs n >= 2")));
                }
                if let Some(i) = points.iter().position(|p| (norm(p) - 1.0).abs() > UNIT_TOL) {
                    return Err(Error::SpaceFile(format!("`{id}`: point {i} is not on the unit sphere")));
                }
                if norm(center) >= 1.0 {
                    return Err(Error::SpaceFile(format!("`{id}`: center is not inside the ball")));
                }
                let tol = tol.unwrap_or_else(|| 1.5 * median_nn_chord(points));
                if !(tol.is_finite() && tol >= 0.0) {
                    return Err(Error::SpaceFile(format!("`{id}`: invalid tol {tol}")));
                }
                let conv = cone_convexity(points, center, tol, id)?;
                if space.arity() == 2 {
                    Ok(conv)
                } else {
                    conv.with_arity(space.arity())
                }
            }
        }
    }
}

fn to_set(ids: &[usize], space: &GroundSpace) -> Result<ElemSet> {
    let set: ElemSet = ids
        .iter()
        .map(|&x| {
            if x < space.size() {
                Ok(x)
            } else {
                Err(Error::OutOfRange { element: x, size: space.size() })
            }
        })
        .collect::<Result<_>>()?;
    Ok(set)
}

/// `"0,3,5"` to a set; ids must be strictly ascending.
fn parse_key(key: &str, space: &GroundSpace) -> Result<ElemSet> {
    let key = key.trim();
    if key.is_empty() {
        return Ok(ElemSet::EMPTY);
    }
    let ids = key
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| Error::SpaceFile(format!("bad hull key `{key}`"))))
        .collect::<Result<Vec<_>>>()?;
    if ids.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::SpaceFile(format!("hull key `{key}` is not strictly ascending")));
    }
    if ids.len() > space.arity() {
        return Err(Error::SpaceFile(format!("hull key `{key}` is larger than n = {}", space.arity())));
    }
    to_set(&ids, space)
}

fn key_of(b: &ElemSet) -> String {
    b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl SpaceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SpaceFile(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::SpaceFile(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("space files serialize")
    }

    /// Builds every convexity and registers it under its id.
    pub fn build(&self) -> Result<ConvexSpace> {
        let ground = GroundSpace::new(self.size, self.n)?;
        let mut space = ConvexSpace::new(ground.clone());
        for def in &self.convexities {
            space.insert(def.build(&ground)?)?;
        }
        Ok(space)
    }

    /// Explicit definition holding the full base table of `conv`, with
    /// trivial `∅` and singleton entries left out.
    pub fn explicit(conv: &Convexity) -> ConvexityDef {
        let hull = conv
            .space()
            .small_subsets()
            .filter_map(|b| {
                let h = conv.base_entry(&b).expect("small subset");
                (b.len() > 1 || h != b).then(|| (key_of(&b), h.to_vec()))
            })
            .collect();
        ConvexityDef::Explicit { id: conv.id().to_string(), hull }
    }

    /// `G1` as an interval convexity and `G2` as the permuted one.
    pub fn zline(model: &ZLineModel) -> Self {
        SpaceFile {
            n: 2,
            size: model.window_size(),
            convexities: vec![
                ConvexityDef::Interval { id: model.g1().id().to_string() },
                ConvexityDef::PermutedInterval { id: model.g2().id().to_string(), perm: model.perm().to_vec() },
            ],
        }
    }

    /// One robinson convexity per center, with the model's tolerance.
    pub fn sphere(model: &SphereModel) -> Self {
        let convexities = model
            .centers()
            .iter()
            .zip(model.convexities())
            .map(|(c, g)| ConvexityDef::Robinson {
                id: g.id().to_string(),
                points: model.points().to_vec(),
                center: *c,
                tol: Some(model.tol()),
            })
            .collect();
        SpaceFile { n: 2, size: model.points().len(), convexities }
    }
}
