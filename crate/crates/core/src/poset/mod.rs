//! Ranked face posets of nice manifolds with corners.
//!
//! A [`FacePoset`] stores its faces, their dimensions and the cover
//! relation ("lower is a codimension-one face of upper"). Containment is the
//! transitive closure of the covers and is computed once at construction.
//! Values are immutable afterwards.

mod build;
mod iso;

pub use build::{delta, product, sigma, FactorKind, FactorType, ProductPoset, ProductType};
pub use iso::{automorphisms, automorphisms_with_bound, isomorphism, FaceMap, DEFAULT_AUT_BOUND};

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque face label, unique within one poset.
pub type FaceId = String;

#[derive(Clone, Debug)]
pub struct FacePoset {
    dim: usize,
    ids: Vec<FaceId>,
    dims: Vec<usize>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    top: usize,
    index: HashMap<FaceId, usize>,
    // below[f] holds every g <= f, f included.
    below: Vec<FixedBitSet>,
    facets_above: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct FaceJson {
    id: String,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct PosetJson {
    dim: usize,
    faces: Vec<FaceJson>,
    covers: Vec<(String, String)>,
}

impl FacePoset {
    /// Builds a poset from labelled faces and cover pairs `(lower, upper)`.
    pub fn new(dim: usize, faces: Vec<(FaceId, usize)>, covers: Vec<(FaceId, FaceId)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(faces.len());
        for (i, (id, _)) in faces.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::MalformedPoset(format!("duplicate face id {id:?}")));
            }
        }
        let mut pairs = Vec::with_capacity(covers.len());
        for (lo, hi) in &covers {
            let l = *index
                .get(lo)
                .ok_or_else(|| Error::MalformedPoset(format!("cover references unknown face {lo:?}")))?;
            let h = *index
                .get(hi)
                .ok_or_else(|| Error::MalformedPoset(format!("cover references unknown face {hi:?}")))?;
            pairs.push((l, h));
        }
        let (ids, dims): (Vec<_>, Vec<_>) = faces.into_iter().unzip();
        Self::from_parts(dim, ids, dims, pairs)
    }

    pub(crate) fn from_parts(
        dim: usize,
        ids: Vec<FaceId>,
        dims: Vec<usize>,
        covers: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let len = ids.len();
        if let Some(i) = dims.iter().position(|&d| d > dim) {
            return Err(Error::MalformedPoset(format!(
                "face {:?} has dimension {} above the poset dimension {dim}",
                ids[i], dims[i]
            )));
        }
        let tops: Vec<usize> = (0..len).filter(|&i| dims[i] == dim).collect();
        let top = match tops.as_slice() {
            [t] => *t,
            [] => return Err(Error::MalformedPoset(format!("no face of dimension {dim}"))),
            _ => {
                return Err(Error::MalformedPoset(format!(
                    "{} faces of top dimension {dim}; exactly one is required",
                    tops.len()
                )))
            }
        };
        let mut up = vec![Vec::new(); len];
        let mut down = vec![Vec::new(); len];
        for &(l, h) in &covers {
            if dims[l] + 1 != dims[h] {
                return Err(Error::MalformedPoset(format!(
                    "cover ({:?}, {:?}) goes from dimension {} to {}",
                    ids[l], ids[h], dims[l], dims[h]
                )));
            }
            up[l].push(h);
            down[h].push(l);
        }
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }

        let mut by_dim: Vec<usize> = (0..len).collect();
        by_dim.sort_by_key(|&i| (dims[i], i));
        let mut below = vec![FixedBitSet::with_capacity(len); len];
        for &f in &by_dim {
            let mut set = FixedBitSet::with_capacity(len);
            set.insert(f);
            for &g in &down[f] {
                set.union_with(&below[g]);
            }
            below[f] = set;
        }

        let mut facets_above = vec![Vec::new(); len];
        if dim > 0 {
            for f in (0..len).filter(|&i| dims[i] == dim - 1) {
                for g in below[f].ones() {
                    facets_above[g].push(f);
                }
            }
        }

        let index = ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        Ok(FacePoset { dim, ids, dims, up, down, top, index, below, facets_above })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PosetJson = serde_json::from_str(text)?;
        Self::new(
            raw.dim,
            raw.faces.into_iter().map(|f| (f.id, f.dim)).collect(),
            raw.covers,
        )
    }

    /// Pretty-printed JSON in the `{"dim", "faces", "covers"}` layout.
    pub fn to_json(&self) -> String {
        let mut covers: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|h| self.down[h].iter().map(move |&l| (l, h)))
            .collect();
        covers.sort_unstable();
        let raw = PosetJson {
            dim: self.dim,
            faces: (0..self.len()).map(|i| FaceJson { id: self.ids[i].clone(), dim: self.dims[i] }).collect(),
            covers: covers.into_iter().map(|(l, h)| (self.ids[l].clone(), self.ids[h].clone())).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("poset serialization cannot fail")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn id(&self, face: usize) -> &str {
        &self.ids[face]
    }

    pub fn ids(&self) -> &[FaceId] {
        &self.ids
    }

    pub fn face_dim(&self, face: usize) -> usize {
        self.dims[face]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::Inconsistent(format!("face {id:?} is not in the poset")))
    }

    pub fn upper_covers(&self, face: usize) -> &[usize] {
        &self.up[face]
    }

    pub fn lower_covers(&self, face: usize) -> &[usize] {
        &self.down[face]
    }

    pub fn faces_of_dim(&self, k: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.dims[i] == k).collect()
    }

    pub fn facets(&self) -> Vec<usize> {
        match self.dim {
            0 => Vec::new(),
            d => self.faces_of_dim(d - 1),
        }
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.faces_of_dim(0)
    }

    /// `f_vector()[k]` is the number of faces of dimension `k`, top included.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim + 1];
        for &d in &self.dims {
            counts[d] += 1;
        }
        counts
    }

    /// `a <= b` in the face order.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.below[b].contains(a)
    }

    /// All faces contained in `face`, itself included.
    pub fn below(&self, face: usize) -> &FixedBitSet {
        &self.below[face]
    }

    /// True when the two faces have a common lower bound, i.e. they intersect.
    pub fn meets(&self, a: usize, b: usize) -> bool {
        !self.below[a].is_disjoint(&self.below[b])
    }

    /// Facets containing `face`; a facet contains itself.
    pub fn facets_above(&self, face: usize) -> &[usize] {
        &self.facets_above[face]
    }

    pub fn vertices_below(&self, face: usize) -> Vec<usize> {
        self.below[face].ones().filter(|&g| self.dims[g] == 0).collect()
    }

    /// Maximal faces among the common lower bounds of `faces`: the components of
    /// their intersection.
    pub fn intersection_components(&self, faces: &[usize]) -> Vec<usize> {
        let Some((&first, rest)) = faces.split_first() else {
            return vec![self.top];
        };
        let mut common = self.below[first].clone();
        for &f in rest {
            common.intersect_with(&self.below[f]);
        }
        common
            .ones()
            .filter(|&g| self.up[g].iter().all(|&h| !common.contains(h)))
            .collect()
    }

    /// The poset of faces below `face`, with `face` as its top. Labels are kept.
    pub fn down_set(&self, face: usize) -> FacePoset {
        let members: Vec<usize> = self.below[face].ones().collect();
        let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let local = &local;
        let covers = members
            .iter()
            .flat_map(|&h| self.down[h].iter().map(move |&l| (local[&l], local[&h])))
            .collect();
        FacePoset::from_parts(
            self.dims[face],
            members.iter().map(|&g| self.ids[g].clone()).collect(),
            members.iter().map(|&g| self.dims[g]).collect(),
            covers,
        )
        .expect("down-sets of a valid poset are valid")
    }

    /// Renames faces through `rename` and lists them in `order`.
    fn reindexed(&self, order: &[usize], rename: impl Fn(usize) -> FaceId) -> Result<FacePoset> {
        let mut pos = vec![0; self.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let covers = (0..self.len())
            .flat_map(|h| self.down[h].iter().map(move |&l| (l, h)))
            .map(|(l, h)| (pos[l], pos[h]))
            .collect();
        FacePoset::from_parts(
            self.dim,
            order.iter().map(|&i| rename(i)).collect(),
            order.iter().map(|&i| self.dims[i]).collect(),
            covers,
        )
    }

    /// A copy with every face renamed to a fresh random token and the faces
    /// listed in random order. Deterministic for a given seed.
    pub fn shuffled(&self, seed: u64) -> FacePoset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut rng);
        let mut tokens: Vec<usize> = (0..self.len()).collect();
        tokens.shuffle(&mut rng);
        self.reindexed(&order, |i| format!("f{}", tokens[i]))
            .expect("relabelling preserves validity")
    }

    /// A copy with faces renamed by `map`; every face must be covered and
    /// the new names must be distinct.
    pub fn relabeled(&self, map: &HashMap<FaceId, FaceId>) -> Result<FacePoset> {
        let order: Vec<usize> = (0..self.len()).collect();
        for id in &self.ids {
            if !map.contains_key(id) {
                return Err(Error::Inconsistent(format!("relabelling misses face {id:?}")));
            }
        }
        self.reindexed(&order, |i| map[&self.ids[i]].clone())
    }

    pub fn id_set(&self, faces: impl IntoIterator<Item = usize>) -> BTreeSet<FaceId> {
        faces.into_iter().map(|f| self.ids[f].clone()).collect()
    }
}

impl PartialEq for FacePoset {
    /// Structural equality: same labels, dimensions and covers, regardless
    /// of listing order.
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim || self.len() != other.len() {
            return false;
        }
        (0..self.len()).all(|i| {
            let Some(j) = other.index_of(&self.ids[i]) else {
                return false;
            };
            self.dims[i] == other.dims[j]
                && other.id_set(other.down[j].iter().copied()) == self.id_set(self.down[i].iter().copied())
        })
    }
}

impl Eq for FacePoset {}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> FacePoset {
        FacePoset::new(
            1,
            vec![("a".into(), 0), ("b".into(), 0), ("I".into(), 1)],
            vec![("a".into(), "I".into()), ("b".into(), "I".into())],
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip() {
        let p = interval();
        let q = FacePoset::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.to_json(), q.to_json());
    }

    #[test]
    fn load_errors() {
        let dup = r#"{"dim":1,"faces":[{"id":"a","dim":0},{"id":"a","dim":1}],"covers":[]}"#;
        assert!(matches!(FacePoset::from_json(dup), Err(Error::MalformedPoset(_))));
        let no_top = r#"{"dim":1,"faces":[{"id":"a","dim":0}],"covers":[]}"#;
        assert!(matches!(FacePoset::from_json(no_top), Err(Error::MalformedPoset(_))));
        let skip = r#"{"dim":2,"faces":[{"id":"a","dim":0},{"id":"T","dim":2}],"covers":[["a","T"]]}"#;
        assert!(matches!(FacePoset::from_json(skip), Err(Error::MalformedPoset(_))));
        let unknown = r#"{"dim":1,"faces":[{"id":"T","dim":1}],"covers":[["x","T"]]}"#;
        assert!(matches!(FacePoset::from_json(unknown), Err(Error::MalformedPoset(_))));
        assert!(FacePoset::from_json("{").is_err());
    }

    #[test]
    fn containment_and_components() {
        let p = interval();
        let (a, b, t) = (p.index_of("a").unwrap(), p.index_of("b").unwrap(), p.top());
        assert!(p.le(a, t) && !p.le(t, a) && p.le(a, a));
        assert!(!p.meets(a, b));
        assert_eq!(p.intersection_components(&[a, b]), Vec::<usize>::new());
        assert_eq!(p.facets_above(a), &[a]);
        assert_eq!(p.f_vector(), vec![2, 1]);
    }

    #[test]
    fn shuffle_is_deterministic() {
        let p = delta(3);
        assert_eq!(p.shuffled(7).to_json(), p.shuffled(7).to_json());
        assert_ne!(p.shuffled(7).to_json(), p.shuffled(8).to_json());
        assert_eq!(p.shuffled(7).f_vector(), p.f_vector());
    }
}
