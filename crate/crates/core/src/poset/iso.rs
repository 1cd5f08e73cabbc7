//! Exact isomorphism and automorphism search for face posets.
//!
//! A bijection of ranked posets preserves the order iff it preserves
//! dimensions and covers, so the search runs on the Hasse diagram with
//! dimensions as vertex colours. Colours are first refined by iterated
//! neighbourhood hashing; the backtracking then extends a partial map one
//! face at a time along a connected ordering of the diagram.

use std::collections::{BTreeMap, HashMap};

use super::FacePoset;
use crate::error::{Error, Result};

/// Exhaustive automorphism search refuses posets with more faces than this.
pub const DEFAULT_AUT_BOUND: usize = 500;

/// A map between the faces of two posets, stored by face index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceMap(Vec<usize>);

impl FaceMap {
    pub fn new(images: Vec<usize>) -> Self {
        FaceMap(images)
    }

    pub fn identity(len: usize) -> Self {
        FaceMap((0..len).collect())
    }

    pub fn image(&self, face: usize) -> usize {
        self.0[face]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &FaceMap) -> FaceMap {
        FaceMap(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> FaceMap {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        FaceMap(inv)
    }

    pub fn to_id_map(&self, from: &FacePoset, to: &FacePoset) -> BTreeMap<String, String> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &j)| (from.id(i).to_string(), to.id(j).to_string()))
            .collect()
    }

    pub fn from_id_map(map: &BTreeMap<String, String>, from: &FacePoset, to: &FacePoset) -> Result<FaceMap> {
        if map.len() != from.len() {
            return Err(Error::Inconsistent(format!(
                "face map has {} entries for a poset with {} faces",
                map.len(),
                from.len()
            )));
        }
        let mut images = vec![usize::MAX; from.len()];
        for (a, b) in map {
            images[from.require(a)?] = to.require(b)?;
        }
        Ok(FaceMap(images))
    }

    /// True iff this is a dimension- and cover-preserving bijection `p -> q`.
    pub fn is_isomorphism(&self, p: &FacePoset, q: &FacePoset) -> bool {
        if self.0.len() != p.len() || p.len() != q.len() || p.dim() != q.dim() {
            return false;
        }
        let mut hit = vec![false; q.len()];
        for &j in &self.0 {
            if j >= q.len() || std::mem::replace(&mut hit[j], true) {
                return false;
            }
        }
        (0..p.len()).all(|f| {
            let g = self.0[f];
            if p.face_dim(f) != q.face_dim(g) || p.upper_covers(f).len() != q.upper_covers(g).len() {
                return false;
            }
            p.upper_covers(f).iter().all(|&h| q.upper_covers(g).binary_search(&self.0[h]).is_ok())
        })
    }
}

fn neighbors(p: &FacePoset, f: usize) -> impl Iterator<Item = usize> + '_ {
    p.upper_covers(f).iter().chain(p.lower_covers(f)).copied()
}

fn adjacent(p: &FacePoset, a: usize, b: usize) -> bool {
    let (da, db) = (p.face_dim(a), p.face_dim(b));
    if da + 1 == db {
        p.upper_covers(a).binary_search(&b).is_ok()
    } else if db + 1 == da {
        p.lower_covers(a).binary_search(&b).is_ok()
    } else {
        false
    }
}

/// Joint colour refinement. `seeds[k][f]` is extra initial information for
/// face `f` of poset `k`. Colours are comparable across the posets.
fn refine(posets: &[&FacePoset], seeds: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut palette: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut colors: Vec<Vec<usize>> = posets
        .iter()
        .zip(seeds)
        .map(|(p, seed)| {
            (0..p.len())
                .map(|f| vec![p.face_dim(f), p.facets_above(f).len(), p.vertices_below(f).len(), p.below(f).count_ones(..), seed[f]])
                .collect::<Vec<_>>()
        })
        .map(|keys| {
            keys.into_iter()
                .map(|k| {
                    let next = palette.len();
                    *palette.entry(k).or_insert(next)
                })
                .collect()
        })
        .collect();
    let mut classes = palette.len();
    loop {
        let mut palette: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let next: Vec<Vec<usize>> = posets
            .iter()
            .zip(&colors)
            .map(|(p, col)| {
                (0..p.len())
                    .map(|f| {
                        let mut ups: Vec<usize> = p.upper_covers(f).iter().map(|&h| col[h]).collect();
                        let mut downs: Vec<usize> = p.lower_covers(f).iter().map(|&h| col[h]).collect();
                        ups.sort_unstable();
                        downs.sort_unstable();
                        let mut key = vec![col[f], ups.len()];
                        key.extend(ups);
                        key.push(usize::MAX);
                        key.extend(downs);
                        key
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|keys| {
                keys.into_iter()
                    .map(|k| {
                        let n = palette.len();
                        *palette.entry(k).or_insert(n)
                    })
                    .collect()
            })
            .collect();
        let refined = palette.len();
        colors = next;
        if refined == classes {
            return colors;
        }
        classes = refined;
    }
}

fn histogram(colors: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &c in colors {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

struct Search<'a> {
    q: &'a FacePoset,
    cp: Vec<usize>,
    cq: Vec<usize>,
    order: Vec<usize>,
    // for order[d]: earlier neighbours in the ordering
    earlier: Vec<Vec<usize>>,
    classes: HashMap<usize, Vec<usize>>,
    rank: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    find_all: bool,
    found: Vec<FaceMap>,
}

impl<'a> Search<'a> {
    fn new(p: &'a FacePoset, q: &'a FacePoset, cp: Vec<usize>, cq: Vec<usize>, find_all: bool) -> Self {
        let n = p.len();
        let class_size = histogram(&cp);

        let mut order = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        let mut conn = vec![0usize; n];
        while order.len() < n {
            let next = (0..n)
                .filter(|&f| !placed[f])
                .min_by_key(|&f| (std::cmp::Reverse(conn[f]), class_size[&cp[f]], f))
                .expect("an unplaced face remains");
            placed[next] = true;
            for nb in neighbors(p, next) {
                conn[nb] += 1;
            }
            order.push(next);
        }
        let mut position = vec![0; n];
        for (d, &f) in order.iter().enumerate() {
            position[f] = d;
        }
        let earlier = order
            .iter()
            .enumerate()
            .map(|(d, &f)| neighbors(p, f).filter(|&g| position[g] < d).collect())
            .collect();

        let mut by_key: Vec<usize> = (0..q.len()).collect();
        by_key.sort_by(|&a, &b| {
            (q.face_dim(a), q.facets_above(a).len(), q.id(a)).cmp(&(q.face_dim(b), q.facets_above(b).len(), q.id(b)))
        });
        let mut rank = vec![0; q.len()];
        for (r, &g) in by_key.iter().enumerate() {
            rank[g] = r;
        }
        let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
        for &g in &by_key {
            classes.entry(cq[g]).or_default().push(g);
        }

        Search {
            q,
            cp,
            cq,
            order,
            earlier,
            classes,
            rank,
            map: vec![usize::MAX; n],
            used: vec![false; q.len()],
            find_all,
            found: Vec::new(),
        }
    }

    fn candidates(&self, depth: usize) -> Vec<usize> {
        let f = self.order[depth];
        let color = self.cp[f];
        let mut out: Vec<usize> = match self.earlier[depth].first() {
            Some(&anchor) => neighbors(self.q, self.map[anchor])
                .filter(|&g| self.cq[g] == color && !self.used[g])
                .collect(),
            None => self
                .classes
                .get(&color)
                .map(|list| list.iter().copied().filter(|&g| !self.used[g]).collect())
                .unwrap_or_default(),
        };
        out.sort_by_key(|&g| self.rank[g]);
        out
    }

    fn feasible(&self, depth: usize, g: usize) -> bool {
        let earlier = &self.earlier[depth];
        earlier.iter().all(|&e| adjacent(self.q, self.map[e], g))
            && neighbors(self.q, g).filter(|&h| self.used[h]).count() == earlier.len()
    }

    /// Returns true when the search should stop.
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            self.found.push(FaceMap(self.map.clone()));
            return !self.find_all;
        }
        let f = self.order[depth];
        for g in self.candidates(depth) {
            if !self.feasible(depth, g) {
                continue;
            }
            self.map[f] = g;
            self.used[g] = true;
            let stop = self.run(depth + 1);
            self.used[g] = false;
            self.map[f] = usize::MAX;
            if stop {
                return true;
            }
        }
        false
    }
}

/// A dimension- and cover-preserving bijection `p -> q`, if one exists.
pub fn isomorphism(p: &FacePoset, q: &FacePoset) -> Option<FaceMap> {
    if p.dim() != q.dim() || p.len() != q.len() || p.f_vector() != q.f_vector() {
        return None;
    }
    let colors = refine(&[p, q], &[vec![0; p.len()], vec![0; q.len()]]);
    let (cp, cq) = (colors[0].clone(), colors[1].clone());
    if histogram(&cp) != histogram(&cq) {
        return None;
    }
    let mut search = Search::new(p, q, cp, cq, false);
    search.run(0);
    search.found.pop()
}

/// All automorphisms of `p` fixing every face in `pinned`, using the default
/// size bound.
pub fn automorphisms(p: &FacePoset, pinned: &[usize]) -> Result<Vec<FaceMap>> {
    automorphisms_with_bound(p, pinned, DEFAULT_AUT_BOUND)
}

pub fn automorphisms_with_bound(p: &FacePoset, pinned: &[usize], bound: usize) -> Result<Vec<FaceMap>> {
    if p.len() > bound {
        return Err(Error::SearchTooLarge { faces: p.len(), bound });
    }
    let mut seed = vec![0; p.len()];
    for (k, &f) in pinned.iter().enumerate() {
        seed[f] = k + 1;
    }
    let colors = refine(&[p], &[seed]);
    let mut search = Search::new(p, p, colors[0].clone(), colors[0].clone(), true);
    search.run(0);
    let mut found = search.found;
    found.sort();
    Ok(found)
}
