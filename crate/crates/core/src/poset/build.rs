//! Builders for the simplex, the orbit space of the linear torus action on
//! an even sphere, and products of face posets.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{FaceId, FacePoset};
use crate::error::{Error, Result};

/// `Sigma` sorts before `Delta`; canonical product order relies on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FactorKind {
    Sigma,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFactor")]
pub struct FactorType {
    kind: FactorKind,
    n: usize,
}

#[derive(Deserialize)]
struct RawFactor {
    kind: FactorKind,
    n: usize,
}

impl TryFrom<RawFactor> for FactorType {
    type Error = Error;

    fn try_from(raw: RawFactor) -> Result<Self> {
        FactorType::new(raw.kind, raw.n)
    }
}

impl FactorType {
    /// Rejects `Sigma(n)` for `n < 2` and `Delta(0)`.
    pub fn new(kind: FactorKind, n: usize) -> Result<Self> {
        match kind {
            FactorKind::Sigma if n < 2 => Err(Error::InvalidFactor(format!("Sigma({n}) is not allowed; use Delta(1)"))),
            FactorKind::Delta if n < 1 => Err(Error::InvalidFactor("Delta(0) is a point, not a factor".into())),
            _ => Ok(FactorType { kind, n }),
        }
    }

    /// Like [`FactorType::new`] but maps `Sigma(1)` to `Delta(1)`.
    pub fn normalized(kind: FactorKind, n: usize) -> Result<Self> {
        match (kind, n) {
            (FactorKind::Sigma, 1) => {
                log::warn!("Sigma(1) normalized to Delta(1)");
                Self::new(FactorKind::Delta, 1)
            }
            _ => Self::new(kind, n),
        }
    }

    pub fn sigma(n: usize) -> Result<Self> {
        Self::new(FactorKind::Sigma, n)
    }

    pub fn delta(n: usize) -> Result<Self> {
        Self::new(FactorKind::Delta, n)
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facet_count(&self) -> usize {
        match self.kind {
            FactorKind::Sigma => self.n,
            FactorKind::Delta => self.n + 1,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self.kind {
            FactorKind::Sigma => 2,
            FactorKind::Delta => self.n + 1,
        }
    }

    pub fn build(&self) -> FacePoset {
        match self.kind {
            FactorKind::Sigma => sigma(self.n).expect("validated at construction"),
            FactorKind::Delta => delta(self.n),
        }
    }
}

impl fmt::Display for FactorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FactorKind::Sigma => write!(f, "Sigma({})", self.n),
            FactorKind::Delta => write!(f, "Delta({})", self.n),
        }
    }
}

/// An ordered list of factors. The empty product is a point.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductType(Vec<FactorType>);

impl ProductType {
    pub fn new(factors: Vec<FactorType>) -> Self {
        ProductType(factors)
    }

    pub fn point() -> Self {
        ProductType(Vec::new())
    }

    pub fn factors(&self) -> &[FactorType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sigma factors first by `n`, then Delta factors by `n`.
    pub fn canonical(&self) -> ProductType {
        let mut factors = self.0.clone();
        factors.sort();
        ProductType(factors)
    }

    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn dim(&self) -> usize {
        self.0.iter().map(|f| f.n).sum()
    }

    pub fn facet_count(&self) -> usize {
        self.0.iter().map(FactorType::facet_count).sum()
    }

    pub fn vertex_count(&self) -> u128 {
        self.0.iter().map(|f| f.vertex_count() as u128).product()
    }

    pub fn count(&self, kind: FactorKind) -> usize {
        self.0.iter().filter(|f| f.kind == kind).count()
    }

    pub fn build(&self) -> FacePoset {
        self.build_product().poset
    }

    pub fn build_product(&self) -> ProductPoset {
        let factor_posets: Vec<FacePoset> = self.0.iter().map(FactorType::build).collect();
        let poset = match factor_posets.as_slice() {
            [] => delta(0),
            [only] => only.clone(),
            [first, rest @ ..] => rest.iter().fold(first.clone(), |acc, p| product(&acc, p)),
        };
        ProductPoset {
            sizes: factor_posets.iter().map(FacePoset::len).collect(),
            factors: self.0.clone(),
            factor_posets,
            poset,
        }
    }
}

impl fmt::Display for ProductType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "point");
        }
        write!(f, "{}", self.0.iter().join("x"))
    }
}

impl FromStr for ProductType {
    type Err = Error;

    /// Factors separated by `x`, each `Sigma(n)` or `Delta(n)`; whitespace is
    /// ignored and case does not matter. `point` is the empty product.
    fn from_str(input: &str) -> Result<Self> {
        let err = |reason: String| Error::TypeParse { input: input.to_string(), reason };
        let squashed: String = input.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        if squashed == "point" {
            return Ok(ProductType::point());
        }
        if squashed.is_empty() {
            return Err(err("empty type string".into()));
        }
        let mut factors = Vec::new();
        for token in squashed.split('x') {
            let (kind, rest) = if let Some(rest) = token.strip_prefix("sigma") {
                (FactorKind::Sigma, rest)
            } else if let Some(rest) = token.strip_prefix("delta") {
                (FactorKind::Delta, rest)
            } else {
                return Err(err(format!("unknown factor {token:?}")));
            };
            let digits = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| err(format!("expected parenthesised dimension in {token:?}")))?;
            let n: usize = digits.parse().map_err(|_| err(format!("bad dimension {digits:?}")))?;
            factors.push(FactorType::normalized(kind, n).map_err(|e| err(e.to_string()))?);
        }
        Ok(ProductType(factors))
    }
}

/// A built product together with its factor layout. Face `i` of `poset`
/// corresponds to the tuple of factor faces given by [`ProductPoset::decode`].
#[derive(Clone, Debug)]
pub struct ProductPoset {
    pub poset: FacePoset,
    pub factors: Vec<FactorType>,
    pub factor_posets: Vec<FacePoset>,
    sizes: Vec<usize>,
}

impl ProductPoset {
    pub fn decode(&self, mut face: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.sizes.len()];
        for (slot, &size) in tuple.iter_mut().zip(&self.sizes).rev() {
            *slot = face % size;
            face /= size;
        }
        tuple
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().zip(&self.sizes).fold(0, |acc, (&c, &size)| acc * size + c)
    }

    /// Index of the factor a facet belongs to; `None` for non-facets.
    pub fn facet_factor(&self, face: usize) -> Option<usize> {
        if self.poset.dim() == 0 || self.poset.face_dim(face) + 1 != self.poset.dim() {
            return None;
        }
        if self.factors.len() == 1 {
            return Some(0);
        }
        self.decode(face)
            .iter()
            .enumerate()
            .position(|(k, &c)| c != self.factor_posets[k].top())
    }
}

fn subset_label(elements: impl IntoIterator<Item = usize>) -> FaceId {
    format!("{{{}}}", elements.into_iter().join(","))
}

/// Face poset of the `n`-simplex. Faces are labelled by their vertex sets.
pub fn delta(n: usize) -> FacePoset {
    assert!(n < usize::BITS as usize - 1, "delta({n}) is too large");
    let full = (1usize << (n + 1)) - 1;
    let mut masks: Vec<usize> = (1..=full).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m.reverse_bits()));
    let pos: std::collections::HashMap<usize, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let elements = |m: usize| (0..=n).filter(move |&b| m & (1 << b) != 0);
    let ids = masks.iter().map(|&m| subset_label(elements(m))).collect();
    let dims = masks.iter().map(|&m| m.count_ones() as usize - 1).collect();
    let covers = masks
        .iter()
        .filter(|&&m| m.count_ones() >= 2)
        .flat_map(|&m| elements(m).map(move |b| (m & !(1 << b), m)))
        .map(|(lo, hi)| (pos[&lo], pos[&hi]))
        .collect();
    FacePoset::from_parts(n, ids, dims, covers).expect("simplex poset is valid")
}

/// Face poset of the orbit space of the linear `T^n`-action on `S^{2n}`.
///
/// The face labelled by `S ⊊ {1..n}` is where the coordinates in `S` vanish;
/// it has dimension `n - |S|`. Where all coordinates vanish, two vertices
/// `+` and `-` remain, below every face.
pub fn sigma(n: usize) -> Result<FacePoset> {
    if n < 2 {
        return Err(Error::InvalidFactor(format!("sigma({n}) is not allowed; use delta(1)")));
    }
    assert!(n < usize::BITS as usize - 1, "sigma({n}) is too large");
    let full = (1usize << n) - 1;
    let mut masks: Vec<usize> = (0..full).collect();
    masks.sort_by_key(|&m| (std::cmp::Reverse(m.count_ones()), m.reverse_bits()));
    let elements = |m: usize| (0..n).filter(move |&b| m & (1 << b) != 0).map(|b| b + 1);

    let mut ids: Vec<FaceId> = vec!["+".into(), "-".into()];
    let mut dims = vec![0, 0];
    for &m in &masks {
        ids.push(subset_label(elements(m)));
        dims.push(n - m.count_ones() as usize);
    }
    let slot: std::collections::HashMap<usize, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i + 2)).collect();
    let pos = |m: usize| slot[&m];
    let mut covers = Vec::new();
    for &m in &masks {
        if m.count_ones() as usize == n - 1 {
            covers.push((0, pos(m)));
            covers.push((1, pos(m)));
        }
        for b in 0..n {
            let bigger = m | (1 << b);
            if bigger != m && bigger != full {
                covers.push((pos(bigger), pos(m)));
            }
        }
    }
    FacePoset::from_parts(n, ids, dims, covers)
}

/// Product of two face posets. The face `(f, g)` sits at index
/// `f * |q| + g` and is labelled `(f,g)`.
pub fn product(p: &FacePoset, q: &FacePoset) -> FacePoset {
    let (np, nq) = (p.len(), q.len());
    let mut seen = HashSet::with_capacity(np * nq);
    let mut ids = Vec::with_capacity(np * nq);
    let mut dims = Vec::with_capacity(np * nq);
    for f in 0..np {
        for g in 0..nq {
            let mut id = format!("({},{})", p.id(f), q.id(g));
            // Labels with embedded separators could collide; keep them unique.
            let mut k = 1;
            while seen.contains(&id) {
                id = format!("({},{})#{k}", p.id(f), q.id(g));
                k += 1;
            }
            seen.insert(id.clone());
            ids.push(id);
            dims.push(p.face_dim(f) + q.face_dim(g));
        }
    }
    let mut covers = Vec::new();
    for f in 0..np {
        for g in 0..nq {
            let here = f * nq + g;
            covers.extend(p.lower_covers(f).iter().map(|&fl| (fl * nq + g, here)));
            covers.extend(q.lower_covers(g).iter().map(|&gl| (f * nq + gl, here)));
        }
    }
    FacePoset::from_parts(p.dim() + q.dim(), ids, dims, covers).expect("product of valid posets is valid")
}
