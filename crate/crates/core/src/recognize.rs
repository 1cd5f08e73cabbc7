//! Recognition of `∏ Σ^{n_i} × ∏ Δ^{n_j}` face posets.
//!
//! [`recognize`] enumerates the product types compatible with the dimension,
//! facet count and vertex count of a checked poset and decides each one by
//! exact isomorphism search against the built reference. [`classify_case`]
//! and [`induction_step`] expose the facet-by-facet case analysis: how the
//! facets meeting a given facet `F` distribute over the factors of `F`, and
//! what that forces for the whole poset.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::checks::{check_all, CheckReport};
use crate::error::{Error, Result};
use crate::poset::{isomorphism, FaceMap, FacePoset, FactorKind, FactorType, ProductType};

/// Factors are `(kind, n)` with `Sigma` requiring `n >= 2` and `Delta` `n >= 1`.
/// Products are listed in canonical order.
pub fn candidate_types(n: usize, m: usize, v: u128) -> Vec<ProductType> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    extend_candidates(n, m, v, FactorKind::Sigma, 2, &mut current, &mut out);
    out
}

fn extend_candidates(
    dim_left: usize,
    facets_left: usize,
    vertices_left: u128,
    kind: FactorKind,
    min_n: usize,
    current: &mut Vec<FactorType>,
    out: &mut Vec<ProductType>,
) {
    if dim_left == 0 {
        if facets_left == 0 && vertices_left == 1 {
            out.push(ProductType::new(current.clone()));
        }
        return;
    }
    let kinds: &[FactorKind] = match kind {
        FactorKind::Sigma => &[FactorKind::Sigma, FactorKind::Delta],
        FactorKind::Delta => &[FactorKind::Delta],
    };
    for &k in kinds {
        let start = if k == kind { min_n } else { 1 };
        for size in start..=dim_left {
            let factor = FactorType::new(k, size).expect("bounds respected");
            let (fc, vc) = (factor.facet_count(), factor.vertex_count() as u128);
            if fc > facets_left || !vertices_left.is_multiple_of(vc) {
                continue;
            }
            current.push(factor);
            extend_candidates(dim_left - size, facets_left - fc, vertices_left / vc, k, size, current, out);
            current.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecognitionResult {
    #[serde(rename = "type")]
    pub product_type: ProductType,
    /// Facet id to index of the factor it belongs to.
    pub assignment: BTreeMap<String, usize>,
    /// Face id to the id of the corresponding face of `product_type.build()`.
    pub witness: BTreeMap<String, String>,
}

impl RecognitionResult {
    pub fn witness_map(&self, p: &FacePoset, reference: &FacePoset) -> Result<FaceMap> {
        FaceMap::from_id_map(&self.witness, p, reference)
    }

    /// Re-checks the witness against a freshly built reference.
    pub fn verify(&self, p: &FacePoset) -> bool {
        let reference = self.product_type.build_product();
        let Ok(map) = self.witness_map(p, &reference.poset) else {
            return false;
        };
        map.is_isomorphism(p, &reference.poset)
            && p.facets().into_iter().all(|f| {
                self.assignment.get(p.id(f)).copied() == reference.facet_factor(map.image(f))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    FailedCheck { check: String, report: CheckReport },
    NoCandidateMatched { candidates: Vec<ProductType> },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::FailedCheck { check, report } => {
                write!(f, "{check} ({} violation(s))", report.violations.len())
            }
            Rejection::NoCandidateMatched { candidates } if candidates.is_empty() => {
                write!(f, "no candidate matched (no product type has these counts)")
            }
            Rejection::NoCandidateMatched { candidates } => {
                let names: Vec<String> = candidates.iter().map(ToString::to_string).collect();
                write!(f, "no candidate matched (tried {})", names.join(", "))
            }
        }
    }
}

/// Decides whether `p` is the face poset of a product of `Σ`s and `Δ`s.
pub fn recognize(p: &FacePoset) -> std::result::Result<RecognitionResult, Rejection> {
    let report = check_all(p);
    if let Some(rule) = report.first_rule() {
        return Err(Rejection::FailedCheck { check: rule.to_string(), report });
    }
    let candidates = candidate_types(p.dim(), p.facets().len(), p.vertices().len() as u128);
    let mut result: Option<RecognitionResult> = None;
    for candidate in &candidates {
        let reference = candidate.build_product();
        let Some(witness) = isomorphism(p, &reference.poset) else {
            continue;
        };
        if let Some(first) = &result {
            log::warn!("poset matches both {} and {}; keeping the former", first.product_type, candidate);
            continue;
        }
        let assignment = p
            .facets()
            .into_iter()
            .map(|f| {
                let factor = reference.facet_factor(witness.image(f)).expect("isomorphisms map facets to facets");
                (p.id(f).to_string(), factor)
            })
            .collect();
        result = Some(RecognitionResult {
            product_type: candidate.clone(),
            assignment,
            witness: witness.to_id_map(p, &reference.poset),
        });
    }
    result.ok_or(Rejection::NoCandidateMatched { candidates })
}

/// How the facets of `Q` belonging to one factor of a facet `F` meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    /// Interval factor, exactly one facet belongs to it.
    Dim1OneFacet,
    /// Interval factor, two facets belong to it and they meet.
    Dim1TwoIntersecting,
    /// Interval factor, two disjoint facets.
    Dim1TwoDisjoint,
    /// `Σ^k` factor, the components of the intersection meeting `F` form one face.
    SigmaConnected,
    SigmaDisconnected,
    /// `Δ^k` factor (`k >= 2`), the `k + 1` facets have a common face.
    DeltaNonempty,
    DeltaEmpty,
}

impl CaseTag {
    pub fn is_exceptional(self) -> bool {
        matches!(
            self,
            CaseTag::Dim1OneFacet | CaseTag::Dim1TwoIntersecting | CaseTag::SigmaConnected | CaseTag::DeltaNonempty
        )
    }
}

/// Classifies the facets of `p` that belong to factor `j` of the facet `facet`,
/// given a recognition `r` of the facet's own poset.
pub fn classify_case(p: &FacePoset, facet: &str, r: &RecognitionResult, j: usize) -> Result<CaseTag> {
    let f = p.require(facet)?;
    if p.dim() == 0 || p.face_dim(f) + 1 != p.dim() {
        return Err(Error::Inconsistent(format!("{facet:?} is not a facet")));
    }
    let factor = *r
        .product_type
        .factors()
        .get(j)
        .ok_or_else(|| Error::Inconsistent(format!("factor index {j} out of range")))?;
    let ridges = p.lower_covers(f);
    if ridges.len() != r.assignment.len() || ridges.iter().any(|&g| !r.assignment.contains_key(p.id(g))) {
        return Err(Error::Inconsistent(format!("recognition does not describe the facets of {facet:?}")));
    }

    let mut belonging = Vec::new();
    for g in p.facets().into_iter().filter(|&g| g != f && p.meets(g, f)) {
        let mut owner = None;
        for c in p.intersection_components(&[g, f]) {
            let k = *r.assignment.get(p.id(c)).ok_or_else(|| {
                Error::Inconsistent(format!("{:?} meets {facet:?} outside its facets", p.id(g)))
            })?;
            if owner.replace(k).is_some_and(|prev| prev != k) {
                return Err(Error::Inconsistent(format!("{:?} belongs to two factors", p.id(g))));
            }
        }
        if owner == Some(j) {
            belonging.push(g);
        }
    }

    let count = belonging.len();
    let wrong_count =
        || Error::Inconsistent(format!("{count} facets belong to factor {j} = {factor}, which is impossible"));
    match (factor.kind(), factor.n()) {
        (FactorKind::Delta, 1) => match belonging.as_slice() {
            [_] => Ok(CaseTag::Dim1OneFacet),
            [a, b] if p.meets(*a, *b) => Ok(CaseTag::Dim1TwoIntersecting),
            [_, _] => Ok(CaseTag::Dim1TwoDisjoint),
            _ => Err(wrong_count()),
        },
        (FactorKind::Sigma, k) => {
            if count != k {
                return Err(wrong_count());
            }
            let meeting = p
                .intersection_components(&belonging)
                .into_iter()
                .filter(|&c| p.meets(c, f))
                .count();
            Ok(if meeting == 1 { CaseTag::SigmaConnected } else { CaseTag::SigmaDisconnected })
        }
        (FactorKind::Delta, k) => {
            if count != k + 1 {
                return Err(wrong_count());
            }
            Ok(if p.intersection_components(&belonging).is_empty() {
                CaseTag::DeltaEmpty
            } else {
                CaseTag::DeltaNonempty
            })
        }
    }
}

/// The product type forced on the whole poset by the type of one facet and
/// the case tags at each of its factors.
pub fn induction_step(facet_type: &ProductType, tags: &[CaseTag]) -> Result<ProductType> {
    if tags.len() != facet_type.len() {
        return Err(Error::Inconsistent(format!(
            "{} tags for {} factors",
            tags.len(),
            facet_type.len()
        )));
    }
    let exceptional: Vec<usize> = (0..tags.len()).filter(|&j| tags[j].is_exceptional()).collect();
    let mut factors = facet_type.factors().to_vec();
    match exceptional.as_slice() {
        [] => factors.push(FactorType::delta(1)?),
        [j] => {
            let old = factors[*j];
            factors[*j] = match tags[*j] {
                CaseTag::Dim1OneFacet => FactorType::sigma(2)?,
                CaseTag::Dim1TwoIntersecting => FactorType::delta(2)?,
                _ => FactorType::new(old.kind(), old.n() + 1)?,
            };
        }
        _ => {
            return Err(Error::Inconsistent(format!(
                "exceptional cases at {} factors; at most one is possible",
                exceptional.len()
            )))
        }
    }
    Ok(ProductType::new(factors).canonical())
}

/// Recognizes the facet and classifies every one of its factors.
pub fn facet_cases(p: &FacePoset, facet: &str) -> Result<(RecognitionResult, Vec<CaseTag>)> {
    let f = p.require(facet)?;
    let sub = p.down_set(f);
    let r = recognize(&sub).map_err(Error::Unrecognized)?;
    let tags = (0..r.product_type.len())
        .map(|j| classify_case(p, facet, &r, j))
        .collect::<Result<Vec<_>>>()?;
    Ok((r, tags))
}
