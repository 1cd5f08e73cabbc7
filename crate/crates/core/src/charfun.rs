//! Characteristic functions and the quotient description of the canonical
//! model `Z_Q / ker ψ`.
//!
//! A characteristic function assigns a circle subgroup of `T^n`, stored as a
//! primitive integer vector, to every facet. Since a circle has two
//! generators, vectors are compared up to sign and every consumer only looks
//! at `|det|`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checks::{violation, CheckReport};
use crate::error::{Error, Result};
use crate::lattice::{is_primitive, is_unimodular_basis, kernel_basis, smith_normal_form, IntMatrix};
use crate::poset::{FacePoset, FactorKind, ProductType};
use crate::recognize::{recognize, RecognitionResult};

pub const RULE_UNIMODULAR: &str = "unimodular at vertex";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawCharFun")]
pub struct CharFun {
    rank: usize,
    lambda: BTreeMap<String, Vec<i64>>,
}

#[derive(Deserialize)]
struct RawCharFun {
    rank: usize,
    lambda: BTreeMap<String, Vec<i64>>,
}

impl TryFrom<RawCharFun> for CharFun {
    type Error = Error;

    fn try_from(raw: RawCharFun) -> Result<Self> {
        CharFun::new(raw.rank, raw.lambda)
    }
}

impl CharFun {
    pub fn new(rank: usize, lambda: BTreeMap<String, Vec<i64>>) -> Result<Self> {
        for (facet, v) in &lambda {
            if v.len() != rank {
                return Err(Error::MalformedCharFun(format!(
                    "vector of facet {facet:?} has length {}, expected {rank}",
                    v.len()
                )));
            }
            if !is_primitive(v).map_err(|_| Error::MalformedCharFun(format!("facet {facet:?} has the zero vector")))? {
                return Err(Error::MalformedCharFun(format!("vector {v:?} of facet {facet:?} is not primitive")));
            }
        }
        Ok(CharFun { rank, lambda })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("char fun serializes")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lambda(&self) -> &BTreeMap<String, Vec<i64>> {
        &self.lambda
    }

    pub fn get(&self, facet: &str) -> Option<&[i64]> {
        self.lambda.get(facet).map(Vec::as_slice)
    }

    /// The block-diagonal characteristic function of a recognized product.
    /// `Δ^k` gets `e_1, …, e_k, −(e_1+…+e_k)` on its facets in id order of
    /// the reference, `Σ^k` gets `e_1, …, e_k`; facets of `p` follow the
    /// witness.
    pub fn standard(p: &FacePoset, r: &RecognitionResult) -> Result<Self> {
        let reference = r.product_type.build_product();
        let n = r.product_type.dim();
        let mut by_reference: BTreeMap<String, Vec<i64>> = BTreeMap::new();
        let mut offset = 0;
        for (k, factor) in r.product_type.factors().iter().enumerate() {
            let local = &reference.factor_posets[k];
            let local_facets = local.facets().into_iter().sorted_by_key(|&f| local.id(f)).collect_vec();
            for (i, &lf) in local_facets.iter().enumerate() {
                let mut v = vec![0i64; n];
                if i < factor.n() {
                    v[offset + i] = 1;
                } else {
                    v[offset..offset + factor.n()].iter_mut().for_each(|x| *x = -1);
                }
                let mut tuple: Vec<usize> = reference.factor_posets.iter().map(FacePoset::top).collect();
                tuple[k] = lf;
                by_reference.insert(reference.poset.id(reference.encode(&tuple)).to_string(), v);
            }
            offset += factor.n();
        }
        let map = r.witness_map(p, &reference.poset)?;
        let lambda = p
            .facets()
            .into_iter()
            .map(|f| (p.id(f).to_string(), by_reference[reference.poset.id(map.image(f))].clone()))
            .collect();
        CharFun::new(n, lambda)
    }

    /// Independent uniformly drawn primitive vectors with entries in
    /// `[-bound, bound]`. Not necessarily valid.
    pub fn random(p: &FacePoset, seed: u64, bound: i64) -> Self {
        assert!(bound >= 1, "bound must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = p.dim();
        let mut facets = p.facets();
        facets.sort_by_key(|&f| p.id(f));
        let lambda = facets
            .into_iter()
            .map(|f| {
                let v = loop {
                    let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
                    if is_primitive(&v).unwrap_or(false) {
                        break v;
                    }
                };
                (p.id(f).to_string(), v)
            })
            .collect();
        CharFun::new(n, lambda).expect("sampled vectors are primitive")
    }

    /// Applies `g` (given by rows) to every vector.
    pub fn transformed(&self, g: &[Vec<i64>]) -> Result<Self> {
        if g.len() != self.rank || g.iter().any(|r| r.len() != self.rank) {
            return Err(Error::DimensionMismatch(format!("expected a {0}x{0} matrix", self.rank)));
        }
        let lambda = self
            .lambda
            .iter()
            .map(|(f, v)| (f.clone(), g.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()))
            .collect();
        CharFun::new(self.rank, lambda)
    }
}

impl PartialEq for CharFun {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
            && self.lambda.len() == other.lambda.len()
            && self.lambda.iter().all(|(f, v)| {
                other.lambda.get(f).is_some_and(|w| v == w || v.iter().zip(w).all(|(a, b)| *a == -*b))
            })
    }
}

impl Eq for CharFun {}

#[derive(Clone, Debug)]
pub struct ModelSpec {
    poset: FacePoset,
    charfun: CharFun,
}

impl ModelSpec {
    pub fn new(poset: FacePoset, charfun: CharFun) -> Result<Self> {
        if charfun.rank() != poset.dim() {
            return Err(Error::DimensionMismatch(format!(
                "characteristic function has rank {} but the poset has dimension {}",
                charfun.rank(),
                poset.dim()
            )));
        }
        let facets = poset.id_set(poset.facets());
        let mapped: Vec<&String> = charfun.lambda.keys().collect();
        if facets.len() != mapped.len() || !mapped.iter().all(|f| facets.contains(*f)) {
            let missing = facets.iter().filter(|f| !charfun.lambda.contains_key(*f)).join(", ");
            let extra = mapped.iter().filter(|f| !facets.contains(**f)).join(", ");
            return Err(Error::MalformedCharFun(format!(
                "facet sets differ (unmapped: [{missing}], not facets: [{extra}])"
            )));
        }
        Ok(ModelSpec { poset, charfun })
    }

    pub fn poset(&self) -> &FacePoset {
        &self.poset
    }

    pub fn charfun(&self) -> &CharFun {
        &self.charfun
    }

    pub fn lambda(&self, facet: usize) -> &[i64] {
        self.charfun.get(self.poset.id(facet)).expect("every facet is mapped")
    }
}

/// Passes iff at every vertex the vectors of the `n` facets through it form
/// a basis of `Z^n`.
pub fn validate_charfun(spec: &ModelSpec) -> CheckReport {
    let p = spec.poset();
    let mut out = Vec::new();
    for v in p.vertices() {
        let above = p.facets_above(v);
        let vectors: Vec<Vec<i64>> = above.iter().map(|&f| spec.lambda(f).to_vec()).collect();
        // a nice poset has exactly n facets at a vertex; anything else cannot be a basis
        if !is_unimodular_basis(&vectors).unwrap_or(false) {
            let mut faces = vec![v];
            faces.extend_from_slice(above);
            out.push(violation(
                RULE_UNIMODULAR,
                p,
                &faces,
                format!("facet vectors at the vertex do not form a basis of Z^{}", p.dim()),
            ));
        }
    }
    CheckReport::from_violations(out)
}

/// Sphere dimensions of the moment-angle complex: `Δ^k ↦ 2k+1`, `Σ^k ↦ 2k`.
pub fn moment_angle_type(t: &ProductType) -> Vec<usize> {
    t.factors()
        .iter()
        .map(|f| match f.kind() {
            FactorKind::Delta => 2 * f.n() + 1,
            FactorKind::Sigma => 2 * f.n(),
        })
        .collect()
}

/// Column `i` is `λ(facet_order[i])`.
pub fn psi_matrix(spec: &ModelSpec, facet_order: &[String]) -> Result<IntMatrix> {
    let p = spec.poset();
    let facets = p.id_set(p.facets());
    if facet_order.len() != facets.len() || facet_order.iter().collect::<std::collections::BTreeSet<_>>().len() != facets.len()
        || !facet_order.iter().all(|f| facets.contains(f))
    {
        return Err(Error::MalformedCharFun("facet order is not a permutation of the facets".into()));
    }
    let columns: Vec<Vec<i64>> = facet_order.iter().map(|f| spec.charfun.lambda[f].clone()).collect();
    IntMatrix::from_columns(spec.charfun.rank(), &columns)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientDescription {
    #[serde(rename = "type")]
    pub product_type: ProductType,
    pub sphere_dims: Vec<usize>,
    pub torus_rank: usize,
    /// Basis of `ker ψ` as columns, rows indexed by `facet_order`.
    pub kernel: IntMatrix,
    pub free: bool,
    pub facet_order: Vec<String>,
}

/// Which product of spheres `Z_Q` is and which subtorus acts freely on it.
/// Refuses unrecognized posets and invalid characteristic functions.
pub fn quotient_description(spec: &ModelSpec) -> Result<QuotientDescription> {
    let recognized = recognize(spec.poset()).map_err(Error::Unrecognized)?;
    let report = validate_charfun(spec);
    if !report.passed {
        return Err(Error::InvalidCharFun(report));
    }
    let p = spec.poset();
    let facet_order: Vec<String> = p.facets().into_iter().map(|f| p.id(f).to_string()).sorted().collect();
    let psi = psi_matrix(spec, &facet_order)?;
    let snf = smith_normal_form(&psi);
    let free = snf.rank() == psi.rows() && snf.invariant_factors().iter().all(One::is_one);
    let kernel = kernel_basis(&psi);
    Ok(QuotientDescription {
        sphere_dims: moment_angle_type(&recognized.product_type),
        product_type: recognized.product_type,
        torus_rank: facet_order.len() - p.dim(),
        kernel,
        free,
        facet_order,
    })
}
