//! Invariants read off from the face poset and the characteristic function.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::Serialize;

use crate::charfun::{moment_angle_type, ModelSpec};
use crate::checks::{violation, CheckReport, Violation};
use crate::error::{Error, Result};
use crate::poset::{FaceMap, FacePoset, FactorKind, ProductType};
use crate::recognize::{recognize, RecognitionResult};

pub const RULE_LAMBDA_EQUIVARIANT: &str = "lambda equivariance";
pub const RULE_MOVED_FACES_DISJOINT: &str = "moved faces disjoint";
pub const RULE_FREE_ON_VERTICES: &str = "free on vertices";
pub const RULE_ORIENTATION: &str = "orientation preserving";
pub const RULE_ORIENTABLE: &str = "orientable";

/// The number of vertices, which equals `χ(M) = χ(M^T)`.
pub fn euler_characteristic(p: &FacePoset) -> usize {
    p.vertices().len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct HVector(pub Vec<u64>);

impl HVector {
    pub fn is_palindromic(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }
}

fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Coefficients of `Σ_G (t−1)^{dim G}` over all faces, top face included.
pub fn h_vector(p: &FacePoset) -> Result<HVector> {
    let f = p.f_vector();
    let mut h = Vec::with_capacity(f.len());
    for i in 0..f.len() {
        let value: i128 = (i..f.len())
            .map(|k| {
                let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
                sign * f[k] as i128 * binomial(k, i)
            })
            .sum();
        if value < 0 {
            return Err(Error::NegativeHVector { index: i, value });
        }
        h.push(value as u64);
    }
    Ok(HVector(h))
}

/// Even Betti numbers `b_0, b_2, …, b_{2n}`.
pub fn betti(p: &FacePoset) -> Result<Vec<u64>> {
    Ok(h_vector(p)?.0)
}

/// All Betti numbers `b_0, …, b_{2n}`, odd degrees zero.
pub fn betti_full(p: &FacePoset) -> Result<Vec<u64>> {
    let even = betti(p)?;
    let mut out = Vec::with_capacity(2 * even.len());
    for (i, b) in even.into_iter().enumerate() {
        if i > 0 {
            out.push(0);
        }
        out.push(b);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RationalSignature {
    pub torus_rank: usize,
    /// Sorted.
    pub sphere_dims: Vec<usize>,
    /// Degree to rank of `π_degree ⊗ Q`, zero ranks omitted.
    pub ranks: BTreeMap<usize, usize>,
}

/// Rational homotopy ranks of `Z_Q / T'`: the torus contributes in degree
/// two, `S^{2k+1}` in degree `2k+1`, and `S^{2k}` in degrees `2k` and `4k−1`.
pub fn rational_signature(t: &ProductType) -> RationalSignature {
    let torus_rank = t.count(FactorKind::Delta);
    let mut sphere_dims = moment_angle_type(t);
    sphere_dims.sort_unstable();
    let mut ranks = BTreeMap::new();
    if torus_rank > 0 {
        ranks.insert(2, torus_rank);
    }
    for &d in &sphere_dims {
        if d % 2 == 1 {
            *ranks.entry(d).or_insert(0) += 1;
        } else {
            *ranks.entry(d).or_insert(0) += 1;
            *ranks.entry(2 * d - 1).or_insert(0) += 1;
        }
    }
    RationalSignature { torus_rank, sphere_dims, ranks }
}

/// Generators are commuting involutions; `order = 2^generators.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutGroup {
    pub generators: Vec<FaceMap>,
    pub order: u128,
}

impl AutGroup {
    pub fn report(&self, p: &FacePoset) -> AutGroupReport {
        AutGroupReport {
            order: self.order,
            generators: self.generators.iter().map(|g| g.to_id_map(p, p)).collect(),
        }
    }
}

/// [`AutGroup`] with generators spelled out as face id maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AutGroupReport {
    pub order: u128,
    pub generators: Vec<BTreeMap<String, String>>,
}

/// One involution per `Σ` factor, swapping the two vertices of that factor,
/// and one per `Δ^1` factor, swapping its endpoints. Everything else in the
/// other factors is fixed. `p` must be `t.build()`.
pub fn restricted_aut_group(t: &ProductType, p: &FacePoset) -> Result<AutGroup> {
    let reference = t.build_product();
    if reference.poset != *p {
        return Err(Error::Inconsistent(format!("poset is not the built reference of {t}")));
    }
    let to_p: Vec<usize> = (0..reference.poset.len())
        .map(|i| p.index_of(reference.poset.id(i)).expect("posets are equal"))
        .collect();
    let mut generators = Vec::new();
    for (k, factor) in t.factors().iter().enumerate() {
        let local = &reference.factor_posets[k];
        let pair = match (factor.kind(), factor.n()) {
            (FactorKind::Sigma, _) => ("+", "-"),
            (FactorKind::Delta, 1) => ("{0}", "{1}"),
            _ => continue,
        };
        let (a, b) = (local.require(pair.0)?, local.require(pair.1)?);
        let mut images = vec![0; p.len()];
        for face in 0..reference.poset.len() {
            let mut tuple = reference.decode(face);
            tuple[k] = match tuple[k] {
                x if x == a => b,
                x if x == b => a,
                x => x,
            };
            images[to_p[face]] = to_p[reference.encode(&tuple)];
        }
        generators.push(FaceMap::new(images));
    }
    let order = 1u128 << generators.len();
    Ok(AutGroup { generators, order })
}

/// [`restricted_aut_group`] transported to a recognized poset through its
/// witness.
pub fn restricted_aut_group_of(p: &FacePoset, r: &RecognitionResult) -> Result<AutGroup> {
    let reference = r.product_type.build();
    let w = r.witness_map(p, &reference)?;
    let w_inv = w.inverse();
    let group = restricted_aut_group(&r.product_type, &reference)?;
    let generators = group.generators.iter().map(|g| w_inv.compose(&g.compose(&w))).collect();
    Ok(AutGroup { generators, order: group.order })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantsReport {
    pub euler_characteristic: usize,
    pub h_vector: HVector,
    pub betti: Vec<u64>,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub product_type: Option<ProductType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<RationalSignature>,
}

/// Euler characteristic, h-vector and Betti numbers, plus the rational
/// signature when the poset is recognized. `full` pads odd degrees.
pub fn invariants_report(p: &FacePoset, full: bool) -> Result<InvariantsReport> {
    let h = h_vector(p)?;
    let betti = if full { betti_full(p)? } else { h.0.clone() };
    let product_type = recognize(p).ok().map(|r| r.product_type);
    Ok(InvariantsReport {
        euler_characteristic: euler_characteristic(p),
        h_vector: h,
        betti,
        signature: product_type.as_ref().map(rational_signature),
        product_type,
    })
}

/// The subgroup generated by `gens`, identity first.
pub fn group_closure(len: usize, gens: &[FaceMap]) -> Vec<FaceMap> {
    let identity = FaceMap::identity(len);
    let mut seen: HashSet<FaceMap> = HashSet::from([identity.clone()]);
    let mut out = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = s.compose(&g);
            if seen.insert(h.clone()) {
                out.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    out
}

/// A local orientation at every vertex: a reference ordering of the facets
/// through it and a sign, propagated along edges. Crossing an edge replaces
/// the facet left behind by the facet entered, in the same slot, and flips
/// the sign.
struct Orientation {
    order: Vec<Vec<usize>>,
    sign: Vec<i8>,
}

fn permutation_sign(from: &[usize], to: &[usize]) -> Option<i8> {
    let mut perm: Vec<usize> = to.iter().map(|x| from.iter().position(|y| y == x)).collect::<Option<_>>()?;
    let mut sign = 1;
    for i in 0..perm.len() {
        while perm[i] != i {
            let j = perm[i];
            perm.swap(i, j);
            sign = -sign;
        }
    }
    Some(sign)
}

fn orient(p: &FacePoset) -> std::result::Result<Orientation, Violation> {
    let n = p.len();
    let mut order = vec![Vec::new(); n];
    let mut sign = vec![0i8; n];
    let verts = p.vertices();
    let Some(&start) = verts.first() else {
        return Ok(Orientation { order, sign });
    };
    // vertex -> (edge, other endpoint)
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for e in p.faces_of_dim(1) {
        if let [a, b] = *p.lower_covers(e) {
            adj.entry(a).or_default().push((e, b));
            adj.entry(b).or_default().push((e, a));
        }
    }
    order[start] = p.facets_above(start).to_vec();
    sign[start] = 1;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &(e, w) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            let along = p.facets_above(e);
            let left = p.facets_above(v).iter().find(|f| !along.contains(f));
            let entered = p.facets_above(w).iter().find(|f| !along.contains(f));
            let (Some(&left), Some(&entered)) = (left, entered) else {
                continue;
            };
            let moved: Vec<usize> = order[v].iter().map(|&f| if f == left { entered } else { f }).collect();
            if sign[w] == 0 {
                order[w] = moved;
                sign[w] = -sign[v];
                queue.push_back(w);
            } else if permutation_sign(&order[w], &moved).map(|s| s * sign[w]) != Some(-sign[v]) {
                return Err(violation(
                    RULE_ORIENTABLE,
                    p,
                    &[v, e, w],
                    "local orientations do not extend consistently along edges".into(),
                ));
            }
        }
    }
    Ok(Orientation { order, sign })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeckCertificate {
    pub report: CheckReport,
    pub group_order: usize,
    pub scope: String,
}

const DECK_SCOPE: &str = "necessary conditions only: the generated group respects the characteristic \
function, moves faces off themselves, fixes no vertex and preserves orientation; freeness of the \
lifted action is not certified";

/// Checks every non-identity element of the group generated by `gens`:
/// `λ(gF) = ±λ(F)`, every moved face is disjoint from its image, no vertex
/// is fixed, and the orientation of the orbit space is preserved.
pub fn check_free_deck(spec: &ModelSpec, gens: &[FaceMap]) -> Result<DeckCertificate> {
    let p = spec.poset();
    for (i, g) in gens.iter().enumerate() {
        if !g.is_isomorphism(p, p) {
            return Err(Error::NotAutomorphism(format!("generator {i} is not an automorphism of the poset")));
        }
    }
    let group = group_closure(p.len(), gens);
    let orientation = orient(p);
    let mut out = Vec::new();
    if let Err(v) = &orientation {
        out.push(v.clone());
    }
    let facets = p.facets();
    let verts = p.vertices();
    for (k, g) in group.iter().enumerate().skip(1) {
        let tag = format!("group element {k}");
        for &f in &facets {
            let (a, b) = (spec.lambda(f), spec.lambda(g.image(f)));
            if a != b && !a.iter().zip(b).all(|(x, y)| *x == -*y) {
                out.push(violation(
                    RULE_LAMBDA_EQUIVARIANT,
                    p,
                    &[f, g.image(f)],
                    format!("{tag}: λ(gF) = {b:?} differs from λ(F) = {a:?}"),
                ));
            }
        }
        for face in 0..p.len() {
            let image = g.image(face);
            if image != face && p.meets(face, image) {
                out.push(violation(
                    RULE_MOVED_FACES_DISJOINT,
                    p,
                    &[face, image],
                    format!("{tag}: a moved face meets its image"),
                ));
            }
        }
        for &v in &verts {
            if g.image(v) == v {
                out.push(violation(RULE_FREE_ON_VERTICES, p, &[v], format!("{tag}: fixes a vertex")));
            }
        }
        if let (Ok(o), Some(&v0)) = (&orientation, verts.first()) {
            let w = g.image(v0);
            let mapped: Vec<usize> = o.order[v0].iter().map(|&f| g.image(f)).collect();
            let s = permutation_sign(&o.order[w], &mapped).map(|s| s * o.sign[w]);
            if s != Some(o.sign[v0]) {
                out.push(violation(RULE_ORIENTATION, p, &[v0, w], format!("{tag}: reverses orientation")));
            }
        }
    }
    Ok(DeckCertificate {
        report: CheckReport::from_violations(out),
        group_order: group.len(),
        scope: DECK_SCOPE.into(),
    })
}
