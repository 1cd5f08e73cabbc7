//! Shelling certificates.
//!
//! A certificate orders the facets of a face and carries, for every facet of
//! positive dimension, a certificate of that facet whose beginning realizes
//! the facet's intersection with its predecessors. Points have no
//! certificate. All ids refer to faces of the ambient poset, so
//! sub-certificates are read against down-sets without relabelling.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::checks::{violation, CheckReport, Violation};
use crate::error::{Error, Result};
use crate::poset::{product, FacePoset, FactorType, ProductType};
use crate::recognize::RecognitionResult;

pub const RULE_ORDER: &str = "order is a permutation of the facets";
pub const RULE_PREFIX: &str = "prefix is a beginning of a shelling";
pub const RULE_EULER: &str = "partial union euler characteristic";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellingCert {
    pub order: Vec<String>,
    pub subs: Vec<Option<ShellingCert>>,
}

impl ShellingCert {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Renames every id through `map`; ids missing from `map` are an error.
    pub fn relabeled(&self, map: &BTreeMap<String, String>) -> Result<Self> {
        let order = self
            .order
            .iter()
            .map(|id| map.get(id).cloned().ok_or_else(|| Error::MalformedCertificate(format!("no image for {id:?}"))))
            .collect::<Result<_>>()?;
        let subs = self.subs.iter().map(|s| s.as_ref().map(|s| s.relabeled(map)).transpose()).collect::<Result<_>>()?;
        Ok(ShellingCert { order, subs })
    }

    fn sub(&self, j: usize) -> Option<&ShellingCert> {
        self.subs.get(j).and_then(Option::as_ref)
    }
}

fn union_of(p: &FacePoset, faces: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(p.len());
    for f in faces {
        out.union_with(p.below(f));
    }
    out
}

/// Alternating face count `Σ (−1)^{dim}` of a down-closed face set.
pub fn euler_of(p: &FacePoset, faces: &FixedBitSet) -> i64 {
    faces.ones().map(|f| if p.face_dim(f).is_multiple_of(2) { 1 } else { -1 }).sum()
}

/// Certificate for the face `x` with the given facet order. Each facet's
/// sub-certificate lists the facets inside the current prefix first, then the
/// rest, both by id, and recurses the same way.
fn prefix_first(p: &FacePoset, x: usize, order: Vec<usize>) -> Option<ShellingCert> {
    if p.face_dim(x) == 0 {
        return None;
    }
    let mut prefix = FixedBitSet::with_capacity(p.len());
    let mut subs = Vec::with_capacity(order.len());
    for &f in &order {
        let (inside, outside): (Vec<usize>, Vec<usize>) =
            p.lower_covers(f).iter().copied().sorted_by_key(|&g| p.id(g)).partition(|&g| prefix.contains(g));
        subs.push(prefix_first(p, f, inside.into_iter().chain(outside).collect()));
        prefix.union_with(p.below(f));
    }
    Some(ShellingCert { order: order.iter().map(|&f| p.id(f).to_string()).collect(), subs })
}

/// The certificate of a whole poset with the given facet order.
pub fn prefix_shelling(p: &FacePoset, order: &[String]) -> Result<ShellingCert> {
    let order = order.iter().map(|id| p.require(id)).collect::<Result<Vec<_>>>()?;
    let facets: Vec<usize> = p.lower_covers(p.top()).iter().copied().sorted().collect();
    if order.iter().copied().sorted().collect_vec() != facets {
        return Err(Error::MalformedCertificate("order is not a permutation of the facets".into()));
    }
    prefix_first(p, p.top(), order)
        .ok_or_else(|| Error::MalformedCertificate("a point has no shelling certificate".into()))
}

/// Facets in id order, valid because every facet ordering of `Δ^n` or `Σ^n`
/// is a shelling.
pub fn base_shelling(t: FactorType) -> ShellingCert {
    let p = t.build();
    let order = p.lower_covers(p.top()).iter().copied().sorted_by_key(|&f| p.id(f)).collect();
    prefix_first(&p, p.top(), order).expect("factors have positive dimension")
}

struct ProductShelling<'a> {
    p1: &'a FacePoset,
    p2: &'a FacePoset,
    prod: &'a FacePoset,
}

impl ProductShelling<'_> {
    fn id(&self, f: usize, g: usize) -> String {
        self.prod.id(f * self.p2.len() + g).to_string()
    }

    /// Certificate of `a × b` from certificates of `a` and `b`: all but the
    /// last facet of `a` times `b`, then `a` times each facet of `b`, then
    /// the last facet of `a` times `b`.
    fn build(&self, a: usize, ca: Option<&ShellingCert>, b: usize, cb: Option<&ShellingCert>) -> Result<Option<ShellingCert>> {
        if self.p1.face_dim(a) + self.p2.face_dim(b) == 0 {
            return Ok(None);
        }
        let fs = match ca {
            Some(c) => c.order.iter().map(|id| self.p1.require(id)).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let gs = match cb {
            Some(c) => c.order.iter().map(|id| self.p2.require(id)).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let s = fs.len();
        let f_entry = |i: usize| -> Result<(String, Option<ShellingCert>)> {
            Ok((self.id(fs[i], b), self.build(fs[i], ca.and_then(|c| c.sub(i)), b, cb)?))
        };
        let mut entries = Vec::with_capacity(s + gs.len());
        for i in 0..s.saturating_sub(1) {
            entries.push(f_entry(i)?);
        }
        for (k, &g) in gs.iter().enumerate() {
            entries.push((self.id(a, g), self.build(a, ca, g, cb.and_then(|c| c.sub(k)))?));
        }
        if s > 0 {
            entries.push(f_entry(s - 1)?);
        }
        let (order, subs) = entries.into_iter().unzip();
        Ok(Some(ShellingCert { order, subs }))
    }
}

/// Certificate for `product(p1, p2)` from certificates of the factors.
pub fn product_shelling(p1: &FacePoset, c1: &ShellingCert, p2: &FacePoset, c2: &ShellingCert) -> Result<ShellingCert> {
    let prod = product(p1, p2);
    let builder = ProductShelling { p1, p2, prod: &prod };
    let c1 = (p1.dim() > 0).then_some(c1);
    let c2 = (p2.dim() > 0).then_some(c2);
    builder
        .build(p1.top(), c1, p2.top(), c2)?
        .ok_or_else(|| Error::MalformedCertificate("a point has no shelling certificate".into()))
}

/// Certificate for `t.build()`, folding [`product_shelling`] over the factors.
pub fn type_shelling(t: &ProductType) -> Result<ShellingCert> {
    let mut factors = t.factors().iter();
    let first = factors
        .next()
        .ok_or_else(|| Error::MalformedCertificate("a point has no shelling certificate".into()))?;
    let mut p = first.build();
    let mut c = base_shelling(*first);
    for f in factors {
        let q = f.build();
        c = product_shelling(&p, &c, &q, &base_shelling(*f))?;
        p = product(&p, &q);
    }
    Ok(c)
}

/// The product certificate of a recognized poset, in its own ids.
pub fn shelling_for(r: &RecognitionResult) -> Result<ShellingCert> {
    let back: BTreeMap<String, String> = r.witness.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
    type_shelling(&r.product_type)?.relabeled(&back)
}

/// Checks a certificate for `p`. Unknown ids and certificates of the wrong
/// shape are errors; failed shelling conditions are violations.
pub fn verify_shelling(p: &FacePoset, c: &ShellingCert) -> Result<CheckReport> {
    let mut out = Vec::new();
    verify_at(p, p.top(), c, &mut out)?;
    Ok(CheckReport::from_violations(out))
}

fn verify_at(p: &FacePoset, x: usize, c: &ShellingCert, out: &mut Vec<Violation>) -> Result<()> {
    let order = c.order.iter().map(|id| p.require(id)).collect::<Result<Vec<_>>>()?;
    if c.subs.len() != order.len() {
        return Err(Error::MalformedCertificate(format!(
            "certificate of {:?} has {} facets but {} sub-certificates",
            p.id(x),
            order.len(),
            c.subs.len()
        )));
    }
    let facets: Vec<usize> = p.lower_covers(x).iter().copied().sorted().collect();
    if order.iter().copied().sorted().collect_vec() != facets {
        out.push(violation(RULE_ORDER, p, &[x], format!("certificate of {:?} does not list its facets once each", p.id(x))));
        return Ok(());
    }
    let n = p.face_dim(x);
    let last = order.len().saturating_sub(1);
    let mut prefix = FixedBitSet::with_capacity(p.len());
    for (j, (&f, sub)) in order.iter().zip(&c.subs).enumerate() {
        match (p.face_dim(f), sub) {
            (0, None) => {}
            (0, Some(_)) => {
                return Err(Error::MalformedCertificate(format!("point {:?} has a sub-certificate", p.id(f))));
            }
            (_, None) => {
                return Err(Error::MalformedCertificate(format!("facet {:?} lacks a sub-certificate", p.id(f))));
            }
            (_, Some(s)) => {
                verify_at(p, f, s, out)?;
                if j > 0 {
                    check_prefix(p, f, s, &prefix, j == last, out)?;
                }
            }
        }
        prefix.union_with(p.below(f));
        if n >= 1 && j < last && euler_of(p, &prefix) != 1 {
            out.push(violation(
                RULE_EULER,
                p,
                &order[..=j],
                format!("union of the first {} facets has Euler characteristic {}", j + 1, euler_of(p, &prefix)),
            ));
        }
    }
    Ok(())
}

/// `F ∩ prefix` must equal the union of the first `r ≥ 1` facets of `F`'s
/// certificate, with `r` short of all of them unless `F` is last.
fn check_prefix(p: &FacePoset, f: usize, s: &ShellingCert, prefix: &FixedBitSet, is_last: bool, out: &mut Vec<Violation>) -> Result<()> {
    let mut meet = p.below(f).clone();
    meet.intersect_with(prefix);
    let sub_order = s.order.iter().map(|id| p.require(id)).collect::<Result<Vec<_>>>()?;
    let mut union = FixedBitSet::with_capacity(p.len());
    let mut matched = None;
    for (r, &g) in sub_order.iter().enumerate() {
        union.union_with(p.below(g));
        if union == meet {
            matched = Some(r + 1);
            break;
        }
    }
    match matched {
        None => out.push(violation(
            RULE_PREFIX,
            p,
            &[f],
            "intersection with the earlier facets is not a non-empty beginning of the sub-certificate".into(),
        )),
        Some(r) if r == sub_order.len() && !is_last => out.push(violation(
            RULE_PREFIX,
            p,
            &[f],
            "a facet before the last meets the earlier facets in its whole boundary".into(),
        )),
        Some(_) => {}
    }
    Ok(())
}

/// Vertices in the order the certificate first reaches them, descending
/// through sub-certificates.
pub fn vertex_order(p: &FacePoset, c: &ShellingCert) -> Result<Vec<usize>> {
    fn walk(p: &FacePoset, c: &ShellingCert, seen: &mut FixedBitSet, out: &mut Vec<usize>) -> Result<()> {
        for (id, sub) in c.order.iter().zip(&c.subs) {
            let f = p.require(id)?;
            match sub {
                Some(s) => walk(p, s, seen, out)?,
                None if p.face_dim(f) == 0 => {
                    if !seen.put(f) {
                        out.push(f);
                    }
                }
                None => return Err(Error::MalformedCertificate(format!("facet {id:?} lacks a sub-certificate"))),
            }
        }
        Ok(())
    }
    let mut seen = FixedBitSet::with_capacity(p.len());
    let mut out = Vec::new();
    walk(p, c, &mut seen, &mut out)?;
    Ok(out)
}

/// For each vertex in [`vertex_order`], the number of edges joining it to
/// earlier vertices: the size of its restriction in the induced shelling of
/// the dual complex.
pub fn restriction_counts(p: &FacePoset, c: &ShellingCert) -> Result<Vec<usize>> {
    let order = vertex_order(p, c)?;
    let mut rank = vec![usize::MAX; p.len()];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut down = vec![0; order.len()];
    for e in p.faces_of_dim(1) {
        if let [a, b] = *p.lower_covers(e) {
            let (ra, rb) = (rank[a], rank[b]);
            if ra != usize::MAX && rb != usize::MAX {
                down[ra.max(rb)] += 1;
            }
        }
    }
    Ok(down)
}

/// Euler characteristic of the union of the first `j + 1` facets, for each `j`.
pub fn partial_union_euler(p: &FacePoset, c: &ShellingCert) -> Result<Vec<i64>> {
    let order = c.order.iter().map(|id| p.require(id)).collect::<Result<Vec<_>>>()?;
    Ok((1..=order.len()).map(|j| euler_of(p, &union_of(p, order[..j].iter().copied()))).collect())
}
