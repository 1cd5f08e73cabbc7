//! Acceptance suite: ten exact criteria, one PASS/FAIL line each.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{all_types, cofactor_det, is_delta_product};
use cornerkit::charfun::{psi_matrix, quotient_description, validate_charfun, CharFun, ModelSpec};
use cornerkit::checks::{check_two_faces, fixtures::polygon, RULE_TWO_FACE};
use cornerkit::invariants::{
    check_free_deck, euler_characteristic, group_closure, h_vector, rational_signature, restricted_aut_group,
};
use cornerkit::lattice::{smith_normal_form, IntMatrix};
use cornerkit::poset::{automorphisms, delta, product, sigma, FaceMap, FacePoset, FactorKind, FactorType, ProductType};
use cornerkit::recognize::{recognize, Rejection};
use cornerkit::shelling::{partial_union_euler, restriction_counts, type_shelling, verify_shelling};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let types = all_types(6);
    ensure!(types.len() >= 30, "only {} types", types.len());
    for (i, t) in types.iter().enumerate() {
        let p = t.build().shuffled(1000 + i as u64);
        let r = recognize(&p).map_err(|e| format!("{t}: rejected: {e}"))?;
        ensure!(r.product_type == t.canonical(), "{t}: recognized as {}", r.product_type);
        ensure!(r.verify(&p), "{t}: witness does not verify");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{} types in {:.1?}", types.len(), elapsed))
}

fn two_face_rule() -> Outcome {
    let mut faces = 0;
    for t in all_types(6) {
        let p = t.build();
        for f in p.faces_of_dim(2) {
            let verts = (0..p.len()).filter(|&v| p.face_dim(v) == 0 && p.le(v, f)).count();
            ensure!((2..=4).contains(&verts), "{t}: 2-face {} has {verts} vertices", p.id(f));
            faces += 1;
        }
        ensure!(check_two_faces(&p).passed, "{t}: check failed");
    }
    for k in [5, 6] {
        match recognize(&polygon(k)) {
            Err(Rejection::FailedCheck { check, .. }) if check == RULE_TWO_FACE => {}
            other => return Err(format!("{k}-gon: {other:?}")),
        }
    }
    Ok(format!("{faces} two-faces checked; pentagon and hexagon rejected"))
}

fn counting() -> Outcome {
    for n in 1..=8 {
        let d = delta(n);
        ensure!(d.facets().len() == n + 1 && d.vertices().len() == n + 1, "delta({n})");
    }
    for n in 2..=8 {
        let s = sigma(n).unwrap();
        ensure!(s.facets().len() == n && s.vertices().len() == 2, "sigma({n})");
    }
    let mut factors: Vec<FacePoset> = (1..=8).map(delta).collect();
    factors.extend((2..=8).map(|n| sigma(n).unwrap()));
    let mut pairs = 0;
    for a in &factors {
        for b in &factors {
            if a.len() * b.len() > 3000 {
                continue;
            }
            let chi = euler_characteristic(&product(a, b));
            ensure!(chi == euler_characteristic(a) * euler_characteristic(b), "χ not multiplicative");
            pairs += 1;
        }
    }
    for t in all_types(6) {
        let expected: usize = t.factors().iter().map(|f| euler_characteristic(&f.build())).product();
        ensure!(euler_characteristic(&t.build()) == expected, "{t}: χ");
    }
    Ok(format!("n <= 8 counts; χ multiplicative on {pairs} pairs and all types of dim <= 6"))
}

fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn betti_desk_check() -> Outcome {
    let mut checked = 0;
    for t in all_types(6).into_iter().filter(is_delta_product) {
        let expected = t.factors().iter().fold(vec![1u64], |acc, f| poly_mul(&acc, &vec![1; f.n() + 1]));
        let h = h_vector(&t.build()).map_err(|e| format!("{t}: {e}"))?;
        ensure!(h.0 == expected, "{t}: h = {:?}, expected {expected:?}", h.0);
        checked += 1;
    }
    ensure!(h_vector(&delta(3)).unwrap().0 == vec![1, 1, 1, 1], "delta(3)");
    Ok(format!("{checked} Δ-products"))
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let mut g: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n < 2 {
        return g;
    }
    for _ in 0..4 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = rng.gen_range(-2..=2);
        for k in 0..n {
            g[i][k] += c * g[j][k];
        }
    }
    g
}

fn quotient_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut models = 0;
    for (i, t) in all_types(5).iter().enumerate() {
        let p = t.build().shuffled(i as u64);
        let r = recognize(&p).map_err(|e| format!("{t}: {e}"))?;
        let cf = CharFun::standard(&p, &r).map_err(|e| e.to_string())?;
        let cf = cf.transformed(&random_unimodular(p.dim(), &mut rng)).map_err(|e| e.to_string())?;
        let spec = ModelSpec::new(p, cf).map_err(|e| e.to_string())?;
        let q = quotient_description(&spec).map_err(|e| format!("{t}: {e}"))?;
        let deltas = t.count(FactorKind::Delta);
        let odd = q.sphere_dims.iter().filter(|d| *d % 2 == 1).count();
        ensure!(q.torus_rank == deltas && odd == deltas, "{t}: s = {}, odd spheres {odd}", q.torus_rank);
        let psi = psi_matrix(&spec, &q.facet_order).map_err(|e| e.to_string())?;
        ensure!(smith_normal_form(&psi).invariant_factors().iter().all(One::is_one), "{t}: ψ not onto");
        ensure!(q.free, "{t}: not free");
        ensure!(psi.mul(&q.kernel).unwrap().is_zero(), "{t}: ψ·K ≠ 0");
        ensure!(q.kernel.cols() == q.torus_rank, "{t}: kernel rank");
        ensure!(smith_normal_form(&q.kernel).invariant_factors().iter().all(One::is_one), "{t}: not saturated");
        models += 1;
    }

    let spec = |p: FacePoset, vectors: &[&[i64]]| {
        let mut facets = p.facets();
        facets.sort_by_key(|&f| p.id(f).to_string());
        let lambda: BTreeMap<String, Vec<i64>> =
            facets.iter().zip(vectors).map(|(&f, v)| (p.id(f).to_string(), v.to_vec())).collect();
        let n = p.dim();
        ModelSpec::new(p, CharFun::new(n, lambda).unwrap()).unwrap()
    };
    let cp2 = quotient_description(&spec(delta(2), &[&[1, 0], &[0, 1], &[-1, -1]])).map_err(|e| e.to_string())?;
    ensure!(cp2.sphere_dims == vec![5] && cp2.torus_rank == 1, "CP2");
    ensure!(cp2.kernel == IntMatrix::from_rows(&[vec![1], vec![1], vec![1]]).unwrap(), "CP2 kernel");
    let square = product(&delta(1), &delta(1));
    let s2s2 = quotient_description(&spec(square, &[&[1, 0], &[1, 0], &[0, 1], &[0, 1]])).map_err(|e| e.to_string())?;
    ensure!(s2s2.sphere_dims == vec![3, 3] && s2s2.torus_rank == 2, "S2xS2");
    for n in 2..=5 {
        let vectors: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let refs: Vec<&[i64]> = vectors.iter().map(Vec::as_slice).collect();
        let q = quotient_description(&spec(sigma(n).unwrap(), &refs)).map_err(|e| e.to_string())?;
        ensure!(q.sphere_dims == vec![2 * n] && q.torus_rank == 0 && q.kernel.cols() == 0, "S^{}", 2 * n);
    }
    Ok(format!("{models} random models plus CP2, S2xS2 and S^2n"))
}

fn oracle_valid(p: &FacePoset, cf: &CharFun) -> bool {
    let n = p.dim();
    (0..p.len()).filter(|&v| p.face_dim(v) == 0).all(|v| {
        let rows: Vec<Vec<i64>> = (0..p.len())
            .filter(|&f| p.face_dim(f) + 1 == n && p.le(v, f))
            .map(|f| cf.get(p.id(f)).unwrap().to_vec())
            .collect();
        rows.len() == n && cofactor_det(&rows).abs() == 1
    })
}

fn validator_vs_oracle() -> Outcome {
    let types = all_types(4);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut accepted, mut rejected) = (0, 0);
    for i in 0..200u64 {
        let t = &types[i as usize % types.len()];
        let p = t.build().shuffled(i);
        let cf = if i % 2 == 0 {
            CharFun::random(&p, i, 1)
        } else {
            let r = recognize(&p).map_err(|e| e.to_string())?;
            let mut lambda = CharFun::standard(&p, &r).unwrap().lambda().clone();
            if i % 4 == 1 {
                // perturb one facet
                let key = lambda.keys().nth(rng.gen_range(0..lambda.len())).unwrap().clone();
                lambda.insert(key, CharFun::random(&p, i + 7, 2).lambda().values().next().unwrap().clone());
            }
            CharFun::new(p.dim(), lambda).unwrap().transformed(&random_unimodular(p.dim(), &mut rng)).unwrap()
        };
        let expected = oracle_valid(&p, &cf);
        let got = validate_charfun(&ModelSpec::new(p, cf).map_err(|e| e.to_string())?).passed;
        ensure!(got == expected, "sample {i} ({t}): validator {got}, oracle {expected}");
        if got {
            accepted += 1;
        } else {
            rejected += 1;
        }
    }
    ensure!(accepted > 0 && rejected > 0, "degenerate sample: {accepted} accepted, {rejected} rejected");
    Ok(format!("200 samples agree ({accepted} valid, {rejected} invalid)"))
}

fn restricted_group() -> Outcome {
    let mut checked = 0;
    for t in all_types(4) {
        let pp = t.build_product();
        let p = &pp.poset;
        let group = restricted_aut_group(&t, p).map_err(|e| e.to_string())?;
        let expected = 1u128 << (t.count(FactorKind::Sigma) + t.factors().iter().filter(|f| **f == FactorType::delta(1).unwrap()).count());
        ensure!(group.order == expected, "{t}: order {} != {expected}", group.order);
        let pinned: Vec<usize> = p
            .facets()
            .into_iter()
            .filter(|&f| t.factors()[pp.facet_factor(f).unwrap()].n() >= 2)
            .collect();
        let exhaustive: BTreeSet<FaceMap> = automorphisms(p, &pinned)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|g| p.facets().into_iter().all(|f| pp.facet_factor(g.image(f)) == pp.facet_factor(f)))
            .collect();
        ensure!(exhaustive.len() as u128 == expected, "{t}: exhaustive count {}", exhaustive.len());
        let generated: BTreeSet<FaceMap> = group_closure(p.len(), &group.generators).into_iter().collect();
        ensure!(generated == exhaustive, "{t}: generated group differs from the enumerated one");
        checked += 1;
    }
    Ok(format!("{checked} types"))
}

fn cube_deck() -> Outcome {
    let mut orders = Vec::new();
    for n in 2..=4 {
        let t = ProductType::new(vec![FactorType::delta(1).unwrap(); n]);
        let pp = t.build_product();
        let p = pp.poset.clone();
        let flip = |k: usize| {
            let local = &pp.factor_posets[k];
            let (a, b) = (local.index_of("{0}").unwrap(), local.index_of("{1}").unwrap());
            FaceMap::new(
                (0..p.len())
                    .map(|f| {
                        let mut tuple = pp.decode(f);
                        tuple[k] = if tuple[k] == a { b } else if tuple[k] == b { a } else { tuple[k] };
                        pp.encode(&tuple)
                    })
                    .collect(),
            )
        };
        let gens: Vec<FaceMap> = (0..n - 1).map(|i| flip(i).compose(&flip(i + 1))).collect();
        let lambda = p
            .facets()
            .into_iter()
            .map(|f| {
                let mut v = vec![0; n];
                v[pp.facet_factor(f).unwrap()] = 1;
                (p.id(f).to_string(), v)
            })
            .collect();
        let spec = ModelSpec::new(p, CharFun::new(n, lambda).unwrap()).unwrap();
        let cert = check_free_deck(&spec, &gens).map_err(|e| e.to_string())?;
        ensure!(cert.report.passed, "n = {n}: {:?}", cert.report.violations);
        let bound = 1usize << (n - 1);
        ensure!(cert.group_order == bound, "n = {n}: order {}", cert.group_order);
        ensure!(bound.is_multiple_of(cert.group_order), "n = {n}: order does not divide the bound");
        orders.push(cert.group_order);
    }
    Ok(format!("group orders {orders:?} attain 2^(n-1)"))
}

fn shelling() -> Outcome {
    let mut checked = 0;
    for t in all_types(4) {
        let p = t.build();
        let c = type_shelling(&t).map_err(|e| e.to_string())?;
        let report = verify_shelling(&p, &c).map_err(|e| e.to_string())?;
        ensure!(report.passed, "{t}: {:?}", report.violations);
        let chis = partial_union_euler(&p, &c).unwrap();
        let (last, proper) = chis.split_last().unwrap();
        ensure!(proper.iter().all(|&x| x == 1), "{t}: partial unions {chis:?}");
        let sphere = if (p.dim() - 1) % 2 == 0 { 2 } else { 0 };
        ensure!(*last == sphere, "{t}: boundary χ = {last}");
        if is_delta_product(&t) {
            let h = h_vector(&p).unwrap().0;
            let mut counts = vec![0u64; h.len()];
            for r in restriction_counts(&p, &c).map_err(|e| e.to_string())? {
                ensure!(r < counts.len(), "{t}: restriction count {r} exceeds the dimension");
                counts[r] += 1;
            }
            ensure!(counts == h, "{t}: restriction counts {counts:?} vs h {h:?}");
        }
        checked += 1;
    }
    Ok(format!("{checked} products"))
}

fn signature_injective() -> Outcome {
    let types = all_types(6);
    let signatures: HashSet<_> = types.iter().map(rational_signature).collect();
    ensure!(signatures.len() == types.len(), "{} signatures for {} types", signatures.len(), types.len());
    Ok(format!("{} distinct signatures", types.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("recognition round-trip", round_trip),
        ("two-face rule", two_face_rule),
        ("counting formulas", counting),
        ("betti desk check", betti_desk_check),
        ("quotient structure", quotient_structure),
        ("characteristic-function validator", validator_vs_oracle),
        ("restricted automorphism group", restricted_group),
        ("free deck certificate", cube_deck),
        ("shelling", shelling),
        ("rational homotopy separation", signature_injective),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
