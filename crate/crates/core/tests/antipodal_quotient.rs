//! The cube modulo its antipodal involution satisfies every local check yet is
//! not a product of simplices and polygon-like pieces.

use std::collections::BTreeSet;

use cornerkit::checks::check_all;
use cornerkit::poset::{delta, product, FacePoset};
use cornerkit::recognize::{recognize, Rejection};

fn antipodal_quotient() -> FacePoset {
    let cube = product(&product(&delta(1), &delta(1)), &delta(1));
    // ids look like "(({0},{0,1}),{1})"; the involution swaps {0} and {1} everywhere
    let flip = |id: &str| id.replace("{0}", "{x}").replace("{1}", "{0}").replace("{x}", "{1}");
    let class = |id: &str| {
        let other = flip(id);
        if other.as_str() < id { other } else { id.to_string() }
    };
    let faces: BTreeSet<(String, usize)> =
        (0..cube.len()).map(|f| (class(cube.id(f)), cube.face_dim(f))).collect();
    let covers: BTreeSet<(String, String)> = (0..cube.len())
        .flat_map(|h| cube.lower_covers(h).iter().map(move |&l| (l, h)))
        .map(|(l, h)| (class(cube.id(l)), class(cube.id(h))))
        .collect();
    FacePoset::new(3, faces.into_iter().collect(), covers.into_iter().collect()).unwrap()
}

#[test]
fn quotient_passes_checks_but_is_rejected() {
    let q = antipodal_quotient();
    assert_eq!(q.f_vector(), vec![4, 6, 3, 1]);
    assert!(check_all(&q).passed);
    match recognize(&q) {
        Err(Rejection::NoCandidateMatched { candidates }) => {
            // nothing even has these counts
            assert!(candidates.is_empty(), "{candidates:?}");
        }
        other => panic!("expected rejection, got {other:?}"),
    }
}
