//! Structural checks for face posets of nice manifolds with corners whose
//! faces are acyclic. Acyclicity itself is not visible in a bare poset; the
//! checks below are the combinatorial consequences that can be decided.

use serde::{Deserialize, Serialize};

use crate::poset::FacePoset;

pub const RULE_NICE: &str = "nice";
pub const RULE_EDGE_ENDPOINTS: &str = "edge endpoints";
pub const RULE_FACE_WITHOUT_VERTEX: &str = "face without vertex";
pub const RULE_VERTEX_EDGE_GRAPH: &str = "vertex-edge graph connected";
pub const RULE_TWO_FACE: &str = "two-face rule";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub faces: Vec<String>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        CheckReport { passed: violations.is_empty(), violations }
    }

    pub fn pass() -> Self {
        Self::from_violations(Vec::new())
    }

    pub fn merge(reports: impl IntoIterator<Item = CheckReport>) -> Self {
        Self::from_violations(reports.into_iter().flat_map(|r| r.violations).collect())
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    pub fn first_rule(&self) -> Option<&str> {
        self.violations.first().map(|v| v.rule.as_str())
    }
}

pub(crate) fn violation(rule: &str, p: &FacePoset, faces: &[usize], message: String) -> Violation {
    Violation { rule: rule.to_string(), faces: faces.iter().map(|&f| p.id(f).to_string()).collect(), message }
}

/// Every face of codimension `k` lies in exactly `k` facets. One-dimensional
/// faces are compact 1-manifolds, so each has two endpoints or none.
pub fn check_nice(p: &FacePoset) -> CheckReport {
    let mut out = Vec::new();
    for f in 0..p.len() {
        let codim = p.dim() - p.face_dim(f);
        let above = p.facets_above(f).len();
        if above != codim {
            out.push(violation(
                RULE_NICE,
                p,
                &[f],
                format!("face of codimension {codim} lies in {above} facets"),
            ));
        }
        if p.face_dim(f) == 1 {
            let ends = p.lower_covers(f).len();
            if ends != 0 && ends != 2 {
                out.push(violation(RULE_EDGE_ENDPOINTS, p, &[f], format!("edge has {ends} endpoints")));
            }
        }
    }
    CheckReport::from_violations(out)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Every face of positive dimension contains a vertex, and the graph of
/// vertices and edges of every face is connected.
pub fn check_vertices(p: &FacePoset) -> CheckReport {
    let mut out = Vec::new();
    let mut parent: Vec<usize> = (0..p.len()).collect();
    for f in 0..p.len() {
        let verts = p.vertices_below(f);
        if verts.is_empty() {
            out.push(violation(RULE_FACE_WITHOUT_VERTEX, p, &[f], "face contains no vertex".into()));
            continue;
        }
        for &v in &verts {
            parent[v] = v;
        }
        for e in p.below(f).ones().filter(|&g| p.face_dim(g) == 1) {
            let ends = p.lower_covers(e);
            for w in ends.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, verts[0]);
        let stray: Vec<usize> = verts.iter().copied().filter(|&v| find(&mut parent, v) != root).collect();
        if !stray.is_empty() {
            let mut faces = vec![f];
            faces.extend(stray);
            out.push(violation(RULE_VERTEX_EDGE_GRAPH, p, &faces, "vertex-edge graph of the face is disconnected".into()));
        }
    }
    CheckReport::from_violations(out)
}

/// Every two-dimensional face has two, three or four vertices.
pub fn check_two_faces(p: &FacePoset) -> CheckReport {
    let out = p
        .faces_of_dim(2)
        .into_iter()
        .filter_map(|f| {
            let n = p.vertices_below(f).len();
            (!(2..=4).contains(&n)).then(|| violation(RULE_TWO_FACE, p, &[f], format!("2-face has {n} vertices")))
        })
        .collect();
    CheckReport::from_violations(out)
}

/// All three checks, in the order nice, vertices, two-faces.
pub fn check_all(p: &FacePoset) -> CheckReport {
    CheckReport::merge([check_nice(p), check_vertices(p), check_two_faces(p)])
}

/// Test fixtures for malformed posets.
pub mod fixtures {
    use crate::poset::FacePoset;

    /// A polygon with `k` vertices and `k` edges under one top face.
    pub fn polygon(k: usize) -> FacePoset {
        let mut faces: Vec<(String, usize)> = (0..k).map(|i| (format!("v{i}"), 0)).collect();
        faces.extend((0..k).map(|i| (format!("e{i}"), 1)));
        faces.push(("top".into(), 2));
        let mut covers = Vec::new();
        for i in 0..k {
            covers.push((format!("v{i}"), format!("e{i}")));
            covers.push((format!("v{}", (i + 1) % k), format!("e{i}")));
            covers.push((format!("e{i}"), "top".into()));
        }
        FacePoset::new(2, faces, covers).expect("polygon is a valid poset")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::polygon;
    use super::*;
    use crate::poset::{delta, product, sigma};

    #[test]
    fn simplices_are_nice() {
        for n in 0..=5 {
            assert!(check_nice(&delta(n)).passed);
        }
        let s3 = sigma(3).unwrap();
        let report = check_nice(&s3);
        assert!(report.passed);
        for v in s3.vertices() {
            assert_eq!(s3.facets_above(v).len(), 3);
        }
    }

    #[test]
    fn triangle_missing_vertex() {
        let t = delta(2);
        let removed = "{2}";
        let faces = t
            .ids()
            .iter()
            .filter(|id| id.as_str() != removed)
            .map(|id| (id.clone(), t.face_dim(t.index_of(id).unwrap())))
            .collect();
        let covers = (0..t.len())
            .flat_map(|h| t.lower_covers(h).iter().map(move |&l| (l, h)))
            .filter(|&(l, _)| t.id(l) != removed)
            .map(|(l, h)| (t.id(l).to_string(), t.id(h).to_string()))
            .collect();
        let pruned = FacePoset::new(2, faces, covers).unwrap();
        let report = check_nice(&pruned);
        assert!(!report.passed);
        assert!(report.has_rule(RULE_EDGE_ENDPOINTS));
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn vertices_of_products() {
        let p = product(&sigma(2).unwrap(), &delta(2));
        assert!(check_vertices(&p).passed);
    }

    #[test]
    fn circle_has_no_vertex() {
        let circle = FacePoset::new(1, vec![("c".into(), 1)], vec![]).unwrap();
        let report = check_vertices(&circle);
        assert!(!report.passed);
        assert_eq!(report.first_rule(), Some(RULE_FACE_WITHOUT_VERTEX));
    }

    #[test]
    fn two_intervals_under_one_top() {
        let faces = vec![
            ("a0".into(), 0),
            ("a1".into(), 0),
            ("b0".into(), 0),
            ("b1".into(), 0),
            ("A".into(), 1),
            ("B".into(), 1),
            ("top".into(), 2),
        ];
        let covers = vec![
            ("a0".into(), "A".into()),
            ("a1".into(), "A".into()),
            ("b0".into(), "B".into()),
            ("b1".into(), "B".into()),
            ("A".into(), "top".into()),
            ("B".into(), "top".into()),
        ];
        let p = FacePoset::new(2, faces, covers).unwrap();
        let report = check_vertices(&p);
        assert!(report.has_rule(RULE_VERTEX_EDGE_GRAPH));
        assert_eq!(report.violations[0].faces[0], "top");
    }

    #[test]
    fn two_face_rule() {
        assert!(check_two_faces(&sigma(2).unwrap()).passed);
        assert!(check_two_faces(&delta(2)).passed);
        assert!(check_two_faces(&product(&delta(1), &delta(1))).passed);
        let pent = check_two_faces(&polygon(5));
        assert!(!pent.passed);
        assert_eq!(pent.first_rule(), Some(RULE_TWO_FACE));
        assert!(!check_two_faces(&polygon(6)).passed);
        // the pentagon is otherwise a fine manifold with corners
        assert!(check_nice(&polygon(5)).passed);
        assert!(check_vertices(&polygon(5)).passed);
    }

    #[test]
    fn report_json_layout() {
        let r = check_two_faces(&polygon(5));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"passed":false,"violations":[{"rule":"two-face rule","faces":["top"],"message":"2-face has 5 vertices"}]}"#
        );
    }
}
