//! Named complexes used throughout the tests and the CLI data files.

use crate::complex::{ComplexData, SignedEdge, TwoComplex};

fn build(
    name: &str,
    vertex_count: usize,
    edges: &[(usize, usize)],
    faces: &[&[i64]],
    cell3_count: usize,
) -> TwoComplex {
    let faces = faces
        .iter()
        // `!k` stands for `-k`, so that `-0` has a spelling
        .map(|f| {
            f.iter().map(|&s| if s >= 0 { SignedEdge::fwd(s as usize) } else { SignedEdge::rev(!s as usize) }).collect()
        })
        .collect();
    TwoComplex::new(ComplexData {
        name: Some(name.to_string()),
        vertex_count,
        edges: edges.to_vec(),
        faces,
        cell3_count,
        basepoint: 0,
    })
    .expect("corpus complexes are valid")
}

/// One vertex, one loop.
pub fn circle() -> TwoComplex {
    build("circle", 1, &[(0, 0)], &[], 0)
}

/// Wedge of `k` circles at a single vertex.
pub fn wedge_of_circles(k: usize) -> TwoComplex {
    let edges = vec![(0, 0); k];
    build(&format!("wedge{k}"), 1, &edges, &[], 0)
}

/// Square with boundary `a b a⁻¹ b⁻¹`.
pub fn torus() -> TwoComplex {
    build("torus", 1, &[(0, 0), (0, 0)], &[&[0, 1, !0, !1]], 0)
}

/// Square with boundary `a b a b⁻¹`.
pub fn klein_bottle() -> TwoComplex {
    build("klein", 1, &[(0, 0), (0, 0)], &[&[0, 1, 0, !1]], 0)
}

/// One vertex, one loop, one face wrapping `n` times around it.
pub fn cyclic_presentation_complex(n: usize) -> TwoComplex {
    let boundary = vec![0i64; n];
    build(&format!("z{n}"), 1, &[(0, 0)], &[&boundary], 0)
}

/// Cube with opposite faces identified after a quarter turn.
///
/// Two vertex classes `a = 0`, `b = 1`; edge classes `w, x, y, z = 0..4`,
/// all running `a → b`; three square faces.
pub fn hypercubical() -> TwoComplex {
    let (w, x, y, z) = (0, 1, 2, 3);
    build("hypercubical", 2, &[(0, 1); 4], &[&[!z, w, !x, y], &[y, !x, z, !w], &[!w, x, !z, y]], 1)
}

/// Dodecahedron with opposite faces identified after a tenth turn in the
/// same rotational sense: 5 vertices, 10 edges, 6 pentagons, one 3-cell.
pub fn homology_sphere() -> TwoComplex {
    build(
        "homology-sphere",
        5,
        &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (0, 4), (3, 4)],
        &[
            &[!4, !0, 1, 7, !9],
            &[3, !1, 2, 9, !5],
            &[6, !2, 0, 5, !7],
            &[!7, !3, 4, !2, 8],
            &[!9, !6, !3, !0, 8],
            &[!5, 4, !6, !1, 8],
        ],
        1,
    )
}

/// The complexes on which the Galois round trips are exercised.
pub fn galois_corpus() -> Vec<TwoComplex> {
    let mut out = vec![circle(), wedge_of_circles(2), torus(), klein_bottle()];
    out.extend((1..=8).map(cyclic_presentation_complex));
    out.push(hypercubical());
    out
}
