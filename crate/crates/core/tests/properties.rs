use deficiency_core::graph::{glue_copies, is_tree, GraphBuilder};
use deficiency_core::jacobi::criteria::reciprocal_partial_sum;
use deficiency_core::radial::RadialFunction;
use deficiency_core::*;
use proptest::prelude::*;

fn sizes_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=10, 2..=8).prop_map(|mut v| {
        v.insert(0, 1);
        v
    })
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Random function on the interior vertices of `g`.
fn interior_function(g: &Graph, values: &[Complex64]) -> FiniteFunction {
    g.vertices()
        .filter(|v| !g.is_boundary(*v))
        .zip(values.iter().cycle())
        .map(|(v, c)| (v, *c))
        .collect()
}

proptest! {
    #[test]
    fn antitree_structure(sizes in sizes_strategy()) {
        let spec = AntitreeSpec::explicit(sizes.clone()).unwrap();
        let g = build_antitree(&spec).unwrap();
        let depth = spec.depth;
        for u in g.vertices() {
            prop_assert!(!g.has_edge(u, u));
            for &w in g.neighbors(u).unwrap() {
                prop_assert!(g.has_edge(w, u));
            }
        }
        let dec = bfs_spheres(&g, VertexId(0)).unwrap();
        prop_assert_eq!(&dec.sizes()[..depth], &sizes[..depth]);
        prop_assert!(dec.unreachable.is_empty());
        prop_assert_eq!(g.degree(VertexId(0)).unwrap() as u64, sizes[1]);
        for n in 1..depth {
            for &v in &dec.spheres[n] {
                prop_assert_eq!(g.degree(v).unwrap() as u64, sizes[n - 1] + sizes[n + 1]);
            }
        }
        let edges: u64 = sizes.windows(2).map(|w| w[0] * w[1]).sum();
        prop_assert_eq!(g.edge_count() as u64, edges);
    }

    #[test]
    fn glue_counts(sizes in sizes_strategy(), n in 1usize..5) {
        let g = build_antitree(&AntitreeSpec::explicit(sizes).unwrap()).unwrap();
        let glued = glue_copies(&g, n, VertexId(0)).unwrap();
        prop_assert_eq!(glued.vertex_count(), n * g.vertex_count());
        prop_assert_eq!(glued.edge_count(), n * g.edge_count() + n - 1);
        prop_assert!(glued.is_connected());
    }

    #[test]
    fn adjacency_is_symmetric(
        sizes in sizes_strategy(),
        fv in prop::collection::vec(complex(), 1..20),
        hv in prop::collection::vec(complex(), 1..20),
    ) {
        let g = build_antitree(&AntitreeSpec::explicit(sizes).unwrap()).unwrap();
        let f = interior_function(&g, &fv);
        let h = interior_function(&g, &hv);
        let lhs = apply_adjacency(&g, &f).unwrap().inner(&h);
        let rhs = f.inner(&apply_adjacency(&g, &h).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));

        let lf = apply_laplacian(&g, &f).unwrap();
        let af = apply_adjacency(&g, &f).unwrap();
        for v in g.vertices() {
            let deg = g.degree(v).unwrap() as f64;
            prop_assert!((lf.get(v) + af.get(v) - f.get(v) * deg).norm() <= 1e-12);
        }
    }

    #[test]
    fn matrix_matches_operator(sizes in sizes_strategy()) {
        let g = build_antitree(&AntitreeSpec::explicit(sizes).unwrap()).unwrap();
        let m = truncated_matrix(&g, OperatorKind::Adjacency);
        for v in g.vertices().filter(|v| !g.is_boundary(*v)) {
            let col = apply_adjacency(&g, &FiniteFunction::indicator(v)).unwrap();
            for w in g.vertices() {
                prop_assert_eq!(col.get(w).re, m.get(w.0, v.0));
            }
        }
    }

    #[test]
    fn projection_is_an_orthogonal_projection(
        sizes in sizes_strategy(),
        fv in prop::collection::vec(complex(), 1..30),
        hv in prop::collection::vec(complex(), 1..30),
    ) {
        let g = build_antitree(&AntitreeSpec::explicit(sizes).unwrap()).unwrap();
        let dec = bfs_spheres(&g, VertexId(0)).unwrap();
        let f = interior_function(&g, &fv);
        let h = interior_function(&g, &hv);
        let pf = project_radial(&g, &dec, &f).unwrap();
        let ppf = project_radial(&g, &dec, &pf).unwrap();
        prop_assert!(ppf.sup_distance(&pf) <= 1e-12 * (1.0 + f.norm()));
        let ph = project_radial(&g, &dec, &h).unwrap();
        let d = (pf.inner(&h) - f.inner(&ph)).norm();
        prop_assert!(d <= 1e-12 * (1.0 + f.norm() * h.norm()));
    }

    #[test]
    fn weight_transform_is_isometric(
        pairs in prop::collection::vec((complex(), 1u64..1000), 1..50),
    ) {
        let (values, weights): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let rf = RadialFunction::new(values, weights).unwrap();
        let weighted = rf.weighted_norm_sqr();
        let plain: f64 = weight_transform(&rf).iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((weighted - plain).abs() <= 1e-12 * weighted.max(1.0));
    }

    #[test]
    fn carleman_partial_sums_are_monotone(alpha in 0.2f64..3.0, n in 10usize..2000) {
        let j = JacobiMatrix::antitree_floor(alpha).unwrap();
        let s1 = reciprocal_partial_sum(&j, n).unwrap();
        let s2 = reciprocal_partial_sum(&j, n + 17).unwrap();
        prop_assert!(s2 >= s1);
    }

    #[test]
    fn tree_rule_never_reports_finite_nonzero(
        parents in prop::collection::vec(any::<prop::sample::Index>(), 1..40),
        cut in any::<bool>(),
    ) {
        let n = parents.len() + 1;
        let mut b = GraphBuilder::new(n);
        for (i, p) in parents.iter().enumerate() {
            b.add_edge(i + 1, p.index(i + 1)).unwrap();
        }
        if cut {
            b.mark_boundary(n - 1).unwrap();
        }
        let g = b.build();
        prop_assert!(is_tree(&g).holds());
        let cfg = EngineConfig::default();
        let r = analyze(&OperatorDescriptor::Tree { graph: g }, &cfg).unwrap();
        prop_assert!(matches!(
            r.eta,
            DeficiencyIndex::Finite(0) | DeficiencyIndex::Infinite | DeficiencyIndex::Undetermined
        ));
        prop_assert_eq!(r.eta == DeficiencyIndex::Undetermined, cut);
    }
}
