use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use kms_thermo::dimension::{graph_dimension, kms_inverse_temperature, moran_dimension};
use kms_thermo::groupoid::{apply_alpha, Bisection};
use kms_thermo::measure::{eigenmeasure, CylinderMeasure};
use kms_thermo::shift::PathPoint;
use kms_thermo::{AlgebraElement, Graph, Potential, RatioList, Word};

const TOL: f64 = 1e-10;

fn golden() -> Arc<Graph> {
    Arc::new(Graph::from_names(&["v", "w"], &[("a", "v", "w"), ("b", "w", "v"), ("c", "v", "v")]).unwrap())
}

fn depth2(vals: &[f64]) -> Potential {
    let g = Arc::new(Graph::full_shift(2));
    Potential::from_fn(g, 2, |w| vals[2 * w[0] + w[1]]).unwrap()
}

/// All bisections of the graph with words of length <= 3.
fn small_bisections(g: &Graph) -> Vec<Bisection> {
    kms_thermo::groupoid::bisections_up_to(g, 3)
}

fn element(g: &Arc<Graph>, picks: &[(usize, f64, f64)]) -> AlgebraElement {
    let all = small_bisections(g);
    let mut a = AlgebraElement::zero(g.clone());
    for &(i, re, im) in picks {
        a.add_term(all[i % all.len()].clone(), Complex64::new(re, im));
    }
    a
}

/// Sup-norm distance of two elements as functions on the groupoid.
fn diff(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    let len = a.max_source_len().max(b.max_source_len());
    a.canonical(len).sub(&b.canonical(len)).unwrap().max_norm()
}

fn picks() -> impl Strategy<Value = Vec<(usize, f64, f64)>> {
    prop::collection::vec((0usize..10_000, -2.0f64..2.0, -2.0f64..2.0), 1..5)
}

fn point(g: &Graph, pre: &[usize], period: &[usize]) -> Option<PathPoint> {
    PathPoint::new(g, Word::from(pre.to_vec()), Word::from(period.to_vec())).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn adjoint_is_an_involution(p in picks(), golden_graph in any::<bool>()) {
        let g = if golden_graph { golden() } else { Arc::new(Graph::full_shift(2)) };
        let a = element(&g, &p);
        prop_assert!(diff(&a.adjoint().adjoint(), &a) <= TOL);
    }

    #[test]
    fn adjoint_reverses_products(p in picks(), q in picks(), golden_graph in any::<bool>()) {
        let g = if golden_graph { golden() } else { Arc::new(Graph::full_shift(2)) };
        let (a, b) = (element(&g, &p), element(&g, &q));
        let lhs = a.convolve(&b).unwrap().adjoint();
        let rhs = b.adjoint().convolve(&a.adjoint()).unwrap();
        prop_assert!(diff(&lhs, &rhs) <= TOL);
    }

    #[test]
    fn convolution_is_associative(p in picks(), q in picks(), r in picks()) {
        let g = golden();
        let (a, b, c) = (element(&g, &p), element(&g, &q), element(&g, &r));
        let lhs = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let rhs = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert!(diff(&lhs, &rhs) <= TOL);
    }

    #[test]
    fn alpha_is_multiplicative(p in picks(), q in picks(), t in -3.0f64..3.0, vals in prop::array::uniform4(1.1f64..6.0)) {
        let pot = depth2(&vals);
        let g = pot.graph().clone();
        let (a, b) = (element(&g, &p), element(&g, &q));
        let t = Complex64::new(t, 0.0);
        let lhs = apply_alpha(&a.convolve(&b).unwrap(), &pot, t);
        let rhs = apply_alpha(&a, &pot, t).convolve(&apply_alpha(&b, &pot, t)).unwrap();
        prop_assert!(diff(&lhs, &rhs) <= TOL, "{} vs {}", lhs.format(), rhs.format());
    }

    #[test]
    fn alpha_is_a_group_action(p in picks(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let pot = depth2(&[2.0, 3.0, 4.0, 5.0]);
        let a = element(pot.graph(), &p);
        let one = apply_alpha(&apply_alpha(&a, &pot, Complex64::new(s, 0.0)), &pot, Complex64::new(t, 0.0));
        let two = apply_alpha(&a, &pot, Complex64::new(s + t, 0.0));
        prop_assert!(diff(&one, &two) <= TOL);
    }

    #[test]
    fn cocycle_is_additive(
        tail in prop::collection::vec(0usize..2, 1..4),
        u in prop::collection::vec(0usize..2, 0..4),
        v in prop::collection::vec(0usize..2, 0..4),
        w in prop::collection::vec(0usize..2, 0..4),
        vals in prop::array::uniform4(0.5f64..6.0),
    ) {
        // x = u·z, y = v·z, z' = w·z all share the tail z
        let pot = depth2(&vals);
        let g = pot.graph();
        let z = point(g, &[], &tail).unwrap();
        let x = z.prepend(g, &u).unwrap();
        let y = z.prepend(g, &v).unwrap();
        let zz = z.prepend(g, &w).unwrap();
        let c1 = pot.cocycle_value(&x, u.len(), v.len(), &y).unwrap();
        let c2 = pot.cocycle_value(&y, v.len(), w.len(), &zz).unwrap();
        let c3 = pot.cocycle_value(&x, u.len(), w.len(), &zz).unwrap();
        prop_assert!((c1 + c2 - c3).abs() <= TOL);
        // c(γ^{-1}) = -c(γ)
        let back = pot.cocycle_value(&y, v.len(), u.len(), &x).unwrap();
        prop_assert!((c1 + back).abs() <= TOL);
    }

    #[test]
    fn eigenmeasures_are_kolmogorov_consistent(vals in prop::array::uniform4(1.2f64..6.0)) {
        let pot = depth2(&vals);
        let beta = kms_inverse_temperature(&pot).unwrap().beta;
        let mu = eigenmeasure(&pot, beta).unwrap();
        prop_assert!(mu.kolmogorov_defect(8) <= 1e-12);
    }

    #[test]
    fn self_similar_measures_are_kolmogorov_consistent(r in prop::collection::vec(0.05f64..0.6, 2..5)) {
        let g = Arc::new(Graph::full_shift(r.len()));
        let ratios = RatioList::new(&g, r.clone()).unwrap();
        let beta = moran_dimension(&r).unwrap().beta;
        let mu = CylinderMeasure::self_similar(g, ratios, beta, None).unwrap();
        prop_assert!(mu.kolmogorov_defect(6) <= 1e-12);
    }

    #[test]
    fn graph_measures_are_kolmogorov_consistent(r in prop::array::uniform3(0.1f64..0.8)) {
        let g = golden();
        let ratios = RatioList::new(&g, r.to_vec()).unwrap();
        let dim = graph_dimension(&g, &ratios).unwrap();
        let q = dim.perron_numbers.clone().unwrap();
        let mu = CylinderMeasure::self_similar(g, ratios, dim.beta, Some(&q)).unwrap();
        prop_assert!(mu.kolmogorov_defect(8) <= 1e-12);
    }
}
