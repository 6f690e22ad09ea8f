//! Property tests for the polynomial layer and the splitting constructions.

use proptest::prelude::*;
use std::sync::Arc;
use ulrich::field::{rat, FieldElement};
use ulrich::matfac::{cyclic_root, split_t_power};
use ulrich::poly::{monomials_of_degree, parse_poly, MultiPoly, VarSpec};

fn vars3() -> Arc<VarSpec> {
    VarSpec::standard(&["x", "y", "z"]).unwrap()
}

/// Strategy: a homogeneous polynomial of the given degree with small integer
/// coefficients (possibly zero at some monomials, never the zero polynomial).
fn homogeneous(degree: u32) -> impl Strategy<Value = MultiPoly> {
    let monos = monomials_of_degree(3, degree);
    let n = monos.len();
    proptest::collection::vec(-6i64..=6, n)
        .prop_filter("nonzero", |cs| cs.iter().any(|&c| c != 0))
        .prop_map(move |cs| {
            let vars = vars3();
            let mut p = MultiPoly::zero(Arc::clone(&vars), 1);
            for (c, e) in cs.iter().zip(&monos) {
                if *c != 0 {
                    p = p
                        .add(&MultiPoly::monomial(
                            Arc::clone(&vars),
                            1,
                            e.clone(),
                            FieldElement::from_rat(1, rat(*c, 1)),
                        ))
                        .unwrap();
                }
            }
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_degree_adds(a in homogeneous(2), b in homogeneous(3)) {
        let p = a.mul(&b).unwrap();
        prop_assert!(p.is_homogeneous());
        prop_assert_eq!(p.weighted_degree().unwrap(), 5);
    }

    #[test]
    fn render_parse_round_trip(p in homogeneous(3)) {
        let back = parse_poly(&p.to_string(), p.vars(), 1).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn substitution_composes(p in homogeneous(2)) {
        // sigma: (x, y, z) -> (y, z, x); tau: (x, y, z) -> (x + y, y, z).
        let vars = vars3();
        let v = |i: usize| MultiPoly::var(Arc::clone(&vars), 1, i);
        let sigma = vec![v(1), v(2), v(0)];
        let xy = v(0).add(&v(1)).unwrap();
        let tau = vec![xy, v(1), v(2)];
        // tau applied to the image of sigma.
        let lhs = p.substitute(&sigma).unwrap().substitute(&tau).unwrap();
        // the composite map directly
        let composite: Vec<MultiPoly> =
            sigma.iter().map(|s| s.substitute(&tau).unwrap()).collect();
        let rhs = p.substitute(&composite).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_rule(a in homogeneous(2), b in homogeneous(2)) {
        let prod = a.mul(&b).unwrap();
        let lhs = prod.partial_derivative("y").unwrap();
        let rhs = a
            .partial_derivative("y")
            .unwrap()
            .mul(&b)
            .unwrap()
            .add(&a.mul(&b.partial_derivative("y").unwrap()).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn split_identity_small_lengths() {
    // prod_j (t Id - zeta^j M) = (t^d - g) Id for cyclic roots up to d = 5.
    for d in 2..=5usize {
        let names: Vec<String> = (0..d).map(|i| format!("w{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let vars = VarSpec::standard(&refs).unwrap();
        let forms: Vec<MultiPoly> = (0..d)
            .map(|i| MultiPoly::var(Arc::clone(&vars), 1, i))
            .collect();
        let root = cyclic_root(&forms).unwrap();
        let mf = split_t_power(&root, "t").unwrap();
        assert!(mf.verified(), "split at d = {}", d);
        assert_eq!(mf.length(), d);
        assert_eq!(mf.factor(0).field_order() as usize % d, 0);
    }
}
