use nslab_core::form::{PolyForm, VectorFieldPoly};
use nslab_core::frame::{anti_self_dual_basis, self_dual_basis, FlatFrame};
use nslab_core::poly::{int, rat, PolyScalar, Rational, MAX_VARS};
use nslab_core::form::subsets;
use proptest::prelude::*;

fn poly(dim: usize, max_deg: u16) -> impl Strategy<Value = PolyScalar> {
    let term = (prop::collection::vec(0..=max_deg, dim), -4i64..=4, 1i64..=3);
    prop::collection::vec(term, 0..4).prop_map(move |ts| {
        PolyScalar::from_terms(
            dim,
            ts.into_iter().map(|(e, n, d)| {
                let mut ex = [0u16; MAX_VARS];
                ex[..dim].copy_from_slice(&e);
                (ex, rat(n, d))
            }),
        )
    })
}

fn form(dim: usize, degree: usize) -> impl Strategy<Value = PolyForm> {
    let n = subsets(dim, degree).len();
    prop::collection::vec(poly(dim, 2), n).prop_map(move |coeffs| {
        PolyForm::from_components(dim, degree, subsets(dim, degree).into_iter().zip(coeffs)).unwrap()
    })
}

fn field(dim: usize) -> impl Strategy<Value = VectorFieldPoly> {
    prop::collection::vec(poly(dim, 1), dim).prop_map(|c| VectorFieldPoly::new(c).unwrap())
}

fn dim_and_degree() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just(3usize), Just(4usize)].prop_flat_map(|d| (Just(d), 0..=d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(a in dim_and_degree().prop_flat_map(|(d, k)| form(d, k))) {
        if a.degree() + 2 <= a.dim() {
            prop_assert!(a.exterior_d().unwrap().exterior_d().unwrap().is_zero());
        }
    }

    #[test]
    fn star_star_is_sign(a in dim_and_degree().prop_flat_map(|(d, k)| form(d, k))) {
        let f = FlatFrame::standard(a.dim()).unwrap();
        let k = a.degree();
        let sign = if (k * (a.dim() - k)) % 2 == 0 { int(1) } else { int(-1) };
        prop_assert_eq!(f.hodge_star(&f.hodge_star(&a).unwrap()).unwrap(), a.scale(&sign));
    }

    #[test]
    fn leibniz(a in form(4, 1), b in form(4, 2)) {
        let lhs = a.wedge(&b).unwrap().exterior_d().unwrap();
        let rhs = a.exterior_d().unwrap().wedge(&b).unwrap()
            .sub(&a.wedge(&b.exterior_d().unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartan_formula(a in form(4, 2), x in field(4)) {
        prop_assert_eq!(a.lie_derivative(&x).unwrap(), a.lie_derivative_cartan(&x).unwrap());
    }

    #[test]
    fn pullback_commutes_with_d(a in form(3, 1), m in prop::collection::vec(-3i64..=3, 9)) {
        let mat: Vec<Vec<Rational>> = m.chunks(3).map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        prop_assert_eq!(
            a.exterior_d().unwrap().pullback_linear(&mat).unwrap(),
            a.pullback_linear(&mat).unwrap().exterior_d().unwrap()
        );
    }

    #[test]
    fn self_dual_parts_split(a in form(4, 2)) {
        let f = FlatFrame::standard(4).unwrap();
        let sd = f.self_dual_part(&a).unwrap();
        let asd = f.anti_self_dual_part(&a).unwrap();
        prop_assert_eq!(sd.add(&asd).unwrap(), a);
        prop_assert!(f.is_self_dual(&sd).unwrap());
    }
}

#[test]
fn frame_pairings() {
    let f = FlatFrame::standard(4).unwrap();
    let sd = self_dual_basis();
    let asd = anti_self_dual_basis();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { int(2) } else { int(0) };
            assert_eq!(f.inner(&sd[i], &sd[j]).unwrap(), PolyScalar::constant(4, want));
            assert!(f.inner(&sd[i], &asd[j]).unwrap().is_zero());
        }
        assert_eq!(f.hodge_star(&sd[i]).unwrap(), sd[i]);
        assert_eq!(f.hodge_star(&asd[i]).unwrap(), asd[i].neg());
    }
}

#[test]
fn reversed_orientation_swaps_duality() {
    let f = FlatFrame::standard(4).unwrap().with_orientation(-1).unwrap();
    assert!(!f.is_self_dual(&self_dual_basis()[0]).unwrap());
    assert!(f.is_self_dual(&anti_self_dual_basis()[0]).unwrap());
}
