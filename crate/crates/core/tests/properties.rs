use dirac_hardy_core::algebra::{contract_alpha, contract_sigma, Mat2, Mat4};
use dirac_hardy_core::discretization::io::{read_field, write_field, Precision};
use dirac_hardy_core::fields::BandLimitedSpec;
use dirac_hardy_core::keyvalue::KeyValues;
use dirac_hardy_core::operators::{apply_dirac_operator, apply_free_resolvent, FreeDiracParams, RadialChannel, Sign};
use dirac_hardy_core::verification::{verify, InequalityId, VerifyInput, VerifyParams};
use dirac_hardy_core::{CartesianGrid, Error, MatrixPotential, RadialGrid, Vec3, C64};
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-5.0..5.0f64).prop_map(Vec3)
}

fn nonzero_vec3() -> impl Strategy<Value = Vec3> {
    vec3().prop_filter("away from the origin", |v| v.norm() > 1e-3)
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

proptest! {
    #[test]
    fn sigma_and_alpha_square_to_the_length(v in vec3()) {
        let n2 = C64::new(v.norm_sq(), 0.0);
        let s = contract_sigma(v);
        let a = contract_alpha(v);
        prop_assert!((s * s - Mat2::identity().scale(n2)).max_abs() < 1e-12);
        prop_assert!((a * a - Mat4::identity().scale(n2)).max_abs() < 1e-12);
    }

    #[test]
    fn sigma_products_follow_dot_and_cross(u in vec3(), v in vec3()) {
        let lhs = contract_sigma(u) * contract_sigma(v);
        let rhs = Mat2::identity().scale(C64::new(u.dot(&v), 0.0))
            + contract_sigma(u.cross(&v)).scale(C64::new(0.0, 1.0));
        prop_assert!((lhs - rhs).max_abs() < 1e-11);
    }

    #[test]
    fn spin_coupled_potentials_are_hermitian_with_the_stated_bound(
        c in -2.0..2.0f64, b_re in -2.0..2.0f64, b_im in -2.0..2.0f64, x in nonzero_vec3(),
    ) {
        let b = C64::new(b_re, b_im);
        let v = MatrixPotential::spin_coupled(c, b).unwrap();
        let m = v.evaluate(x);
        prop_assert!(m.hermitian_deviation() < 1e-12 * (1.0 + m.max_abs()));
        let expected = (c + b.norm()).abs().max((c - b.norm()).abs());
        prop_assert!((v.bound() - expected).abs() < 1e-12);
        // |x|·V(x) has eigenvalues c ± |b|, so its norm is the bound.
        let scaled = dirac_hardy_core::algebra::operator_norm(&m.scale(C64::new(x.norm(), 0.0))).unwrap();
        prop_assert!((scaled - expected).abs() < 1e-9 * (1.0 + expected));
    }

    #[test]
    fn remark14_bound_matches_its_coupling(c in -0.9..0.9f64, eps in 0.1..3.0f64, m in 0.0..3.0f64) {
        let v = MatrixPotential::remark14_family(c, eps, m).unwrap();
        let b = MatrixPotential::remark14_coupling(c, eps, m).norm();
        prop_assert!((v.bound() - (c.abs() + b)).abs() < 1e-12);
        prop_assert!(v.bound() >= 1.0);
    }

    #[test]
    fn keyvalue_numbers_round_trip(xs in prop::collection::vec(-1e6..1e6f64, 1..6)) {
        let text: String = xs.iter().enumerate().map(|(i, x)| format!("k{i}={x}\n")).collect();
        let mut kv = KeyValues::parse(&text).unwrap();
        for (i, x) in xs.iter().enumerate() {
            prop_assert_eq!(kv.f64(&format!("k{i}")).unwrap(), *x);
        }
        prop_assert!(kv.finish().is_ok());
    }

    #[test]
    fn keyvalue_rejects_leftovers(key in "[a-z]{1,8}", value in "[a-z0-9.]{1,8}") {
        let kv = KeyValues::parse(&format!("{key}={value}")).unwrap();
        let is_unknown_key = matches!(kv.finish(), Err(Error::Schema { field, .. }) if field == key);
        prop_assert!(is_unknown_key);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn resolvent_inverts_the_shifted_operator(
        seed in 0u64..1_000_000, mass in 0.0..2.0f64, shift in 0.1..2.0f64, s in sign(),
    ) {
        let grid = CartesianGrid::new(8.0, 16).unwrap();
        let p = FreeDiracParams::new(mass, shift, s).unwrap();
        let f = BandLimitedSpec::new(seed, 4).sample(grid).unwrap();
        let back = apply_dirac_operator(&apply_free_resolvent(&f, &p).unwrap(), &p).unwrap();
        prop_assert!(back.sub(&f).unwrap().norm().unwrap() <= 1e-10 * f.norm().unwrap());
    }

    #[test]
    fn hardy_dirac_ratio_is_scale_invariant(
        kappa in prop_oneof![Just(-2), Just(-1), Just(1), Just(2)],
        power in 1.0..3.0f64, decay in 0.5..3.0f64, lower in -2.0..2.0f64,
        scale_re in 0.1..10.0f64, scale_im in -10.0..10.0f64,
        eps in 0.5..2.0f64, mass in 0.0..2.0f64,
    ) {
        let grid = RadialGrid::new(1e-4, 40.0, 1024).unwrap();
        let psi = RadialChannel::from_fn(kappa, grid, |r| {
            let f = C64::new(r.powf(power) * (-decay * r).exp(), 0.0);
            (f, C64::new(0.0, lower) * f)
        }).unwrap();
        let s = C64::new(scale_re, scale_im);
        let params = VerifyParams::new(eps, mass);
        let a = verify(InequalityId::HardyDiracFinal, &VerifyInput::Dirac(psi.clone()), &params).unwrap();
        let b = verify(InequalityId::HardyDiracFinal, &VerifyInput::Dirac(psi.scaled(s)), &params).unwrap();
        let (ra, rb) = (a.ratio.unwrap(), b.ratio.unwrap());
        prop_assert!((ra - rb).abs() < 1e-10 * ra.abs().max(1.0));
        prop_assert!((b.lhs - s.norm_sqr() * a.lhs).abs() < 1e-9 * b.lhs.abs().max(1e-300));
        prop_assert!(a.holds());
    }

    #[test]
    fn field_files_round_trip(seed in 0u64..1_000_000, arity in prop_oneof![Just(2usize), Just(4)]) {
        let grid = CartesianGrid::new(4.0, 8).unwrap();
        let f = BandLimitedSpec::new(seed, arity).sample(grid).unwrap();
        let mut file = tempfile::tempfile().unwrap();
        write_field(&mut file, &f, Precision::Complex128).unwrap();
        use std::io::Seek;
        file.rewind().unwrap();
        let g = read_field(&file).unwrap();
        prop_assert_eq!(g.components(), f.components());
        prop_assert_eq!(g.grid(), f.grid());
    }
}
