use ibfem::kernel::{DeltaKernel, Profile1D, ProfileKind};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = ProfileKind> {
    prop_oneof![Just(ProfileKind::Cosine), Just(ProfileKind::Hat)]
}

proptest! {
    #[test]
    fn even_in_each_coordinate(k in kind(), eps in 0.01f64..1.0, y0 in -2.0f64..2.0, y1 in -2.0f64..2.0) {
        let d = DeltaKernel::new(k, eps, 2).unwrap();
        let v = d.evaluate2(y0, y1);
        prop_assert_eq!(v, d.evaluate2(-y0, y1));
        prop_assert_eq!(v, d.evaluate2(y0, -y1));
        prop_assert!((v - d.evaluate2(y1, y0)).abs() <= 1e-14 * v.max(1.0));
    }

    #[test]
    fn tensor_product_of_profiles(k in kind(), eps in 0.01f64..1.0, y0 in -1.0f64..1.0, y1 in -1.0f64..1.0) {
        let d = DeltaKernel::new(k, eps, 2).unwrap();
        let p = Profile1D::new(k);
        let expected = p.evaluate(y0 / eps) * p.evaluate(y1 / eps) / (eps * eps);
        prop_assert!((d.evaluate(&[y0, y1]) - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        prop_assert!((d.evaluate2(y0, y1) - d.evaluate(&[y0, y1])).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn nonnegative_with_compact_support(k in kind(), eps in 0.01f64..1.0, y0 in -3.0f64..3.0, y1 in -3.0f64..3.0) {
        let d = DeltaKernel::new(k, eps, 2).unwrap();
        let v = d.evaluate2(y0, y1);
        prop_assert!(v >= 0.0);
        if y0.hypot(y1) >= d.support_radius() {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn three_dimensional_kernel_factors(k in kind(), eps in 0.05f64..1.0, y in prop::array::uniform3(-1.0f64..1.0)) {
        let d = DeltaKernel::new(k, eps, 3).unwrap();
        let p = Profile1D::new(k);
        let expected = y.iter().map(|v| p.evaluate(v / eps) / eps).product::<f64>();
        prop_assert!((d.evaluate(&y) - expected).abs() <= 1e-12 * expected.max(1.0));
    }
}

#[test]
fn moments_in_three_dimensions() {
    for k in [ProfileKind::Cosine, ProfileKind::Hat] {
        let d = DeltaKernel::new(k, 0.3, 3).unwrap();
        assert!((d.moment_zero() - 1.0).abs() < 1e-10);
    }
}
