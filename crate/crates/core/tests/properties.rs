use proptest::prelude::*;

use contrax::complex::{cohomology, is_quasi_iso, path_object, validate_complex, GradedMap};
use contrax::harness::{Gen, GenConfig};
use contrax::linalg::{Field, Matrix};
use contrax::perturb::{trick2, trick3};
use contrax::retract::{check_contr_morphism, check_contraction, trick1, Morphism};

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::prime(2).unwrap()),
        Just(Field::prime(3).unwrap()),
        Just(Field::prime(7).unwrap()),
        Just(Field::Q),
    ]
}

fn matrix() -> impl Strategy<Value = Matrix> {
    (field(), 0usize..6, 0usize..6).prop_flat_map(|(f, r, c)| {
        proptest::collection::vec(-3i64..=3, r * c).prop_map(move |v| Matrix::from_i64(f, r, c, &v))
    })
}

fn config() -> impl Strategy<Value = GenConfig> {
    (field(), -2i32..=0, 0i32..=2, 0usize..5, any::<u64>())
        .prop_map(|(f, lo, span, dim, seed)| GenConfig::new(f, (lo, lo + span), dim).with_seed(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(a in matrix()) {
        let k = a.kernel_basis();
        prop_assert_eq!(a.rank() + k.cols(), a.cols());
        prop_assert!((&a * &k).is_zero());
        prop_assert_eq!(a.transpose().rank(), a.rank());
    }

    #[test]
    fn solve_finds_preimages(a in matrix(), seed in any::<u64>()) {
        let mut g = Gen::new(&GenConfig::new(a.field(), (0, 0), 1).with_seed(seed));
        let x = g.matrix(a.cols(), 1);
        let b = &a * &x;
        let y = a.solve(&b).unwrap().expect("b lies in the image");
        prop_assert_eq!(&a * &y, b);
    }

    #[test]
    fn generated_contractions_are_contractions(cfg in config()) {
        let (c, _) = Gen::new(&cfg).contraction();
        let r = check_contraction(&c);
        prop_assert!(r.passed(), "{}", r);
        prop_assert_eq!(trick2(&c).unwrap(), c);
    }

    #[test]
    fn perturbed_homotopy_normalizes(cfg in config()) {
        let mut g = Gen::new(&cfg);
        let (c, _) = g.contraction();
        let sdr = g.perturbed(&c);
        let fixed = trick2(&sdr).unwrap();
        prop_assert!(check_contraction(&fixed).passed());
    }

    #[test]
    fn tricks_compose(cfg in config()) {
        let mut g = Gen::new(&cfg);
        let (c1, s1) = g.contraction();
        let (c2, s2) = g.contraction();
        let f = g.chain_map(&s1, &s2);
        prop_assert!(f.is_chain_map());
        let fh = trick1(&f, &c1.ar, &c2.ar).unwrap();
        let ft = trick3(&Morphism { src: c1, tgt: c2, f: fh.f }).unwrap();
        prop_assert!(check_contr_morphism(&ft));
    }

    #[test]
    fn path_inclusion_is_quasi_iso(cfg in config()) {
        let b = Gen::new(&cfg).complex().complex;
        let po = path_object(&b);
        prop_assert!(validate_complex(&po.object).passed());
        prop_assert!(is_quasi_iso(&po.incl));
        let h = cohomology(&po.object);
        let base = cohomology(&b);
        for i in b.degrees() {
            prop_assert_eq!(h.dim(i), base.dim(i));
            let expected = b.dim(i) - b.d(i).rank() - b.d(i - 1).rank();
            prop_assert_eq!(base.dim(i), expected);
        }
    }

    #[test]
    fn identity_is_quasi_iso(cfg in config()) {
        let b = Gen::new(&cfg).complex().complex;
        prop_assert!(is_quasi_iso(&GradedMap::identity(&b)));
    }
}
