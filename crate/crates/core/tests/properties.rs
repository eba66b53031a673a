use std::sync::OnceLock;

use num_rational::BigRational;
use proptest::prelude::*;

use powercount::arith::gcd;
use powercount::counting::{as_natural, closed_form, enumerate_count, CountFamily, CountQuery, FormulaVariant};
use powercount::genfun::{gf_sp, GfRequest, GroupFamily, Statistic, Weighting};
use powercount::oracle::{build_group, FormFamily, FormSpec, GroupTable};
use powercount::polyring::irreducibles;
use powercount::powerclass::power_profile;
use powercount::series::RationalSeries;
use powercount::{FieldCtx, MonicPoly};

fn tables() -> &'static [GroupTable] {
    static TABLES: OnceLock<Vec<GroupTable>> = OnceLock::new();
    TABLES.get_or_init(|| {
        [
            (FormFamily::Sp, 2, 2),
            (FormFamily::Sp, 2, 3),
            (FormFamily::Sp, 2, 5),
            (FormFamily::Sp, 4, 2),
            (FormFamily::Oplus, 2, 5),
            (FormFamily::Ominus, 2, 5),
            (FormFamily::Oodd, 3, 3),
        ]
        .into_iter()
        .map(|(f, m, q)| build_group(&FormSpec::new(f, m, q).unwrap()).unwrap())
        .collect()
    })
}

fn field_order() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])
}

fn monic(q: u64, max_degree: usize) -> impl Strategy<Value = MonicPoly> {
    prop::collection::vec(0..q as u32, 1..=max_degree).prop_map(move |mut c| {
        c.push(1);
        MonicPoly::new(&FieldCtx::of_order(q).unwrap(), c).unwrap()
    })
}

fn series(order: usize) -> impl Strategy<Value = RationalSeries> {
    prop::collection::vec((-20i64..20, 1i64..12), order + 1).prop_map(move |v| {
        let c = v.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect();
        RationalSeries::from_coeffs(c, order)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_inverse_roundtrip(q in field_order(), x in 1u32..64) {
        let f = FieldCtx::of_order(q).unwrap();
        let x = x % f.q();
        prop_assume!(x != 0);
        prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
    }

    #[test]
    fn factorization_multiplies_back(f in field_order().prop_flat_map(|q| monic(q, 9))) {
        let fac = f.factorize().unwrap();
        prop_assert_eq!(fac.product(), f);
        for (g, _) in &fac.factors {
            prop_assert!(g.is_irreducible().unwrap());
        }
    }

    #[test]
    fn series_inverse_and_split(mut s in series(6)) {
        s = s.add(&RationalSeries::one(6));
        prop_assume!(s.coeffs()[0] != BigRational::from_integer(0.into()));
        prop_assert_eq!(s.mul(&s.inv().unwrap()), RationalSeries::one(6));
        let (even, odd) = s.parity_split();
        prop_assert_eq!(RationalSeries::reassemble(&even, &odd, 6), s.clone());
        prop_assert_eq!(RationalSeries::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn power_flags_are_class_functions(g in 0usize..7, m in 1u64..=8) {
        let t = &tables()[g];
        let image = t.power_image(m);
        for (i, &flag) in image.iter().enumerate() {
            prop_assert_eq!(flag, image[t.classes()[t.class_of(i)].representative]);
        }
    }

    #[test]
    fn profile_implications(g in 0usize..7, pick in any::<prop::sample::Index>()) {
        let t = &tables()[g];
        let i = pick.index(t.order() as usize);
        let p = t.profile_of(i, &[]).unwrap();
        if p.separable {
            prop_assert!(p.semisimple && p.cyclic);
        }
        if t.spec().family == FormFamily::Sp && p.cyclic {
            prop_assert_eq!(p.regular, Some(true));
        }
        prop_assert_eq!(t.brute_centralizer(i), p.centralizer_size);
    }

    #[test]
    fn spectrum_depends_on_exponent(q in prop::sample::select(vec![2u64, 3, 5]), n in 1usize..=4, m in 2u64..=6, pick in any::<prop::sample::Index>()) {
        prop_assume!(gcd(m, q) == 1);
        let ctx = FieldCtx::of_order(q).unwrap();
        let all = irreducibles(&ctx, n);
        let f = &all[pick.index(all.len())];
        let e = f.exponent_of().unwrap();
        let first = all.iter().find(|g| g.exponent_of().unwrap() == e).unwrap();
        let (a, b) = (power_profile(f, m).unwrap(), power_profile(first, m).unwrap());
        prop_assert_eq!(a.spectrum, b.spectrum);
        prop_assert_eq!(a.star_spectrum, b.star_spectrum);
    }

    #[test]
    fn closed_forms_count(q in prop::sample::select(vec![2u64, 3, 4, 5, 7]), m in 1u64..=7, n in 1u64..=5, fam in 0usize..3) {
        prop_assume!(gcd(m, q) == 1);
        let family = [CountFamily::NM, CountFamily::NstarM, CountFamily::Rstar][fam];
        let degree = if family == CountFamily::NM { n } else { 2 * n };
        let query = CountQuery { family, q, m, degree, k: None, e: None };
        let formula = as_natural(&closed_form(&query, FormulaVariant::Corrected).unwrap()).unwrap();
        prop_assert_eq!(formula, enumerate_count(&query).unwrap());
    }

    #[test]
    fn first_symplectic_coefficient(g in 0usize..3, m in 1u64..=8, stat in 0usize..4, classes in any::<bool>()) {
        let t = &tables()[g];
        let q = t.spec().q();
        prop_assume!(gcd(m, q) == 1);
        let stat = [Statistic::Separable, Statistic::Semisimple, Statistic::Cyclic, Statistic::Regular][stat];
        let w = if classes { Weighting::Classes } else { Weighting::Probability };
        let s = gf_sp(&GfRequest::new(GroupFamily::Sp, stat, w, q, m, 1).unwrap()).unwrap();
        prop_assert_eq!(s.coeff(1), t.empirical(stat, m).unwrap().value(w));
    }
}
