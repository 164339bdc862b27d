use super::*;
use crate::fields::{factor, parse_element, parse_support, Support};
use num_bigint::BigUint;
use crate::fgab::SparseVec;
use proptest::prelude::*;

fn caps() -> Caps {
    Caps::default()
}

fn unit(s: &str) -> UnitVector {
    factor(&parse_element(s, None).unwrap(), &caps()).unwrap()
}

fn sym(entries: &[&str]) -> MilnorSymbol {
    let us: Vec<UnitVector> = entries.iter().map(|s| unit(s)).collect();
    let field = us.first().map_or(Field::Rational, |u| u.field());
    MilnorSymbol::new(field, us).unwrap()
}

fn nf(entries: &[&str]) -> KNormalForm {
    symbol_normal_form(&sym(entries), &caps()).unwrap()
}

fn odd(p: u32) -> Place {
    Place::OddPrime(BigUint::from(p))
}

#[test]
fn tame_symbol_examples() {
    let five = odd(5);
    assert_eq!(tame_symbol(&unit("2"), &unit("5"), &five, &caps()).unwrap(), 1);
    assert_eq!(tame_symbol(&unit("5"), &unit("5"), &five, &caps()).unwrap(), 2);
    assert_eq!(tame_symbol(&unit("3"), &unit("7"), &five, &caps()).unwrap(), 0);
    assert!(tame_symbol(&unit("3"), &unit("2"), &Place::Dyadic, &caps()).is_err());
    assert!(tame_symbol(&unit("3"), &unit("2"), &Place::RealSign, &caps()).is_err());
}

#[test]
fn normal_form_examples() {
    assert!(nf(&["3", "-2"]).is_zero());
    let m1 = nf(&["-1", "-1"]);
    assert_eq!(m1, KNormalForm::RationalK2 { dyadic: 1, tame: BTreeMap::new() });
    assert!(nf(&["2", "3", "5"]).is_zero());
    assert_eq!(nf(&["-1", "-1", "-1"]), KNormalForm::RationalSign { degree: 3, sign: 1 });
    assert_eq!(nf(&[]), KNormalForm::Integer(BigInt::one()));
    assert_eq!(nf(&["-12/5"]), KNormalForm::Unit(unit("-12/5")));
    assert!(nf(&["t@p=3", "t+1@p=3", "t^2+1@p=3"]).is_zero());
    // {t, t+1} over F_3(t): tame at t is (t+1)|_{t=0} = 1, at t+1 it is t^{-1}... both units of F_3
    match nf(&["t@p=3", "t+1@p=3"]) {
        KNormalForm::FunctionK2 { tame } => {
            assert_eq!(tame.len(), 1);
            let (pl, r) = tame.iter().next().unwrap();
            assert_eq!(pl.to_string(), "t+1");
            assert_eq!(r.modulus, 2);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn normal_form_is_additive_and_rejects_mixing() {
    let a = MilnorExpression::symbol(sym(&["2", "3"]));
    let b = MilnorExpression::symbol(sym(&["3", "2"]));
    let sum = normal_form(&a.add(&b).unwrap(), &caps()).unwrap();
    assert!(sum.is_zero());
    let c = MilnorExpression::symbol(sym(&["2"]));
    assert!(a.add(&c).is_err());
}

#[test]
fn steinberg_examples() {
    let samples: Vec<FieldElement> = ["2", "-3", "5/7"].iter().map(|s| parse_element(s, None).unwrap()).collect();
    for a in ["3", "1/2", "-1", "-5/3", "7/12"] {
        let r = steinberg_check(&parse_element(a, None).unwrap(), &samples, &caps()).unwrap();
        assert!(r.passed(), "{a}: {r:?}");
    }
    assert!(steinberg_check(&parse_element("1", None).unwrap(), &[], &caps()).is_err());
    let fs: Vec<FieldElement> = ["t", "2*t+1", "t^2+1"].iter().map(|s| parse_element(&format!("{s}@p=3"), None).unwrap()).collect();
    for a in ["t", "t^2+2", "(t+1)/(t^2+1)", "2"] {
        let r = steinberg_check(&parse_element(&format!("{a}@p=3"), None).unwrap(), &fs, &caps()).unwrap();
        assert!(r.passed(), "{a}: {r:?}");
    }
}

#[test]
fn parse_symbols_and_expressions() {
    let s = parse_symbol("{-1, -1}", None, &caps()).unwrap();
    assert_eq!(s.degree(), 2);
    let s = parse_symbol("{t, t+1@p=3}", None, &caps()).unwrap();
    assert_eq!(s.field(), Field::FunctionField(3));
    let e = parse_expression("{2,3} + {3,2} - 2*{-1,5}", None, &caps()).unwrap();
    assert_eq!(e.terms().len(), 3);
    // {-1,5} has order 2, so twice it vanishes
    assert!(normal_form(&e, &caps()).unwrap().is_zero());
    assert!(parse_symbol("2,3", None, &caps()).is_err());
}

#[test]
fn truncated_group_examples() {
    let s = Support::rational(&[2, 3, 5]).unwrap();
    let k0 = truncated_k_group(&s, 0, &caps()).unwrap();
    assert_eq!(k0.group().invariants().describe(), "Z");
    let k1 = truncated_k_group(&s, 1, &caps()).unwrap();
    assert_eq!(k1.group().invariants().describe(), "Z/2 + Z^3");
    let f = parse_support("t,t+1,t^2+1@p=3", None).unwrap();
    let k3 = truncated_k_group(&f, 3, &caps()).unwrap();
    assert!(k3.group().is_trivial());
    let k3q = truncated_k_group(&s, 3, &caps()).unwrap();
    assert_eq!(k3q.group().invariants().describe(), "Z/2");
}

#[test]
fn k2_of_small_supports() {
    // {-1,2}: K_2 generated by {-1,-1} (the tame and Hilbert data of {2,2} = {2,-1} vanish)
    let s = Support::rational(&[2]).unwrap();
    let k2 = truncated_k_group(&s, 2, &caps()).unwrap();
    assert_eq!(k2.group().invariants().describe(), "Z/2");
    // adding 3 contributes F_3^x = Z/2
    let s = Support::rational(&[2, 3]).unwrap();
    let k2 = truncated_k_group(&s, 2, &caps()).unwrap();
    assert_eq!(k2.group().invariants().describe(), "Z/2 + Z/2");
    let s = Support::rational(&[2, 3, 5]).unwrap();
    let k2 = truncated_k_group(&s, 2, &caps()).unwrap();
    assert_eq!(k2.group().invariants().describe(), "Z/2 + Z/2 + Z/4");
}

#[test]
fn multiply_unit_examples() {
    let c = caps();
    let s = Support::rational(&[2, 3]).unwrap();
    let k1 = truncated_k_group(&s, 1, &c).unwrap();
    let k2 = truncated_k_group(&s, 2, &c).unwrap();
    let e = |x: &str| k1.element_of(&MilnorExpression::symbol(sym(&[x])), &c).unwrap();
    let one = unit("1");
    assert!(k1.multiply_unit(&one, &e("3"), &k2, &c).unwrap().is_empty());
    let mm = k1.multiply_unit(&unit("-1"), &e("-1"), &k2, &c).unwrap();
    assert_eq!(k2.normal_form_of(&mm, &c).unwrap(), nf(&["-1", "-1"]));
    let x23 = k1.multiply_unit(&unit("2"), &e("3"), &k2, &c).unwrap();
    assert_eq!(k2.normal_form_of(&x23, &c).unwrap(), nf(&["2", "3"]));
    assert_eq!(x23, k2.element_of(&MilnorExpression::symbol(sym(&["2", "3"])), &c).unwrap());
}

#[test]
fn multiplication_agrees_with_normal_forms_on_all_tuples() {
    let c = caps();
    for s in [Support::rational(&[2, 3, 5]).unwrap(), parse_support("t,t+1,t^2+1@p=3", None).unwrap()] {
        for m in 0..3 {
            let k = truncated_k_group(&s, m, &c).unwrap();
            let next = truncated_k_group(&s, m + 1, &c).unwrap();
            for g in 0..k.group().generators() {
                let x = SparseVec::from([(g, BigInt::one())]);
                let lift = k.lift(&x).unwrap();
                assert_eq!(k.element_of(&lift, &c).unwrap(), k.group().reduce(&x));
                for (j, u) in k.unit_basis().iter().enumerate() {
                    let m_j = k.multiplication_matrix(j, &next, &c).unwrap();
                    let got = next.group().reduce(&m_j.apply(&x));
                    let mut prod = MilnorExpression::zero(s.field(), m + 1);
                    for (coef, t) in lift.terms() {
                        prod.push(coef.clone(), t.prepend(u).unwrap()).unwrap();
                    }
                    assert_eq!(got, next.element_of(&prod, &c).unwrap());
                }
            }
        }
    }
}

#[test]
fn data_round_trips_through_json() {
    let s = Support::rational(&[2, 3]).unwrap();
    let k = truncated_k_group(&s, 2, &caps()).unwrap();
    let text = serde_json::to_string(k.data()).unwrap();
    let back: KGroupData = serde_json::from_str(&text).unwrap();
    let k2 = TruncatedKGroup::from_data(back).unwrap();
    assert_eq!(k2.group().invariants(), k.group().invariants());
}

#[test]
fn caps_are_enforced() {
    let small = Caps { max_support: 1, ..Caps::default() };
    let s = Support::rational(&[2, 3]).unwrap();
    assert!(matches!(TruncatedKGroup::compute(&s, 1, &small), Err(Error::CapExceeded(_))));
}

#[test]
fn dyadic_bit_matches_rational_hilbert() {
    for (a, b) in [("-1", "-1"), ("2", "-1"), ("3", "-2"), ("6", "-7/5"), ("12", "10"), ("-3/8", "5")] {
        let qa = match parse_element(a, None).unwrap() { FieldElement::Rational(q) => q, _ => unreachable!() };
        let qb = match parse_element(b, None).unwrap() { FieldElement::Rational(q) => q, _ => unreachable!() };
        let h = crate::fields::hilbert_dyadic(&qa, &qb).unwrap();
        assert_eq!(hilbert_dyadic_bit(&unit(a), &unit(b)) == 1, h == -1, "({a},{b})");
    }
}

fn small_rational() -> impl Strategy<Value = FieldElement> {
    (-300i64..300, 1i64..300)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| FieldElement::rational(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn anticommutativity(a in small_rational(), b in small_rational()) {
        let ua = factor(&a, &caps()).unwrap();
        let ub = factor(&b, &caps()).unwrap();
        let ab = symbol_normal_form(&MilnorSymbol::new(Field::Rational, vec![ua.clone(), ub.clone()]).unwrap(), &caps()).unwrap();
        let ba = symbol_normal_form(&MilnorSymbol::new(Field::Rational, vec![ub, ua]).unwrap(), &caps()).unwrap();
        prop_assert!(ab.add(&ba).unwrap().is_zero());
    }

    #[test]
    fn steinberg_vanishing(a in small_rational()) {
        prop_assume!(!a.equals(&FieldElement::rational(1, 1)));
        let r = steinberg_check(&a, &[], &caps()).unwrap();
        prop_assert!(r.passed());
    }

    #[test]
    fn product_formula(a in small_rational(), b in small_rational()) {
        let (FieldElement::Rational(qa), FieldElement::Rational(qb)) = (&a, &b) else { unreachable!() };
        let ua = factor(&a, &caps()).unwrap();
        let ub = factor(&b, &caps()).unwrap();
        let mut prod = crate::fields::real_symbol(qa, qb).unwrap() * crate::fields::hilbert_dyadic(qa, qb).unwrap();
        let mut places: Vec<Place> = ua.exponents().keys().chain(ub.exponents().keys()).filter(|p| p.is_tame()).cloned().collect();
        places.dedup();
        places.sort();
        places.dedup();
        for p in places {
            prod *= legendre_from_tame(&ua, &ub, &p, &caps()).unwrap();
        }
        prop_assert_eq!(prod, 1);
    }
}
