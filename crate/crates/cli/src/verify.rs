//! Randomized verification suites behind `kmilnor verify`.

use kmilnor::barcycles::{bar_boundary, c_cycle, exterior_class, wedge_of, BarChain};
use kmilnor::bncomplex::{BnComplexSpec, TruncatedBnComplex};
use kmilnor::config::Caps;
use kmilnor::fgab::SparseVec;
use kmilnor::fields::{factor, hilbert_dyadic, parse_support, real_symbol, Field, FieldElement, Place, Support};
use kmilnor::milnor::{legendre_from_tame, steinberg_check, KGroupProvider};
use kmilnor::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Suite;
use crate::random;

/// Failures kept verbatim in a report.
const MAX_LISTED_FAILURES: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub field: String,
    pub seed: u64,
    pub count: usize,
    pub checks: usize,
    pub failed: usize,
    /// Samples skipped because an element exceeded factorization bounds.
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite, field: Field, seed: u64, count: usize) -> Self {
        SuiteReport { suite, field: field.tag(), seed, count, checks: 0, failed: 0, skipped: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(what());
            }
        }
    }
}

/// Parameters of a suite run.
pub struct SuiteRun<'a> {
    pub suite: Suite,
    pub count: usize,
    pub seed: u64,
    pub field: Field,
    pub caps: &'a Caps,
    /// Support and degree for `dd-zero`.
    pub support: Option<Support>,
    pub n: usize,
}

pub fn run_suite(run: &SuiteRun, provider: &dyn KGroupProvider) -> Result<SuiteReport> {
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(run.seed);
    let mut report = SuiteReport::new(run.suite, run.field, run.seed, run.count);
    match run.suite {
        Suite::Steinberg => steinberg(run, &mut rng, &mut report)?,
        Suite::ProductFormula => product_formula(run, &mut rng, &mut report)?,
        Suite::DdZero => dd_zero(run, &mut rng, &mut report, provider)?,
        Suite::BarCycles => bar_cycles(run, &mut rng, &mut report)?,
        Suite::Exterior => exterior(run, &mut rng, &mut report)?,
    }
    Ok(report)
}

/// Height bound for random rationals in the symbol suites.
const HEIGHT: i64 = 1000;

fn steinberg(run: &SuiteRun, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    for _ in 0..run.count {
        let a = random::non_trivial_element(rng, run.field, HEIGHT);
        let b = random::element(rng, run.field, HEIGHT);
        let r = match steinberg_check(&a, &[b], run.caps) {
            Ok(r) => r,
            Err(Error::FactorizationBound(_)) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match r.one_minus {
            Some(ok) => report.check(ok, || format!("{{a, 1-a}} != 0 for a = {a}")),
            None => report.skipped += 1,
        }
        report.check(r.minus, || format!("{{a, -a}} != 0 for a = {a}"));
        for (b, ok) in &r.anticommute {
            report.check(*ok, || format!("{{a, b}} + {{b, a}} != 0 for a = {a}, b = {b}"));
        }
    }
    Ok(())
}

/// `(a, b)_R · (a, b)_2 · ∏_p (a, b)_p` for nonzero rationals.
pub fn product_formula_value(a: &BigRational, b: &BigRational, caps: &Caps) -> Result<i8> {
    let ua = factor(&FieldElement::Rational(a.clone()), caps)?;
    let ub = factor(&FieldElement::Rational(b.clone()), caps)?;
    let mut v = real_symbol(a, b)? * hilbert_dyadic(a, b)?;
    let mut places: Vec<&Place> = ua.exponents().keys().chain(ub.exponents().keys()).filter(|p| p.is_tame()).collect();
    places.sort();
    places.dedup();
    for p in places {
        v *= legendre_from_tame(&ua, &ub, p, caps)?;
    }
    Ok(v)
}

fn product_formula(run: &SuiteRun, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    if run.field != Field::Rational {
        return Err(Error::invalid("the product-formula suite runs over Q"));
    }
    for _ in 0..run.count {
        let a = random::rational(rng, HEIGHT);
        let b = random::rational(rng, HEIGHT);
        match product_formula_value(&a, &b, run.caps) {
            Ok(v) => report.check(v == 1, || format!("product of local symbols is -1 for ({a}, {b})")),
            Err(Error::FactorizationBound(_)) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Default support for complex checks.
pub fn default_support(field: Field) -> Result<Support> {
    match field {
        Field::Rational => parse_support("-1,2,3", Some(field)),
        Field::FunctionField(_) => parse_support("t,t+1", Some(field)),
    }
}

/// Random element of `P_i` with a few small coefficients.
pub fn random_position_element(rng: &mut impl Rng, dim: usize) -> SparseVec {
    let mut x = SparseVec::new();
    if dim == 0 {
        return x;
    }
    for _ in 0..rng.gen_range(1..=4) {
        let k: i64 = rng.gen_range(-5..=5);
        *x.entry(rng.gen_range(0..dim)).or_insert_with(|| BigInt::from(0)) += k;
    }
    x.retain(|_, v| *v != BigInt::from(0));
    x
}

fn dd_zero(run: &SuiteRun, rng: &mut ChaCha8Rng, report: &mut SuiteReport, provider: &dyn KGroupProvider) -> Result<()> {
    let support = match &run.support {
        Some(s) => s.clone(),
        None => default_support(run.field)?,
    };
    let spec = BnComplexSpec::new(support, run.n, run.caps)?;
    let c = TruncatedBnComplex::build(&spec, provider)?;
    for i in 2..=run.n {
        let composite = c.differential(i)?.then(c.differential(i - 1)?)?;
        report.check(composite.is_zero(), || format!("δ_{} ∘ δ_{i} has a nonzero column", i - 1));
        for _ in 0..run.count {
            let x = random_position_element(rng, c.position_dim(i));
            let y = c.delta(i - 1, &c.delta(i, &x)?)?;
            report.check(y.is_empty(), || format!("δδ(x) != 0 at position {i} for x = {x:?}"));
        }
    }
    Ok(())
}

fn bar_cycles(run: &SuiteRun, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    for _ in 0..run.count {
        let k = rng.gen_range(1..=5);
        let size = rng.gen_range(1..=4);
        let gs: Vec<_> = (0..k).map(|_| random::diagonal_matrix(rng, size)).collect();
        let c = c_cycle(&gs)?;
        report.check(bar_boundary(&c)?.is_zero(), || format!("∂c != 0 for {gs:?}"));

        let deg = rng.gen_range(2..=5);
        let size = rng.gen_range(1..=6);
        let t: Vec<_> = (0..deg).map(|_| random::gl_matrix(rng, size)).collect();
        let chain = BarChain::single(t.clone(), BigRational::one())?;
        report.check(bar_boundary(&bar_boundary(&chain)?)?.is_zero(), || format!("∂∂ != 0 on {t:?}"));
    }
    Ok(())
}

fn exterior(run: &SuiteRun, rng: &mut ChaCha8Rng, report: &mut SuiteReport) -> Result<()> {
    for _ in 0..run.count {
        let rank = rng.gen_range(1..=3);
        let deg = rng.gen_range(1..=5);
        let gs = (0..deg).map(|_| random::torus(rng, run.field, rank, run.caps)).collect::<Result<Vec<_>>>()?;
        if deg >= 2 {
            let chain = BarChain::single(gs.clone(), BigRational::one())?;
            report.check(exterior_class(&bar_boundary(&chain)?).is_zero(), || format!("exterior(∂) != 0 on {gs:?}"));
        }
        let fact: BigInt = (1..=deg).map(BigInt::from).product();
        let lhs = exterior_class(&c_cycle(&gs)?);
        let rhs = wedge_of(&gs).scale(&BigRational::from_integer(fact));
        report.check(lhs == rhs, || format!("exterior(c) != n! wedge on {gs:?}"));

        let h = random::torus(rng, run.field, rank, run.caps)?;
        let with = |first: &kmilnor::barcycles::TorusElement| -> Result<_> {
            let mut v = vec![first.clone()];
            v.extend(gs[1..].iter().cloned());
            Ok(exterior_class(&c_cycle(&v)?))
        };
        let sum = with(&gs[0])?.add_scaled(&with(&h)?, &BigRational::one());
        report.check(with(&gs[0].mul(&h))? == sum, || format!("exterior(c) is not multiplicative on {gs:?}"));
    }
    Ok(())
}
