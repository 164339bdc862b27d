//! Command implementations. Each returns the text to print and an exit code.

use std::path::Path;

use kmilnor::barcycles::{bar_boundary, chi_prime_data, exterior_class, kappa_block_check, kappa_chain, KappaTerm};
use kmilnor::bncomplex::{b_n, report, stabilization_scan, BnComplexSpec, TruncatedBnComplex};
use kmilnor::config::CONVENTION_VERSION;
use kmilnor::fgab::{axpy, SparseVec};
use kmilnor::fields::{factor, parse_element, parse_support, Field, Support, Torsion, UnitVector};
use kmilnor::milnor::{normal_form, parse_expression, KGroupProvider, MemoryKGroups, MilnorExpression, MilnorSymbol};
use kmilnor::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::cache::DiskKGroups;
use crate::config::{parse_field, Cli, Command, GoldenAction, OutputFormat, RunConfig};
use crate::golden::{GoldenStatus, GoldenStore};
use crate::verify::{run_suite, SuiteRun};

/// Exit code for a failed invariant or check.
pub const EXIT_INVARIANT: i32 = 1;
/// Exit code for rejected input.
pub const EXIT_INPUT: i32 = 2;

/// What a command prints and how the process exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
    /// The output is an error message rather than a report.
    pub is_error: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, code: 0, is_error: false }
    }

    fn with_code(output: String, code: i32) -> Self {
        Outcome { output, code, is_error: false }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_INVARIANT
    }
}

/// The K-group provider a configuration asks for.
pub fn provider(cfg: &RunConfig) -> Result<Box<dyn KGroupProvider>> {
    Ok(match &cfg.cache_dir {
        Some(dir) => Box::new(DiskKGroups::new(dir, cfg.caps.clone())?),
        None => Box::new(MemoryKGroups::new(cfg.caps.clone())),
    })
}

/// Run a parsed command line. Errors become an exit code and a message.
pub fn run(cli: &Cli) -> Outcome {
    let result = RunConfig::from_cli(cli).and_then(|cfg| dispatch(&cli.command, &cfg));
    match result {
        Ok(o) => o,
        Err(e) => Outcome { output: format!("error: {e}\n"), code: exit_code(&e), is_error: true },
    }
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Factor { element } => cmd_factor(cfg, element),
        Command::Nf { expression } => cmd_nf(cfg, expression),
        Command::Verify { suite, count, support, n } => {
            let support = support.as_deref().map(|s| parse_support(s, Some(cfg.field))).transpose()?;
            let run = SuiteRun { suite: *suite, count: *count, seed: cfg.seed, field: cfg.field, caps: &cfg.caps, support, n: *n };
            let r = run_suite(&run, provider(cfg)?.as_ref())?;
            let code = if r.passed() { 0 } else { EXIT_INVARIANT };
            let text = format!(
                "suite {}: {} checks, {} failed, {} skipped{}\n",
                serde_json::to_value(r.suite).unwrap().as_str().unwrap_or_default(),
                r.checks,
                r.failed,
                r.skipped,
                r.failures.iter().map(|f| format!("\n  {f}")).collect::<String>()
            );
            Ok(Outcome::with_code(render(cfg, &serde_json::to_value(&r).unwrap(), text), code))
        }
        Command::Bn { support, n, timings } => cmd_bn(cfg, support, *n, *timings),
        Command::Scan { n, supports } => cmd_scan(cfg, *n, supports),
        Command::Kappa { n, input } => cmd_kappa(cfg, *n, input),
        Command::Chiprime { n, support, input } => cmd_chiprime(cfg, *n, support, input.as_deref()),
        Command::Golden { action, file, cases } => cmd_golden(cfg, *action, file, cases),
    }
}

fn render(cfg: &RunConfig, json: &Value, text: String) -> String {
    match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(json).expect("JSON values serialize") + "\n",
        OutputFormat::Text => text,
    }
}

fn unit_json(u: &UnitVector) -> Value {
    let torsion = match u.torsion() {
        Torsion::Sign(s) => json!(s),
        Torsion::Lead(c) => json!(c),
    };
    json!({
        "field": u.field().tag(),
        "torsion": torsion,
        "exponents": u.exponents().iter().map(|(p, e)| json!({"place": p.to_string(), "exponent": e.to_string()})).collect::<Vec<_>>(),
        "value": u.to_element().to_string(),
    })
}

fn cmd_factor(cfg: &RunConfig, element: &str) -> Result<Outcome> {
    let x = parse_element(element, Some(cfg.field))?;
    let u = factor(&x, &cfg.caps)?;
    let text = format!("{x} = {u}\n");
    Ok(Outcome::ok(render(cfg, &json!({"input": element, "factorization": unit_json(&u)}), text)))
}

fn cmd_nf(cfg: &RunConfig, expression: &str) -> Result<Outcome> {
    let e = parse_expression(expression, Some(cfg.field), &cfg.caps)?;
    let nf = normal_form(&e, &cfg.caps)?;
    let text = format!("{nf}\n");
    Ok(Outcome::ok(render(cfg, &json!({"input": expression, "normal_form": nf.to_json(), "is_zero": nf.is_zero()}), text)))
}

fn bn_spec(cfg: &RunConfig, support: &str, n: usize) -> Result<BnComplexSpec> {
    BnComplexSpec::new(parse_support(support, Some(cfg.field))?, n, &cfg.caps)
}

/// The JSON report of `bn`, shared with golden recording.
pub fn bn_json(cfg: &RunConfig, provider: &dyn KGroupProvider, support: &str, n: usize, timings: bool) -> Result<Value> {
    let spec = bn_spec(cfg, support, n)?;
    if n == 2 {
        b_n(&spec, provider)?;
    }
    Ok(report(&spec, provider)?.to_json(timings))
}

fn cmd_bn(cfg: &RunConfig, support: &str, n: usize, timings: bool) -> Result<Outcome> {
    let p = provider(cfg)?;
    let j = bn_json(cfg, p.as_ref(), support, n, timings)?;
    let text = format!(
        "B_{n}({}) truncated to S = {}: H2 = {}, H1 = {}\n",
        cfg.field,
        support,
        describe(&j["invariant_factors_H2"]),
        describe(&j["invariant_factors_H1"])
    );
    Ok(Outcome::ok(render(cfg, &j, text)))
}

fn describe(v: &Value) -> String {
    v.get("description").and_then(Value::as_str).unwrap_or("?").to_string()
}

fn cmd_scan(cfg: &RunConfig, n: usize, supports: &[String]) -> Result<Outcome> {
    let chain = supports.iter().map(|s| parse_support(s, Some(cfg.field))).collect::<Result<Vec<Support>>>()?;
    let p = provider(cfg)?;
    let r = stabilization_scan(n, &chain, p.as_ref())?;
    let j = r.to_json();
    let mut text = format!("scan of B_{n}({}) over {} supports\n", cfg.field, chain.len());
    for l in &r.levels {
        text += &format!("  S = {}: {}\n", l.support, l.invariants.describe());
    }
    for m in &r.steps {
        text += &format!("  level {} -> {}: image {}\n", m.from, m.to, m.image.describe());
    }
    Ok(Outcome::ok(render(cfg, &j, text)))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn json_int(v: &Value) -> Result<BigInt> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::invalid(format!("expected an integer, got {v}"))),
    };
    s.trim().parse().map_err(|_| Error::invalid(format!("expected an integer, got {s:?}")))
}

fn json_unit(v: &Value, field: Field, cfg: &RunConfig) -> Result<UnitVector> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::invalid(format!("expected a field element, got {v}"))),
    };
    let u = factor(&parse_element(&s, Some(field))?, &cfg.caps)?;
    if u.field() != field {
        return Err(Error::invalid(format!("{s} is not in {field}")));
    }
    Ok(u)
}

/// Terms `{coefficient, a, b, c: [...]}` from a JSON file holding `{"terms": [...]}` or a bare list.
pub fn read_terms(path: &Path, cfg: &RunConfig) -> Result<(Field, Vec<KappaTerm>)> {
    let j = read_json(path)?;
    let field = match j.get("field").and_then(Value::as_str) {
        Some(f) => parse_field(f, &cfg.caps)?,
        None => cfg.field,
    };
    let list = j.get("terms").unwrap_or(&j);
    let items = list.as_array().ok_or_else(|| Error::invalid("expected a list of terms"))?;
    let mut out = Vec::new();
    for t in items {
        let get = |k: &str| t.get(k).ok_or_else(|| Error::invalid(format!("term is missing {k:?}")));
        let coefficient = match t.get("coefficient") {
            Some(v) => json_int(v)?,
            None => BigInt::from(1),
        };
        let c = get("c")?.as_array().ok_or_else(|| Error::invalid("\"c\" must be a list"))?;
        out.push(KappaTerm {
            coefficient,
            a: json_unit(get("a")?, field, cfg)?,
            b: json_unit(get("b")?, field, cfg)?,
            c: c.iter().map(|v| json_unit(v, field, cfg)).collect::<Result<_>>()?,
        });
    }
    Ok((field, out))
}

/// κ chain with its certificates, as JSON.
pub fn kappa_json(cfg: &RunConfig, n: usize, terms: &[KappaTerm]) -> Result<(Value, bool)> {
    let chain = kappa_chain(n, terms, &cfg.caps)?;
    let is_cycle = bar_boundary(&chain)?.is_zero();
    let block = kappa_block_check(n, &chain);
    let den = chain.denominator();
    let fact: BigInt = (1..=n - 2).map(BigInt::from).product();
    let den_ok = (&fact % &den).is_zero();
    let scaled = chain.scale(&BigRational::from_integer(BigInt::from(n - 1)));
    let j = json!({
        "n": n,
        "terms": terms.iter().map(KappaTerm::to_json).collect::<Vec<_>>(),
        "chain": chain.to_json(),
        "certificates": {
            "is_cycle": is_cycle,
            "block_form": block,
            "denominator": den.to_string(),
            "denominator_divides_factorial": den_ok,
            "integral": chain.is_integral(),
        },
        "reported_not_asserted": {
            "exterior_class_of_(n-1)_kappa": exterior_class(&scaled).to_json(),
            "note": "the image of kappa is expected to be (n-1)-torsion in homology; chain-level data cannot decide this",
        },
    });
    Ok((j, is_cycle && block && den_ok))
}

fn cmd_kappa(cfg: &RunConfig, n: usize, input: &Path) -> Result<Outcome> {
    let (_, terms) = read_terms(input, cfg)?;
    let (j, ok) = kappa_json(cfg, n, &terms)?;
    let text = format!(
        "kappa_{n}: {} bar terms, cycle: {}, block form: {}, denominator {}\n",
        j["chain"]["terms"].as_array().map(Vec::len).unwrap_or(0),
        j["certificates"]["is_cycle"],
        j["certificates"]["block_form"],
        j["certificates"]["denominator"].as_str().unwrap_or("?"),
    );
    Ok(Outcome::with_code(render(cfg, &j, text), if ok { 0 } else { EXIT_INVARIANT }))
}

/// `Σ k · a ⊗ b ⊗ {c...}` as an element of `P_2`.
pub fn p2_element(complex: &TruncatedBnComplex, terms: &[KappaTerm], cfg: &RunConfig) -> Result<SparseVec> {
    let n = complex.spec().n;
    let k = complex.k_group(n - 2);
    let mut x = SparseVec::new();
    for t in terms {
        if t.c.len() != n - 2 {
            return Err(Error::invalid(format!("symbol part needs {} entries", n - 2)));
        }
        let sym = MilnorSymbol::new(complex.spec().field(), t.c.clone())?;
        let kx = k.element_of(&MilnorExpression::symbol(sym), &cfg.caps)?;
        axpy(&mut x, &t.coefficient, &complex.tensor_element(&[t.a.clone(), t.b.clone()], &kx)?);
    }
    Ok(complex.position(2)?.reduce(&x))
}

fn cmd_chiprime(cfg: &RunConfig, n: usize, support: &str, input: Option<&Path>) -> Result<Outcome> {
    let spec = bn_spec(cfg, support, n)?;
    if n < 3 {
        return Err(Error::invalid("chiprime needs n >= 3"));
    }
    let p = provider(cfg)?;
    let complex = TruncatedBnComplex::build_range(&spec, 1, 3, p.as_ref())?;
    let elements: Vec<SparseVec> = match input {
        Some(path) => {
            let (field, terms) = read_terms(path, cfg)?;
            if field != spec.field() {
                return Err(Error::invalid("input terms are over a different field"));
            }
            vec![p2_element(&complex, &terms, cfg)?]
        }
        None => complex.homology_at(2)?.cycle_basis().columns().cloned().collect(),
    };
    let mut results = Vec::new();
    for x in &elements {
        results.push(chi_prime_data(&complex, x)?.to_json());
    }
    let all = results.iter().all(|r| r["t2_vanishes"] == json!(true));
    let j = json!({"spec": spec.to_json(), "elements": results, "all_certified": all});
    let text = format!("chi'_{n} over S = {support}: {} elements, all certified: {all}\n", elements.len());
    Ok(Outcome::with_code(render(cfg, &j, text), if all { 0 } else { EXIT_INVARIANT }))
}

/// Cases recorded when none are given.
pub const DEFAULT_GOLDEN_CASES: &[&str] = &["q:-1,2:3", "q:-1,2,3:3", "q:-1,2,3:4", "p=3:t,t+1:3"];

fn parse_case(case: &str) -> Result<(String, String, usize)> {
    let parts: Vec<&str> = case.split(':').collect();
    let [field, support, n] = parts[..] else {
        return Err(Error::invalid(format!("case {case:?} is not FIELD:SUPPORT:N")));
    };
    let n = n.parse().map_err(|_| Error::invalid(format!("bad n in case {case:?}")))?;
    Ok((field.to_string(), support.to_string(), n))
}

fn golden_value(cfg: &RunConfig, provider: &dyn KGroupProvider, field: &str, support: &str, n: usize) -> Result<Value> {
    let f = parse_field(field, &cfg.caps)?;
    let local = RunConfig { field: f, ..cfg.clone() };
    bn_json(&local, provider, support, n, false)
}

fn cmd_golden(cfg: &RunConfig, action: GoldenAction, file: &Path, cases: &[String]) -> Result<Outcome> {
    let p = provider(cfg)?;
    match action {
        GoldenAction::Record => {
            let mut store = GoldenStore::load_or_new(file)?;
            let cases: Vec<String> =
                if cases.is_empty() { DEFAULT_GOLDEN_CASES.iter().map(|s| s.to_string()).collect() } else { cases.to_vec() };
            for case in &cases {
                let (field, support, n) = parse_case(case)?;
                let v = golden_value(cfg, p.as_ref(), &field, &support, n)?;
                store.record("bn", &field, &support, n, v);
            }
            store.save(file)?;
            let j = json!({"recorded": cases, "file": file.display().to_string(), "convention": CONVENTION_VERSION});
            Ok(Outcome::ok(render(cfg, &j, format!("recorded {} cases in {}\n", cases.len(), file.display()))))
        }
        GoldenAction::Check => {
            let store = GoldenStore::load(file)?;
            let mut rows = Vec::new();
            let mut mismatches = 0;
            for e in &store.entries {
                let status = if e.convention != CONVENTION_VERSION {
                    GoldenStatus::Invalidated
                } else {
                    GoldenStore::status(e, &golden_value(cfg, p.as_ref(), &e.field, &e.support, e.n)?)
                };
                if status == GoldenStatus::Mismatch {
                    mismatches += 1;
                }
                rows.push(json!({"command": e.command, "field": e.field, "support": e.support, "n": e.n, "status": status}));
            }
            let text = rows
                .iter()
                .map(|r| format!("{} {}:{}:{} {}\n", r["command"].as_str().unwrap(), r["field"].as_str().unwrap(), r["support"].as_str().unwrap(), r["n"], r["status"].as_str().unwrap()))
                .collect();
            let j = json!({"entries": rows, "mismatches": mismatches});
            Ok(Outcome::with_code(render(cfg, &j, text), if mismatches == 0 { 0 } else { EXIT_INVARIANT }))
        }
    }
}
