use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

use hmi::diffcum::{
    differential_cumulant, differential_moment, limit_probe as probe, local_cumulant, local_moment as moment, Density,
    EstimateReport, FiniteDifference, Integrator, Method,
};
use hmi::formats::{
    mec_to_json, parse_density, parse_mec, parse_moments, parse_points_csv, ComplexJson, IdealJson, NetworkJson,
};
use hmi::hierarchy::{ci_ideal, ci_to_generators, decomposability, strip_sequence, CIStatement};
use hmi::ideal::{ferrer_cliques, has_2linear_resolution, recognize_ferrer, stanley_reisner, SquareFreeIdeal};
use hmi::logdensity::{
    artinian_degree_check, is_hierarchical, mec_polynomial, mec_support_complex, total_degree_cumulant_check,
    GaussianSpec, HierarchyCheck, SparsePolynomial,
};
use hmi::nerve::{filtration, nerve_complex, PointCloud};
use hmi::network::{cut_ideal, path_ideal, verify_cut_path_duality, Network};
use hmi::partitions::{
    chain_rule_terms, collapse_number, cumulant_from_moments as cumulant, enumerate_partitions, MultiIndex, Partition,
};
use hmi::simplicial::{SimplicialComplex, VertexSet};

use crate::{FdArgs, IntegratorArgs, PointArgs, UsageError};

/// What a subcommand prints. `failure` marks a completed check that did not
/// pass: the report is still printed, but the exit code is 1.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub failure: Option<String>,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        let mut text = text.into();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        Output { text, json, failure: None }
    }
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialise")
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    serde_json::from_str(&read(path)?).with_context(|| format!("{} is not valid JSON", path.display()))
}

fn read_complex(path: &Path) -> anyhow::Result<SimplicialComplex> {
    let parsed: ComplexJson =
        serde_json::from_value(read_json(path)?).with_context(|| format!("{}: not a complex", path.display()))?;
    Ok(parsed.to_complex()?)
}

fn read_ideal(path: &Path) -> anyhow::Result<SquareFreeIdeal> {
    let parsed: IdealJson =
        serde_json::from_value(read_json(path)?).with_context(|| format!("{}: not an ideal", path.display()))?;
    Ok(parsed.to_ideal()?)
}

fn read_network(path: &Path) -> anyhow::Result<Network> {
    let parsed: NetworkJson =
        serde_json::from_value(read_json(path)?).with_context(|| format!("{}: not a network", path.display()))?;
    Ok(parsed.to_network()?)
}

fn read_density(path: &Path) -> anyhow::Result<Box<dyn Density>> {
    Ok(parse_density(&read_json(path)?)?)
}

fn sets_json(sets: &[VertexSet]) -> Value {
    sets.iter().map(|s| s.vertices()).collect::<Vec<_>>().into()
}

fn joined(sets: &[VertexSet]) -> String {
    sets.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn complex_output(complex: &SimplicialComplex) -> Output {
    Output::new(complex.to_string(), to_value(&ComplexJson::from_complex(complex)))
}

fn ideal_output(ideal: &SquareFreeIdeal) -> Output {
    Output::new(ideal.to_string(), to_value(&IdealJson::from_ideal(ideal)))
}

pub fn sr(path: &Path) -> anyhow::Result<Output> {
    Ok(ideal_output(&stanley_reisner(&read_complex(path)?)))
}

pub fn complex_of(path: &Path) -> anyhow::Result<Output> {
    Ok(complex_output(&hmi::ideal::complex_of(&read_ideal(path)?)))
}

pub fn dual(path: &Path) -> anyhow::Result<Output> {
    Ok(complex_output(&read_complex(path)?.alexander_dual()))
}

pub fn decompose(path: &Path) -> anyhow::Result<Output> {
    let complex = read_complex(path)?;
    Ok(match decomposability(&complex) {
        Ok(()) => Output::new("decomposable", json!({ "decomposable": true })),
        Err(w) => {
            Output::new(format!("not decomposable: {w}"), json!({ "decomposable": false, "witness": w.to_string() }))
        }
    })
}

pub fn factorize(path: &Path) -> anyhow::Result<Output> {
    let fact = hmi::hierarchy::factorize(&read_complex(path)?)?;
    Ok(Output::new(
        fact.to_string(),
        json!({
            "cliques": sets_json(&fact.cliques),
            "separators": sets_json(&fact.separators),
            "factorization": fact.to_string(),
        }),
    ))
}

pub fn marginalize(path: &Path, strip: &[usize], remove: &[usize]) -> anyhow::Result<Output> {
    let complex = read_complex(path)?;
    let p = complex.p();
    let steps: Vec<VertexSet> = if strip.is_empty() {
        vec![VertexSet::from_vertices(p, remove)?]
    } else {
        strip.iter().map(|&v| VertexSet::from_vertices(p, &[v])).collect::<Result<_, _>>()?
    };
    let results = strip_sequence(&complex, &steps)?;
    let mut text = String::new();
    let mut json_steps = Vec::new();
    for (removed, result) in steps.iter().zip(&results) {
        let ideal = stanley_reisner(result);
        writeln!(text, "-{{{removed}}}: {result}  ideal: {ideal}")?;
        json_steps.push(json!({
            "removed": removed.vertices(),
            "complex": to_value(&ComplexJson::from_complex(result)),
            "ideal": to_value(&IdealJson::from_ideal(&ideal)),
        }));
    }
    Ok(Output::new(text, json!({ "steps": json_steps })))
}

pub fn linear_resolution(path: &Path) -> anyhow::Result<Output> {
    let ideal = read_ideal(path)?;
    let quadratic = ideal.is_generated_in_degree(2);
    let chordal = ideal.non_generator_graph().is_chordal();
    let linear = has_2linear_resolution(&ideal);
    let text = format!(
        "generated in degree 2: {}\ncomplement graph chordal: {}\n2-linear resolution: {}",
        yes_no(quadratic),
        yes_no(chordal),
        yes_no(linear)
    );
    Ok(Output::new(text, json!({ "quadratic": quadratic, "complement_chordal": chordal, "linear_resolution": linear })))
}

pub fn ferrer(path: &Path) -> anyhow::Result<Output> {
    let ideal = read_ideal(path)?;
    let Some(shape) = recognize_ferrer(&ideal) else {
        return Ok(Output::new("not a Ferrer ideal", json!({ "ferrer": false })));
    };
    let cl = ferrer_cliques(&shape)?;
    let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let text = format!(
        "lambda: {}\nrows: {}\ncolumns: {}\ncliques: {}\nseparators: {}",
        list(&shape.lambda),
        list(&shape.rows),
        list(&shape.columns),
        joined(&cl.cliques),
        joined(&cl.separators)
    );
    Ok(Output::new(
        text,
        json!({
            "ferrer": true,
            "lambda": shape.lambda,
            "rows": shape.rows,
            "columns": shape.columns,
            "cliques": sets_json(&cl.cliques),
            "separators": sets_json(&cl.separators),
        }),
    ))
}

fn set_lines(sets: &[VertexSet]) -> String {
    sets.iter().map(|s| format!("{s}\n")).collect()
}

pub fn network_cuts(path: &Path) -> anyhow::Result<Output> {
    let cuts = read_network(path)?.minimal_cuts()?;
    Ok(Output::new(set_lines(&cuts), json!({ "cuts": sets_json(&cuts) })))
}

pub fn network_paths(path: &Path) -> anyhow::Result<Output> {
    let paths = read_network(path)?.minimal_paths()?;
    Ok(Output::new(set_lines(&paths), json!({ "paths": sets_json(&paths) })))
}

pub fn network_ideals(path: &Path) -> anyhow::Result<Output> {
    let net = read_network(path)?;
    let (cuts, paths) = (cut_ideal(&net)?, path_ideal(&net)?);
    Ok(Output::new(
        format!("cut ideal: {cuts}\npath ideal: {paths}"),
        json!({
            "cut_ideal": to_value(&IdealJson::from_ideal(&cuts)),
            "path_ideal": to_value(&IdealJson::from_ideal(&paths)),
        }),
    ))
}

pub fn network_duality(path: &Path) -> anyhow::Result<Output> {
    let r = verify_cut_path_duality(&read_network(path)?)?;
    let pass = |b: bool| if b { "pass" } else { "FAIL" };
    let text = format!(
        "cut complex: {}\npath complex: {}\nfacets are path complements: {}\ndual of cut complex is path complex: {}\n\
         dual is an involution: {}\ndual of path complex is cut complex: {}",
        r.cut_complex,
        r.path_complex,
        pass(r.facets_are_path_complements),
        pass(r.dual_of_cuts_is_paths),
        pass(r.involution),
        pass(r.dual_of_paths_is_cuts)
    );
    let mut out = Output::new(
        text,
        json!({
            "cut_complex": to_value(&ComplexJson::from_complex(&r.cut_complex)),
            "path_complex": to_value(&ComplexJson::from_complex(&r.path_complex)),
            "facets_are_path_complements": r.facets_are_path_complements,
            "dual_of_cuts_is_paths": r.dual_of_cuts_is_paths,
            "involution": r.involution,
            "dual_of_paths_is_cuts": r.dual_of_paths_is_cuts,
            "all_pass": r.all_pass(),
        }),
    );
    if !r.all_pass() {
        out.failure = Some("cut/path duality check failed".into());
    }
    Ok(out)
}

pub fn nerve(path: &Path, radius: Option<&str>, radii: &[f64], max_dim: Option<usize>) -> anyhow::Result<Output> {
    let cloud = PointCloud::new(parse_points_csv(&read(path)?)?)?;
    if let Some(text) = radius {
        if text.contains(',') {
            return Err(UsageError("--radius takes one radius; per-point radii are not supported".into()).into());
        }
        let r: f64 = text.trim().parse().map_err(|_| UsageError(format!("--radius: not a number: {text:?}")))?;
        let complex = nerve_complex(&cloud, r, max_dim)?;
        let decomposable = hmi::hierarchy::is_decomposable(&complex);
        return Ok(Output::new(
            format!("{complex}\ndecomposable: {}", yes_no(decomposable)),
            json!({
                "radius": r,
                "complex": to_value(&ComplexJson::from_complex(&complex)),
                "decomposable": decomposable,
            }),
        ));
    }
    let steps = filtration(&cloud, radii, max_dim)?;
    let mut text = String::new();
    let mut json_steps = Vec::new();
    for s in &steps {
        writeln!(text, "r={} {} decomposable: {}", s.radius, s.complex, yes_no(s.decomposable))?;
        json_steps.push(json!({
            "radius": s.radius,
            "complex": to_value(&ComplexJson::from_complex(&s.complex)),
            "decomposable": s.decomposable,
        }));
    }
    Ok(Output::new(text, json!({ "steps": json_steps })))
}

fn blocks_json(pi: &Partition) -> Value {
    pi.blocks().iter().map(|b| b.to_string()).collect::<Vec<_>>().into()
}

pub fn partitions(k: &MultiIndex) -> anyhow::Result<Output> {
    let parts = enumerate_partitions(k)?;
    let mut text = String::new();
    let mut list = Vec::new();
    for pi in &parts {
        let c = collapse_number(pi);
        writeln!(text, "{pi} c={c}")?;
        list.push(json!({ "blocks": blocks_json(pi), "collapse": c.to_string() }));
    }
    Ok(Output::new(text, json!({ "k": k.to_string(), "partitions": list })))
}

pub fn collapse(blocks: Vec<MultiIndex>) -> anyhow::Result<Output> {
    let pi = Partition::new(blocks)?;
    let c = collapse_number(&pi);
    Ok(Output::new(format!("{pi} c={c}"), json!({ "blocks": blocks_json(&pi), "collapse": c.to_string() })))
}

pub fn cumulant_from_moments(path: &Path, k: &MultiIndex) -> anyhow::Result<Output> {
    let table = parse_moments(&read_json(path)?)?;
    let value = cumulant(k, &table)?;
    Ok(Output::new(value.to_string(), json!({ "k": k.to_string(), "cumulant": value.to_string() })))
}

pub fn chain_rule(k: &MultiIndex) -> anyhow::Result<Output> {
    let terms = chain_rule_terms(k)?;
    let text: String = terms.iter().map(|t| format!("{t}\n")).collect();
    let list: Vec<Value> = terms
        .iter()
        .map(|t| {
            json!({
                "coefficient": t.coefficient.to_string(),
                "outer_order": t.outer_order,
                "inner": t.inner.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(Output::new(text, json!({ "k": k.to_string(), "terms": list })))
}

fn poly_json(g: &SparsePolynomial) -> Value {
    json!({ "p": g.dim(), "poly": g.to_string() })
}

pub fn parse_poly(text: &str, p: usize) -> anyhow::Result<Output> {
    let g = hmi::logdensity::parse_poly(text, p)?;
    Ok(Output::new(g.to_string(), poly_json(&g)))
}

pub fn check_model(text: &str, path: &Path) -> anyhow::Result<Output> {
    let complex = read_complex(path)?;
    let g = hmi::logdensity::parse_poly(text, complex.p())?;
    Ok(match is_hierarchical(&g, &complex)? {
        HierarchyCheck::Hierarchical => Output::new("hierarchical", json!({ "hierarchical": true })),
        HierarchyCheck::Violation { term, nonface } => {
            let monomial = SparsePolynomial::monomial(term.clone(), hmi::formats::parse_rational("1")?);
            Output::new(
                format!("not hierarchical: term {monomial} contains the non-face {{{nonface}}}"),
                json!({ "hierarchical": false, "term": term.to_string(), "nonface": nonface.vertices() }),
            )
        }
    })
}

pub fn artinian(text: &str, p: usize, n: Option<&MultiIndex>, degree: Option<u32>) -> anyhow::Result<Output> {
    let g = hmi::logdensity::parse_poly(text, p)?;
    let mut lines = String::new();
    let mut report = serde_json::Map::new();
    report.insert("poly".into(), g.to_string().into());
    if let Some(n) = n {
        let ok = artinian_degree_check(&g, n)?;
        writeln!(lines, "cumulants vanish beyond n = {n}: {}", yes_no(ok))?;
        report.insert("n".into(), n.to_string().into());
        report.insert("artinian".into(), ok.into());
    }
    if let Some(d) = degree {
        let ok = total_degree_cumulant_check(&g, d)?;
        writeln!(lines, "cumulants of order {d} vanish: {}", yes_no(ok))?;
        report.insert("degree".into(), d.into());
        report.insert("total_degree".into(), ok.into());
    }
    Ok(Output::new(lines, Value::Object(report)))
}

pub fn gaussian_ideal(path: &Path, tol: f64) -> anyhow::Result<Output> {
    let spec: GaussianSpec =
        serde_json::from_value(read_json(path)?).with_context(|| format!("{}: not a Gaussian", path.display()))?;
    Ok(ideal_output(&hmi::logdensity::gaussian_ideal(&spec, tol)?))
}

pub fn mec(path: &Path) -> anyhow::Result<Output> {
    let spec = parse_mec(&read_json(path)?)?;
    let g = mec_polynomial(&spec);
    let complex = mec_support_complex(&spec);
    let ideal = stanley_reisner(&complex);
    Ok(Output::new(
        format!("g = {g}\nsupport complex: {complex}\nideal: {ideal}"),
        json!({
            "spec": mec_to_json(&spec),
            "poly": g.to_string(),
            "complex": to_value(&ComplexJson::from_complex(&complex)),
            "ideal": to_value(&IdealJson::from_ideal(&ideal)),
        }),
    ))
}

fn seed() -> anyhow::Result<u64> {
    match std::env::var("HMI_SEED") {
        Err(_) => Ok(0),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("HMI_SEED must be a non-negative integer, got {s:?}")).into()),
    }
}

fn integrator(args: &IntegratorArgs) -> anyhow::Result<Integrator> {
    Ok(match args.samples {
        Some(samples) => Integrator::MonteCarlo { samples, seed: seed()? },
        None => Integrator::Tensor { nodes: args.nodes },
    })
}

fn fd(args: &FdArgs) -> FiniteDifference {
    FiniteDifference { step_scale: args.step_scale, richardson: !args.no_richardson }
}

/// `key: value` per field, in the JSON key order.
fn fields_text(value: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = value {
        for (key, v) in map {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{key}: {shown}");
        }
    }
    out
}

fn report_output(report: &EstimateReport) -> Output {
    let json = to_value(report);
    Output::new(fields_text(&json), json)
}

pub fn local_moment(point: &PointArgs, eps: f64, cumulant: bool, args: &IntegratorArgs) -> anyhow::Result<Output> {
    let f = read_density(&point.density)?;
    let window = hmi::diffcum::CubeWindow::new(point.xi.clone(), eps)?;
    let integ = integrator(args)?;
    let report = if cumulant {
        local_cumulant(f.as_ref(), &window, &point.k, integ)?
    } else {
        moment(f.as_ref(), &window, &point.k, integ)?
    };
    Ok(report_output(&report))
}

pub fn diff_moment(point: &PointArgs, args: &FdArgs) -> anyhow::Result<Output> {
    let f = read_density(&point.density)?;
    Ok(report_output(&differential_moment(f.as_ref(), &point.xi, &point.k, &fd(args))?))
}

pub fn diff_cumulant(point: &PointArgs, method: Method, args: &FdArgs) -> anyhow::Result<Output> {
    let f = read_density(&point.density)?;
    Ok(report_output(&differential_cumulant(f.as_ref(), &point.xi, &point.k, method, &fd(args))?))
}

pub fn limit_probe(
    point: &PointArgs,
    eps_seq: &[f64],
    args: &IntegratorArgs,
    fd_args: &FdArgs,
) -> anyhow::Result<Output> {
    let f = read_density(&point.density)?;
    let report = probe(f.as_ref(), &point.xi, &point.k, eps_seq, integrator(args)?, &fd(fd_args))?;
    let mut text = format!("k: {}\ntarget: {}\nlog-derivative: {}\n", report.k, report.target, report.log_derivative);
    for level in &report.levels {
        writeln!(
            text,
            "eps={} local={} r={} scaled={} error={}",
            level.eps, level.local_cumulant, level.r, level.scaled, level.error
        )?;
    }
    text.push_str(&report.verdict);
    Ok(Output::new(text, to_value(&report)))
}

pub fn ci_generators(p: usize, i: &[usize], j: &[usize], k: Option<&[usize]>) -> anyhow::Result<Output> {
    let i = VertexSet::from_vertices(p, i)?;
    let j = VertexSet::from_vertices(p, j)?;
    let statement = match k {
        Some(k) => CIStatement::new(p, i, j, VertexSet::from_vertices(p, k)?)?,
        None => CIStatement::given_rest(p, i, j)?,
    };
    let gens: Vec<String> = ci_to_generators(&statement).iter().map(|g| g.to_string()).collect();
    let ideal = ci_ideal(&statement);
    let mut text: String = gens.iter().map(|g| format!("{g}\n")).collect();
    write!(text, "ideal: {ideal}")?;
    Ok(Output::new(
        text,
        json!({
            "statement": statement.to_string(),
            "generators": gens,
            "ideal": to_value(&IdealJson::from_ideal(&ideal)),
        }),
    ))
}
