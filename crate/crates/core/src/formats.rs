//! File formats: JSON for complexes, ideals, networks, densities and moment
//! tables, CSV for point clouds.
//!
//! Rational values are accepted as strings (`"3/2"`, `"-0.25"`, `"1e-3"`) or
//! JSON numbers and are always read exactly from their decimal text.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diffcum::{Density, Gaussian, Mec, Product, Univariate};
use crate::ideal::SquareFreeIdeal;
use crate::logdensity::{GaussianSpec, MECSpec};
use crate::network::{Edge, Network};
use crate::partitions::{MomentTable, MultiIndex};
use crate::simplicial::{SimplicialComplex, VertexSet};
use crate::{Error, Result};

fn invalid(what: &str, err: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{what}: {err}"))
}

fn ground_of(p: usize, vertices: &Option<Vec<usize>>) -> Result<VertexSet> {
    match vertices {
        Some(v) => VertexSet::from_vertices(p, v),
        None => {
            crate::simplicial::check_dimension(p)?;
            Ok(VertexSet::full(p))
        }
    }
}

fn vertices_field(p: usize, ground: VertexSet) -> Option<Vec<usize>> {
    (ground != VertexSet::full(p)).then(|| ground.vertices())
}

/// `{"p": 5, "vertices": [..]?, "facets": [[1,2,3], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<usize>>,
    pub facets: Vec<Vec<usize>>,
}

impl ComplexJson {
    pub fn from_complex(complex: &SimplicialComplex) -> Self {
        ComplexJson {
            p: complex.p(),
            vertices: vertices_field(complex.p(), complex.ground()),
            facets: complex.facets().iter().map(|f| f.vertices()).collect(),
        }
    }

    pub fn to_complex(&self) -> Result<SimplicialComplex> {
        let ground = ground_of(self.p, &self.vertices)?;
        let faces = self.facets.iter().map(|f| VertexSet::from_vertices(self.p, f)).collect::<Result<Vec<_>>>()?;
        SimplicialComplex::with_ground(self.p, ground, faces)
    }
}

/// `{"p": 5, "vertices": [..]?, "generators": [[1,4], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealJson {
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<usize>>,
    pub generators: Vec<Vec<usize>>,
}

impl IdealJson {
    pub fn from_ideal(ideal: &SquareFreeIdeal) -> Self {
        IdealJson {
            p: ideal.p(),
            vertices: vertices_field(ideal.p(), ideal.ground()),
            generators: ideal.generators().iter().map(|g| g.vertices()).collect(),
        }
    }

    pub fn to_ideal(&self) -> Result<SquareFreeIdeal> {
        let ground = ground_of(self.p, &self.vertices)?;
        let gens = self.generators.iter().map(|g| VertexSet::from_vertices(self.p, g)).collect::<Result<Vec<_>>>()?;
        SquareFreeIdeal::with_ground(self.p, ground, gens)
    }
}

/// `{"nodes": [..], "edges": [{"id":1,"u":1,"v":2}, ..], "input": 1, "output": 4}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkJson {
    pub nodes: Vec<usize>,
    pub edges: Vec<Edge>,
    pub input: usize,
    pub output: usize,
}

impl NetworkJson {
    pub fn from_network(net: &Network) -> Self {
        NetworkJson {
            nodes: net.nodes().to_vec(),
            edges: net.edges().to_vec(),
            input: net.input(),
            output: net.output(),
        }
    }

    pub fn to_network(&self) -> Result<Network> {
        Network::new(self.nodes.clone(), self.edges.clone(), self.input, self.output)
    }
}

/// Reads an exact rational from decimal text: `7`, `-3/2`, `0.125`, `1e-3`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = if shift >= 0 {
        num_traits::pow(ten, shift as usize)
    } else {
        BigRational::one() / num_traits::pow(ten, shift.unsigned_abs() as usize)
    };
    let value = BigRational::from_integer(all) * scale;
    Ok(if negative { -value } else { value })
}

fn rational_value(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::InvalidInput(format!("expected a rational, found {other}"))),
    }
}

/// Parses a binary-key coefficient table `{"p": 2, "coeffs": {"11": "5", ..}}`.
pub fn parse_mec(value: &Value) -> Result<MECSpec> {
    let p = value
        .get("p")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidInput("MEC spec needs an integer \"p\"".into()))? as usize;
    let coeffs = value
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidInput("MEC spec needs a \"coeffs\" object".into()))?;
    let mut entries = Vec::new();
    for (key, a) in coeffs {
        let digits: Vec<u32> = key
            .chars()
            .map(|c| c.to_digit(10).ok_or_else(|| Error::NonBinaryIndex(key.clone())))
            .collect::<Result<_>>()?;
        if digits.len() != p {
            return Err(Error::DimensionMismatch { expected: p, found: digits.len() });
        }
        entries.push((MultiIndex::new(digits)?, rational_value(a)?));
    }
    MECSpec::new(p, entries)
}

/// Inverse of [`parse_mec`]; coefficients are written as exact strings.
pub fn mec_to_json(spec: &MECSpec) -> Value {
    let coeffs: serde_json::Map<String, Value> = spec
        .coefficients()
        .map(|(s, a)| {
            let key: String = s.entries().iter().map(|e| e.to_string()).collect();
            (key, Value::String(a.to_string()))
        })
        .collect();
    serde_json::json!({ "p": spec.dim(), "coeffs": coeffs })
}

/// Parses `{"1,0": "3/2", "0,1": 0.5, ..}` into an exact moment table.
pub fn parse_moments(value: &Value) -> Result<MomentTable<BigRational>> {
    let obj = value.as_object().ok_or_else(|| Error::InvalidInput("moments must be a JSON object".into()))?;
    let mut table: Option<MomentTable<BigRational>> = None;
    for (key, m) in obj {
        let k: MultiIndex = key.parse()?;
        let t = table.get_or_insert_with(|| MomentTable::new(k.dim()));
        t.insert(k, rational_value(m)?)?;
    }
    table.ok_or_else(|| Error::InvalidInput("moment table is empty".into()))
}

/// Inverse of [`parse_moments`].
pub fn moments_to_json(table: &MomentTable<BigRational>) -> Value {
    let map: serde_json::Map<String, Value> =
        table.iter().map(|(k, m)| (k.to_string(), Value::String(m.to_string()))).collect();
    Value::Object(map)
}

/// One factor of a product density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum FactorJson {
    Normal { mean: f64, sd: f64 },
    Logistic { location: f64, scale: f64 },
}

/// A density file: a Gaussian `{"mean", "precision"}`, a multilinear
/// exponential `{"p", "coeffs", "box"?}` normalised on `box` (default
/// `[0, 1]`), or a product `{"factors": [{"normal": {..}}, ..]}`.
pub fn parse_density(value: &Value) -> Result<Box<dyn Density>> {
    let obj = value.as_object().ok_or_else(|| Error::InvalidInput("density must be a JSON object".into()))?;
    if obj.contains_key("precision") {
        let spec: GaussianSpec = serde_json::from_value(value.clone()).map_err(|e| invalid("Gaussian density", e))?;
        Ok(Box::new(Gaussian::from_spec(&spec)?))
    } else if obj.contains_key("coeffs") {
        let spec = parse_mec(value)?;
        let (lo, hi) = match obj.get("box") {
            None => (0.0, 1.0),
            Some(b) => {
                let pair: [f64; 2] = serde_json::from_value(b.clone()).map_err(|e| invalid("box", e))?;
                (pair[0], pair[1])
            }
        };
        Ok(Box::new(Mec::new(&spec, lo, hi)?))
    } else if let Some(factors) = obj.get("factors") {
        let factors: Vec<FactorJson> =
            serde_json::from_value(factors.clone()).map_err(|e| invalid("product density", e))?;
        let factors = factors
            .into_iter()
            .map(|f| match f {
                FactorJson::Normal { mean, sd } => Univariate::Normal { mean, sd },
                FactorJson::Logistic { location, scale } => Univariate::Logistic { location, scale },
            })
            .collect();
        Ok(Box::new(Product::new(factors)?))
    } else {
        Err(Error::InvalidInput("unrecognised density: expected \"precision\", \"coeffs\" or \"factors\"".into()))
    }
}

/// Reads one point per row; blank lines and lines starting with `#` are
/// skipped.
pub fn parse_points_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| invalid("points CSV", e))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let point = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("row {}: not a number: {field:?}", row + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(point);
    }
    Ok(points)
}

/// Comma-separated reals, e.g. `0,0.5,-1`.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("not a number: {:?}", s.trim()))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), q(250, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn complex_round_trip() {
        let json = r#"{"p":5,"facets":[[1,2,3],[2,3,4],[3,4,5]]}"#;
        let parsed: ComplexJson = serde_json::from_str(json).unwrap();
        let complex = parsed.to_complex().unwrap();
        assert_eq!(serde_json::to_string(&ComplexJson::from_complex(&complex)).unwrap(), json);
        let partial: ComplexJson = serde_json::from_str(r#"{"p":3,"vertices":[1,3],"facets":[[1],[3]]}"#).unwrap();
        let c = partial.to_complex().unwrap();
        assert_eq!(ComplexJson::from_complex(&c), partial);
    }

    #[test]
    fn mec_and_moments() {
        let v: Value = serde_json::from_str(r#"{"p":2,"coeffs":{"11":"5","10":2,"01":"3"}}"#).unwrap();
        let spec = parse_mec(&v).unwrap();
        assert_eq!(parse_mec(&mec_to_json(&spec)).unwrap(), spec);
        let bad: Value = serde_json::from_str(r#"{"p":2,"coeffs":{"21":"5"}}"#).unwrap();
        assert!(matches!(parse_mec(&bad), Err(Error::NonBinaryIndex(_))));

        let m: Value = serde_json::from_str(r#"{"1,0":"3/2","0,1":0.5}"#).unwrap();
        let table = parse_moments(&m).unwrap();
        assert_eq!(table.get(&"0,1".parse().unwrap()), Some(&q(1, 2)));
        assert_eq!(parse_moments(&moments_to_json(&table)).unwrap(), table);
    }

    #[test]
    fn densities() {
        let g: Value = serde_json::from_str(r#"{"mean":[0,0],"precision":[[1,0],[0,1]]}"#).unwrap();
        assert_eq!(parse_density(&g).unwrap().dim(), 2);
        let p: Value =
            serde_json::from_str(r#"{"factors":[{"normal":{"mean":0,"sd":1}},{"logistic":{"location":0,"scale":2}}]}"#)
                .unwrap();
        assert_eq!(parse_density(&p).unwrap().dim(), 2);
        let m: Value = serde_json::from_str(r#"{"p":2,"coeffs":{"11":"-1"},"box":[0,3]}"#).unwrap();
        assert_eq!(parse_density(&m).unwrap().dim(), 2);
        assert!(parse_density(&serde_json::json!({"x": 1})).is_err());
    }

    #[test]
    fn points() {
        let pts = parse_points_csv("# header\n0, 0\n1,0\n\n0.5 ,2\n").unwrap();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 2.0]]);
        assert!(parse_points_csv("1,a\n").is_err());
    }
}
