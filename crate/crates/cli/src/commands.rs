//! Command implementations. Each returns an [`Outcome`] whose `result` is a
//! JSON value built from library types with their own serde encodings, so
//! every number printed is exactly what the library serializes.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use torcode::betasym::SymWord;
use torcode::binforms::{self, associated_form, BinForm};
use torcode::coding::{self, CodingSpec, MacMember, TorusPoint};
use torcode::error::Error;
use torcode::glz::{self, KernelGroup, RatPoint};
use torcode::json_int;
use torcode::mat::UniMat;
use torcode::qfield::QfError;

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "torcode/1";

/// Largest decode window accepted.
pub const MAX_WINDOW: u32 = 4096;

/// Largest span of BAC exponents listed in one call.
pub const MAX_K_SPAN: i64 = 2000;

/// Largest box half-width for brute-force oracles.
pub const MAX_BOUND: i64 = 2000;

/// Result of one command before formatting.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub input: Value,
    pub warnings: Vec<String>,
    pub result: Value,
}

impl Outcome {
    /// The versioned JSON document.
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "input": self.input,
            "warnings": self.warnings,
            "result": self.result,
        })
    }
}

/// A failure with its process exit code: 1 for invalid input, 2 when a
/// resource bound is exceeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn bound(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::BoundExceeded { .. }
            | Error::UnsupportedRange { .. }
            | Error::Field(QfError::BoundExceeded { .. }) => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type Res<T> = Result<T, CliError>;

/// A big integer in the library's JSON encoding.
pub fn int(v: &BigInt) -> Value {
    json_int::serialize(v, serde_json::value::Serializer).expect("integers always serialize")
}

/// Any library value in its own JSON encoding.
pub fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types always serialize")
}

pub fn parse_matrix(s: &str) -> Res<UniMat> {
    s.parse()
        .map_err(|e: torcode::mat::MatError| CliError::invalid(e.to_string()))
}

pub fn parse_param(s: &str) -> Res<(BigInt, BigInt)> {
    let bad = || CliError::invalid(format!("expected a parameter pair \"p,q\", got {s:?}"));
    let (p, q) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        p.trim().parse().map_err(|_| bad())?,
        q.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn parse_form(s: &str) -> Res<BinForm> {
    s.parse()
        .map_err(|e: Error| CliError::invalid(e.to_string()))
}

/// A hyperbolic input with positive trace, plus the warnings raised while
/// getting there.
struct Prepared {
    m: UniMat,
    negated: bool,
    warnings: Vec<String>,
}

fn prepare(input: &UniMat) -> Res<Prepared> {
    let info = glz::is_hyperbolic(input);
    if !info.hyperbolic {
        return Err(CliError::invalid(format!(
            "matrix {input} is not hyperbolic (trace {}, determinant {})",
            info.r, info.sigma
        )));
    }
    let (m, negated) = glz::normalize_trace(input);
    let mut warnings = Vec::new();
    if negated {
        warnings.push(format!(
            "negative trace: analyzing -M = {m} instead (negative-trace reduction; T and -T have the same homoclinic points)"
        ));
    }
    Ok(Prepared {
        m,
        negated,
        warnings,
    })
}

/// The coding named by `param`, or else the first bijective coding, or
/// else the first minimal one.
fn spec_for(m: &UniMat, param: Option<&(BigInt, BigInt)>) -> Res<CodingSpec> {
    if let Some((p, q)) = param {
        return Ok(CodingSpec::new(m, p, q)?);
    }
    if let Some(s) = coding::enumerate_bac(m, 0..=0)?.into_iter().next() {
        return Ok(s);
    }
    let (_, members) = coding::enumerate_mac(m)?;
    members
        .into_iter()
        .next()
        .map(|mm| mm.spec)
        .ok_or_else(|| CliError::invalid(format!("no minimal coding found for {m}")))
}

fn spec_json(s: &CodingSpec) -> Value {
    to_json(s)
}

/// Number of classes of kernels up to the action of ±Mⁿ.
fn kernel_classes(m: &UniMat, members: &[MacMember]) -> usize {
    let mut reps: Vec<&KernelGroup> = Vec::new();
    for mm in members {
        if !reps
            .iter()
            .any(|k| glz::kernel_isomorphic_under_t(m, k, &mm.kernel, glz::KERNEL_ISO_BOUND))
        {
            reps.push(&mm.kernel);
        }
    }
    reps.len()
}

fn matrix_input(input: &UniMat) -> Value {
    json!({ "matrix": to_json(input) })
}

pub fn analyze(input: &UniMat) -> Res<Outcome> {
    let Prepared {
        m,
        negated,
        mut warnings,
    } = prepare(input)?;
    let (r, sigma) = (m.trace(), m.det());
    let info = glz::is_hyperbolic(&m);
    let f = associated_form(&m)?;
    let mn = binforms::integral_minimum(&f)?;
    let companion = glz::companion(&r, sigma)?;
    let conjugator = glz::conjugator_to_companion(&m)?;
    let prim = glz::is_primitive(&m)?;
    let bac = !coding::enumerate_bac(&m, 0..=0)?.is_empty();
    let exceptional = bac && !prim.primitive;
    if let Some((k, n)) = &prim.root {
        warnings.push(format!("M is not primitive: M = K^{n} with K = {k}"));
    }
    if exceptional {
        warnings.push(
            "exceptional case: bijective codings are indexed by powers of the root of M".into(),
        );
    }
    let (_, members) = coding::enumerate_mac(&m)?;
    let classes = kernel_classes(&m, &members);
    let cover = glz::min_orbit_cover_bound(&m)?;
    let result = json!({
        "matrix": to_json(&m),
        "trace_negated": negated,
        "r": int(&r),
        "sigma": sigma,
        "D": int(&info.disc),
        "form": to_json(&f),
        "integral_minimum": int(&mn),
        "bac": bac,
        "companion": to_json(&companion),
        "conjugator": to_json(&conjugator),
        "primitivity": to_json(&prim),
        "exceptional": exceptional,
        "orbit_cover": to_json(&cover),
        "minimal_codings": to_json(&members),
        "kernel_classes": classes,
    });
    Ok(Outcome {
        command: "analyze",
        input: matrix_input(input),
        warnings,
        result,
    })
}

pub fn bac(input: &UniMat, kmin: i64, kmax: i64) -> Res<Outcome> {
    if kmin > kmax {
        return Err(CliError::invalid(format!(
            "empty exponent range {kmin}..={kmax}"
        )));
    }
    if kmax - kmin > MAX_K_SPAN {
        return Err(CliError::bound(format!(
            "exponent range wider than {MAX_K_SPAN}"
        )));
    }
    let Prepared {
        m,
        negated,
        mut warnings,
    } = prepare(input)?;
    let g = coding::orbit_generator(&m)?;
    let list = coding::enumerate_bac(&m, kmin..=kmax)?;
    let exceptional = !list.is_empty() && g != m;
    let family = match (list.is_empty(), exceptional) {
        (true, _) => Value::Null,
        (false, false) => json!("lambda-powers"),
        (false, true) => json!("theta-powers"),
    };
    if exceptional {
        warnings.push(format!(
            "exceptional case: M is a proper power of {g}; the family runs over powers of its unit theta"
        ));
    }
    let result = json!({
        "matrix": to_json(&m),
        "trace_negated": negated,
        "bac": !list.is_empty(),
        "family": family,
        "exceptional": exceptional,
        "generator": to_json(&g),
        "k_min": kmin,
        "k_max": kmax,
        "codings": list.iter().map(spec_json).collect::<Vec<_>>(),
    });
    let mut inp = matrix_input(input);
    inp["k_min"] = json!(kmin);
    inp["k_max"] = json!(kmax);
    Ok(Outcome {
        command: "bac",
        input: inp,
        warnings,
        result,
    })
}

pub fn mac(input: &UniMat) -> Res<Outcome> {
    let Prepared {
        m,
        negated,
        warnings,
    } = prepare(input)?;
    let f = associated_form(&m)?;
    let (mn, members) = coding::enumerate_mac(&m)?;
    let classes = kernel_classes(&m, &members);
    let result = json!({
        "matrix": to_json(&m),
        "trace_negated": negated,
        "form": to_json(&f),
        "integral_minimum": int(&mn),
        "minimal_codings": to_json(&members),
        "kernel_classes": classes,
    });
    Ok(Outcome {
        command: "mac",
        input: matrix_input(input),
        warnings,
        result,
    })
}

fn check_window(window: u32) -> Res<()> {
    if window > MAX_WINDOW {
        return Err(CliError::bound(format!(
            "window {window} exceeds {MAX_WINDOW}"
        )));
    }
    Ok(())
}

pub fn encode(
    input: &UniMat,
    param: Option<&(BigInt, BigInt)>,
    word: &str,
    window: u32,
) -> Res<Outcome> {
    check_window(window)?;
    let Prepared { m, warnings, .. } = prepare(input)?;
    let spec = spec_for(&m, param)?;
    let w: SymWord = word
        .parse()
        .map_err(|e: Error| CliError::invalid(e.to_string()))?;
    let c = spec.compactum()?;
    let point = coding::phi_eval(&spec, &w)?;
    let round_trip = if spec.multiplicity.is_one() {
        let back = coding::decode(&spec, &point, window)?;
        json!(coding::phi_eval(&spec, &back)? == point)
    } else {
        Value::Null
    };
    let result = json!({
        "spec": spec_json(&spec),
        "compactum": to_json(&c),
        "word": w.to_string(),
        "point": to_json(&point),
        "round_trip": round_trip,
    });
    let mut inp = matrix_input(input);
    inp["param"] = param_json(param);
    inp["word"] = json!(word);
    inp["window"] = json!(window);
    Ok(Outcome {
        command: "encode",
        input: inp,
        warnings,
        result,
    })
}

fn param_json(param: Option<&(BigInt, BigInt)>) -> Value {
    match param {
        Some((p, q)) => json!([int(p), int(q)]),
        None => Value::Null,
    }
}

pub fn decode(
    input: &UniMat,
    param: Option<&(BigInt, BigInt)>,
    point: &str,
    window: u32,
) -> Res<Outcome> {
    check_window(window)?;
    let Prepared { m, warnings, .. } = prepare(input)?;
    let spec = spec_for(&m, param)?;
    if !spec.multiplicity.is_one() {
        return Err(CliError::invalid(format!(
            "decoding needs a bijective coding; this one is {}-to-1",
            spec.multiplicity
        )));
    }
    let target: RatPoint = point
        .parse()
        .map_err(|e: Error| CliError::invalid(e.to_string()))?;
    let t = TorusPoint::from_rational(&target, &spec.d());
    let w = coding::decode(&spec, &t, window)?;
    let image = coding::phi_eval(&spec, &w)?;
    let error = image.dist(&t);
    let bound = spec
        .lambda()
        .pow(2 - i64::from(window))
        .map_err(Error::from)?;
    let result = json!({
        "spec": spec_json(&spec),
        "target": to_json(&target),
        "window": window,
        "word": w.to_string(),
        "image": to_json(&image),
        "exact": image == t,
        "error": to_json(&error),
        "bound": to_json(&bound),
        "within_bound": error <= bound,
    });
    let mut inp = matrix_input(input);
    inp["param"] = param_json(param);
    inp["point"] = json!(point);
    inp["window"] = json!(window);
    Ok(Outcome {
        command: "decode",
        input: inp,
        warnings,
        result,
    })
}

fn check_bound(bound: Option<i64>) -> Res<()> {
    match bound {
        Some(b) if b < 0 => Err(CliError::invalid("bound must be non-negative")),
        Some(b) if b > MAX_BOUND => Err(CliError::bound(format!(
            "brute-force bound {b} exceeds {MAX_BOUND}"
        ))),
        _ => Ok(()),
    }
}

fn forms_outcome(sub: &'static str, input: Value, result: Value) -> Outcome {
    let mut inp = input;
    inp["subcommand"] = json!(sub);
    Outcome {
        command: "forms",
        input: inp,
        warnings: Vec::new(),
        result,
    }
}

pub fn forms_reduce(f: &BinForm) -> Res<Outcome> {
    let (g, t) = binforms::reduce(f)?;
    let result = json!({ "form": to_json(f), "reduced": to_json(&g), "transform": to_json(&t) });
    Ok(forms_outcome(
        "reduce",
        json!({ "forms": [f.to_string()] }),
        result,
    ))
}

pub fn forms_cycle(f: &BinForm) -> Res<Outcome> {
    let cyc = binforms::cycle(f)?;
    let result = json!({
        "form": to_json(f),
        "length": cyc.len(),
        "cycle": to_json(&cyc.forms),
        "period_automorph": to_json(&cyc.period_automorph()),
    });
    Ok(forms_outcome(
        "cycle",
        json!({ "forms": [f.to_string()] }),
        result,
    ))
}

pub fn forms_equiv(f: &BinForm, g: &BinForm) -> Res<Outcome> {
    let any = binforms::equivalent(f, g)?;
    let proper = binforms::properly_equivalent(f, g)?;
    let result = json!({
        "f": to_json(f),
        "g": to_json(g),
        "equivalent": to_json(&any),
        "properly_equivalent": to_json(&proper),
    });
    Ok(forms_outcome(
        "equiv",
        json!({ "forms": [f.to_string(), g.to_string()] }),
        result,
    ))
}

pub fn forms_min(f: &BinForm, bound: Option<i64>) -> Res<Outcome> {
    check_bound(bound)?;
    let mn = binforms::integral_minimum(f)?;
    let brute = bound.map(|b| int(&binforms::integral_minimum_brute(f, b)));
    let result = json!({
        "form": to_json(f),
        "integral_minimum": int(&mn),
        "brute_force": brute,
    });
    let inp = json!({ "forms": [f.to_string()], "bound": bound });
    Ok(forms_outcome("min", inp, result))
}

pub fn forms_represent(f: &BinForm, target: &BigInt, bound: Option<i64>) -> Res<Outcome> {
    check_bound(bound)?;
    let reps = binforms::represent(f, target)?;
    let brute = bound.map(|b| json!(binforms::represent_brute(f, target, b).len()));
    let result = json!({
        "form": to_json(f),
        "value": int(target),
        "orbit_reps": reps.iter().map(|(x, y)| json!([int(x), int(y)])).collect::<Vec<_>>(),
        "brute_force_solutions": brute,
    });
    let inp = json!({ "forms": [f.to_string()], "value": int(target), "bound": bound });
    Ok(forms_outcome("represent", inp, result))
}

/// Geometry behind a plot, kept exact until drawing.
pub struct PlotData {
    pub spec: CodingSpec,
    pub domain: coding::DomainPolygon,
    pub hexagon: Vec<(torcode::qfield::QuadExt, torcode::qfield::QuadExt)>,
    pub kernel: KernelGroup,
}

/// Fundamental domain, hexagon and kernel for a coding. The kernel is the
/// one collapsed relative to a bijective coding when the matrix has one,
/// otherwise the kernel of the intertwiner to the companion matrix.
pub fn plot_data(m: &UniMat, param: Option<&(BigInt, BigInt)>) -> Res<PlotData> {
    let spec = spec_for(m, param)?;
    let domain = coding::fundamental_domain(&spec)?;
    let hexagon = coding::pi_hexagon(&spec.r(), spec.sigma())?;
    let kernel = match coding::enumerate_bac(m, 0..=0)?.first() {
        Some(bac) => coding::kernel_of_coding(&spec, bac)?,
        None => glz::kernel_group(&glz::intertwiner(m, &spec.point.p, &spec.point.q))?,
    };
    Ok(PlotData {
        spec,
        domain,
        hexagon,
        kernel,
    })
}

pub fn plot(
    input: &UniMat,
    param: Option<&(BigInt, BigInt)>,
    path: &str,
) -> Res<(Outcome, String)> {
    let Prepared { m, warnings, .. } = prepare(input)?;
    let data = plot_data(&m, param)?;
    let svg = crate::svg::render(&data);
    let result = json!({
        "spec": spec_json(&data.spec),
        "svg": path,
        "area": to_json(&data.domain.area),
        "vertices": to_json(&data.domain.vertices),
        "kernel": to_json(&data.kernel),
    });
    let mut inp = matrix_input(input);
    inp["param"] = param_json(param);
    inp["svg"] = json!(path);
    Ok((
        Outcome {
            command: "plot",
            input: inp,
            warnings,
            result,
        },
        svg,
    ))
}
