//! Subcommand handlers and witness rechecking. Every handler returns the
//! canonical instance echo plus an outcome; `verify` rebuilds the objects
//! from a stored report and repeats the decisive computation.

use crate::report::Report;
use paradesk_core::clopen::{Clopen, PrefixCode, Word};
use paradesk_core::error::Error as CoreError;
use paradesk_core::json::{
    rational_from_string, rational_to_string, BimDto, DoublingCertificateDto,
    EquivalenceWitnessDto, FormalElementDto, GroupoidDto, MeanCertificateDto, MeanDto,
    MeanInstanceDto, MeasureDto, MetricSpaceDto, MonoidSpecDto, PbijDto, TarskiMatrixDto,
    TypeElementDto,
};
use paradesk_core::mean::{
    invariant_mean, mean_is_invariant, verify_certificate, Mean, MeanInstance, MeanVerdict,
};
use paradesk_core::monoid::{generate_monoid, green_classify, symmetric_inverse_monoid_generators};
use paradesk_core::paradox::{check_tarski, find_tarski};
use paradesk_core::rep::{groupoid_regular_rep, koopman, FormalNorm};
use paradesk_core::thompson::{embed_v, reduced_v_elements, verify_embedding};
use paradesk_core::typesg::{type_compare, verify_equal_witness, verify_leq_witness, Comparison};
use paradesk_core::wobble::{doubling_certificate, verify_doubling};
use paradesk_core::{GroundSet, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Norm comparisons are floating point; everything else is exact.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
}

pub struct Outcome {
    pub verdict: String,
    pub scope: String,
    pub witness: Value,
    pub tolerance: Option<f64>,
}

impl Outcome {
    fn exact(verdict: &str, scope: String, witness: Value) -> Self {
        Outcome {
            verdict: verdict.to_string(),
            scope,
            witness,
            tolerance: None,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn echo<T: Serialize>(dto: &T) -> Value {
    serde_json::to_value(dto).expect("instance DTOs serialize")
}

fn one() -> Rational {
    rational_from_string("1").expect("literal")
}

// ---------------------------------------------------------------- mean

pub fn run_mean(dto: &MeanInstanceDto, depth: usize) -> Result<(Value, Outcome), CliError> {
    let instance = dto.to_instance().map_err(input_err)?;
    let outcome = match invariant_mean(&instance, depth).map_err(input_err)? {
        MeanVerdict::Feasible(m) => Outcome::exact(
            "feasible",
            "exact invariance for every generator on the whole ground set".into(),
            json!({ "mean": MeanDto::from_mean(&m) }),
        ),
        MeanVerdict::FeasibleUpToDepth(m) => Outcome::exact(
            "feasible_up_to_depth",
            format!("all invariance constraints at cylinder depth {depth}; deeper refinements unexplored"),
            json!({ "mean": MeanDto::from_mean(&m) }),
        ),
        MeanVerdict::Infeasible(c) => Outcome::exact(
            "infeasible",
            format!("dual certificate over depth-{depth} constraints; refutes invariant means outright"),
            json!({ "certificate": MeanCertificateDto::from_certificate(&c) }),
        ),
    };
    Ok((echo(dto), outcome))
}

/// Total mass the instance's normalization assigns under the mean.
fn mean_total_mass(instance: &MeanInstance, mean: &Mean) -> Result<Rational, CliError> {
    match instance {
        MeanInstance::Fin { ground, normalization, .. } => {
            let points: Vec<usize> = normalization
                .clone()
                .unwrap_or_else(|| (0..ground.size).collect());
            mean.measure_points(&points).map_err(input_err)
        }
        MeanInstance::Prefix { arity, normalization, .. } => {
            let code = match normalization {
                Some(code) => code.clone(),
                None => PrefixCode::new(*arity, vec![Word::empty()]).map_err(input_err)?,
            };
            mean.measure_code(&code).map_err(input_err)
        }
    }
}

fn verify_mean(report: &Report) -> Result<Outcome, CliError> {
    let dto: MeanInstanceDto = instance_dto(report)?;
    let instance = dto.to_instance().map_err(input_err)?;
    let depth = arg_usize(report, "depth")?;
    match report.verdict.as_str() {
        "feasible" | "feasible_up_to_depth" => {
            let mean_dto: MeanDto = witness_field(report, "mean")?;
            let mean = mean_dto.to_mean().map_err(input_err)?;
            let invariant = mean_is_invariant(&instance, &mean).map_err(input_err)?;
            let normalized = mean_total_mass(&instance, &mean)? == one();
            Ok(recheck_outcome(
                invariant && normalized,
                json!({ "invariant": invariant, "normalized": normalized }),
            ))
        }
        "infeasible" => {
            let cert_dto: MeanCertificateDto = witness_field(report, "certificate")?;
            let arity = match &instance {
                MeanInstance::Prefix { arity, .. } => *arity,
                MeanInstance::Fin { .. } => 2,
            };
            let cert = cert_dto.to_certificate(arity).map_err(input_err)?;
            let valid = verify_certificate(&instance, depth, &cert).map_err(input_err)?;
            Ok(recheck_outcome(valid, json!({ "certificate_valid": valid })))
        }
        other => Err(CliError::Input(format!("unknown mean verdict {other:?}"))),
    }
}

// -------------------------------------------------------------- tarski

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "universe", rename_all = "snake_case")]
pub enum TarskiInstanceDto {
    Fin {
        ground_size: usize,
        points: Vec<usize>,
        /// None means the full symmetric inverse monoid on the ground set.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<PbijDto>>,
    },
    Prefix {
        arity: u8,
        words: Vec<String>,
    },
}

struct TarskiSetup {
    base: Clopen,
    monoid: Option<paradesk_core::monoid::FiniteInverseMonoid>,
}

fn tarski_setup(dto: &TarskiInstanceDto, budget: usize) -> Result<TarskiSetup, CliError> {
    match dto {
        TarskiInstanceDto::Fin { ground_size, points, generators } => {
            let ground = GroundSet::new(*ground_size);
            let base = Clopen::fin(ground, points.clone()).map_err(input_err)?;
            let gens = match generators {
                Some(list) => list
                    .iter()
                    .enumerate()
                    .map(|(i, g)| {
                        g.to_pbij(ground)
                            .map_err(|e| CliError::Input(format!("generators[{i}]: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => symmetric_inverse_monoid_generators(ground),
            };
            let monoid = generate_monoid(&gens, budget).map_err(|e| match e {
                CoreError::CapExceeded(..) => {
                    CliError::Usage(format!("monoid closure exceeded --budget {budget}"))
                }
                other => input_err(other),
            })?;
            Ok(TarskiSetup { base, monoid: Some(monoid) })
        }
        TarskiInstanceDto::Prefix { arity, words } => {
            let parsed = words
                .iter()
                .map(|w| {
                    Word::parse(w, *arity)
                        .map_err(|e| CliError::Input(format!("words: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let base = Clopen::prefix(PrefixCode::new(*arity, parsed).map_err(input_err)?);
            Ok(TarskiSetup { base, monoid: None })
        }
    }
}

pub fn run_tarski(
    dto: &TarskiInstanceDto,
    degree: usize,
    budget: usize,
) -> Result<(Value, Outcome), CliError> {
    let setup = tarski_setup(dto, budget)?;
    let search = find_tarski(&setup.base, degree, setup.monoid.as_ref(), budget)
        .map_err(input_err)?;
    let outcome = match search.matrix {
        Some(matrix) => Outcome::exact(
            "found",
            format!("constructive degree-{degree} witness; axioms rechecked exactly"),
            json!({ "matrix": TarskiMatrixDto::from_matrix(&matrix) }),
        ),
        None => Outcome::exact(
            "none",
            if search.exhaustive {
                "exhaustive over the generated monoid; no such matrix exists".into()
            } else {
                format!("search truncated by --budget {budget}; absence not established")
            },
            json!({ "exhaustive": search.exhaustive }),
        ),
    };
    Ok((echo(dto), outcome))
}

fn verify_tarski(report: &Report) -> Result<Outcome, CliError> {
    let dto: TarskiInstanceDto = instance_dto(report)?;
    let degree = arg_usize(report, "degree")?;
    let budget = arg_usize(report, "budget")?;
    let setup = tarski_setup(&dto, budget)?;
    match report.verdict.as_str() {
        "found" => {
            let matrix_dto: TarskiMatrixDto = witness_field(report, "matrix")?;
            let matrix = matrix_dto.to_matrix().map_err(input_err)?;
            let axioms = check_tarski(&matrix).map_err(input_err)?;
            let base_matches = *matrix.base() == setup.base;
            let degree_matches = matrix.degree() == degree;
            Ok(recheck_outcome(
                axioms && base_matches && degree_matches,
                json!({
                    "axioms": axioms,
                    "base_matches": base_matches,
                    "degree_matches": degree_matches,
                }),
            ))
        }
        "none" => {
            let claimed: bool = witness_field(report, "exhaustive")?;
            let search = find_tarski(&setup.base, degree, setup.monoid.as_ref(), budget)
                .map_err(input_err)?;
            let agrees = search.matrix.is_none() && search.exhaustive == claimed;
            Ok(recheck_outcome(agrees, json!({ "search_agrees": agrees })))
        }
        other => Err(CliError::Input(format!("unknown tarski verdict {other:?}"))),
    }
}

// ---------------------------------------------------------------- type

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeInstanceDto {
    pub x: TypeElementDto,
    pub y: TypeElementDto,
}

pub fn run_type(dto: &TypeInstanceDto, budget: usize) -> Result<(Value, Outcome), CliError> {
    let x = dto.x.to_element().map_err(|e| CliError::Input(format!("x: {e}")))?;
    let y = dto.y.to_element().map_err(|e| CliError::Input(format!("y: {e}")))?;
    let outcome = match type_compare(&x, &y, budget).map_err(input_err)? {
        Comparison::Equal { forward, backward } => Outcome::exact(
            "equal",
            "constructive subequivalences in both directions".into(),
            json!({
                "forward": EquivalenceWitnessDto::from_witness(&forward),
                "backward": EquivalenceWitnessDto::from_witness(&backward),
            }),
        ),
        Comparison::Leq { witness } => Outcome::exact(
            "leq",
            "constructive x <= y; the reverse direction was not found".into(),
            json!({ "witness": EquivalenceWitnessDto::from_witness(&witness) }),
        ),
        Comparison::NotLeq { exhaustive } => Outcome::exact(
            "not_leq",
            if exhaustive {
                "every candidate decomposition refuted".into()
            } else {
                format!("no witness within --budget {budget}; refutation not exhaustive")
            },
            json!({ "exhaustive": exhaustive }),
        ),
        Comparison::Unknown => Outcome::exact(
            "unknown",
            format!("--budget {budget} exhausted before a verdict"),
            Value::Null,
        ),
    };
    Ok((echo(dto), outcome))
}

fn verify_type(report: &Report) -> Result<Outcome, CliError> {
    let dto: TypeInstanceDto = instance_dto(report)?;
    let x = dto.x.to_element().map_err(input_err)?;
    let y = dto.y.to_element().map_err(input_err)?;
    match report.verdict.as_str() {
        "equal" => {
            let fwd: EquivalenceWitnessDto = witness_field(report, "forward")?;
            let bwd: EquivalenceWitnessDto = witness_field(report, "backward")?;
            let forward = verify_equal_witness(&x, &y, &fwd.to_witness().map_err(input_err)?)
                .map_err(input_err)?;
            let backward = verify_equal_witness(&y, &x, &bwd.to_witness().map_err(input_err)?)
                .map_err(input_err)?;
            Ok(recheck_outcome(
                forward && backward,
                json!({ "forward": forward, "backward": backward }),
            ))
        }
        "leq" => {
            let w: EquivalenceWitnessDto = witness_field(report, "witness")?;
            let holds = verify_leq_witness(&x, &y, &w.to_witness().map_err(input_err)?)
                .map_err(input_err)?;
            Ok(recheck_outcome(holds, json!({ "witness_valid": holds })))
        }
        "not_leq" | "unknown" => {
            let budget = arg_usize(report, "budget")?;
            let fresh = match type_compare(&x, &y, budget).map_err(input_err)? {
                Comparison::Equal { .. } => "equal",
                Comparison::Leq { .. } => "leq",
                Comparison::NotLeq { .. } => "not_leq",
                Comparison::Unknown => "unknown",
            };
            let agrees = fresh == report.verdict;
            Ok(recheck_outcome(agrees, json!({ "recomputed": fresh })))
        }
        other => Err(CliError::Input(format!("unknown type verdict {other:?}"))),
    }
}

// -------------------------------------------------------------- vembed

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VembedInstanceDto {
    pub first: BimDto,
    pub second: BimDto,
}

fn vembed_outcome(
    dto: &VembedInstanceDto,
    max_leaves: usize,
) -> Result<Outcome, CliError> {
    let s = dto.first.to_bim().map_err(|e| CliError::Input(format!("first: {e}")))?;
    let t = dto.second.to_bim().map_err(|e| CliError::Input(format!("second: {e}")))?;
    let h = match embed_v(&s, &t) {
        Ok(h) => h,
        Err(e) => {
            return Ok(Outcome::exact(
                "rejected",
                "the pair fails the orthogonal-covering requirements".into(),
                json!({ "reason": e.to_string() }),
            ));
        }
    };
    let census = reduced_v_elements(2, max_leaves);
    let check = verify_embedding(&h, &census).map_err(input_err)?;
    let ok = check.homomorphism_ok && check.injective_on_test_set;
    Ok(Outcome::exact(
        if ok { "embedded" } else { "rejected" },
        format!(
            "products and injectivity checked on all {} reduced elements with at most {max_leaves} leaves",
            census.len()
        ),
        json!({
            "census_size": census.len(),
            "homomorphism_ok": check.homomorphism_ok,
            "injective_on_test_set": check.injective_on_test_set,
            "failed_products": check.failed_products,
            "coincident_images": check.coincident_images,
        }),
    ))
}

pub fn run_vembed(
    dto: &VembedInstanceDto,
    max_leaves: usize,
) -> Result<(Value, Outcome), CliError> {
    let outcome = vembed_outcome(dto, max_leaves)?;
    Ok((echo(dto), outcome))
}

fn verify_vembed(report: &Report) -> Result<Outcome, CliError> {
    let dto: VembedInstanceDto = instance_dto(report)?;
    let max_leaves = arg_usize(report, "max_leaves")?;
    let fresh = vembed_outcome(&dto, max_leaves)?;
    let agrees = fresh.verdict == report.verdict && fresh.witness == report.witness;
    Ok(recheck_outcome(agrees, json!({ "recomputed": fresh.verdict })))
}

// -------------------------------------------------------------- wobble

pub fn parse_subset(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse subset {text:?}; use a..b, a..=b, or p,q,r"));
    let t = text.trim();
    let parse_end = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if let Some((a, b)) = t.split_once("..=") {
        let (a, b) = (parse_end(a)?, parse_end(b)?);
        return Ok((a..=b).collect());
    }
    if let Some((a, b)) = t.split_once("..") {
        let (a, b) = (parse_end(a)?, parse_end(b)?);
        return Ok((a..b).collect());
    }
    t.split(',').map(parse_end).collect()
}

pub fn run_wobble(
    dto: &MetricSpaceDto,
    subset_text: &str,
    bound_text: &str,
) -> Result<(Value, Outcome), CliError> {
    let space = dto.to_space().map_err(input_err)?;
    let subset = parse_subset(subset_text)?;
    let bound = rational_from_string(bound_text)
        .map_err(|e| CliError::Usage(format!("--C: {e}")))?;
    let certificate = doubling_certificate(&space, &subset, &bound).map_err(input_err)?;
    let verdict = if certificate.doubled() { "injection" } else { "hall_violator" };
    let instance = json!({
        "space": dto,
        "subset": subset,
        "bound": rational_to_string(&bound),
    });
    Ok((
        instance,
        Outcome::exact(
            verdict,
            "doubling at this single scale; no asymptotic claim".into(),
            json!({ "certificate": DoublingCertificateDto::from_certificate(&certificate) }),
        ),
    ))
}

fn verify_wobble(report: &Report) -> Result<Outcome, CliError> {
    let space_dto: MetricSpaceDto = field_of(&report.instance, "space")?;
    let subset: Vec<usize> = field_of(&report.instance, "subset")?;
    let bound_text: String = field_of(&report.instance, "bound")?;
    let space = space_dto.to_space().map_err(input_err)?;
    let bound = rational_from_string(&bound_text).map_err(input_err)?;
    let cert_dto: DoublingCertificateDto = witness_field(report, "certificate")?;
    let certificate = cert_dto.to_certificate();
    let valid = verify_doubling(&space, &subset, &bound, &certificate).map_err(input_err)?;
    let verdict_matches = (report.verdict == "injection") == certificate.doubled();
    Ok(recheck_outcome(
        valid && verdict_matches,
        json!({ "certificate_valid": valid, "verdict_matches": verdict_matches }),
    ))
}

// ----------------------------------------------------------------- rep

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepInstanceDto {
    pub groupoid: GroupoidDto,
    pub measure: MeasureDto,
    pub elements: Vec<FormalElementDto>,
}

fn rep_rows(dto: &RepInstanceDto) -> Result<Vec<(f64, f64)>, CliError> {
    let groupoid = dto.groupoid.to_groupoid().map_err(input_err)?;
    let measure = dto.measure.to_measure(groupoid.points()).map_err(input_err)?;
    let kappa = koopman(&groupoid, &measure).map_err(input_err)?;
    let lambda = groupoid_regular_rep(&groupoid);
    let ground = GroundSet::new(groupoid.points());
    dto.elements
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let sum = e
                .to_sum(ground)
                .map_err(|err| CliError::Input(format!("elements[{i}]: {err}")))?;
            let k = kappa.formal_norm(&sum).map_err(input_err)?;
            let l = lambda.formal_norm(&sum).map_err(input_err)?;
            Ok((k, l))
        })
        .collect()
}

pub fn run_rep(dto: &RepInstanceDto) -> Result<(Value, Outcome), CliError> {
    let rows = rep_rows(dto)?;
    let all_dominated = rows.iter().all(|(k, l)| *k <= l + NORM_TOLERANCE);
    let witness: Vec<Value> = rows
        .iter()
        .map(|(k, l)| {
            json!({
                "koopman_norm": k,
                "regular_norm": l,
                "dominated": *k <= l + NORM_TOLERANCE,
            })
        })
        .collect();
    let outcome = Outcome {
        verdict: if all_dominated { "dominated" } else { "dominance_violated" }.into(),
        scope: "operator norms by dense eigensolver; comparisons within the stated tolerance".into(),
        witness: json!({ "elements": witness }),
        tolerance: Some(NORM_TOLERANCE),
    };
    Ok((echo(dto), outcome))
}

fn verify_rep(report: &Report) -> Result<Outcome, CliError> {
    let dto: RepInstanceDto = instance_dto(report)?;
    let rows = rep_rows(&dto)?;
    let stored: Vec<Value> = witness_field(report, "elements")?;
    if stored.len() != rows.len() {
        return Ok(recheck_outcome(false, json!({ "element_count_matches": false })));
    }
    let mut norms_close = true;
    for (entry, (k, l)) in stored.iter().zip(&rows) {
        let sk = entry.get("koopman_norm").and_then(Value::as_f64);
        let sl = entry.get("regular_norm").and_then(Value::as_f64);
        match (sk, sl) {
            (Some(sk), Some(sl)) => {
                if (sk - k).abs() > NORM_TOLERANCE || (sl - l).abs() > NORM_TOLERANCE {
                    norms_close = false;
                }
            }
            _ => return Err(CliError::Input("witness rows lack norm fields".into())),
        }
    }
    let all_dominated = rows.iter().all(|(k, l)| *k <= l + NORM_TOLERANCE);
    let verdict_matches =
        (report.verdict == "dominated") == all_dominated;
    Ok(recheck_outcome(
        norms_close && verdict_matches,
        json!({ "norms_close": norms_close, "verdict_matches": verdict_matches }),
    ))
}

// --------------------------------------------------------------- green

pub fn run_green(dto: &MonoidSpecDto, cap: usize) -> Result<(Value, Outcome), CliError> {
    let (_, generators) = dto.to_generators().map_err(input_err)?;
    let monoid = generate_monoid(&generators, cap).map_err(|e| match e {
        CoreError::CapExceeded(..) => {
            CliError::Usage(format!("monoid closure exceeded --cap {cap}"))
        }
        other => input_err(other),
    })?;
    let classes = green_classify(&monoid).map_err(input_err)?;
    let outcome = Outcome::exact(
        "classified",
        format!(
            "complete idempotent classification of the generated {}-element monoid",
            monoid.len()
        ),
        green_witness(monoid.len(), &classes),
    );
    Ok((echo(dto), outcome))
}

fn green_witness(element_count: usize, r: &paradesk_core::monoid::GreenReport) -> Value {
    json!({
        "element_count": element_count,
        "idempotents": r.idempotents,
        "d_classes": r.d_classes,
        "leq_j": r.leq_j,
        "dj_equal": r.dj_equal,
    })
}

fn verify_green(report: &Report) -> Result<Outcome, CliError> {
    let dto: MonoidSpecDto = instance_dto(report)?;
    let cap = arg_usize(report, "cap")?;
    let (_, generators) = dto.to_generators().map_err(input_err)?;
    let monoid = generate_monoid(&generators, cap).map_err(input_err)?;
    let classes = green_classify(&monoid).map_err(input_err)?;
    let agrees = green_witness(monoid.len(), &classes) == report.witness;
    Ok(recheck_outcome(agrees, json!({ "classification_matches": agrees })))
}

// -------------------------------------------------------------- verify

pub fn verify(report: &Report) -> Result<Outcome, CliError> {
    match report.command.as_str() {
        "mean" => verify_mean(report),
        "tarski" => verify_tarski(report),
        "type" => verify_type(report),
        "vembed" => verify_vembed(report),
        "wobble" => verify_wobble(report),
        "rep" => verify_rep(report),
        "green" => verify_green(report),
        other => Err(CliError::Input(format!("unknown command {other:?} in report"))),
    }
}

fn recheck_outcome(ok: bool, checks: Value) -> Outcome {
    Outcome::exact(
        if ok { "verified" } else { "verification_failed" },
        "independent recheck of the stored witness".into(),
        json!({ "checks": checks }),
    )
}

fn arg_usize(report: &Report, key: &str) -> Result<usize, CliError> {
    report
        .args
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Input(format!("report args lack a usable {key:?}")))
}

fn instance_dto<T: serde::de::DeserializeOwned>(report: &Report) -> Result<T, CliError> {
    serde_json::from_value(report.instance.clone())
        .map_err(|e| CliError::Input(format!("instance echo: {e}")))
}

fn witness_field<T: serde::de::DeserializeOwned>(
    report: &Report,
    key: &str,
) -> Result<T, CliError> {
    field_of(&report.witness, key)
        .map_err(|_| CliError::Input(format!("witness lacks a usable {key:?}")))
}

fn field_of<T: serde::de::DeserializeOwned>(value: &Value, key: &str) -> Result<T, CliError> {
    let field = value
        .get(key)
        .ok_or_else(|| CliError::Input(format!("missing field {key:?}")))?;
    serde_json::from_value(field.clone())
        .map_err(|e| CliError::Input(format!("field {key:?}: {e}")))
}
