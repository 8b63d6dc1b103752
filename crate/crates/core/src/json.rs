//! JSON faces for the library types. Partial maps travel as parallel
//! arrays, the two Stone backends as tagged unions, and every rational as a
//! "p/q" string. Conversion errors name the offending field.

use crate::clopen::{Clopen, PrefixCode, Word};
use crate::error::{Error, Result};
use crate::grpd::{FiniteGroupoid, MeasureOnUnits};
use crate::mean::{
    ConstraintLabel, Mean, MeanCertificate, MeanInstance, CertificateRow,
};
use crate::metric::FiniteMetricSpace;
use crate::paradox::TarskiMatrix;
use crate::pbij::{GroundSet, PartialBijection};
use crate::prefix::PrefixMap;
use crate::rep::FormalSum;
use crate::thompson::VElement;
use crate::typesg::{EquivalenceWitness, TypeElement, WitnessBlock};
use crate::wobble::{DoublingCertificate, DoublingInjection, HallViolator};
use crate::{bim::BimElement, Rational};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts "p/q" and bare integers.
pub fn rational_from_string(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let (num, den) = trimmed.split_once('/').unwrap_or((trimmed, "1"));
    let bad = || Error::Invalid(format!("not a rational: {text:?}"));
    let n: BigInt = num.trim().parse().map_err(|_| bad())?;
    let d: BigInt = den.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Invalid(format!("zero denominator: {text:?}")));
    }
    Ok(Rational::new(n, d))
}

fn parse_words(field: &str, words: &[String], arity: u8) -> Result<Vec<Word>> {
    words
        .iter()
        .map(|w| {
            Word::parse(w, arity)
                .map_err(|e| Error::Invalid(format!("{field}: {e}")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PbijDto {
    pub dom: Vec<usize>,
    pub img: Vec<usize>,
}

impl PbijDto {
    pub fn from_pbij(p: &PartialBijection) -> Self {
        PbijDto {
            dom: p.entries().map(|(x, _)| x).collect(),
            img: p.entries().map(|(_, y)| y).collect(),
        }
    }

    pub fn to_pbij(&self, ground: GroundSet) -> Result<PartialBijection> {
        if self.dom.len() != self.img.len() {
            return Err(Error::Invalid(format!(
                "dom has {} entries but img has {}",
                self.dom.len(),
                self.img.len()
            )));
        }
        PartialBijection::new(
            ground,
            self.dom.iter().copied().zip(self.img.iter().copied()),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidSpecDto {
    pub ground_size: usize,
    pub generators: Vec<PbijDto>,
}

impl MonoidSpecDto {
    pub fn to_generators(&self) -> Result<(GroundSet, Vec<PartialBijection>)> {
        let ground = GroundSet::new(self.ground_size);
        let generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                g.to_pbij(ground)
                    .map_err(|e| Error::Invalid(format!("generators[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((ground, generators))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrefixMapDto {
    pub dom: Vec<String>,
    pub ran: Vec<String>,
    pub perm: Vec<usize>,
}

impl PrefixMapDto {
    pub fn from_map(m: &PrefixMap) -> Self {
        let pairs = m.pairs();
        let mut ran_words: Vec<&Word> = pairs.iter().map(|(_, v)| v).collect();
        ran_words.sort();
        PrefixMapDto {
            dom: pairs.iter().map(|(u, _)| u.to_string()).collect(),
            ran: ran_words.iter().map(|w| w.to_string()).collect(),
            perm: pairs
                .iter()
                .map(|(_, v)| ran_words.binary_search(&v).expect("own word"))
                .collect(),
        }
    }

    pub fn to_map(&self, arity: u8) -> Result<PrefixMap> {
        if self.ran.len() != self.dom.len() || self.perm.len() != self.dom.len() {
            return Err(Error::Invalid(format!(
                "dom/ran/perm lengths differ: {}/{}/{}",
                self.dom.len(),
                self.ran.len(),
                self.perm.len()
            )));
        }
        let mut seen = vec![false; self.ran.len()];
        for &p in &self.perm {
            if p >= self.ran.len() || seen[p] {
                return Err(Error::Invalid(format!(
                    "perm is not a permutation of 0..{}",
                    self.ran.len()
                )));
            }
            seen[p] = true;
        }
        let dom = parse_words("dom", &self.dom, arity)?;
        let ran = parse_words("ran", &self.ran, arity)?;
        let pairs = dom
            .into_iter()
            .zip(self.perm.iter().map(|&p| ran[p].clone()))
            .collect();
        PrefixMap::new(arity, pairs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClopenDto {
    Fin {
        ground_size: usize,
        points: Vec<usize>,
    },
    Prefix {
        arity: u8,
        words: Vec<String>,
    },
}

impl ClopenDto {
    pub fn from_clopen(c: &Clopen) -> Self {
        match c {
            Clopen::Fin { ground, points } => ClopenDto::Fin {
                ground_size: ground.size,
                points: points.clone(),
            },
            Clopen::Prefix(code) => ClopenDto::Prefix {
                arity: code.arity(),
                words: code.words().iter().map(|w| w.to_string()).collect(),
            },
        }
    }

    pub fn to_clopen(&self) -> Result<Clopen> {
        match self {
            ClopenDto::Fin { ground_size, points } => {
                Clopen::fin(GroundSet::new(*ground_size), points.clone())
                    .map_err(|e| Error::Invalid(format!("points: {e}")))
            }
            ClopenDto::Prefix { arity, words } => Ok(Clopen::prefix(PrefixCode::new(
                *arity,
                parse_words("words", words, *arity)?,
            )?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BimDto {
    Fin {
        ground_size: usize,
        dom: Vec<usize>,
        img: Vec<usize>,
    },
    Prefix {
        arity: u8,
        dom: Vec<String>,
        ran: Vec<String>,
        perm: Vec<usize>,
    },
}

impl BimDto {
    pub fn from_bim(b: &BimElement) -> Self {
        match b {
            BimElement::FinPB(p) => {
                let dto = PbijDto::from_pbij(p);
                BimDto::Fin {
                    ground_size: p.ground_size(),
                    dom: dto.dom,
                    img: dto.img,
                }
            }
            BimElement::Prefix(m) => {
                let dto = PrefixMapDto::from_map(m);
                BimDto::Prefix {
                    arity: m.arity(),
                    dom: dto.dom,
                    ran: dto.ran,
                    perm: dto.perm,
                }
            }
        }
    }

    pub fn to_bim(&self) -> Result<BimElement> {
        match self {
            BimDto::Fin { ground_size, dom, img } => {
                let dto = PbijDto {
                    dom: dom.clone(),
                    img: img.clone(),
                };
                Ok(BimElement::FinPB(dto.to_pbij(GroundSet::new(*ground_size))?))
            }
            BimDto::Prefix { arity, dom, ran, perm } => {
                let dto = PrefixMapDto {
                    dom: dom.clone(),
                    ran: ran.clone(),
                    perm: perm.clone(),
                };
                Ok(BimElement::Prefix(dto.to_map(*arity)?))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TarskiMatrixDto {
    pub base: ClopenDto,
    pub entries: Vec<BimDto>,
}

impl TarskiMatrixDto {
    pub fn from_matrix(t: &TarskiMatrix) -> Self {
        TarskiMatrixDto {
            base: ClopenDto::from_clopen(t.base()),
            entries: t.entries().iter().map(BimDto::from_bim).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<TarskiMatrix> {
        TarskiMatrix::new(
            self.base
                .to_clopen()
                .map_err(|e| Error::Invalid(format!("base: {e}")))?,
            self.entries
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    b.to_bim()
                        .map_err(|e| Error::Invalid(format!("entries[{i}]: {e}")))
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeElementDto {
    pub summands: Vec<ClopenDto>,
}

impl TypeElementDto {
    pub fn from_element(t: &TypeElement) -> Self {
        TypeElementDto {
            summands: t.summands().iter().map(ClopenDto::from_clopen).collect(),
        }
    }

    pub fn to_element(&self) -> Result<TypeElement> {
        TypeElement::new(
            self.summands
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    c.to_clopen()
                        .map_err(|e| Error::Invalid(format!("summands[{i}]: {e}")))
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessBlockDto {
    pub element: BimDto,
    pub source_slot: usize,
    pub target_slot: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceWitnessDto {
    pub blocks: Vec<WitnessBlockDto>,
}

impl EquivalenceWitnessDto {
    pub fn from_witness(w: &EquivalenceWitness) -> Self {
        EquivalenceWitnessDto {
            blocks: w
                .blocks
                .iter()
                .map(|b| WitnessBlockDto {
                    element: BimDto::from_bim(&b.element),
                    source_slot: b.source_slot,
                    target_slot: b.target_slot,
                })
                .collect(),
        }
    }

    pub fn to_witness(&self) -> Result<EquivalenceWitness> {
        Ok(EquivalenceWitness {
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    Ok(WitnessBlock {
                        element: b
                            .element
                            .to_bim()
                            .map_err(|e| Error::Invalid(format!("blocks[{i}]: {e}")))?,
                        source_slot: b.source_slot,
                        target_slot: b.target_slot,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum MeanInstanceDto {
    Fin {
        ground_size: usize,
        generators: Vec<PbijDto>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalization: Option<Vec<usize>>,
    },
    Prefix {
        arity: u8,
        generators: Vec<PrefixMapDto>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalization: Option<Vec<String>>,
    },
}

impl MeanInstanceDto {
    pub fn to_instance(&self) -> Result<MeanInstance> {
        match self {
            MeanInstanceDto::Fin {
                ground_size,
                generators,
                normalization,
            } => {
                let spec = MonoidSpecDto {
                    ground_size: *ground_size,
                    generators: generators.clone(),
                };
                let (ground, generators) = spec.to_generators()?;
                Ok(MeanInstance::Fin {
                    ground,
                    generators,
                    normalization: normalization.clone(),
                })
            }
            MeanInstanceDto::Prefix {
                arity,
                generators,
                normalization,
            } => Ok(MeanInstance::Prefix {
                arity: *arity,
                generators: generators
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        m.to_map(*arity)
                            .map_err(|e| Error::Invalid(format!("generators[{i}]: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
                normalization: match normalization {
                    None => None,
                    Some(words) => Some(PrefixCode::new(
                        *arity,
                        parse_words("normalization", words, *arity)?,
                    )?),
                },
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanDto {
    Atomic {
        ground_size: usize,
        weights: BTreeMap<String, String>,
    },
    Cylinder {
        arity: u8,
        depth: usize,
        weights: BTreeMap<String, String>,
    },
}

impl MeanDto {
    pub fn from_mean(m: &Mean) -> Self {
        match m {
            Mean::Atomic { ground, weights } => MeanDto::Atomic {
                ground_size: ground.size,
                weights: weights
                    .iter()
                    .map(|(atom, w)| (atom.to_string(), rational_to_string(w)))
                    .collect(),
            },
            Mean::Cylinder { arity, depth, weights } => MeanDto::Cylinder {
                arity: *arity,
                depth: *depth,
                weights: weights
                    .iter()
                    .map(|(word, w)| (word.to_string(), rational_to_string(w)))
                    .collect(),
            },
        }
    }

    pub fn to_mean(&self) -> Result<Mean> {
        match self {
            MeanDto::Atomic { ground_size, weights } => Ok(Mean::Atomic {
                ground: GroundSet::new(*ground_size),
                weights: weights
                    .iter()
                    .map(|(atom, w)| {
                        let a: usize = atom.parse().map_err(|_| {
                            Error::Invalid(format!("weights key {atom:?} is not an atom index"))
                        })?;
                        Ok((a, rational_from_string(w)?))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?,
            }),
            MeanDto::Cylinder { arity, depth, weights } => Ok(Mean::Cylinder {
                arity: *arity,
                depth: *depth,
                weights: weights
                    .iter()
                    .map(|(word, w)| {
                        Ok((
                            Word::parse(word, *arity)
                                .map_err(|e| Error::Invalid(format!("weights key: {e}")))?,
                            rational_from_string(w)?,
                        ))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintLabelDto {
    FinInvariance { generator: usize, atom: usize },
    PrefixInvariance { generator: usize, cylinder: String },
    Normalization,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRowDto {
    pub label: ConstraintLabelDto,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanCertificateDto {
    pub rows: Vec<CertificateRowDto>,
}

impl MeanCertificateDto {
    pub fn from_certificate(c: &MeanCertificate) -> Self {
        MeanCertificateDto {
            rows: c
                .rows
                .iter()
                .map(|r| CertificateRowDto {
                    label: match &r.label {
                        ConstraintLabel::FinInvariance { generator, atom } => {
                            ConstraintLabelDto::FinInvariance {
                                generator: *generator,
                                atom: *atom,
                            }
                        }
                        ConstraintLabel::PrefixInvariance { generator, cylinder } => {
                            ConstraintLabelDto::PrefixInvariance {
                                generator: *generator,
                                cylinder: cylinder.to_string(),
                            }
                        }
                        ConstraintLabel::Normalization => ConstraintLabelDto::Normalization,
                    },
                    weight: rational_to_string(&r.weight),
                })
                .collect(),
        }
    }

    pub fn to_certificate(&self, arity: u8) -> Result<MeanCertificate> {
        Ok(MeanCertificate {
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    Ok(CertificateRow {
                        label: match &r.label {
                            ConstraintLabelDto::FinInvariance { generator, atom } => {
                                ConstraintLabel::FinInvariance {
                                    generator: *generator,
                                    atom: *atom,
                                }
                            }
                            ConstraintLabelDto::PrefixInvariance { generator, cylinder } => {
                                ConstraintLabel::PrefixInvariance {
                                    generator: *generator,
                                    cylinder: Word::parse(cylinder, arity).map_err(|e| {
                                        Error::Invalid(format!("rows[{i}].cylinder: {e}"))
                                    })?,
                                }
                            }
                            ConstraintLabelDto::Normalization => ConstraintLabel::Normalization,
                        },
                        weight: rational_from_string(&r.weight)
                            .map_err(|e| Error::Invalid(format!("rows[{i}].weight: {e}")))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VElementDto {
    pub dom: Vec<String>,
    pub ran: Vec<String>,
    pub perm: Vec<usize>,
    pub complete: bool,
}

impl VElementDto {
    pub fn from_element(v: &VElement) -> Self {
        let m = PrefixMapDto::from_map(v.map());
        VElementDto {
            dom: m.dom,
            ran: m.ran,
            perm: m.perm,
            complete: true,
        }
    }

    pub fn to_element(&self, arity: u8) -> Result<VElement> {
        if !self.complete {
            return Err(Error::IncompleteCode);
        }
        let dto = PrefixMapDto {
            dom: self.dom.clone(),
            ran: self.ran.clone(),
            perm: self.perm.clone(),
        };
        VElement::new(dto.to_map(arity)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricSpaceDto {
    Path { n: usize },
    Grid { side: usize },
    Tree { depth: usize },
    Matrix { dist: Vec<Vec<String>> },
    CayleyBall {
        generators: Vec<Vec<usize>>,
        radius: usize,
        cap: usize,
    },
}

impl MetricSpaceDto {
    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        match self {
            MetricSpaceDto::Path { n } => FiniteMetricSpace::path(*n),
            MetricSpaceDto::Grid { side } => FiniteMetricSpace::grid(*side),
            MetricSpaceDto::Tree { depth } => FiniteMetricSpace::tree(*depth),
            MetricSpaceDto::Matrix { dist } => {
                let entries = dist
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .map(|v| {
                                rational_from_string(v)
                                    .map_err(|e| Error::Invalid(format!("dist[{i}]: {e}")))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                FiniteMetricSpace::from_matrix(&entries)
            }
            MetricSpaceDto::CayleyBall { generators, radius, cap } => {
                FiniteMetricSpace::cayley_ball(generators, *radius, *cap)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DoublingCertificateDto {
    Injection {
        assignments: Vec<(usize, u8, usize)>,
    },
    HallViolator {
        subset: Vec<(usize, u8)>,
        neighborhood: Vec<usize>,
    },
}

impl DoublingCertificateDto {
    pub fn from_certificate(c: &DoublingCertificate) -> Self {
        match c {
            DoublingCertificate::Injection(inj) => DoublingCertificateDto::Injection {
                assignments: inj.assignments.clone(),
            },
            DoublingCertificate::HallViolator(h) => DoublingCertificateDto::HallViolator {
                subset: h.subset.clone(),
                neighborhood: h.neighborhood.clone(),
            },
        }
    }

    pub fn to_certificate(&self) -> DoublingCertificate {
        match self {
            DoublingCertificateDto::Injection { assignments } => {
                DoublingCertificate::Injection(DoublingInjection {
                    assignments: assignments.clone(),
                })
            }
            DoublingCertificateDto::HallViolator { subset, neighborhood } => {
                DoublingCertificate::HallViolator(HallViolator {
                    subset: subset.clone(),
                    neighborhood: neighborhood.clone(),
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDto {
    pub points: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl GroupoidDto {
    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        GroupoidDto {
            points: g.points(),
            blocks: g.blocks().to_vec(),
        }
    }

    pub fn to_groupoid(&self) -> Result<FiniteGroupoid> {
        FiniteGroupoid::new(self.points, self.blocks.clone())
            .map_err(|e| Error::Invalid(format!("blocks: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureDto {
    Uniform(String),
    Weights(Vec<String>),
}

impl MeasureDto {
    pub fn to_measure(&self, points: usize) -> Result<MeasureOnUnits> {
        match self {
            MeasureDto::Uniform(tag) if tag == "uniform" => {
                Ok(MeasureOnUnits::uniform(points))
            }
            MeasureDto::Uniform(tag) => {
                Err(Error::Invalid(format!("measure: unknown tag {tag:?}")))
            }
            MeasureDto::Weights(entries) => {
                if entries.len() != points {
                    return Err(Error::Invalid(format!(
                        "measure has {} weights for {} points",
                        entries.len(),
                        points
                    )));
                }
                MeasureOnUnits::new(
                    entries
                        .iter()
                        .map(|w| rational_from_string(w))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| Error::Invalid(format!("measure: {e}")))?,
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormalTermDto {
    pub coef: String,
    pub element: PbijDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormalElementDto {
    pub terms: Vec<FormalTermDto>,
}

impl FormalElementDto {
    pub fn from_sum(a: &FormalSum) -> Self {
        FormalElementDto {
            terms: a
                .terms()
                .map(|(g, c)| FormalTermDto {
                    coef: rational_to_string(c),
                    element: PbijDto::from_pbij(g),
                })
                .collect(),
        }
    }

    pub fn to_sum(&self, ground: GroundSet) -> Result<FormalSum> {
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                Ok((
                    t.element
                        .to_pbij(ground)
                        .map_err(|e| Error::Invalid(format!("terms[{i}].element: {e}")))?,
                    rational_from_string(&t.coef)
                        .map_err(|e| Error::Invalid(format!("terms[{i}].coef: {e}")))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FormalSum::new(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean::invariant_mean;
    use crate::mean::MeanVerdict;
    use crate::scalar::ratio;

    #[test]
    fn rationals_round_trip_as_strings() {
        let q = ratio(-3, 7);
        assert_eq!(rational_to_string(&q), "-3/7");
        assert_eq!(rational_from_string("-3/7").unwrap(), q);
        assert_eq!(rational_from_string("5").unwrap(), ratio(5, 1));
        assert!(rational_from_string("a/b").is_err());
        assert!(rational_from_string("0/3").unwrap().is_zero());
        assert!(rational_from_string("1/0").is_err());
    }

    #[test]
    fn pbij_round_trips_through_parallel_arrays() {
        let ground = GroundSet::new(4);
        let p = PartialBijection::new(ground, [(0, 2), (3, 1)]).unwrap();
        let dto = PbijDto::from_pbij(&p);
        assert_eq!(dto.dom, vec![0, 3]);
        assert_eq!(dto.img, vec![2, 1]);
        assert_eq!(dto.to_pbij(ground).unwrap(), p);
        let text = serde_json::to_string(&dto).unwrap();
        assert_eq!(text, r#"{"dom":[0,3],"img":[2,1]}"#);
        let back: PbijDto = serde_json::from_str(&text).unwrap();
        assert_eq!(back, dto);

        let ragged = PbijDto {
            dom: vec![0],
            img: vec![],
        };
        assert!(ragged.to_pbij(ground).is_err());
    }

    #[test]
    fn prefix_map_round_trips_with_permutation() {
        let arity = 2;
        // sibling cylinders mapped consistently collapse to their parent
        let collapsing = PrefixMapDto {
            dom: vec!["0".into(), "10".into(), "11".into()],
            ran: vec!["00".into(), "01".into(), "1".into()],
            perm: vec![2, 0, 1],
        };
        let reduced = collapsing.to_map(arity).unwrap();
        assert_eq!(PrefixMapDto::from_map(&reduced).dom, vec!["0", "1"]);

        let m = PrefixMap::new(
            arity,
            vec![
                (Word::parse("0", arity).unwrap(), Word::parse("1", arity).unwrap()),
                (Word::parse("10", arity).unwrap(), Word::parse("01", arity).unwrap()),
                (Word::parse("11", arity).unwrap(), Word::parse("00", arity).unwrap()),
            ],
        )
        .unwrap();
        let dto = PrefixMapDto::from_map(&m);
        assert_eq!(dto.dom, vec!["0", "10", "11"]);
        assert_eq!(dto.ran, vec!["00", "01", "1"]);
        assert_eq!(dto.perm, vec![2, 1, 0]);
        assert_eq!(dto.to_map(arity).unwrap(), m);

        let bad = PrefixMapDto {
            dom: vec!["0".into()],
            ran: vec!["1".into()],
            perm: vec![1],
        };
        assert!(bad.to_map(arity).is_err());
    }

    #[test]
    fn clopen_and_bim_tagged_unions() {
        let fin = Clopen::fin(GroundSet::new(3), vec![0, 2]).unwrap();
        let dto = ClopenDto::from_clopen(&fin);
        assert_eq!(dto.to_clopen().unwrap(), fin);
        assert!(serde_json::to_string(&dto).unwrap().contains(r#""kind":"fin""#));

        let code = PrefixCode::new(2, vec![Word::parse("0", 2).unwrap()]).unwrap();
        let pref = Clopen::prefix(code);
        let dto = ClopenDto::from_clopen(&pref);
        assert_eq!(dto.to_clopen().unwrap(), pref);

        let b = BimElement::FinPB(
            PartialBijection::new(GroundSet::new(3), [(0, 1)]).unwrap(),
        );
        assert_eq!(BimDto::from_bim(&b).to_bim().unwrap(), b);
    }

    #[test]
    fn mean_instances_and_verdict_payloads_round_trip() {
        let dto = MeanInstanceDto::Prefix {
            arity: 2,
            generators: vec![
                PrefixMapDto {
                    dom: vec!["".into()],
                    ran: vec!["0".into()],
                    perm: vec![0],
                },
                PrefixMapDto {
                    dom: vec!["".into()],
                    ran: vec!["1".into()],
                    perm: vec![0],
                },
            ],
            normalization: None,
        };
        let instance = dto.to_instance().unwrap();
        let verdict = invariant_mean(&instance, 2).unwrap();
        let MeanVerdict::Infeasible(cert) = verdict else {
            panic!("the doubling pair admits no invariant mean");
        };
        let cert_dto = MeanCertificateDto::from_certificate(&cert);
        let back = cert_dto.to_certificate(2).unwrap();
        assert_eq!(back, cert);

        let mean = Mean::Atomic {
            ground: GroundSet::new(2),
            weights: [(0usize, ratio(1, 2)), (1, ratio(1, 2))].into_iter().collect(),
        };
        let dto = MeanDto::from_mean(&mean);
        assert_eq!(dto.to_mean().unwrap(), mean);
    }

    #[test]
    fn groupoid_measure_and_formal_sums_round_trip() {
        let g = FiniteGroupoid::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let dto = GroupoidDto::from_groupoid(&g);
        let back = dto.to_groupoid().unwrap();
        assert_eq!(back.blocks(), g.blocks());

        let uniform: MeasureDto = serde_json::from_str(r#""uniform""#).unwrap();
        assert!(uniform.to_measure(4).unwrap().is_probability());
        let weighted: MeasureDto =
            serde_json::from_str(r#"["1/2","1/6","1/6","1/6"]"#).unwrap();
        assert_eq!(weighted.to_measure(4).unwrap().weight(0), &ratio(1, 2));
        assert!(weighted.to_measure(3).is_err());

        let ground = GroundSet::new(4);
        let sum = FormalSum::new([
            (PartialBijection::identity(ground), ratio(1, 1)),
            (
                PartialBijection::new(ground, [(0, 1), (1, 0)]).unwrap(),
                ratio(-1, 2),
            ),
        ]);
        let dto = FormalElementDto::from_sum(&sum);
        assert_eq!(dto.to_sum(ground).unwrap(), sum);
    }

    #[test]
    fn metric_spaces_build_from_tagged_parameters() {
        let path: MetricSpaceDto = serde_json::from_str(r#"{"kind":"path","n":5}"#).unwrap();
        assert_eq!(path.to_space().unwrap().len(), 5);
        let tree: MetricSpaceDto =
            serde_json::from_str(r#"{"kind":"tree","depth":3}"#).unwrap();
        assert_eq!(tree.to_space().unwrap().len(), 15);
        let matrix: MetricSpaceDto = serde_json::from_str(
            r#"{"kind":"matrix","dist":[["0","1/2"],["1/2","0"]]}"#,
        )
        .unwrap();
        assert_eq!(matrix.to_space().unwrap().len(), 2);
        let bad: MetricSpaceDto = serde_json::from_str(
            r#"{"kind":"matrix","dist":[["0","x"],["x","0"]]}"#,
        )
        .unwrap();
        assert!(bad.to_space().is_err());
    }
}
