//! Serializable reports shared by the command-line front end and the tests.
//!
//! Group input: `{"p": 5, "n": 3, "generators": [[[a11, a12], [a21, a22]], ...]}` with
//! entries in `[0, p^n)`. Every analysis report carries the same three top-level keys, so
//! a report can be fed back as input.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::{h1_loc, oracle_cohomology, Cocycle, CohomologyError};
use crate::families::{verify_counterexample, CounterexampleCertificate, Family, FamilyCase, SearchReport, Shape};
use crate::matgroup::{close_group, triangularity, GroupError, Mat2, MatrixGroup, RawMat2, Triangularity};
use crate::modring::{ModError, Modulus};
use crate::structure::{
    check_preconditions, extract_parameters, criterion_holds, EntryReading, ParameterProfile, PreconditionReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("malformed group JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Modulus(#[from] ModError),
    #[error("generator {index}: entry {value} is not in [0, {modulus})")]
    EntryOutOfRange { index: usize, value: u64, modulus: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupInput {
    pub p: u64,
    pub n: u32,
    pub generators: Vec<RawMat2>,
}

impl GroupInput {
    pub fn from_json(s: &str) -> Result<Self, InputError> {
        serde_json::from_str(s).map_err(|e| InputError::Json(e.to_string()))
    }

    pub fn from_group(g: &MatrixGroup) -> Self {
        let m = g.modulus();
        GroupInput { p: m.p(), n: m.n(), generators: g.generators().iter().map(RawMat2::from).collect() }
    }

    /// Validated modulus and generators; entries must already be reduced.
    pub fn matrices(&self) -> Result<(Modulus, Vec<Mat2>), InputError> {
        let md = Modulus::new(self.p, self.n)?;
        let q = md.value();
        let mut out = Vec::with_capacity(self.generators.len());
        for (index, g) in self.generators.iter().enumerate() {
            let [[a, b], [c, d]] = g.0;
            for value in [a, b, c, d] {
                if value >= q {
                    return Err(InputError::EntryOutOfRange { index, value, modulus: q });
                }
            }
            out.push(Mat2::from_raw(md, [a, b, c, d]));
        }
        Ok((md, out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Linear algebra over the generator values.
    #[default]
    Generators,
    /// Full enumeration; small groups only.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreconditionsJson {
    pub g1_order: usize,
    pub g1_cyclic: bool,
    pub g1_generator: Option<RawMat2>,
    pub lambda1: Option<u64>,
    pub ord_lambda1: u64,
    pub basis_ok: bool,
    pub g2_triangularity: Triangularity,
    pub satisfied: bool,
    pub notes: Vec<String>,
}

impl From<&PreconditionReport> for PreconditionsJson {
    fn from(r: &PreconditionReport) -> Self {
        PreconditionsJson {
            g1_order: r.g1_order,
            g1_cyclic: r.g1_cyclic_ok,
            g1_generator: r.g1_generator.as_ref().map(RawMat2::from),
            lambda1: r.lambda1,
            ord_lambda1: r.ord_lambda1,
            basis_ok: r.basis_ok,
            g2_triangularity: r.g2_triangularity,
            satisfied: r.satisfied(),
            notes: r.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileJson {
    pub i: u32,
    pub j: u32,
    pub m: u32,
    pub h: u32,
    pub d: u64,
    pub lambda1: u64,
    pub delta: RawMat2,
    pub delta_tilde: RawMat2,
    pub tau_l: RawMat2,
    pub tau_u: RawMat2,
    pub rho: RawMat2,
    pub entry_reading: EntryReading,
    pub notes: Vec<String>,
}

impl From<&ParameterProfile> for ProfileJson {
    fn from(p: &ParameterProfile) -> Self {
        ProfileJson {
            i: p.i,
            j: p.j,
            m: p.m,
            h: p.h,
            d: p.d,
            lambda1: p.lambda1,
            delta: (&p.delta).into(),
            delta_tilde: (&p.delta_tilde).into(),
            tau_l: (&p.tau_l).into(),
            tau_u: (&p.tau_u).into(),
            rho: (&p.rho).into(),
            entry_reading: p.entry_reading,
            notes: p.notes.clone(),
        }
    }
}

/// Invariant factors, largest last; `[]` is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyJson {
    pub backend: Backend,
    pub z1: Vec<u64>,
    pub b1: Vec<u64>,
    pub h1: Vec<u64>,
    pub z1loc: Vec<u64>,
    pub h1loc: Vec<u64>,
    pub h1loc_order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    /// Values of the checked cocycle on the generators, in input order.
    pub witness_generator_values: Vec<[u64; 2]>,
    pub is_cocycle: bool,
    pub local_ok: bool,
    pub not_coboundary: bool,
    pub class_order: u64,
    pub witness_p_torsion: bool,
    pub p_torsion_representative: bool,
    pub fixed_point_max_order: u64,
    pub valid: bool,
}

impl CertificateJson {
    pub fn new(witness: &Cocycle, c: &CounterexampleCertificate) -> Self {
        CertificateJson {
            witness_generator_values: witness.generator_values(),
            is_cocycle: c.is_cocycle,
            local_ok: c.local_ok,
            not_coboundary: c.not_coboundary,
            class_order: c.class_order,
            witness_p_torsion: c.witness_p_torsion,
            p_torsion_representative: c.p_torsion_representative,
            fixed_point_max_order: c.fixed_point_max_order,
            valid: c.valid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub case: FamilyCase,
    pub i: u32,
    pub j: u32,
    pub m: u32,
    pub h: u32,
    pub lambda: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub p: u64,
    pub n: u32,
    pub generators: Vec<RawMat2>,
    pub group_order: usize,
    pub triangularity: Triangularity,
    pub preconditions: PreconditionsJson,
    pub profile: Option<ProfileJson>,
    /// Why no profile could be read, when `profile` is null.
    pub profile_error: Option<String>,
    pub vanishing_predicate: Option<bool>,
    pub cohomology: CohomologyJson,
    /// Family witness if any, otherwise the first `H^1_loc` representative.
    pub certificate: Option<CertificateJson>,
    pub family: Option<FamilyJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

impl AnalysisError {
    /// Resource limits, as opposed to invalid input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            AnalysisError::Group(GroupError::CapExceeded { .. }) | AnalysisError::Cohomology(CohomologyError::OracleTooLarge { .. })
        )
    }
}

pub fn close_input(input: &GroupInput, cap: usize) -> Result<Arc<MatrixGroup>, AnalysisInputError> {
    let (md, gens) = input.matrices()?;
    Ok(Arc::new(close_group(md, &gens, cap)?))
}

/// Either a validation or a computational failure while preparing a group.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisInputError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl From<GroupError> for AnalysisInputError {
    fn from(e: GroupError) -> Self {
        AnalysisInputError::Analysis(AnalysisError::Group(e))
    }
}

/// Full analysis of a closed group; `family` supplies the witness to certify.
pub fn analyze(g: &Arc<MatrixGroup>, backend: Backend, oracle_cap: usize, family: Option<&Family>) -> Result<AnalysisReport, AnalysisError> {
    let m = g.modulus();
    let pre = check_preconditions(g);
    let (profile, profile_error) = match extract_parameters(g) {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (cohomology, rep) = match backend {
        Backend::Generators => {
            let r = h1_loc(g);
            let c = CohomologyJson {
                backend,
                z1: r.z1_structure.clone(),
                b1: r.b1_structure.clone(),
                h1: r.h1_structure.clone(),
                z1loc: r.z1loc_structure.clone(),
                h1loc: r.h1loc_structure.clone(),
                h1loc_order: r.h1loc_order(),
            };
            (c, r.representatives.first().cloned())
        }
        Backend::Oracle => {
            let r = oracle_cohomology(g, oracle_cap)?;
            let c = CohomologyJson {
                backend,
                h1loc_order: r.h1loc_structure.iter().product(),
                z1: r.z1_structure,
                b1: r.b1_structure,
                h1: r.h1_structure,
                z1loc: r.z1loc_structure,
                h1loc: r.h1loc_structure,
            };
            (c, None)
        }
    };
    let witness = family.map(|f| f.witness.clone()).or(rep);
    let certificate = witness.map(|w| CertificateJson::new(&w, &verify_counterexample(&w)));
    Ok(AnalysisReport {
        p: m.p(),
        n: m.n(),
        generators: g.generators().iter().map(RawMat2::from).collect(),
        group_order: g.order(),
        triangularity: triangularity(g),
        preconditions: (&pre).into(),
        vanishing_predicate: profile.as_ref().map(criterion_holds),
        profile: profile.as_ref().map(ProfileJson::from),
        profile_error,
        cohomology,
        certificate,
        family: family.map(|f| FamilyJson { case: f.spec.case, i: f.i, j: f.j, m: f.m, h: f.h, lambda: f.lambda }),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHitJson {
    pub generators: Vec<RawMat2>,
    pub group_order: usize,
    pub h1loc: Vec<u64>,
    pub certificate: CertificateJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReportJson {
    pub p: u64,
    pub n: u32,
    pub shape: Shape,
    pub candidates: usize,
    pub distinct_groups: usize,
    pub hits: Vec<SearchHitJson>,
}

impl From<&SearchReport> for SearchReportJson {
    fn from(r: &SearchReport) -> Self {
        SearchReportJson {
            p: r.p,
            n: r.n,
            shape: r.shape,
            candidates: r.candidates,
            distinct_groups: r.distinct_groups,
            hits: r
                .hits
                .iter()
                .map(|h| SearchHitJson {
                    generators: h.generators.iter().map(RawMat2::from).collect(),
                    group_order: h.group_order,
                    h1loc: h.h1loc_structure.clone(),
                    certificate: CertificateJson::new(&h.representative, &h.certificate),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, FamilySpec};

    #[test]
    fn input_validation() {
        assert!(matches!(GroupInput::from_json("{"), Err(InputError::Json(_))));
        let bad = GroupInput::from_json(r#"{"p":5,"n":2,"generators":[[[25,0],[0,1]]]}"#).unwrap();
        assert_eq!(bad.matrices().unwrap_err(), InputError::EntryOutOfRange { index: 0, value: 25, modulus: 25 });
        let composite = GroupInput::from_json(r#"{"p":6,"n":2,"generators":[]}"#).unwrap();
        assert!(matches!(composite.matrices(), Err(InputError::Modulus(_))));
    }

    #[test]
    fn family_report_roundtrips_as_input() {
        let f = build_family(&FamilySpec::new(5, 3, FamilyCase::N3JEqM)).unwrap();
        let r = analyze(&f.group, Backend::Generators, 0, Some(&f)).unwrap();
        assert!(r.certificate.as_ref().unwrap().valid);
        let json = serde_json::to_string(&r).unwrap();
        let input = GroupInput::from_json(&json).unwrap();
        let g = close_input(&input, 1 << 20).unwrap();
        let r2 = analyze(&g, Backend::Generators, 0, None).unwrap();
        assert_eq!(r.cohomology, r2.cohomology);
        assert_eq!(r.group_order, r2.group_order);
    }

    #[test]
    fn backends_agree_on_small_group() {
        let input = GroupInput::from_json(r#"{"p":5,"n":2,"generators":[[[1,0],[5,1]],[[6,0],[0,6]],[[1,0],[0,7]]]}"#).unwrap();
        let g = close_input(&input, 10_000).unwrap();
        let a = analyze(&g, Backend::Generators, 1 << 16, None).unwrap();
        let b = analyze(&g, Backend::Oracle, 1 << 16, None).unwrap();
        assert_eq!((a.cohomology.h1, a.cohomology.h1loc), (b.cohomology.h1, b.cohomology.h1loc));
    }
}
