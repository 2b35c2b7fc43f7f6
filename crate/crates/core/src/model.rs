//! Measures, densities, tests and priors on a finite sample space.
//!
//! Every hypothesis is stored as a density with respect to a strictly
//! positive reference measure `R`, so expectations reduce to the finite sum
//! `E^R[f Z] = sum_w R(w) f(w) Z(w)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const WEIGHT_SUM_TOL: f64 = 1e-12;
pub const DENSITY_MASS_TOL: f64 = 1e-9;
pub const DUPLICATE_TOL: f64 = 1e-12;

fn check_finite(field: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            field: field.to_string(),
            index,
        }),
        None => Ok(()),
    }
}

fn check_len(field: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            field: field.to_string(),
            expected,
            found,
        });
    }
    Ok(())
}

/// The finite sample space with its dominating probability measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceMeasure {
    atoms: Vec<String>,
    weights: Vec<f64>,
}

impl ReferenceMeasure {
    pub fn new(atoms: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        check_len("R", atoms.len(), weights.len())?;
        if atoms.is_empty() {
            return Err(Error::DimensionMismatch {
                field: "atoms".into(),
                expected: 1,
                found: 0,
            });
        }
        check_finite("R", &weights)?;
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| **w <= 0.0) {
            return Err(Error::NonPositiveWeight { index, value });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::UnnormalizedWeights { total });
        }
        let mut seen = std::collections::HashSet::new();
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::DuplicateAtom { label: a.clone() });
            }
        }
        Ok(Self { atoms, weights })
    }

    /// Uniform measure on `n` atoms labelled `w1..wn`.
    pub fn uniform(n: usize) -> Self {
        let atoms = (1..=n).map(|i| format!("w{i}")).collect();
        // sum of n copies of 1/n can miss 1 by a few ulps, well inside tolerance
        Self {
            atoms,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Builds a measure from unnormalized positive weights, rescaling to mass 1.
    pub fn from_unnormalized(atoms: Vec<String>, raw: Vec<f64>) -> Result<Self> {
        check_len("R", atoms.len(), raw.len())?;
        check_finite("R", &raw)?;
        if let Some((index, &value)) = raw.iter().enumerate().find(|(_, w)| **w <= 0.0) {
            return Err(Error::NonPositiveWeight { index, value });
        }
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        Self::new(atoms, weights)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E^R[f]` for a per-atom function `f`.
    pub fn expect(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(r, v)| r * v).sum()
    }

    /// `E^R[f g]`.
    pub fn expect_product(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(r, (a, b))| r * a * b)
            .sum()
    }

    /// R-mass of the listed atoms.
    pub fn mass_of(&self, atoms: impl IntoIterator<Item = usize>) -> f64 {
        atoms.into_iter().map(|i| self.weights[i]).sum()
    }
}

/// A probability density with respect to the reference measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Density {
    values: Vec<f64>,
}

impl Density {
    pub fn new(reference: &ReferenceMeasure, values: Vec<f64>) -> Result<Self> {
        Self::labelled(reference, values, "density")
    }

    /// Like [`Density::new`], naming `field` in any error.
    ///
    /// After validation the values are rescaled so that `E^R[Z] = 1` holds to
    /// rounding.
    pub fn labelled(reference: &ReferenceMeasure, values: Vec<f64>, field: &str) -> Result<Self> {
        check_len(field, reference.len(), values.len())?;
        check_finite(field, &values)?;
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeDensity {
                field: field.to_string(),
                index,
                value,
            });
        }
        let mass = reference.expect(&values);
        if (mass - 1.0).abs() > DENSITY_MASS_TOL {
            return Err(Error::UnnormalizedDensity {
                field: field.to_string(),
                mass,
            });
        }
        let values = values.into_iter().map(|v| v / mass).collect();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Null,
    Alternative,
}

impl Side {
    fn field(self) -> &'static str {
        match self {
            Side::Null => "null",
            Side::Alternative => "alt",
        }
    }
}

/// A finite, duplicate-free list of densities on one side of the test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisFamily {
    side: Side,
    members: Vec<Density>,
}

impl HypothesisFamily {
    pub fn new(side: Side, members: Vec<Density>) -> Result<Self> {
        let field = side.field();
        if members.is_empty() {
            return Err(Error::EmptyFamily {
                field: field.to_string(),
            });
        }
        let n = members[0].len();
        for (i, m) in members.iter().enumerate() {
            check_len(&format!("{field}[{i}]"), n, m.len())?;
        }
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let dist = members[i]
                    .values()
                    .iter()
                    .zip(members[j].values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if dist <= DUPLICATE_TOL {
                    return Err(Error::DuplicateMember {
                        field: field.to_string(),
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(Self { side, members })
    }

    /// Validates raw per-atom arrays against `reference` and builds the family.
    pub fn from_values(
        reference: &ReferenceMeasure,
        side: Side,
        members: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let field = side.field();
        let members = members
            .into_iter()
            .enumerate()
            .map(|(i, v)| Density::labelled(reference, v, &format!("{field}[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(side, members)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn members(&self) -> &[Density] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn atom_count(&self) -> usize {
        self.members[0].len()
    }

    /// Pointwise `sum_j w_j Z_j`.
    pub fn combine(&self, weights: &[f64]) -> Result<Vec<f64>> {
        check_len(
            &format!("{}.weights", self.side.field()),
            self.len(),
            weights.len(),
        )?;
        let mut out = vec![0.0; self.atom_count()];
        for (w, m) in weights.iter().zip(&self.members) {
            if *w == 0.0 {
                continue;
            }
            for (o, z) in out.iter_mut().zip(m.values()) {
                *o += w * z;
            }
        }
        Ok(out)
    }
}

/// A randomized test: rejection probability per atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RandomizedTest {
    values: Vec<f64>,
}

impl RandomizedTest {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite("phi", &values)?;
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::TestOutOfRange {
                field: "phi".into(),
                index,
                value,
            });
        }
        Ok(Self { values })
    }

    /// Clamps values into `[0, 1]`; used for solver output carrying rounding noise.
    pub fn clamped(values: Vec<f64>) -> Self {
        Self {
            values: values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        }
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A finite measure on the null family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prior {
    weights: Vec<f64>,
    total_mass: f64,
}

impl Prior {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_finite("prior", &weights)?;
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| **w < 0.0) {
            return Err(Error::NegativePriorWeight {
                field: "prior".into(),
                index,
                value,
            });
        }
        let total_mass = weights.iter().sum();
        Ok(Self {
            weights,
            total_mass,
        })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            weights: vec![0.0; n],
            total_mass: 0.0,
        }
    }

    /// Unit mass scaled by `mass` on member `index` of an `n`-member family.
    pub fn point(n: usize, index: usize, mass: f64) -> Result<Self> {
        let mut w = vec![0.0; n];
        w[index] = mass;
        Self::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Significance level: one number, or one level per null member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Scalar(f64),
    PerMember(Vec<f64>),
}

impl Alpha {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            Alpha::Scalar(a) => Some(*a),
            Alpha::PerMember(_) => None,
        }
    }

    pub fn scaled(&self, s: f64) -> Alpha {
        match self {
            Alpha::Scalar(a) => Alpha::Scalar(a * s),
            Alpha::PerMember(v) => Alpha::PerMember(v.iter().map(|a| a * s).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestingProblem {
    reference: ReferenceMeasure,
    null: HypothesisFamily,
    alt: HypothesisFamily,
    alpha: Alpha,
    #[serde(skip)]
    levels: Vec<f64>,
}

impl TestingProblem {
    pub fn new(
        reference: ReferenceMeasure,
        null: HypothesisFamily,
        alt: HypothesisFamily,
        alpha: Alpha,
    ) -> Result<Self> {
        check_len("null", reference.len(), null.atom_count())?;
        check_len("alt", reference.len(), alt.atom_count())?;
        if null.side() != Side::Null || alt.side() != Side::Alternative {
            return Err(Error::Internal("families passed with swapped roles".into()));
        }
        let levels = match &alpha {
            Alpha::Scalar(a) => vec![*a; null.len()],
            Alpha::PerMember(v) => {
                check_len("alpha", null.len(), v.len())?;
                v.clone()
            }
        };
        for (i, &a) in levels.iter().enumerate() {
            if !(a > 0.0 && a < 1.0) {
                let field = match alpha {
                    Alpha::Scalar(_) => "alpha".to_string(),
                    Alpha::PerMember(_) => format!("alpha[{i}]"),
                };
                return Err(Error::AlphaOutOfRange { field, value: a });
            }
        }
        Ok(Self {
            reference,
            null,
            alt,
            alpha,
            levels,
        })
    }

    /// Convenience constructor from raw arrays with a scalar level.
    pub fn from_arrays(
        weights: Vec<f64>,
        null: Vec<Vec<f64>>,
        alt: Vec<Vec<f64>>,
        alpha: f64,
    ) -> Result<Self> {
        let atoms = (1..=weights.len()).map(|i| format!("w{i}")).collect();
        let reference = ReferenceMeasure::new(atoms, weights)?;
        let null = HypothesisFamily::from_values(&reference, Side::Null, null)?;
        let alt = HypothesisFamily::from_values(&reference, Side::Alternative, alt)?;
        Self::new(reference, null, alt, Alpha::Scalar(alpha))
    }

    pub fn reference(&self) -> &ReferenceMeasure {
        &self.reference
    }

    pub fn null(&self) -> &HypothesisFamily {
        &self.null
    }

    pub fn alt(&self) -> &HypothesisFamily {
        &self.alt
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    /// Level per null member (a scalar level broadcast).
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn atom_count(&self) -> usize {
        self.reference.len()
    }

    pub fn with_alpha(&self, alpha: Alpha) -> Result<Self> {
        Self::new(
            self.reference.clone(),
            self.null.clone(),
            self.alt.clone(),
            alpha,
        )
    }
}

/// Raw problem as read from a problem file, before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(default)]
    pub atoms: Vec<String>,
    #[serde(rename = "R", default)]
    pub weights: Vec<f64>,
    #[serde(default)]
    pub null: Vec<Vec<f64>>,
    #[serde(default)]
    pub alt: Vec<Vec<f64>>,
    pub alpha: Alpha,
}

/// Validates a raw problem.
///
/// Atoms with zero reference weight are dropped (with a warning) together with
/// the corresponding density entries; atom order is otherwise preserved.
pub fn validate_problem(raw: &ProblemSpec) -> Result<TestingProblem> {
    let n = raw.weights.len();
    let atoms = if raw.atoms.is_empty() {
        (1..=n).map(|i| format!("w{i}")).collect()
    } else {
        check_len("atoms", n, raw.atoms.len())?;
        raw.atoms.clone()
    };
    for (field, fam) in [("null", &raw.null), ("alt", &raw.alt)] {
        for (i, z) in fam.iter().enumerate() {
            check_len(&format!("{field}[{i}]"), n, z.len())?;
        }
    }
    check_finite("R", &raw.weights)?;
    let keep: Vec<usize> = (0..n).filter(|&i| raw.weights[i] != 0.0).collect();
    if keep.len() < n {
        let dropped: Vec<&str> = (0..n)
            .filter(|&i| raw.weights[i] == 0.0)
            .map(|i| atoms[i].as_str())
            .collect();
        log::warn!("dropping zero-weight atoms: {}", dropped.join(", "));
    }
    let pick = |v: &Vec<f64>| keep.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let reference = ReferenceMeasure::new(
        keep.iter().map(|&i| atoms[i].clone()).collect(),
        pick(&raw.weights),
    )?;
    let null =
        HypothesisFamily::from_values(&reference, Side::Null, raw.null.iter().map(pick).collect())?;
    let alt = HypothesisFamily::from_values(
        &reference,
        Side::Alternative,
        raw.alt.iter().map(pick).collect(),
    )?;
    TestingProblem::new(reference, null, alt, raw.alpha.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub per_member: Vec<f64>,
    /// Worst-case rejection probability over the null family.
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerReport {
    pub per_member: Vec<f64>,
    /// Smallest rejection probability over the alternative family.
    pub power: f64,
}

fn family_expectations(
    problem: &TestingProblem,
    family: &HypothesisFamily,
    phi: &RandomizedTest,
) -> Result<Vec<f64>> {
    check_len("phi", problem.atom_count(), phi.len())?;
    Ok(family
        .members()
        .iter()
        .map(|z| problem.reference().expect_product(phi.values(), z.values()))
        .collect())
}

pub fn evaluate_size(problem: &TestingProblem, phi: &RandomizedTest) -> Result<SizeReport> {
    let per_member = family_expectations(problem, problem.null(), phi)?;
    let size = per_member.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SizeReport { per_member, size })
}

pub fn evaluate_power(problem: &TestingProblem, phi: &RandomizedTest) -> Result<PowerReport> {
    let per_member = family_expectations(problem, problem.alt(), phi)?;
    let power = per_member.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PowerReport { per_member, power })
}

/// The prior-weighted null mixture `sum_i lambda_i Z_{P_i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mixture {
    pub values: Vec<f64>,
    pub total_mass: f64,
    /// `values / total_mass`, absent for the zero prior.
    pub normalized: Option<Vec<f64>>,
}

pub fn mixture_density(null: &HypothesisFamily, prior: &Prior) -> Result<Mixture> {
    let values = null.combine(prior.weights())?;
    let total_mass = prior.total_mass();
    let normalized =
        (total_mass > 0.0).then(|| values.iter().map(|v| v / total_mass).collect::<Vec<_>>());
    Ok(Mixture {
        values,
        total_mass,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1() -> TestingProblem {
        TestingProblem::from_arrays(
            vec![1.0 / 3.0; 3],
            vec![vec![1.5, 0.9, 0.6]],
            vec![vec![0.6, 0.9, 1.5]],
            0.3,
        )
        .unwrap()
    }

    #[test]
    fn one_atom_problem_is_accepted() {
        let p = TestingProblem::from_arrays(vec![1.0], vec![vec![1.0]], vec![vec![1.0]], 0.3);
        assert!(p.is_ok());
    }

    #[test]
    fn alpha_boundaries_are_rejected() {
        for a in [0.0, 1.0, -0.1, 1.5] {
            let err = TestingProblem::from_arrays(vec![1.0], vec![vec![1.0]], vec![vec![1.0]], a)
                .unwrap_err();
            assert!(matches!(err, Error::AlphaOutOfRange { .. }), "{a}: {err}");
        }
    }

    #[test]
    fn per_member_alpha_names_offending_index() {
        let raw = ProblemSpec {
            atoms: vec![],
            weights: vec![0.5, 0.5],
            null: vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            alt: vec![vec![1.0, 1.0]],
            alpha: Alpha::PerMember(vec![0.1, 1.0]),
        };
        match validate_problem(&raw).unwrap_err() {
            Error::AlphaOutOfRange { field, .. } => assert_eq!(field, "alpha[1]"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unnormalized_density_reports_mass() {
        let err = TestingProblem::from_arrays(
            vec![0.5, 0.5],
            vec![vec![2.0, 0.5]],
            vec![vec![1.0, 1.0]],
            0.1,
        )
        .unwrap_err();
        match err {
            Error::UnnormalizedDensity { field, mass } => {
                assert_eq!(field, "null[0]");
                assert!((mass - 1.25).abs() < 1e-15);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn negative_density_and_empty_family() {
        let err = TestingProblem::from_arrays(
            vec![0.5, 0.5],
            vec![vec![1.0, 1.0]],
            vec![vec![2.5, -0.5]],
            0.1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeDensity { index: 1, .. }));
        let err =
            TestingProblem::from_arrays(vec![0.5, 0.5], vec![], vec![vec![1.0, 1.0]], 0.1)
                .unwrap_err();
        assert!(matches!(err, Error::EmptyFamily { .. }));
    }

    #[test]
    fn dimension_mismatch_names_member() {
        let err = TestingProblem::from_arrays(
            vec![0.5, 0.5],
            vec![vec![1.0, 1.0]],
            vec![vec![1.0, 1.0], vec![1.0]],
            0.1,
        )
        .unwrap_err();
        match err {
            Error::DimensionMismatch { field, .. } => assert_eq!(field, "alt[1]"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn duplicates_rejected() {
        let err = TestingProblem::from_arrays(
            vec![0.5, 0.5],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![vec![2.0, 0.0]],
            0.1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateMember { first: 0, second: 1, .. }));
    }

    #[test]
    fn zero_weight_atoms_are_dropped() {
        let raw = ProblemSpec {
            atoms: vec!["a".into(), "b".into(), "c".into()],
            weights: vec![0.5, 0.0, 0.5],
            null: vec![vec![2.0, 7.0, 0.0]],
            alt: vec![vec![0.0, 3.0, 2.0]],
            alpha: Alpha::Scalar(0.1),
        };
        let p = validate_problem(&raw).unwrap();
        assert_eq!(p.reference().atoms(), &["a".to_string(), "c".to_string()]);
        assert_eq!(p.null().members()[0].values(), &[2.0, 0.0]);
    }

    #[test]
    fn nonpositive_reference_weight_rejected() {
        let err = ReferenceMeasure::new(vec!["a".into(), "b".into()], vec![1.2, -0.2]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { index: 1, .. }));
    }

    #[test]
    fn size_examples() {
        let p = d1();
        let phi = RandomizedTest::new(vec![1.0, 1.0 / 3.0, 0.0]).unwrap();
        let s = evaluate_size(&p, &phi).unwrap();
        assert!((s.size - 0.6).abs() < 1e-15, "reversed test has size 0.6");

        let phi = RandomizedTest::new(vec![0.0, 1.0 / 3.0, 1.0]).unwrap();
        assert!((evaluate_size(&p, &phi).unwrap().size - 0.3).abs() < 1e-15);

        let t2 =
            TestingProblem::from_arrays(vec![0.5, 0.5], vec![vec![2.0, 0.0]], vec![vec![0.0, 2.0]], 0.1)
                .unwrap();
        let phi = RandomizedTest::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(evaluate_size(&t2, &phi).unwrap().size, 0.0);
    }

    #[test]
    fn size_of_three_atom_example() {
        // (1/3)(1.5*1 + 0.9/3 + 0)
        let p = TestingProblem::from_arrays(
            vec![1.0 / 3.0; 3],
            vec![vec![1.5, 0.9, 0.6]],
            vec![vec![0.6, 0.9, 1.5]],
            0.3,
        )
        .unwrap();
        let phi = RandomizedTest::new(vec![1.0, 1.0 / 3.0, 0.0]).unwrap();
        let expected = (1.5 + 0.9 / 3.0) / 3.0;
        assert!((evaluate_size(&p, &phi).unwrap().size - expected).abs() < 1e-15);
    }

    #[test]
    fn power_examples() {
        let p = d1();
        assert!((evaluate_power(&p, &RandomizedTest::constant(3, 1.0).unwrap()).unwrap().power - 1.0).abs() < 1e-15);
        assert_eq!(evaluate_power(&p, &RandomizedTest::constant(3, 0.0).unwrap()).unwrap().power, 0.0);
        let phi = RandomizedTest::new(vec![0.0, 1.0 / 3.0, 1.0]).unwrap();
        assert!((evaluate_power(&p, &phi).unwrap().power - 0.6).abs() < 1e-15);
    }

    #[test]
    fn mixture_examples() {
        let r = ReferenceMeasure::uniform(2);
        let fam =
            HypothesisFamily::from_values(&r, Side::Null, vec![vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let m = mixture_density(&fam, &Prior::new(vec![0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(m.values, vec![1.0, 1.0]);
        let m = mixture_density(&fam, &Prior::zero(2)).unwrap();
        assert_eq!(m.values, vec![0.0, 0.0]);
        assert!(m.normalized.is_none());

        let single = HypothesisFamily::from_values(&r, Side::Null, vec![vec![1.5, 0.5]]).unwrap();
        let m = mixture_density(&single, &Prior::new(vec![1.0]).unwrap()).unwrap();
        assert_eq!(m.values, vec![1.5, 0.5]);

        let err = mixture_density(&fam, &Prior::new(vec![1.0]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn problem_file_field_names() {
        let json = r#"{"atoms":["a","b"],"R":[0.5,0.5],"null":[[2,0]],"alt":[[0,2]],"alpha":0.1}"#;
        let raw: ProblemSpec = serde_json::from_str(json).unwrap();
        let p = validate_problem(&raw).unwrap();
        assert_eq!(p.levels(), &[0.1]);
        let json = r#"{"R":[0.5,0.5],"null":[[2,0],[1,1]],"alt":[[0,2]],"alpha":[0.1,0.2]}"#;
        let raw: ProblemSpec = serde_json::from_str(json).unwrap();
        assert_eq!(validate_problem(&raw).unwrap().levels(), &[0.1, 0.2]);
    }
}
