//! Schema-1 instance files: parsing, validation, emission, and conversion
//! into the core library's types. Complex numbers are [re, im] pairs and
//! matrices are row-major; `parse(emit(x)) == x` bit-exactly.

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use interlace_core::{covariances, CVec, CovarianceList, HermitianMatrix, RandomVectorSpec, C64};

/// A complex number as an [re, im] pair.
pub type ComplexPair = [f64; 2];

/// One atom of a finitely supported random vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub vector: Vec<ComplexPair>,
    pub prob: f64,
}

/// A finitely supported random vector: atoms with probabilities summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomVectorJson {
    pub atoms: Vec<AtomJson>,
}

/// Which payload field an instance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Vectors,
    RandomVectors,
    Matrix,
    Covariances,
}

/// A schema-1 instance: exactly the payload field named by `kind` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<ComplexPair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_vectors: Option<Vec<RandomVectorJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ComplexPair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariances: Option<Vec<Vec<Vec<ComplexPair>>>>,
}

/// Probabilities of each random vector must sum to 1 within this.
pub const PROB_SUM_TOL: f64 = 1e-9;

fn schema_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn cx(pair: ComplexPair) -> C64 {
    C64::new(pair[0], pair[1])
}

fn check_finite(pairs: &[ComplexPair], what: &str) -> Result<(), CliError> {
    for p in pairs {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(schema_err(format!("{what} contains a non-finite entry")));
        }
    }
    Ok(())
}

impl InstanceFile {
    /// Parse and validate a schema-1 JSON document.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let instance: InstanceFile = serde_json::from_str(text)
            .map_err(|e| schema_err(format!("invalid instance JSON: {e}")))?;
        instance.validate()?;
        Ok(instance)
    }

    /// Serialize back to JSON. Floats use the shortest round-tripping form,
    /// so parsing the result reproduces this instance bit-exactly.
    pub fn emit(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instance serializes");
        text.push('\n');
        text
    }

    /// Schema checks: version, payload/kind agreement, consistent dimensions,
    /// finite entries, probabilities summing to 1.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != "1" {
            return Err(schema_err(format!(
                "unsupported schema_version {:?} (expected \"1\")",
                self.schema_version
            )));
        }
        let present = [
            ("vectors", self.vectors.is_some(), Kind::Vectors),
            (
                "random_vectors",
                self.random_vectors.is_some(),
                Kind::RandomVectors,
            ),
            ("matrix", self.matrix.is_some(), Kind::Matrix),
            ("covariances", self.covariances.is_some(), Kind::Covariances),
        ];
        for (name, is_set, kind) in present {
            if is_set != (kind == self.kind) {
                return Err(schema_err(format!(
                    "kind and payload disagree: field '{name}' must be present \
                     exactly when kind = {name}"
                )));
            }
        }
        match self.kind {
            Kind::Vectors => {
                let vs = self.vectors.as_ref().unwrap();
                let d = common_dim(vs.iter().map(Vec::len), "vectors")?;
                for v in vs {
                    check_finite(v, "vectors")?;
                }
                let _ = d;
            }
            Kind::RandomVectors => {
                let specs = self.random_vectors.as_ref().unwrap();
                if specs.is_empty() {
                    return Err(schema_err("random_vectors is empty"));
                }
                let mut dims = Vec::new();
                for (i, spec) in specs.iter().enumerate() {
                    if spec.atoms.is_empty() {
                        return Err(schema_err(format!("random vector {i} has no atoms")));
                    }
                    let mut total = 0.0;
                    for atom in &spec.atoms {
                        check_finite(&atom.vector, "random_vectors")?;
                        if !atom.prob.is_finite() || atom.prob < 0.0 {
                            return Err(schema_err(format!(
                                "random vector {i} has an invalid probability {}",
                                atom.prob
                            )));
                        }
                        dims.push(atom.vector.len());
                        total += atom.prob;
                    }
                    if (total - 1.0).abs() > PROB_SUM_TOL {
                        return Err(schema_err(format!(
                            "probabilities of random vector {i} sum to {total}, not 1"
                        )));
                    }
                }
                common_dim(dims.into_iter(), "random_vectors")?;
            }
            Kind::Matrix => {
                let rows = self.matrix.as_ref().unwrap();
                let n = rows.len();
                if n == 0 {
                    return Err(schema_err("matrix is empty"));
                }
                for row in rows {
                    if row.len() != n {
                        return Err(schema_err(format!(
                            "matrix is not square: {n} rows but a row of length {}",
                            row.len()
                        )));
                    }
                    check_finite(row, "matrix")?;
                }
            }
            Kind::Covariances => {
                let mats = self.covariances.as_ref().unwrap();
                if mats.is_empty() {
                    return Err(schema_err("covariances is empty"));
                }
                let d = mats[0].len();
                for (i, mat) in mats.iter().enumerate() {
                    if mat.len() != d {
                        return Err(schema_err(format!(
                            "covariance {i} is {}x? but the first is {d}x{d}",
                            mat.len()
                        )));
                    }
                    for row in mat {
                        if row.len() != d {
                            return Err(schema_err(format!(
                                "covariance {i} has a row of length {} (expected {d})",
                                row.len()
                            )));
                        }
                        check_finite(row, "covariances")?;
                    }
                }
            }
        }
        Ok(())
    }

    /// The `vectors` payload as core vectors.
    pub fn to_vectors(&self) -> Result<Vec<CVec>, CliError> {
        let vs = self.payload_vectors("vectors", &self.vectors)?;
        vs.iter()
            .map(|v| CVec::new(v.iter().copied().map(cx).collect()).map_err(Into::into))
            .collect()
    }

    /// The `random_vectors` payload as core specs.
    pub fn to_specs(&self) -> Result<Vec<RandomVectorSpec>, CliError> {
        let specs = self.payload_vectors("random_vectors", &self.random_vectors)?;
        specs
            .iter()
            .map(|spec| {
                let atoms = spec
                    .atoms
                    .iter()
                    .map(|atom| {
                        CVec::new(atom.vector.iter().copied().map(cx).collect())
                            .map(|v| (v, atom.prob))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                RandomVectorSpec::new(atoms).map_err(Into::into)
            })
            .collect()
    }

    /// The `matrix` payload as a Hermitian matrix.
    pub fn to_matrix(&self) -> Result<HermitianMatrix, CliError> {
        let rows = self.payload_vectors("matrix", &self.matrix)?;
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().copied().map(cx).collect())
            .collect();
        HermitianMatrix::from_rows(&rows).map_err(Into::into)
    }

    /// The `covariances` payload as a validated covariance list.
    pub fn to_covariances(&self) -> Result<CovarianceList, CliError> {
        let mats = self.payload_vectors("covariances", &self.covariances)?;
        let mats = mats
            .iter()
            .map(|mat| {
                let rows: Vec<Vec<C64>> = mat
                    .iter()
                    .map(|row| row.iter().copied().map(cx).collect())
                    .collect();
                HermitianMatrix::from_rows(&rows)
            })
            .collect::<Result<Vec<_>, _>>()?;
        CovarianceList::new(mats).map_err(Into::into)
    }

    /// Covariance list for commands that accept both matrix-valued kinds;
    /// returns the specs as well when the instance is random vectors.
    pub fn to_covariance_input(
        &self,
    ) -> Result<(CovarianceList, Option<Vec<RandomVectorSpec>>), CliError> {
        match self.kind {
            Kind::Covariances => Ok((self.to_covariances()?, None)),
            Kind::RandomVectors => {
                let specs = self.to_specs()?;
                let list = covariances(&specs)?;
                Ok((list, Some(specs)))
            }
            _ => Err(CliError::Precondition(
                "this command requires kind = covariances or random_vectors".into(),
            )),
        }
    }

    fn payload_vectors<'a, T>(&self, name: &str, field: &'a Option<T>) -> Result<&'a T, CliError> {
        field
            .as_ref()
            .ok_or_else(|| CliError::Precondition(format!("this command requires kind = {name}")))
    }
}

fn common_dim(mut dims: impl Iterator<Item = usize>, what: &str) -> Result<usize, CliError> {
    let first = dims
        .next()
        .ok_or_else(|| schema_err(format!("{what} is empty")))?;
    if first == 0 {
        return Err(schema_err(format!("{what} contains an empty vector")));
    }
    for d in dims {
        if d != first {
            return Err(schema_err(format!(
                "{what} mixes dimensions {first} and {d}"
            )));
        }
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vectors_instance() -> InstanceFile {
        InstanceFile {
            schema_version: "1".into(),
            kind: Kind::Vectors,
            vectors: Some(vec![
                vec![[1.0 / 3.0, -0.0], [1e-17, 2.5]],
                vec![[f64::MIN_POSITIVE, 1.0], [-3.125, 0.1 + 0.2]],
            ]),
            random_vectors: None,
            matrix: None,
            covariances: None,
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let original = vectors_instance();
        let reparsed = InstanceFile::parse(&original.emit()).unwrap();
        assert_eq!(reparsed, original);
        // Twice, to make sure emission itself is a fixed point.
        assert_eq!(InstanceFile::parse(&reparsed.emit()).unwrap(), reparsed);
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let mut bad = vectors_instance();
        bad.schema_version = "2".into();
        assert!(InstanceFile::parse(&bad.emit()).is_err());
    }

    #[test]
    fn rejects_mismatched_payload() {
        let mut bad = vectors_instance();
        bad.kind = Kind::Matrix;
        assert!(InstanceFile::parse(&bad.emit()).is_err());
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        let mut bad = vectors_instance();
        bad.vectors.as_mut().unwrap()[1].pop();
        assert!(InstanceFile::parse(&bad.emit()).is_err());
    }

    #[test]
    fn rejects_bad_probability_sum() {
        let instance = InstanceFile {
            schema_version: "1".into(),
            kind: Kind::RandomVectors,
            vectors: None,
            random_vectors: Some(vec![RandomVectorJson {
                atoms: vec![AtomJson {
                    vector: vec![[1.0, 0.0]],
                    prob: 0.5,
                }],
            }]),
            matrix: None,
            covariances: None,
        };
        assert!(InstanceFile::parse(&instance.emit()).is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = r#"{"schema_version":"1","kind":"vectors","vectors":[[[1.0,0.0]]],"extra":3}"#;
        assert!(InstanceFile::parse(text).is_err());
    }
}
