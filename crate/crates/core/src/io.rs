//! JSON module files and check reports.
//!
//! Canonical output sorts object keys and prints polynomials in graded order,
//! so `to_canonical_json(parse(text)) == text` for every canonical `text`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::comodule::{CoalgebraId, Comodule};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::ga::GaUFamily;
use crate::linalg::Matrix;
use crate::poly::{MultiPoly, PolyMatrix};
use crate::support::RationalModule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    Ga,
    UN,
    GaTrunc,
    UNTrunc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub kind: GroupKind,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
}

impl GroupSpec {
    pub fn coalgebra(&self) -> Result<CoalgebraId> {
        let need_n = || self.n.ok_or_else(|| Error::Parse("group needs \"N\"".into()));
        let need_r = || self.r.ok_or_else(|| Error::Parse("group needs \"r\"".into()));
        let id = match self.kind {
            GroupKind::Ga => CoalgebraId::GaPoly,
            GroupKind::UN => CoalgebraId::UNPoly(need_n()?),
            GroupKind::GaTrunc => CoalgebraId::GaTrunc(need_r()?),
            GroupKind::UNTrunc => CoalgebraId::UNTrunc(need_n()?, need_r()?),
        };
        id.check()?;
        Ok(id)
    }

    pub fn of(id: CoalgebraId) -> Result<Self> {
        let (kind, n, r) = match id {
            CoalgebraId::GaPoly => (GroupKind::Ga, None, None),
            CoalgebraId::UNPoly(n) => (GroupKind::UN, Some(n), None),
            CoalgebraId::GaTrunc(r) => (GroupKind::GaTrunc, None, Some(r)),
            CoalgebraId::UNTrunc(n, r) => (GroupKind::UNTrunc, Some(n), Some(r)),
            other => return Err(Error::UnsupportedCoalgebra(other.to_string())),
        };
        Ok(GroupSpec { kind, n, r })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleBody {
    Coaction {
        dim: usize,
        coaction: Vec<Vec<String>>,
    },
    Family {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        u_mats: BTreeMap<String, Vec<Vec<i64>>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    pub p: u32,
    pub group: GroupSpec,
    pub module: ModuleBody,
}

fn canonical<T: Serialize>(value: &T) -> String {
    // serde_json::Map is ordered by key unless `preserve_order` is enabled.
    let v: Value = serde_json::to_value(value).expect("plain data serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

impl ModuleFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_canonical_json(&self) -> String {
        canonical(self)
    }

    /// Builds and validates the module the file describes.
    pub fn load(&self) -> Result<RationalModule> {
        let field = PrimeField::new(self.p)?;
        let coalgebra = self.group.coalgebra()?;
        match &self.module {
            ModuleBody::Coaction { dim, coaction } => {
                if coaction.len() != *dim || coaction.iter().any(|row| row.len() != *dim) {
                    return Err(Error::DimensionMismatch(format!("coaction must be {dim} x {dim}")));
                }
                let mut entries = PolyMatrix::zeros(&field, *dim, *dim);
                for (j, row) in coaction.iter().enumerate() {
                    for (i, s) in row.iter().enumerate() {
                        entries.set(j, i, MultiPoly::parse(&field, s)?);
                    }
                }
                Ok(RationalModule::Comodule(Comodule::validated(coalgebra, entries)?))
            }
            ModuleBody::Family { dim, u_mats } => {
                if coalgebra != CoalgebraId::GaPoly {
                    return Err(Error::Parse("\"u_mats\" requires group kind \"Ga\"".into()));
                }
                let mut mats = BTreeMap::new();
                for (s, rows) in u_mats {
                    let s: u32 = s
                        .parse()
                        .map_err(|_| Error::Parse(format!("u_mats key {s:?} is not an index")))?;
                    mats.insert(s, Matrix::from_rows(&field, rows)?);
                }
                let dim = match (dim, mats.values().next()) {
                    (Some(d), _) => *d,
                    (None, Some(m)) => m.rows(),
                    (None, None) => return Err(Error::Parse("empty \"u_mats\" needs \"dim\"".into())),
                };
                Ok(RationalModule::Family(GaUFamily::new(&field, dim, mats)?))
            }
        }
    }

    pub fn from_comodule(m: &Comodule) -> Result<Self> {
        let coaction = (0..m.dim())
            .map(|j| (0..m.dim()).map(|i| m.entry(j, i).to_string()).collect())
            .collect();
        Ok(ModuleFile {
            p: m.field().p(),
            group: GroupSpec::of(m.coalgebra())?,
            module: ModuleBody::Coaction { dim: m.dim(), coaction },
        })
    }

    pub fn from_family(f: &GaUFamily) -> Self {
        let u_mats = f
            .u_mats()
            .iter()
            .map(|(s, m)| {
                let rows = m.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect();
                (s.to_string(), rows)
            })
            .collect();
        ModuleFile {
            p: f.field().p(),
            group: GroupSpec::of(CoalgebraId::GaPoly).expect("Ga"),
            module: ModuleBody::Family { dim: Some(f.dim()), u_mats },
        }
    }

    pub fn from_module(m: &RationalModule) -> Result<Self> {
        match m {
            RationalModule::Comodule(c) => Self::from_comodule(c),
            RationalModule::Family(f) => Ok(Self::from_family(f)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    InSupport,
    Free,
}

/// One record of a report; `paper_ref` names the property that was checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub inputs: Value,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub paper_ref: String,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, property: impl Into<String>, inputs: Value, verdict: Verdict) -> Self {
        CheckRecord {
            check: check.into(),
            inputs,
            verdict,
            witness: None,
            paper_ref: property.into(),
        }
    }

    pub fn pass_if(check: impl Into<String>, property: impl Into<String>, inputs: Value, ok: bool) -> Self {
        Self::new(check, property, inputs, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub records: Vec<CheckRecord>,
}

impl ReportFile {
    /// Records sorted by check id; ties keep insertion order.
    pub fn new(mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| a.check.cmp(&b.check));
        ReportFile { records }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn to_canonical_json(&self) -> String {
        canonical(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::{random_family, y_r_module};
    use crate::unipotent::{natural_rep, sym_square_rep, UNContext};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde_json::json;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    const NATURAL_U3: &str = r#"{
  "group": {
    "N": 3,
    "kind": "UN"
  },
  "module": {
    "coaction": [
      [
        "1",
        "x1_2",
        "x1_3"
      ],
      [
        "0",
        "1",
        "x2_3"
      ],
      [
        "0",
        "0",
        "1"
      ]
    ],
    "dim": 3
  },
  "p": 3
}
"#;

    #[test]
    fn natural_file_roundtrip() {
        let file = ModuleFile::parse(NATURAL_U3).unwrap();
        assert_eq!(file.to_canonical_json(), NATURAL_U3);
        let RationalModule::Comodule(m) = file.load().unwrap() else { panic!() };
        assert_eq!(m, natural_rep(&UNContext::new(&f(3), 3).unwrap()));
    }

    #[test]
    fn family_file_roundtrip() {
        let y = y_r_module(&f(5), 3);
        let text = ModuleFile::from_family(&y).to_canonical_json();
        let file = ModuleFile::parse(&text).unwrap();
        assert_eq!(file.to_canonical_json(), text);
        assert_eq!(file.load().unwrap(), RationalModule::Family(y));
        let bare = r#"{"p": 3, "group": {"kind": "Ga"}, "module": {"u_mats": {"0": [[0,0],[1,0]]}}}"#;
        assert_eq!(ModuleFile::parse(bare).unwrap().load().unwrap().dim(), 2);
    }

    #[test]
    fn rejects_bad_files() {
        let corrupted = NATURAL_U3.replacen("\"1\",\n        \"x2_3\"", "\"2\",\n        \"x2_3\"", 1);
        let err = ModuleFile::parse(&corrupted).unwrap().load().unwrap_err();
        assert!(matches!(err, Error::NotComodule(_)), "{err}");
        assert!(err.to_string().contains("counit violation"));
        assert!(matches!(ModuleFile::parse("{\"p\": 3}"), Err(Error::Parse(_))));
        let short = r#"{"p": 3, "group": {"kind": "UN", "N": 2}, "module": {"dim": 2, "coaction": [["1"]]}}"#;
        assert!(matches!(ModuleFile::parse(short).unwrap().load(), Err(Error::DimensionMismatch(_))));
        let no_n = r#"{"p": 3, "group": {"kind": "UN"}, "module": {"dim": 1, "coaction": [["1"]]}}"#;
        assert!(matches!(ModuleFile::parse(no_n).unwrap().load(), Err(Error::Parse(_))));
        let not_prime = NATURAL_U3.replace("\"p\": 3", "\"p\": 4");
        assert!(ModuleFile::parse(&not_prime).unwrap().load().is_err());
    }

    #[test]
    fn report_is_sorted_and_stable() {
        let records = vec![
            CheckRecord::pass_if("b", "prop-b", json!({"n": 1}), true),
            CheckRecord::pass_if("a", "prop-a", json!({}), false).with_witness(json!([1, 2])),
        ];
        let report = ReportFile::new(records);
        assert_eq!(report.records[0].check, "a");
        assert!(!report.all_pass());
        let text = report.to_canonical_json();
        assert!(text.contains("\"verdict\": \"fail\""));
        assert_eq!(ReportFile::parse(&text).unwrap().to_canonical_json(), text);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn canonical_roundtrip(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fam = random_family(&f(p), 3, 2, &mut rng);
            for m in [
                RationalModule::Family(fam.clone()),
                RationalModule::Comodule(fam.to_comodule()),
                RationalModule::Comodule(sym_square_rep(&UNContext::new(&f(p), 3).unwrap())),
            ] {
                let text = ModuleFile::from_module(&m).unwrap().to_canonical_json();
                let parsed = ModuleFile::parse(&text).unwrap();
                prop_assert_eq!(parsed.to_canonical_json(), text);
                prop_assert_eq!(parsed.load().unwrap(), m);
            }
        }
    }
}
