//! Ordinary and Brauer character tables: data model, loading and validation.
//!
//! The on-disk format is JSON; see `data/FORMAT.md` for the grammar. Every
//! table is validated eagerly on load and rejected on the first violated
//! invariant.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::arith::{gcd, is_prime, lcm, primes_dividing};
use crate::cyclotomic::{CycNum, Rational};

/// The Mathieu group M22 with its ordinary table and Brauer tables for p = 2, 3, 5, 7, 11.
pub const BUNDLED_M22: &str = include_str!("../data/m22.json");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read dataset {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset parse error: {0}")]
    Parse(String),
    #[error("dataset check `{check}` failed for {subject}: expected {expected}, found {actual}")]
    Invariant {
        check: &'static str,
        subject: String,
        expected: String,
        actual: String,
    },
}

fn violation(
    check: &'static str,
    subject: impl fmt::Display,
    expected: impl fmt::Display,
    actual: impl fmt::Display,
) -> DatasetError {
    DatasetError::Invariant {
        check,
        subject: subject.to_string(),
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjClass {
    pub name: String,
    pub element_order: u64,
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerMap {
    pub prime: u64,
    /// `images[c]` is the index of the class containing `g^prime` for `g` in class `c`.
    pub images: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharKind {
    Ordinary,
    Brauer(u64),
}

impl CharKind {
    /// 0 for ordinary characters, the characteristic otherwise.
    pub fn prime(self) -> u64 {
        match self {
            CharKind::Ordinary => 0,
            CharKind::Brauer(p) => p,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Character {
    pub id: String,
    pub kind: CharKind,
    pub degree: i64,
    /// Indexed by class position in the table; `None` on p-singular classes of a Brauer character.
    pub values: Vec<Option<CycNum>>,
}

impl Character {
    pub fn value(&self, class: usize) -> Option<&CycNum> {
        self.values.get(class).and_then(Option::as_ref)
    }

    /// Human label: `chi_3` for ordinary, `chi_3 (mod 2)` for Brauer characters.
    pub fn label(&self) -> String {
        match self.kind {
            CharKind::Ordinary => self.id.clone(),
            CharKind::Brauer(p) => format!("{} (mod {p})", self.id),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BrauerTable {
    pub prime: u64,
    /// Positions of the p-regular classes the characters are defined on.
    pub classes: Vec<usize>,
    pub characters: Vec<Character>,
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub group_name: String,
    pub group_order: u64,
    pub exponent: u64,
    pub classes: Vec<ConjClass>,
    pub power_maps: Vec<PowerMap>,
    pub ordinary: Vec<Character>,
    pub brauer: Vec<BrauerTable>,
}

/// Outcome of the first orthogonality check on the ordinary table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityReport {
    pub pairs_checked: usize,
    /// First failing pair: (χ id, ψ id, expected, actual inner product sum).
    pub failure: Option<(String, String, String, String)>,
}

impl OrthogonalityReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl CharacterTable {
    /// The bundled M22 dataset.
    pub fn bundled_m22() -> CharacterTable {
        CharacterTable::from_json(BUNDLED_M22).expect("bundled M22 dataset is valid")
    }

    pub fn load_dataset(path: impl AsRef<Path>) -> Result<CharacterTable, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        CharacterTable::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<CharacterTable, DatasetError> {
        let raw: RawDataset =
            serde_json::from_str(text).map_err(|e| DatasetError::Parse(e.to_string()))?;
        let table = raw.into_table()?;
        table.validate()?;
        Ok(table)
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn class_name(&self, idx: usize) -> &str {
        &self.classes[idx].name
    }

    pub fn element_order(&self, idx: usize) -> u64 {
        self.classes[idx].element_order
    }

    pub fn power_map(&self, p: u64) -> Option<&PowerMap> {
        self.power_maps.iter().find(|m| m.prime == p)
    }

    pub fn brauer_table(&self, p: u64) -> Option<&BrauerTable> {
        self.brauer.iter().find(|b| b.prime == p)
    }

    /// Class of `g^d` for `g` in class `c`, composed from the prime power maps.
    ///
    /// Every prime factor of `d` must divide the exponent (true whenever `d | exp(G)`).
    pub fn power_class(&self, c: usize, d: u64) -> usize {
        let mut cls = c;
        for (p, e) in crate::arith::factorize(d) {
            let map = self
                .power_map(p)
                .unwrap_or_else(|| panic!("no {p}-power map; {d} must divide the exponent"));
            for _ in 0..e {
                cls = map.images[cls];
            }
        }
        cls
    }

    pub fn identity_class(&self) -> usize {
        self.classes
            .iter()
            .position(|c| c.element_order == 1)
            .expect("validated table has an identity class")
    }

    /// Classes whose element order is coprime to `p` (all classes when p ∤ |G|).
    pub fn p_regular_classes(&self, p: u64) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| self.element_order(c) % p != 0)
            .collect()
    }

    /// Non-identity classes whose element order divides `k`.
    pub fn classes_of_order_dividing(&self, k: u64) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| {
                let o = self.element_order(c);
                o > 1 && k % o == 0
            })
            .collect()
    }

    /// Element orders present in the group, ascending and deduplicated.
    pub fn element_orders(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.classes.iter().map(|c| c.element_order).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Character sets usable as HeLP input: the ordinary table (p = 0) followed by each Brauer table.
    pub fn character_sets(&self) -> impl Iterator<Item = (u64, &[Character])> {
        std::iter::once((0, self.ordinary.as_slice()))
            .chain(self.brauer.iter().map(|b| (b.prime, b.characters.as_slice())))
    }

    /// First orthogonality relation Σ_C |C| χ(C) conj(ψ(C)) = |G|·δ_{χψ}, checked exactly.
    pub fn validate_orthogonality(&self) -> OrthogonalityReport {
        let mut pairs = 0;
        for (i, chi) in self.ordinary.iter().enumerate() {
            for psi in &self.ordinary[i..] {
                pairs += 1;
                let mut acc = CycNum::from_integer(0);
                for (c, class) in self.classes.iter().enumerate() {
                    let (Some(x), Some(y)) = (chi.value(c), psi.value(c)) else {
                        continue;
                    };
                    let term = (x * &y.conj()).scale(&Rational::from_integer(class.size.into()));
                    acc = &acc + &term;
                }
                let expected = if chi.id == psi.id { self.group_order } else { 0 };
                if acc != CycNum::from_integer(expected as i64) {
                    return OrthogonalityReport {
                        pairs_checked: pairs,
                        failure: Some((
                            chi.id.clone(),
                            psi.id.clone(),
                            expected.to_string(),
                            acc.to_string(),
                        )),
                    };
                }
            }
        }
        OrthogonalityReport {
            pairs_checked: pairs,
            failure: None,
        }
    }

    fn validate(&self) -> Result<(), DatasetError> {
        let n = self.classes.len();
        if n == 0 {
            return Err(violation("classes", &self.group_name, "at least one class", "none"));
        }
        let mut names = HashSet::new();
        for c in &self.classes {
            if !names.insert(c.name.as_str()) {
                return Err(violation("class-names", &c.name, "unique name", "duplicate"));
            }
            if c.element_order == 0 || c.size == 0 {
                return Err(violation("class-data", &c.name, "positive order and size", "zero"));
            }
            if self.exponent % c.element_order != 0 {
                return Err(violation(
                    "order-divides-exponent",
                    &c.name,
                    format!("divisor of {}", self.exponent),
                    c.element_order,
                ));
            }
        }
        let identities: Vec<_> = self.classes.iter().filter(|c| c.element_order == 1).collect();
        if identities.len() != 1 || identities[0].size != 1 {
            return Err(violation("identity-class", &self.group_name, "one class of order 1 and size 1", identities.len()));
        }
        let total: u64 = self.classes.iter().map(|c| c.size).sum();
        if total != self.group_order {
            return Err(violation("class-sizes", &self.group_name, self.group_order, total));
        }
        let exp = self.classes.iter().fold(1, |acc, c| lcm(acc, c.element_order));
        if exp != self.exponent {
            return Err(violation("exponent", &self.group_name, self.exponent, exp));
        }

        let primes = primes_dividing(self.exponent);
        let mut declared: Vec<u64> = self.power_maps.iter().map(|m| m.prime).collect();
        declared.sort_unstable();
        if declared != primes {
            return Err(violation("power-map-primes", &self.group_name, format!("{primes:?}"), format!("{declared:?}")));
        }
        for map in &self.power_maps {
            if map.images.len() != n {
                return Err(violation("power-map-length", format!("p={}", map.prime), n, map.images.len()));
            }
            for (c, &img) in map.images.iter().enumerate() {
                let m = self.element_order(c);
                let want = m / gcd(m, map.prime);
                let got = self.classes.get(img).map(|x| x.element_order);
                if got != Some(want) {
                    return Err(violation(
                        "power-map-order",
                        format!("p={} class {}", map.prime, self.classes[c].name),
                        want,
                        got.map_or("out of range".to_string(), |g| g.to_string()),
                    ));
                }
            }
        }

        if self.ordinary.len() != n {
            return Err(violation("ordinary-count", &self.group_name, n, self.ordinary.len()));
        }
        for chi in &self.ordinary {
            self.check_character(chi, &(0..n).collect::<Vec<_>>())?;
        }
        let ortho = self.validate_orthogonality();
        if let Some((a, b, want, got)) = ortho.failure {
            return Err(violation("orthogonality", format!("({a}, {b})"), want, got));
        }
        let deg_sq: i128 = self.ordinary.iter().map(|c| (c.degree as i128).pow(2)).sum();
        if deg_sq != self.group_order as i128 {
            return Err(violation("degree-squares", &self.group_name, self.group_order, deg_sq));
        }

        let mut seen = HashSet::new();
        for b in &self.brauer {
            if !seen.insert(b.prime) {
                return Err(violation("brauer-primes", format!("p={}", b.prime), "one table per prime", "duplicate"));
            }
            if !is_prime(b.prime) || self.group_order % b.prime != 0 {
                return Err(violation("brauer-prime", format!("p={}", b.prime), "prime dividing |G|", b.prime));
            }
            let regular = self.p_regular_classes(b.prime);
            if b.classes != regular {
                return Err(violation(
                    "brauer-classes",
                    format!("p={}", b.prime),
                    format!("{regular:?}"),
                    format!("{:?}", b.classes),
                ));
            }
            if b.characters.len() != regular.len() {
                return Err(violation("brauer-count", format!("p={}", b.prime), regular.len(), b.characters.len()));
            }
            for chi in &b.characters {
                self.check_character(chi, &regular)?;
            }
        }
        Ok(())
    }

    fn check_character(&self, chi: &Character, defined_on: &[usize]) -> Result<(), DatasetError> {
        let label = chi.label();
        let id = self.identity_class();
        if chi.value(id) != Some(&CycNum::from_integer(chi.degree)) || chi.degree <= 0 {
            return Err(violation(
                "degree",
                &label,
                chi.degree,
                chi.value(id).map_or("undefined".to_string(), |v| v.to_string()),
            ));
        }
        for (c, class) in self.classes.iter().enumerate() {
            match (defined_on.contains(&c), chi.value(c)) {
                (true, Some(v)) => {
                    if !v.lies_in(class.element_order) {
                        return Err(violation(
                            "conductor",
                            format!("{label} at {}", class.name),
                            format!("value in Q(zeta_{})", class.element_order),
                            v,
                        ));
                    }
                }
                (true, None) => {
                    return Err(violation("value-defined", format!("{label} at {}", class.name), "a value", "none"))
                }
                (false, Some(_)) => {
                    return Err(violation("value-defined", format!("{label} at {}", class.name), "no value", "a value"))
                }
                (false, None) => {}
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Serialized form

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    group: RawGroup,
    classes: Vec<RawClass>,
    power_maps: BTreeMap<String, Vec<usize>>,
    ordinary: Vec<RawCharacter>,
    #[serde(default)]
    brauer: BTreeMap<String, RawBrauer>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    name: String,
    order: u64,
    exponent: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    name: String,
    order: u64,
    size: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCharacter {
    id: String,
    degree: i64,
    values: Vec<RawValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBrauer {
    classes: Vec<String>,
    characters: Vec<RawCharacter>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawValue {
    Int(i64),
    Cyc { n: u64, coeffs: BTreeMap<String, i64> },
}

impl RawValue {
    fn to_cycnum(&self, ctx: &str) -> Result<CycNum, DatasetError> {
        match self {
            RawValue::Int(v) => Ok(CycNum::from_integer(*v)),
            RawValue::Cyc { n, coeffs } => {
                if *n == 0 {
                    return Err(DatasetError::Parse(format!("{ctx}: conductor must be positive")));
                }
                let mut terms = Vec::with_capacity(coeffs.len());
                for (e, c) in coeffs {
                    let e: i64 = e
                        .trim()
                        .parse()
                        .map_err(|_| DatasetError::Parse(format!("{ctx}: bad exponent {e:?}")))?;
                    terms.push((e, Rational::from_integer(BigInt::from(*c))));
                }
                Ok(CycNum::from_sparse(*n, terms))
            }
        }
    }
}

impl RawDataset {
    fn into_table(self) -> Result<CharacterTable, DatasetError> {
        let classes: Vec<ConjClass> = self
            .classes
            .into_iter()
            .map(|c| ConjClass {
                name: c.name,
                element_order: c.order,
                size: c.size,
            })
            .collect();
        let n = classes.len();
        let mut power_maps = Vec::new();
        for (p, images) in self.power_maps {
            let prime: u64 = p
                .parse()
                .map_err(|_| DatasetError::Parse(format!("power map key {p:?} is not an integer")))?;
            power_maps.push(PowerMap { prime, images });
        }
        power_maps.sort_by_key(|m| m.prime);

        let convert = |raw: RawCharacter, kind: CharKind, on: &[usize]| -> Result<Character, DatasetError> {
            if raw.values.len() != on.len() {
                return Err(violation("value-count", &raw.id, on.len(), raw.values.len()));
            }
            let mut values = vec![None; n];
            for (&c, v) in on.iter().zip(&raw.values) {
                values[c] = Some(v.to_cycnum(&raw.id)?);
            }
            Ok(Character {
                id: raw.id,
                kind,
                degree: raw.degree,
                values,
            })
        };

        let all: Vec<usize> = (0..n).collect();
        let ordinary = self
            .ordinary
            .into_iter()
            .map(|r| convert(r, CharKind::Ordinary, &all))
            .collect::<Result<Vec<_>, _>>()?;

        let mut brauer = Vec::new();
        for (p, raw) in self.brauer {
            let prime: u64 = p
                .parse()
                .map_err(|_| DatasetError::Parse(format!("brauer key {p:?} is not an integer")))?;
            let mut on = Vec::with_capacity(raw.classes.len());
            for name in &raw.classes {
                let idx = classes
                    .iter()
                    .position(|c| &c.name == name)
                    .ok_or_else(|| violation("brauer-classes", format!("p={prime}"), "known class", name))?;
                on.push(idx);
            }
            let characters = raw
                .characters
                .into_iter()
                .map(|r| convert(r, CharKind::Brauer(prime), &on))
                .collect::<Result<Vec<_>, _>>()?;
            brauer.push(BrauerTable {
                prime,
                classes: on,
                characters,
            });
        }
        brauer.sort_by_key(|b| b.prime);

        Ok(CharacterTable {
            group_name: self.group.name,
            group_order: self.group.order,
            exponent: self.group.exponent,
            classes,
            power_maps,
            ordinary,
            brauer,
        })
    }
}

/// Integer value of a character at a class, when rational and integral.
pub fn integer_value(chi: &Character, class: usize) -> Option<i64> {
    chi.value(class)?.as_integer()?.to_i64()
}

/// Inner product (1/|G|) Σ |C| χ(C) conj(ψ(C)) over the ordinary classes.
pub fn inner_product(t: &CharacterTable, chi: &Character, psi: &Character) -> Rational {
    let mut acc = CycNum::from_integer(0);
    for (c, class) in t.classes.iter().enumerate() {
        if let (Some(x), Some(y)) = (chi.value(c), psi.value(c)) {
            acc = &acc + &(x * &y.conj()).scale(&Rational::from_integer(class.size.into()));
        }
    }
    let r = acc.as_rational().unwrap_or_else(Rational::zero);
    r / Rational::from_integer(t.group_order.into())
}
