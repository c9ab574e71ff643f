//! Exact finite groupoids.
//!
//! Morphisms and objects are dense indices. Composition follows the
//! backwards convention: `compose(beta, alpha)` is "alpha, then beta" and is
//! defined exactly when `target(alpha) == source(beta)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw tables of a finite groupoid. `compose` is row-major over
/// `(beta, alpha)` with `None` where the composite is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidTables {
    pub objects: Vec<String>,
    pub morphisms: Vec<String>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub compose: Vec<Option<usize>>,
    pub inverse: Vec<usize>,
    pub unit: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroupoid {
    tables: GroupoidTables,
    /// Morphisms grouped by target object.
    by_target: Vec<Vec<usize>>,
}

impl FiniteGroupoid {
    /// Wraps raw tables after checking sizes and index ranges. The axioms are
    /// not checked here; see [`validate_groupoid`].
    pub fn from_tables(tables: GroupoidTables) -> Result<Self> {
        let n = tables.objects.len();
        let k = tables.morphisms.len();
        if n == 0 {
            return Err(Error::EmptyObjectSet);
        }
        let malformed = |what: &str| Err(Error::MalformedGroupoid(what.to_string()));
        if tables.source.len() != k || tables.target.len() != k || tables.inverse.len() != k {
            return malformed("source/target/inverse tables must cover every morphism");
        }
        if tables.compose.len() != k * k {
            return malformed("composition table must be |K| x |K|");
        }
        if tables.unit.len() != n {
            return malformed("unit table must cover every object");
        }
        if tables.source.iter().chain(&tables.target).any(|&x| x >= n) {
            return malformed("source/target index out of range");
        }
        if tables.inverse.iter().chain(&tables.unit).any(|&m| m >= k)
            || tables.compose.iter().flatten().any(|&m| m >= k)
        {
            return malformed("morphism index out of range");
        }
        let mut by_target = vec![Vec::new(); n];
        for (alpha, &y) in tables.target.iter().enumerate() {
            by_target[y].push(alpha);
        }
        Ok(Self { tables, by_target })
    }

    pub fn tables(&self) -> &GroupoidTables {
        &self.tables
    }

    pub fn into_tables(self) -> GroupoidTables {
        self.tables
    }

    pub fn object_count(&self) -> usize {
        self.tables.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.tables.morphisms.len()
    }

    pub fn object_id(&self, x: usize) -> &str {
        &self.tables.objects[x]
    }

    pub fn morphism_id(&self, alpha: usize) -> &str {
        &self.tables.morphisms[alpha]
    }

    #[inline]
    pub fn source(&self, alpha: usize) -> usize {
        self.tables.source[alpha]
    }

    #[inline]
    pub fn target(&self, alpha: usize) -> usize {
        self.tables.target[alpha]
    }

    /// `beta ∘ alpha`, i.e. alpha followed by beta.
    #[inline]
    pub fn compose(&self, beta: usize, alpha: usize) -> Option<usize> {
        self.tables.compose[beta * self.morphism_count() + alpha]
    }

    #[inline]
    pub fn inverse(&self, alpha: usize) -> usize {
        self.tables.inverse[alpha]
    }

    #[inline]
    pub fn unit(&self, x: usize) -> usize {
        self.tables.unit[x]
    }

    pub fn is_unit(&self, alpha: usize) -> bool {
        self.tables.unit[self.source(alpha)] == alpha
    }

    /// Morphisms ending at `y` (the target fiber).
    pub fn with_target(&self, y: usize) -> &[usize] {
        &self.by_target[y]
    }

    /// When every hom-set `x -> y` has exactly one element, returns the
    /// lookup `pair[y][x]`; that is the pair-groupoid shape.
    pub fn pair_index(&self) -> Option<Vec<Vec<usize>>> {
        let n = self.object_count();
        let mut pair = vec![vec![None; n]; n];
        for alpha in 0..self.morphism_count() {
            let slot = &mut pair[self.target(alpha)][self.source(alpha)];
            if slot.is_some() {
                return None;
            }
            *slot = Some(alpha);
        }
        pair.into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
            .collect()
    }
}

/// Pair groupoid on `n` objects. Morphism `(y, x): x -> y` has index `y * n + x`.
pub fn build_pair_groupoid(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::EmptyObjectSet);
    }
    let k = n * n;
    let idx = |y: usize, x: usize| y * n + x;
    let mut tables = GroupoidTables {
        objects: (0..n).map(|x| x.to_string()).collect(),
        morphisms: Vec::with_capacity(k),
        source: Vec::with_capacity(k),
        target: Vec::with_capacity(k),
        compose: vec![None; k * k],
        inverse: Vec::with_capacity(k),
        unit: (0..n).map(|x| idx(x, x)).collect(),
    };
    for y in 0..n {
        for x in 0..n {
            tables.morphisms.push(format!("({y},{x})"));
            tables.source.push(x);
            tables.target.push(y);
            tables.inverse.push(idx(x, y));
        }
    }
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                tables.compose[idx(z, y) * k + idx(y, x)] = Some(idx(z, x));
            }
        }
    }
    FiniteGroupoid::from_tables(tables)
}

/// One-object groupoid of a finite group given by its Cayley table,
/// `table[g][h] = g·h`. Composition `beta ∘ alpha` is the product `beta·alpha`.
pub fn build_group_groupoid(table: &[Vec<usize>]) -> Result<FiniteGroupoid> {
    let k = table.len();
    if k == 0 {
        return Err(Error::InvalidGroupTable("empty table".into()));
    }
    if table.iter().any(|row| row.len() != k || row.iter().any(|&g| g >= k)) {
        return Err(Error::InvalidGroupTable("table is not a closed square".into()));
    }
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::InvalidGroupTable(format!(
                        "not associative at ({a}, {b}, {c})"
                    )));
                }
            }
        }
    }
    let identity = (0..k)
        .find(|&e| (0..k).all(|g| table[e][g] == g && table[g][e] == g))
        .ok_or_else(|| Error::InvalidGroupTable("no two-sided identity".into()))?;
    let inverse = (0..k)
        .map(|g| {
            (0..k)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::InvalidGroupTable(format!("element {g} has no inverse")))
        })
        .collect::<Result<Vec<_>>>()?;
    let tables = GroupoidTables {
        objects: vec!["*".into()],
        morphisms: (0..k).map(|g| g.to_string()).collect(),
        source: vec![0; k],
        target: vec![0; k],
        compose: (0..k)
            .flat_map(|b| (0..k).map(move |a| (b, a)))
            .map(|(b, a)| Some(table[b][a]))
            .collect(),
        inverse,
        unit: vec![identity],
    };
    FiniteGroupoid::from_tables(tables)
}

/// Cayley table of the cyclic group `Z_n` (addition mod n).
pub fn cyclic_group_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// Cayley table of the dihedral group of order `2n`. Element `k + n*e`
/// stands for `r^k s^e`.
pub fn dihedral_group_table(n: usize) -> Vec<Vec<usize>> {
    let order = 2 * n;
    let split = |g: usize| (g % n, g / n);
    (0..order)
        .map(|g| {
            (0..order)
                .map(|h| {
                    let (a, e) = split(g);
                    let (b, f) = split(h);
                    let rot = if e == 0 { (a + b) % n } else { (a + n - b) % n };
                    rot + n * ((e + f) % 2)
                })
                .collect()
        })
        .collect()
}

/// One violated axiom instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Composable pair with no composite in the table.
    CompositionMissing { beta: usize, alpha: usize },
    /// Composite recorded for a non-composable pair.
    CompositionSpurious { beta: usize, alpha: usize },
    CompositionEndpoints { beta: usize, alpha: usize, result: usize },
    Associativity { gamma: usize, beta: usize, alpha: usize },
    UnitEndpoints { object: usize },
    LeftUnit { alpha: usize },
    RightUnit { alpha: usize },
    InverseEndpoints { alpha: usize },
    LeftInverse { alpha: usize },
    RightInverse { alpha: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CompositionMissing { beta, alpha } => {
                write!(f, "composable pair ({beta}, {alpha}) has no composite")
            }
            Violation::CompositionSpurious { beta, alpha } => {
                write!(f, "non-composable pair ({beta}, {alpha}) has a composite")
            }
            Violation::CompositionEndpoints { beta, alpha, result } => write!(
                f,
                "{beta} ∘ {alpha} = {result} has the wrong source or target"
            ),
            Violation::Associativity { gamma, beta, alpha } => {
                write!(f, "associativity fails on ({gamma}, {beta}, {alpha})")
            }
            Violation::UnitEndpoints { object } => {
                write!(f, "unit of object {object} is not a loop at it")
            }
            Violation::LeftUnit { alpha } => write!(f, "left unit law fails for {alpha}"),
            Violation::RightUnit { alpha } => write!(f, "right unit law fails for {alpha}"),
            Violation::InverseEndpoints { alpha } => {
                write!(f, "inverse of {alpha} does not reverse its endpoints")
            }
            Violation::LeftInverse { alpha } => write!(f, "inverse(α) ∘ α ≠ unit for {alpha}"),
            Violation::RightInverse { alpha } => write!(f, "α ∘ inverse(α) ≠ unit for {alpha}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count_associativity(&self) -> usize {
        self.violations
            .iter()
            .filter(|v| matches!(v, Violation::Associativity { .. }))
            .count()
    }
}

/// Checks every groupoid axiom instance and lists all failures.
pub fn validate_groupoid(g: &FiniteGroupoid) -> ValidationReport {
    let k = g.morphism_count();
    let mut violations = Vec::new();

    for beta in 0..k {
        for alpha in 0..k {
            let composable = g.target(alpha) == g.source(beta);
            match (composable, g.compose(beta, alpha)) {
                (true, None) => violations.push(Violation::CompositionMissing { beta, alpha }),
                (false, Some(_)) => {
                    violations.push(Violation::CompositionSpurious { beta, alpha })
                }
                (true, Some(r)) => {
                    if g.source(r) != g.source(alpha) || g.target(r) != g.target(beta) {
                        violations.push(Violation::CompositionEndpoints {
                            beta,
                            alpha,
                            result: r,
                        });
                    }
                }
                (false, None) => {}
            }
        }
    }

    for alpha in 0..k {
        for beta in 0..k {
            let Some(ba) = g.compose(beta, alpha) else {
                continue;
            };
            for gamma in 0..k {
                let Some(gb) = g.compose(gamma, beta) else {
                    continue;
                };
                let left = g.compose(gb, alpha);
                let right = g.compose(gamma, ba);
                if left.is_none() || left != right {
                    violations.push(Violation::Associativity { gamma, beta, alpha });
                }
            }
        }
    }

    for x in 0..g.object_count() {
        let u = g.unit(x);
        if g.source(u) != x || g.target(u) != x {
            violations.push(Violation::UnitEndpoints { object: x });
        }
    }
    for alpha in 0..k {
        if g.compose(g.unit(g.target(alpha)), alpha) != Some(alpha) {
            violations.push(Violation::LeftUnit { alpha });
        }
        if g.compose(alpha, g.unit(g.source(alpha))) != Some(alpha) {
            violations.push(Violation::RightUnit { alpha });
        }
        let inv = g.inverse(alpha);
        if g.source(inv) != g.target(alpha) || g.target(inv) != g.source(alpha) {
            violations.push(Violation::InverseEndpoints { alpha });
        }
        if g.compose(inv, alpha) != Some(g.unit(g.source(alpha))) {
            violations.push(Violation::LeftInverse { alpha });
        }
        if g.compose(alpha, inv) != Some(g.unit(g.target(alpha))) {
            violations.push(Violation::RightInverse { alpha });
        }
    }

    ValidationReport { violations }
}

/// On-disk form of a groupoid. Units are not stored; they are recovered as
/// the idempotent loop at each object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDocument {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismEntry>,
    /// Triples `[beta, alpha, beta ∘ alpha]`.
    pub compose: Vec<[String; 3]>,
    /// Pairs `[alpha, alpha⁻¹]`.
    pub inverse: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismEntry {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

impl GroupoidDocument {
    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        let t = g.tables();
        let k = g.morphism_count();
        let mut compose = Vec::new();
        for beta in 0..k {
            for alpha in 0..k {
                if let Some(r) = g.compose(beta, alpha) {
                    compose.push([
                        t.morphisms[beta].clone(),
                        t.morphisms[alpha].clone(),
                        t.morphisms[r].clone(),
                    ]);
                }
            }
        }
        Self {
            objects: t.objects.clone(),
            morphisms: (0..k)
                .map(|a| MorphismEntry {
                    id: t.morphisms[a].clone(),
                    src: t.objects[t.source[a]].clone(),
                    tgt: t.objects[t.target[a]].clone(),
                })
                .collect(),
            compose,
            inverse: (0..k)
                .map(|a| [t.morphisms[a].clone(), t.morphisms[t.inverse[a]].clone()])
                .collect(),
        }
    }

    pub fn into_groupoid(self) -> Result<FiniteGroupoid> {
        let bad = |msg: String| Error::MalformedGroupoid(msg);
        let objects = index_ids(&self.objects).map_err(|d| bad(format!("duplicate object {d}")))?;
        let ids: Vec<String> = self.morphisms.iter().map(|m| m.id.clone()).collect();
        let morphisms = index_ids(&ids).map_err(|d| bad(format!("duplicate morphism {d}")))?;
        let obj = |id: &str| {
            objects
                .get(id)
                .copied()
                .ok_or_else(|| bad(format!("unknown object {id}")))
        };
        let mor = |id: &str| {
            morphisms
                .get(id)
                .copied()
                .ok_or_else(|| bad(format!("unknown morphism {id}")))
        };
        let k = ids.len();
        let source = self.morphisms.iter().map(|m| obj(&m.src)).collect::<Result<Vec<_>>>()?;
        let target = self.morphisms.iter().map(|m| obj(&m.tgt)).collect::<Result<Vec<_>>>()?;
        let mut compose = vec![None; k * k];
        for [b, a, r] in &self.compose {
            let slot = &mut compose[mor(b)? * k + mor(a)?];
            if slot.is_some() {
                return Err(bad(format!("composite of ({b}, {a}) listed twice")));
            }
            *slot = Some(mor(r)?);
        }
        let mut inverse = vec![None; k];
        for [a, ai] in &self.inverse {
            inverse[mor(a)?] = Some(mor(ai)?);
        }
        let inverse = inverse
            .into_iter()
            .enumerate()
            .map(|(a, i)| i.ok_or_else(|| bad(format!("morphism {} has no inverse", ids[a]))))
            .collect::<Result<Vec<_>>>()?;
        let unit = (0..self.objects.len())
            .map(|x| {
                (0..k)
                    .find(|&u| source[u] == x && target[u] == x && compose[u * k + u] == Some(u))
                    .ok_or_else(|| bad(format!("object {} has no idempotent loop", self.objects[x])))
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteGroupoid::from_tables(GroupoidTables {
            objects: self.objects,
            morphisms: ids,
            source,
            target,
            compose,
            inverse,
            unit,
        })
    }
}

fn index_ids(ids: &[String]) -> std::result::Result<HashMap<&str, usize>, String> {
    let mut map = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if map.insert(id.as_str(), i).is_some() {
            return Err(id.clone());
        }
    }
    Ok(map)
}

/// Serializes a groupoid as pretty JSON.
pub fn groupoid_to_json(g: &FiniteGroupoid) -> String {
    serde_json::to_string_pretty(&GroupoidDocument::from_groupoid(g))
        .expect("groupoid document is always serializable")
}

pub fn groupoid_from_json(text: &str) -> Result<FiniteGroupoid> {
    let doc: GroupoidDocument =
        serde_json::from_str(text).map_err(|e| Error::MalformedGroupoid(e.to_string()))?;
    doc.into_groupoid()
}

/// Function values keyed by morphism id, each as `[re, im]`.
pub type FunctionDocument = BTreeMap<String, [f64; 2]>;
