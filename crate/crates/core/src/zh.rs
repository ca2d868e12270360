//! The Zh and Zh^op constructions, virtual linking numbers, Alexander
//! numberings and Alexander systems.
//!
//! Label convention at a classical self-crossing of level `m`:
//!
//! ```text
//!            over-in  over-out  under-in  under-out
//! positive     m+1       m         m         m+1
//! negative      m       m+1       m+1         m
//! ```
//!
//! Walking along D under a γ crossing of sign `s` changes the label by `+s`.
//! The level of a self-crossing is the larger of its labels, `m + 1`.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{GaussCode, Passage, Role, ShortArc, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZhError {
    #[error("component {0} given twice")]
    SameComponent(usize),
    #[error("component {0} does not exist")]
    NoSuchComponent(usize),
    #[error("not an Alexander system: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidSystem(Vec<Violation>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Standard,
    Op,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Standard => Orientation::Op,
            Orientation::Op => Orientation::Standard,
        }
    }
}

/// Which side of a classical crossing the two ω arcs are drawn on. `Right`
/// gives the crossing labels {0, 1}, `Left` gives {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    Before,
    After,
}

/// A diagram together with a distinguished ω component that only crosses
/// over the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZhDiagram {
    pub code: GaussCode,
    pub omega: usize,
    pub orientation: Orientation,
    /// Alexander sub-numbering of the base short arcs, valid for the Op
    /// orientation of this diagram.
    labels: BTreeMap<ShortArc, i64>,
}

impl ZhDiagram {
    pub fn omega_passages(&self) -> &[Passage] {
        &self.code.components()[self.omega]
    }

    /// The base diagram D, recovered by deleting ω.
    pub fn base(&self) -> GaussCode {
        delete_components(&self.code, &[self.omega])
    }

    /// Same diagram with ω reversed.
    pub fn reoriented(&self) -> ZhDiagram {
        ZhDiagram {
            code: reverse_component(&self.code, self.omega),
            omega: self.omega,
            orientation: self.orientation.flip(),
            labels: self.labels.clone(),
        }
    }

    /// The Alexander system carried by the Op orientation of this diagram.
    pub fn alexander_system(&self) -> AlexanderSystem {
        let code = match self.orientation {
            Orientation::Op => self.code.clone(),
            Orientation::Standard => reverse_component(&self.code, self.omega),
        };
        AlexanderSystem { code, base_components: self.omega, labels: self.labels.clone() }
    }
}

/// Labels `[over-in, over-out, under-in, under-out]` at a crossing of level `m + 1`.
fn end_labels(sign: Sign, m: i64) -> [i64; 4] {
    match sign {
        Sign::Positive => [m + 1, m, m, m + 1],
        Sign::Negative => [m, m + 1, m + 1, m],
    }
}

fn in_label(sign: Sign, m: i64, role: Role) -> i64 {
    let l = end_labels(sign, m);
    match role {
        Role::Over => l[0],
        Role::Under => l[2],
    }
}

fn out_label(sign: Sign, m: i64, role: Role) -> i64 {
    let l = end_labels(sign, m);
    match role {
        Role::Over => l[1],
        Role::Under => l[3],
    }
}

/// Zh(D) or Zh^op(D) with every pair of ω arcs on the right-hand side.
pub fn zh_construct(d: &GaussCode, orientation: Orientation) -> ZhDiagram {
    zh_construct_with(d, orientation, |_| Side::Right)
}

/// Zh(D) or Zh^op(D) with the ω arcs at crossing `x` drawn on `side(x)`.
///
/// ω is appended as the last component. Its crossings get fresh ids above
/// those of D, numbered along ω^op, which visits the crossings of D in id
/// order.
pub fn zh_construct_with(d: &GaussCode, orientation: Orientation, side: impl Fn(u32) -> Side) -> ZhDiagram {
    let comps = d.components();
    let mut before: Vec<Vec<Option<Passage>>> = comps.iter().map(|c| vec![None; c.len()]).collect();
    let mut after = before.clone();
    let mut omega = Vec::new();
    let mut next_id = d.max_crossing_id().unwrap_or(0) + 1;
    let mut levels: HashMap<u32, (Sign, i64)> = HashMap::new();

    for x in d.crossings() {
        let s = side(x.id);
        use Place::*;
        use Role::*;
        let plan = match (s, x.sign) {
            (Side::Right, Sign::Positive) => [(Over, After, Sign::Positive), (Under, Before, Sign::Negative)],
            (Side::Right, Sign::Negative) => [(Under, After, Sign::Positive), (Over, Before, Sign::Negative)],
            (Side::Left, Sign::Positive) => [(Over, Before, Sign::Positive), (Under, After, Sign::Negative)],
            (Side::Left, Sign::Negative) => [(Under, Before, Sign::Positive), (Over, After, Sign::Negative)],
        };
        levels.insert(x.id, (x.sign, if s == Side::Right { 0 } else { 1 }));
        for (role, place, sign) in plan {
            let id = next_id;
            next_id += 1;
            let (c, i) = x.position(role);
            let slot = match place {
                Before => &mut before[c][i],
                After => &mut after[c][i],
            };
            *slot = Some(Passage::under(id, sign));
            omega.push(Passage::over(id, sign));
        }
    }

    let mut components = Vec::with_capacity(comps.len() + 1);
    let mut labels = BTreeMap::new();
    for (c, comp) in comps.iter().enumerate() {
        let mut word = Vec::new();
        // (crossing, role) for original passages, None for ω passages
        let mut origin = Vec::new();
        for (i, p) in comp.iter().enumerate() {
            if let Some(q) = before[c][i] {
                word.push(q);
                origin.push(None);
            }
            word.push(*p);
            origin.push(Some((p.id, p.role)));
            if let Some(q) = after[c][i] {
                word.push(q);
                origin.push(None);
            }
        }
        if word.is_empty() {
            labels.insert(ShortArc { component: c, index: 0 }, 1);
        }
        let n = word.len();
        for k in 0..n {
            let label = if let Some((id, role)) = origin[k] {
                let (sign, m) = levels[&id];
                in_label(sign, m, role)
            } else if let Some((id, role)) = origin[(k + n - 1) % n] {
                let (sign, m) = levels[&id];
                out_label(sign, m, role)
            } else {
                1
            };
            labels.insert(ShortArc { component: c, index: k }, label);
        }
        components.push(word);
    }
    let omega_index = components.len();
    components.push(omega);
    let code = GaussCode::new(components).expect("Zh construction yields a valid code");
    let op = ZhDiagram { code, omega: omega_index, orientation: Orientation::Op, labels };
    match orientation {
        Orientation::Op => op,
        Orientation::Standard => op.reoriented(),
    }
}

/// Reverse the orientation of one component, which flips the sign of every
/// crossing it takes part in.
pub fn reverse_component(code: &GaussCode, component: usize) -> GaussCode {
    let ids: HashSet<u32> = code.components()[component].iter().map(|p| p.id).collect();
    let components = code
        .components()
        .iter()
        .enumerate()
        .map(|(c, comp)| {
            let flipped = comp.iter().map(|p| {
                let sign = if ids.contains(&p.id) { p.sign.flip() } else { p.sign };
                Passage::new(p.id, p.role, sign)
            });
            if c == component {
                flipped.rev().collect()
            } else {
                flipped.collect()
            }
        })
        .collect();
    GaussCode::new(components).expect("reversal keeps codes valid")
}

/// Remove whole components together with every crossing they take part in.
pub fn delete_components(code: &GaussCode, drop: &[usize]) -> GaussCode {
    let ids: HashSet<u32> = drop.iter().flat_map(|&c| code.components()[c].iter().map(|p| p.id)).collect();
    let components: Vec<Vec<Passage>> = code
        .components()
        .iter()
        .enumerate()
        .filter(|(c, _)| !drop.contains(c))
        .map(|(_, comp)| comp.iter().filter(|p| !ids.contains(&p.id)).copied().collect())
        .collect();
    if components.is_empty() {
        return GaussCode::unknot();
    }
    GaussCode::new(components).expect("deleting components keeps codes valid")
}

/// Signed count of crossings where component `i` passes over component `j`.
pub fn vlk(code: &GaussCode, i: usize, j: usize) -> Result<i64, ZhError> {
    let n = code.num_components();
    for c in [i, j] {
        if c >= n {
            return Err(ZhError::NoSuchComponent(c));
        }
    }
    if i == j {
        return Err(ZhError::SameComponent(i));
    }
    Ok(code
        .crossings()
        .iter()
        .filter(|x| x.over.0 == i && x.under.0 == j)
        .map(|x| x.sign.value())
        .sum())
}

/// Labels on the short arcs of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlexanderNumbering {
    #[serde(with = "label_list")]
    pub labels: BTreeMap<ShortArc, i64>,
}

/// A diagram D ∪ γ whose first `base_components` components form D, with
/// an integer label on every short arc of D (cut at both self-crossings and
/// γ crossings).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlexanderSystem {
    pub code: GaussCode,
    pub base_components: usize,
    #[serde(with = "label_list")]
    pub labels: BTreeMap<ShortArc, i64>,
}

mod label_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::diagram::ShortArc;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        component: usize,
        index: usize,
        label: i64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<ShortArc, i64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(a, l)| Entry { component: a.component, index: a.index, label: *l })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<ShortArc, i64>, D::Error> {
        Ok(Vec::<Entry>::deserialize(d)?
            .into_iter()
            .map(|e| (ShortArc { component: e.component, index: e.index }, e.label))
            .collect())
    }
}

impl AlexanderSystem {
    /// The system (D ⊔ ◯, Γ) for a full Alexander numbering Γ of D.
    pub fn split(d: &GaussCode, numbering: &AlexanderNumbering) -> AlexanderSystem {
        let mut components = d.components().to_vec();
        components.push(Vec::new());
        AlexanderSystem {
            code: GaussCode::new(components).expect("adding an unknot keeps the code valid"),
            base_components: d.num_components(),
            labels: numbering.labels.clone(),
        }
    }

    /// D alone: the base components with all γ crossings removed.
    pub fn base_diagram(&self) -> GaussCode {
        let gamma: Vec<usize> = (self.base_components..self.code.num_components()).collect();
        delete_components(&self.code, &gamma)
    }

    pub fn gamma_crossings(&self) -> usize {
        self.code.components()[self.base_components..].iter().map(Vec::len).sum()
    }

    pub fn label(&self, component: usize, index: usize) -> Option<i64> {
        self.labels.get(&ShortArc { component, index }).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// A crossing between γ and D where D is on top.
    GammaUnder { crossing: u32 },
    /// A crossing with both strands in γ.
    GammaSelfCrossing { crossing: u32 },
    MissingLabel { arc: ShortArc },
    /// Labels across a γ crossing do not change by its sign.
    GammaRule { crossing: u32 },
    /// Labels at a self-crossing of D do not follow the local rule.
    CrossingRule { crossing: u32 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::GammaUnder { crossing } => write!(f, "γ passes under D at crossing {crossing}"),
            Violation::GammaSelfCrossing { crossing } => write!(f, "γ crosses itself at crossing {crossing}"),
            Violation::MissingLabel { arc } => {
                write!(f, "short arc {}:{} has no label", arc.component, arc.index)
            }
            Violation::GammaRule { crossing } => write!(f, "labels break the γ rule at crossing {crossing}"),
            Violation::CrossingRule { crossing } => {
                write!(f, "labels break the crossing rule at crossing {crossing}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub violations: Vec<Violation>,
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn next_arc(code: &GaussCode, c: usize, i: usize) -> ShortArc {
    ShortArc { component: c, index: (i + 1) % code.components()[c].len() }
}

/// The four label differences a self-crossing must satisfy, as
/// `(a, b, w)` meaning `Γ(a) − Γ(b) = w`.
fn self_crossing_constraints(code: &GaussCode, x: &crate::diagram::CrossingInfo) -> [(ShortArc, ShortArc, i64); 3] {
    let s = x.sign.value();
    let (oc, oi) = x.over;
    let (uc, ui) = x.under;
    let over_in = ShortArc { component: oc, index: oi };
    let over_out = next_arc(code, oc, oi);
    let under_in = ShortArc { component: uc, index: ui };
    let under_out = next_arc(code, uc, ui);
    [(over_out, over_in, -s), (under_out, under_in, s), (under_in, over_in, -s)]
}

/// Check conditions (1), (2a) and (2b) of an Alexander system.
pub fn verify_alexander_system(s: &AlexanderSystem) -> Verification {
    let code = &s.code;
    let base = s.base_components;
    let mut violations = Vec::new();
    for arc in code.short_arcs() {
        if arc.component < base && !s.labels.contains_key(&arc) {
            violations.push(Violation::MissingLabel { arc });
        }
    }
    if !violations.is_empty() {
        return Verification { violations };
    }
    let label = |a: &ShortArc| s.labels[a];
    for x in code.crossings() {
        let over_gamma = x.over.0 >= base;
        let under_gamma = x.under.0 >= base;
        match (over_gamma, under_gamma) {
            (true, true) => violations.push(Violation::GammaSelfCrossing { crossing: x.id }),
            (false, true) => violations.push(Violation::GammaUnder { crossing: x.id }),
            (true, false) => {
                let (c, i) = x.under;
                let before = ShortArc { component: c, index: i };
                let after = next_arc(code, c, i);
                if label(&after) - label(&before) != x.sign.value() {
                    violations.push(Violation::GammaRule { crossing: x.id });
                }
            }
            (false, false) => {
                let ok = self_crossing_constraints(code, &x)
                    .iter()
                    .all(|(a, b, w)| label(a) - label(b) == *w);
                if !ok {
                    violations.push(Violation::CrossingRule { crossing: x.id });
                }
            }
        }
    }
    Verification { violations }
}

/// Union-find over integers with offsets: `value[x] = value[parent[x]] + offset[x]`.
struct Potentials {
    parent: Vec<usize>,
    offset: Vec<i64>,
}

impl Potentials {
    fn new(n: usize) -> Potentials {
        Potentials { parent: (0..n).collect(), offset: vec![0; n] }
    }

    fn find(&mut self, x: usize) -> (usize, i64) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (root, off) = self.find(p);
        self.parent[x] = root;
        self.offset[x] += off;
        (root, self.offset[x])
    }

    /// Impose `value[a] − value[b] = w`; false on contradiction.
    fn relate(&mut self, a: usize, b: usize, w: i64) -> bool {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        if ra == rb {
            return oa - ob == w;
        }
        // value[ra] = value[rb] + ob + w − oa
        self.parent[ra] = rb;
        self.offset[ra] = ob + w - oa;
        true
    }
}

/// Find an Alexander numbering of D, normalized so that every connected
/// class of short arcs has minimum label 0. `None` if D is not numerable.
pub fn solve_alexander_numbering(d: &GaussCode) -> Option<AlexanderNumbering> {
    let arcs = d.short_arcs();
    let index: HashMap<ShortArc, usize> = arcs.iter().enumerate().map(|(k, a)| (*a, k)).collect();
    let mut pot = Potentials::new(arcs.len());
    for x in d.crossings() {
        for (a, b, w) in self_crossing_constraints(d, &x) {
            if !pot.relate(index[&a], index[&b], w) {
                return None;
            }
        }
    }
    let resolved: Vec<(usize, i64)> = (0..arcs.len()).map(|k| pot.find(k)).collect();
    let mut min: HashMap<usize, i64> = HashMap::new();
    for &(root, off) in &resolved {
        let m = min.entry(root).or_insert(off);
        *m = (*m).min(off);
    }
    let labels = arcs
        .iter()
        .zip(&resolved)
        .map(|(a, &(root, off))| (*a, off - min[&root]))
        .collect();
    Some(AlexanderNumbering { labels })
}

/// The canonical Alexander system of D: every self-crossing at level 1 and
/// on each short arc of D the fewest γ crossings that reconcile its end
/// labels, all γ crossings on one γ component in D-traversal order.
pub fn canonical_system(d: &GaussCode) -> AlexanderSystem {
    let crossings = d.crossings();
    let signs: HashMap<u32, Sign> = crossings.iter().map(|x| (x.id, x.sign)).collect();
    let mut next_id = d.max_crossing_id().unwrap_or(0) + 1;
    let mut components = Vec::new();
    let mut gamma = Vec::new();
    let mut labels = BTreeMap::new();
    for (c, comp) in d.components().iter().enumerate() {
        if comp.is_empty() {
            labels.insert(ShortArc { component: c, index: 0 }, 1);
            components.push(Vec::new());
            continue;
        }
        let n = comp.len();
        let mut word = Vec::new();
        for (i, p) in comp.iter().enumerate() {
            let prev = comp[(i + n - 1) % n];
            let start = out_label(signs[&prev.id], 0, prev.role);
            let end = in_label(signs[&p.id], 0, p.role);
            let step = if end > start { Sign::Positive } else { Sign::Negative };
            let mut current = start;
            for _ in 0..(end - start).abs() {
                labels.insert(ShortArc { component: c, index: word.len() }, current);
                word.push(Passage::under(next_id, step));
                gamma.push(Passage::over(next_id, step));
                next_id += 1;
                current += step.value();
            }
            labels.insert(ShortArc { component: c, index: word.len() }, end);
            word.push(*p);
        }
        components.push(word);
    }
    let base_components = components.len();
    components.push(gamma);
    AlexanderSystem {
        code: GaussCode::new(components).expect("canonical system is a valid code"),
        base_components,
        labels,
    }
}

/// Canonical representative of the equivalence class of an Alexander system:
/// it depends only on the underlying diagram D.
pub fn canonicalize_alexander_system(s: &AlexanderSystem) -> Result<AlexanderSystem, ZhError> {
    let v = verify_alexander_system(s);
    if !v.is_valid() {
        return Err(ZhError::InvalidSystem(v.violations));
    }
    Ok(canonical_system(&s.base_diagram()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> GaussCode {
        s.parse().unwrap()
    }

    #[test]
    fn zh_of_virtual_trefoil_has_four_omega_passages() {
        let z = zh_construct(&code("O1+O2+U1+U2+"), Orientation::Op);
        assert_eq!(z.code.num_components(), 2);
        assert_eq!(z.omega_passages().len(), 4);
        assert!(z.omega_passages().iter().all(|p| p.role == Role::Over));
        assert_eq!(z.base(), code("O1+O2+U1+U2+"));
        assert!(verify_alexander_system(&z.alexander_system()).is_valid());
        assert!(z.labels.values().all(|l| (0..=1).contains(l)));
    }

    #[test]
    fn standard_and_op_are_reverses() {
        let d = code("O1+O2+U1+U2+");
        let std = zh_construct(&d, Orientation::Standard);
        let op = zh_construct(&d, Orientation::Op);
        assert_eq!(std.reoriented().code, op.code);
        assert_eq!(std.alexander_system(), op.alexander_system());
        assert_eq!(vlk(&std.code, 1, 0).unwrap(), -vlk(&op.code, 1, 0).unwrap());
    }

    #[test]
    fn zh_of_unknot_is_split() {
        let z = zh_construct(&GaussCode::unknot(), Orientation::Standard);
        assert_eq!(z.code.to_string(), ",");
        assert!(verify_alexander_system(&z.alexander_system()).is_valid());
    }

    #[test]
    fn left_side_uses_labels_one_two() {
        let d = code("O1+U2-O3+U1+O2-U3+");
        let z = zh_construct_with(&d, Orientation::Op, |_| Side::Left);
        assert!(verify_alexander_system(&z.alexander_system()).is_valid());
        assert!(z.labels.values().all(|l| (1..=2).contains(l)));
    }

    #[test]
    fn vlk_errors_and_values() {
        let l = code("O1+U2-,U1+O2-");
        assert_eq!(vlk(&l, 0, 1), Ok(1));
        assert_eq!(vlk(&l, 1, 0), Ok(-1));
        assert_eq!(vlk(&l, 0, 0), Err(ZhError::SameComponent(0)));
        assert_eq!(vlk(&l, 0, 5), Err(ZhError::NoSuchComponent(5)));
        assert_eq!(vlk(&code(","), 0, 1), Ok(0));
    }

    #[test]
    fn numerability() {
        assert!(solve_alexander_numbering(&code("O1+O2+U1+U2+")).is_none());
        let tref = solve_alexander_numbering(&code("O1+U2+O3+U1+O2+U3+")).unwrap();
        assert_eq!(tref.labels.len(), 6);
        let unknot = solve_alexander_numbering(&GaussCode::unknot()).unwrap();
        assert_eq!(unknot.labels.values().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn perturbed_label_fails() {
        let mut s = zh_construct(&code("O1+O2+U1+U2+"), Orientation::Op).alexander_system();
        let arc = *s.labels.keys().next().unwrap();
        *s.labels.get_mut(&arc).unwrap() += 1;
        assert!(!verify_alexander_system(&s).is_valid());
        assert!(canonicalize_alexander_system(&s).is_err());
    }

    #[test]
    fn split_system_of_numerable_diagram() {
        let d = code("O1+U2+O3+U1+O2+U3+");
        let n = solve_alexander_numbering(&d).unwrap();
        let s = AlexanderSystem::split(&d, &n);
        assert!(verify_alexander_system(&s).is_valid());
        let c = canonicalize_alexander_system(&s).unwrap();
        assert_eq!(c.gamma_crossings(), 0);
    }

    #[test]
    fn canonical_virtual_trefoil() {
        let s = zh_construct(&code("O1+O2+U1+U2+"), Orientation::Op).alexander_system();
        let c = canonicalize_alexander_system(&s).unwrap();
        assert!(verify_alexander_system(&c).is_valid());
        assert_eq!(c.gamma_crossings(), 2);
        assert_eq!(canonicalize_alexander_system(&c).unwrap(), c);
    }

    #[test]
    fn gamma_under_is_reported() {
        let s = AlexanderSystem {
            code: code("O1+,U1+"),
            base_components: 1,
            labels: BTreeMap::from([(ShortArc { component: 0, index: 0 }, 0)]),
        };
        let v = verify_alexander_system(&s);
        assert_eq!(v.violations, vec![Violation::GammaUnder { crossing: 1 }]);
    }
}
