//! Finite quandles, fundamental-quandle presentations, coloring counts and
//! 2-cocycle state sums, together with their Zh-extended versions.
//!
//! Crossing relations: at a positive crossing the under strand is relabeled
//! `under_out = under_in * over`; at a negative crossing
//! `under_in = under_out * over`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{solution_count_mod_n, CyclicGroup, GroupRingElement, ModMatrix};
use crate::diagram::{GaussCode, ShortArc, Sign};
use crate::zh::{zh_construct, Orientation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuandleError {
    #[error("axiom {axiom} fails at {witness:?}")]
    AxiomViolation { axiom: u8, witness: Vec<u32> },
    #[error("table entry {0} is out of range")]
    EntryOutOfRange(u32),
    #[error("table is not square")]
    NotSquare,
    #[error("cocycle condition fails at (x, y, z) = {0:?}")]
    CocycleViolation((u32, u32, u32)),
    #[error("cocycle is not trivial on the diagonal at x = {0}")]
    DiagonalViolation(u32),
    #[error("cocycle table has size {found}, quandle has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid quandle description {0:?}")]
    BadSpec(String),
}

/// A linear quandle `x * y = t x + (1 − t) y` on Z/n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Linear {
    pub n: u64,
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteQuandle {
    pub name: String,
    n: usize,
    /// `table[x * n + y] = x * y`.
    table: Vec<u32>,
    #[serde(skip)]
    linear: Option<Linear>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FiniteQuandle {
    /// Build from rows `table[x][y] = x * y` and check the axioms.
    pub fn from_table(name: &str, rows: &[Vec<u32>]) -> Result<FiniteQuandle, QuandleError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(QuandleError::NotSquare);
        }
        if let Some(&bad) = rows.iter().flatten().find(|&&v| v as usize >= n) {
            return Err(QuandleError::EntryOutOfRange(bad));
        }
        let q = FiniteQuandle { name: name.to_string(), n, table: rows.concat(), linear: None };
        q.check_axioms()?;
        Ok(q)
    }

    /// `x * y = t x + (1 − t) y` on Z/n; needs gcd(t, n) = 1.
    pub fn alexander(n: u64, t: u64) -> Result<FiniteQuandle, QuandleError> {
        let name = format!("alexander:{n}:{t}");
        if n == 0 {
            return Err(QuandleError::BadSpec(name));
        }
        let size = n as usize;
        let t = t % n;
        let s = (1 + n - t) % n;
        let mut table = vec![0; size * size];
        for x in 0..n {
            for y in 0..n {
                table[(x * n + y) as usize] = ((t * x + s * y) % n) as u32;
            }
        }
        let q = FiniteQuandle { name, n: size, table, linear: Some(Linear { n, t }) };
        if gcd(t, n) != 1 {
            // a non-invertible t breaks right-invertibility; report the witness
            q.check_axioms()?;
        }
        Ok(q)
    }

    /// `x * y = 2y − x` on Z/n.
    pub fn dihedral(n: u64) -> Result<FiniteQuandle, QuandleError> {
        if n == 0 {
            return Err(QuandleError::BadSpec("dihedral:0".to_string()));
        }
        let mut q = FiniteQuandle::alexander(n, n - 1)?;
        q.name = format!("dihedral:{n}");
        Ok(q)
    }

    /// `x * y = x` on n elements.
    pub fn trivial(n: usize) -> FiniteQuandle {
        let table = (0..n * n).map(|k| (k / n) as u32).collect();
        FiniteQuandle { name: format!("trivial:{n}"), n, table, linear: None }
    }

    /// X ⊔ {v} with `x * v = x` and `v * x = v`; v gets index n.
    pub fn adjoin_v(&self) -> FiniteQuandle {
        let m = self.n + 1;
        let v = self.n as u32;
        let mut table = vec![0; m * m];
        for x in 0..m {
            for y in 0..m {
                table[x * m + y] = if x == self.n {
                    v
                } else if y == self.n {
                    x as u32
                } else {
                    self.op(x as u32, y as u32)
                };
            }
        }
        FiniteQuandle { name: format!("{}+v", self.name), n: m, table, linear: None }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn op(&self, x: u32, y: u32) -> u32 {
        self.table[x as usize * self.n + y as usize]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.table.chunks(self.n.max(1)).map(<[u32]>::to_vec).collect()
    }

    pub fn linear(&self) -> Option<Linear> {
        self.linear
    }

    /// Idempotence, right-invertibility and right self-distributivity,
    /// checked exhaustively.
    pub fn check_axioms(&self) -> Result<(), QuandleError> {
        let n = self.n as u32;
        for x in 0..n {
            if self.op(x, x) != x {
                return Err(QuandleError::AxiomViolation { axiom: 1, witness: vec![x] });
            }
        }
        for y in 0..n {
            let mut seen = vec![false; self.n];
            for x in 0..n {
                let z = self.op(x, y) as usize;
                if seen[z] {
                    return Err(QuandleError::AxiomViolation { axiom: 2, witness: vec![x, y] });
                }
                seen[z] = true;
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.op(self.op(x, y), z) != self.op(self.op(x, z), self.op(y, z)) {
                        return Err(QuandleError::AxiomViolation { axiom: 3, witness: vec![x, y, z] });
                    }
                }
            }
        }
        Ok(())
    }

    /// `inverse[y][z]` is the unique x with `x * y = z`.
    fn inverse_table(&self) -> Vec<u32> {
        let mut inv = vec![0; self.n * self.n];
        for x in 0..self.n as u32 {
            for y in 0..self.n as u32 {
                inv[y as usize * self.n + self.op(x, y) as usize] = x;
            }
        }
        inv
    }

    /// Comma-separated rows, one per line.
    pub fn to_csv(&self) -> String {
        self.rows()
            .iter()
            .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_csv(name: &str, text: &str) -> Result<FiniteQuandle, QuandleError> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.split(',').map(|v| v.trim().parse::<u32>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| QuandleError::BadSpec(name.to_string()))?;
        FiniteQuandle::from_table(name, &rows)
    }
}

/// Parses `dihedral:N`, `alexander:N:T` and `trivial:N`, each optionally
/// followed by `+v` for the adjunction of v.
impl FromStr for FiniteQuandle {
    type Err = QuandleError;

    fn from_str(s: &str) -> Result<FiniteQuandle, QuandleError> {
        let bad = || QuandleError::BadSpec(s.to_string());
        let (base, with_v) = match s.strip_suffix("+v") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let parts: Vec<&str> = base.split(':').collect();
        let num = |i: usize| parts.get(i).and_then(|p| p.parse::<u64>().ok()).ok_or_else(bad);
        let q = match (parts[0], parts.len()) {
            ("dihedral", 2) => FiniteQuandle::dihedral(num(1)?)?,
            ("alexander", 3) => FiniteQuandle::alexander(num(1)?, num(2)?)?,
            ("trivial", 2) => FiniteQuandle::trivial(num(1)? as usize),
            _ => return Err(bad()),
        };
        Ok(if with_v { q.adjoin_v() } else { q })
    }
}

/// The quandles registered by name, for listings and sweeps.
pub fn builtin_quandles(max_size: u64) -> Vec<FiniteQuandle> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.push(FiniteQuandle::trivial(n as usize));
    }
    for n in 3..=max_size {
        out.push(FiniteQuandle::dihedral(n).expect("dihedral quandles are valid"));
    }
    for n in 2..=max_size {
        for t in 2..n {
            if gcd(t, n) == 1 && t != n - 1 {
                out.push(FiniteQuandle::alexander(n, t).expect("unit t gives a quandle"));
            }
        }
    }
    out
}

/// One crossing relation `left * right = result` between generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub crossing: u32,
    pub left: usize,
    pub right: usize,
    pub result: usize,
}

/// Generators are the arcs of the diagram, in [`GaussCode::arcs`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuandlePresentation {
    pub generators: usize,
    pub relations: Vec<Relation>,
    /// For every crossing: `(sign, under_in, over, under_out)` arcs.
    pub crossings: Vec<(Sign, usize, usize, usize)>,
}

pub fn generator_name(i: usize) -> String {
    let letters = b"abcdefghijklmnopqrstuvwxyz";
    if i < letters.len() {
        (letters[i] as char).to_string()
    } else {
        format!("g{i}")
    }
}

impl fmt::Display for QuandlePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (0..self.generators).map(generator_name).collect();
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|r| format!("{}*{}={}", gens[r.left], gens[r.right], gens[r.result]))
            .collect();
        write!(f, "<{} | {}>", gens.join(","), rels.join(","))
    }
}

pub fn presentation(d: &GaussCode) -> QuandlePresentation {
    let arc_of = d.arc_index_of_short_arcs();
    let comps = d.components();
    let arc = |c: usize, i: usize| arc_of[&ShortArc { component: c, index: i % comps[c].len() }];
    let mut relations = Vec::new();
    let mut crossings = Vec::new();
    for x in d.crossings() {
        let (oc, oi) = x.over;
        let (uc, ui) = x.under;
        let over = arc(oc, oi);
        let under_in = arc(uc, ui);
        let under_out = arc(uc, ui + 1);
        crossings.push((x.sign, under_in, over, under_out));
        relations.push(match x.sign {
            Sign::Positive => Relation { crossing: x.id, left: under_in, right: over, result: under_out },
            Sign::Negative => Relation { crossing: x.id, left: under_out, right: over, result: under_in },
        });
    }
    QuandlePresentation { generators: d.arcs().len(), relations, crossings }
}

/// Presentation of the extended fundamental quandle Q(Zh(D)).
pub fn extended_presentation(d: &GaussCode) -> QuandlePresentation {
    presentation(&zh_construct(d, Orientation::Standard).code)
}

/// Call `visit` on every coloring of the presentation's generators by `x`.
pub fn for_each_coloring(p: &QuandlePresentation, x: &FiniteQuandle, mut visit: impl FnMut(&[u32])) {
    let inv = x.inverse_table();
    let n = x.size();
    if n == 0 {
        return;
    }
    let mut assign: Vec<Option<u32>> = vec![None; p.generators];
    search(p, x, &inv, &mut assign, &mut visit);
}

/// Fill in everything the relations force; false on a contradiction.
fn propagate(p: &QuandlePresentation, x: &FiniteQuandle, inv: &[u32], assign: &mut [Option<u32>]) -> bool {
    let n = x.size();
    loop {
        let mut changed = false;
        for r in &p.relations {
            match (assign[r.left], assign[r.right], assign[r.result]) {
                (Some(a), Some(b), Some(c)) => {
                    if x.op(a, b) != c {
                        return false;
                    }
                }
                (Some(a), Some(b), None) => {
                    assign[r.result] = Some(x.op(a, b));
                    changed = true;
                }
                (None, Some(b), Some(c)) => {
                    assign[r.left] = Some(inv[b as usize * n + c as usize]);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

/// The unassigned generator whose value unlocks the most relations: it is
/// the over arc of a relation with one other end known. Falls back to the
/// unassigned generator that is the over arc most often.
fn branch_generator(p: &QuandlePresentation, assign: &[Option<u32>]) -> Option<usize> {
    let mut unlocks = vec![0usize; assign.len()];
    let mut over = vec![0usize; assign.len()];
    for r in &p.relations {
        if assign[r.right].is_none() {
            over[r.right] += 1;
            if assign[r.left].is_some() || assign[r.result].is_some() {
                unlocks[r.right] += 1;
            }
        }
    }
    (0..assign.len()).filter(|&g| assign[g].is_none()).max_by_key(|&g| (unlocks[g], over[g], std::cmp::Reverse(g)))
}

fn search(
    p: &QuandlePresentation,
    x: &FiniteQuandle,
    inv: &[u32],
    assign: &mut [Option<u32>],
    visit: &mut dyn FnMut(&[u32]),
) {
    if !propagate(p, x, inv, assign) {
        return;
    }
    let Some(g) = branch_generator(p, assign) else {
        let full: Vec<u32> = assign.iter().map(|v| v.expect("assigned")).collect();
        visit(&full);
        return;
    };
    for value in 0..x.size() as u32 {
        let mut next = assign.to_vec();
        next[g] = Some(value);
        search(p, x, inv, &mut next, visit);
    }
}

pub fn colorings(d: &GaussCode, x: &FiniteQuandle) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for_each_coloring(&presentation(d), x, |c| out.push(c.to_vec()));
    out
}

pub fn count_colorings(d: &GaussCode, x: &FiniteQuandle) -> u64 {
    let mut count = 0;
    for_each_coloring(&presentation(d), x, |_| count += 1);
    count
}

pub fn extended_colorings(d: &GaussCode, x: &FiniteQuandle) -> u64 {
    count_colorings(&zh_construct(d, Orientation::Standard).code, x)
}

/// Linear system of a presentation over a linear quandle: one row per
/// crossing, one column per generator.
pub fn relation_matrix(p: &QuandlePresentation, lin: Linear) -> ModMatrix {
    let (n, t) = (lin.n as i64, lin.t as i64);
    let mut m = ModMatrix::zeros(p.relations.len(), p.generators, lin.n);
    for (row, r) in p.relations.iter().enumerate() {
        // t·left + (1 − t)·right − result = 0
        let mut coeffs = vec![0i64; p.generators];
        coeffs[r.left] += t;
        coeffs[r.right] += 1 - t;
        coeffs[r.result] -= 1;
        for (col, c) in coeffs.into_iter().enumerate() {
            m.set(row, col, c.rem_euclid(n));
        }
    }
    m
}

/// Coloring count by linear algebra, for linear quandles only.
pub fn count_colorings_linear(d: &GaussCode, x: &FiniteQuandle) -> Option<u128> {
    let lin = x.linear()?;
    let m = relation_matrix(&presentation(d), lin);
    solution_count_mod_n(&m).ok()
}

/// A map X × X → ⟨u⟩ stored as exponents of u.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCocycle {
    pub group: CyclicGroup,
    n: usize,
    exponents: Vec<i64>,
}

impl TwoCocycle {
    pub fn from_exponents(group: CyclicGroup, rows: &[Vec<i64>]) -> Result<TwoCocycle, QuandleError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(QuandleError::NotSquare);
        }
        Ok(TwoCocycle { group, n, exponents: rows.concat() })
    }

    /// φ ≡ 1.
    pub fn trivial(n: usize, group: CyclicGroup) -> TwoCocycle {
        TwoCocycle { group, n, exponents: vec![0; n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Exponent e with φ(x, y) = u^e.
    pub fn exponent(&self, x: u32, y: u32) -> i64 {
        self.exponents[x as usize * self.n + y as usize]
    }
}

/// The cocycle on dihedral(4) equal to u at (0, 1) and (0, 3), 1 elsewhere.
pub fn cjkls_cocycle() -> TwoCocycle {
    let mut rows = vec![vec![0; 4]; 4];
    rows[0][1] = 1;
    rows[0][3] = 1;
    TwoCocycle::from_exponents(CyclicGroup::Infinite, &rows).expect("square table")
}

/// φ(x, x) = 1 and φ(x, z) φ(x*z, y*z) = φ(x*y, z) φ(x, y) for all x, y, z.
pub fn check_cocycle(x: &FiniteQuandle, phi: &TwoCocycle) -> Result<(), QuandleError> {
    if phi.size() != x.size() {
        return Err(QuandleError::SizeMismatch { expected: x.size(), found: phi.size() });
    }
    let g = phi.group;
    let n = x.size() as u32;
    for a in 0..n {
        if g.reduce(phi.exponent(a, a)) != 0 {
            return Err(QuandleError::DiagonalViolation(a));
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let lhs = phi.exponent(a, c) + phi.exponent(x.op(a, c), x.op(b, c));
                let rhs = phi.exponent(x.op(a, b), c) + phi.exponent(a, b);
                if g.reduce(lhs - rhs) != 0 {
                    return Err(QuandleError::CocycleViolation((a, b, c)));
                }
            }
        }
    }
    Ok(())
}

/// Exponent of the Boltzmann product of one coloring: a positive crossing
/// contributes φ(under_in, over), a negative one φ(under_out, over)⁻¹.
pub fn boltzmann_exponent(p: &QuandlePresentation, phi: &TwoCocycle, coloring: &[u32]) -> i64 {
    p.crossings
        .iter()
        .map(|&(sign, under_in, over, under_out)| match sign {
            Sign::Positive => phi.exponent(coloring[under_in], coloring[over]),
            Sign::Negative => -phi.exponent(coloring[under_out], coloring[over]),
        })
        .sum()
}

/// Σ over colorings of the product of Boltzmann weights.
pub fn cocycle_invariant(d: &GaussCode, x: &FiniteQuandle, phi: &TwoCocycle) -> Result<GroupRingElement, QuandleError> {
    check_cocycle(x, phi)?;
    let p = presentation(d);
    let mut out = GroupRingElement::zero(phi.group);
    for_each_coloring(&p, x, |c| out.add_term(1, boltzmann_exponent(&p, phi, c)));
    Ok(out)
}

pub fn extended_cocycle_invariant(
    d: &GaussCode,
    x: &FiniteQuandle,
    phi: &TwoCocycle,
) -> Result<GroupRingElement, QuandleError> {
    cocycle_invariant(&zh_construct(d, Orientation::Standard).code, x, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> GaussCode {
        s.parse().unwrap()
    }

    #[test]
    fn dihedral_four_table() {
        let q = FiniteQuandle::dihedral(4).unwrap();
        assert_eq!(q.rows(), vec![vec![0, 2, 0, 2], vec![3, 1, 3, 1], vec![2, 0, 2, 0], vec![1, 3, 1, 3]]);
    }

    #[test]
    fn alexander_entry_and_bad_t() {
        let q = FiniteQuandle::alexander(7, 3).unwrap();
        assert_eq!(q.op(2, 5), 3);
        assert!(matches!(FiniteQuandle::alexander(6, 2), Err(QuandleError::AxiomViolation { axiom: 2, .. })));
    }

    #[test]
    fn adjoin_v_is_a_quandle() {
        for q in [
            FiniteQuandle::trivial(1),
            FiniteQuandle::dihedral(4).unwrap(),
            FiniteQuandle::alexander(7, 3).unwrap(),
        ] {
            let qv = q.adjoin_v();
            assert_eq!(qv.size(), q.size() + 1);
            assert_eq!(qv.check_axioms(), Ok(()));
        }
        assert_eq!(FiniteQuandle::trivial(1).adjoin_v().rows(), FiniteQuandle::trivial(2).rows());
    }

    #[test]
    fn spec_strings() {
        assert_eq!("dihedral:4".parse::<FiniteQuandle>().unwrap(), FiniteQuandle::dihedral(4).unwrap());
        assert_eq!("trivial:3+v".parse::<FiniteQuandle>().unwrap().size(), 4);
        assert!("alexander:7".parse::<FiniteQuandle>().is_err());
        assert!("cyclic:3".parse::<FiniteQuandle>().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let q = FiniteQuandle::dihedral(3).unwrap();
        let back = FiniteQuandle::from_csv("d3", &q.to_csv()).unwrap();
        assert_eq!(back.rows(), q.rows());
    }

    #[test]
    fn presentations() {
        let d = code("O1+O2+U1+U2+");
        let p = presentation(&d);
        assert_eq!((p.generators, p.relations.len()), (2, 2));
        let e = extended_presentation(&d);
        assert_eq!((e.generators, e.relations.len()), (7, 6));
        let u = presentation(&GaussCode::unknot());
        assert_eq!((u.generators, u.relations.len()), (1, 0));
    }

    #[test]
    fn virtual_trefoil_counts() {
        let d = code("O1+O2+U1+U2+");
        let a73 = FiniteQuandle::alexander(7, 3).unwrap();
        let d4 = FiniteQuandle::dihedral(4).unwrap();
        assert_eq!(count_colorings(&d, &a73), 7);
        assert_eq!(extended_colorings(&d, &a73), 7);
        assert_eq!(extended_colorings(&d, &d4), 16);
        assert_eq!(extended_colorings(&GaussCode::unknot(), &a73), 49);
        let z = zh_construct(&d, Orientation::Standard).code;
        assert_eq!(count_colorings_linear(&z, &a73), Some(7));
        assert_eq!(count_colorings_linear(&z, &d4), Some(16));
    }

    #[test]
    fn cocycles() {
        let d4 = FiniteQuandle::dihedral(4).unwrap();
        assert_eq!(check_cocycle(&d4, &cjkls_cocycle()), Ok(()));
        assert_eq!(check_cocycle(&d4, &TwoCocycle::trivial(4, CyclicGroup::Infinite)), Ok(()));
        let mut rows = vec![vec![0; 4]; 4];
        rows[2][2] = 1;
        let bad = TwoCocycle::from_exponents(CyclicGroup::Infinite, &rows).unwrap();
        assert_eq!(check_cocycle(&d4, &bad), Err(QuandleError::DiagonalViolation(2)));
        let plain = cocycle_invariant(&code("O1+O2+U1+U2+"), &d4, &cjkls_cocycle()).unwrap();
        assert_eq!(plain.to_string(), "4");
    }
}
