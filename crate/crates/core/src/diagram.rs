//! Gauss-code data model for virtual link diagrams.
//!
//! A diagram is a list of oriented components, each a cyclic word of
//! passages through classical crossings. Virtual crossings carry no data:
//! two codes describe the same diagram up to detour moves exactly when they
//! are equal.
//!
//! Text form: components are separated by `,` and every passage is written
//! `O<id><sign>` or `U<id><sign>`, e.g. `O1+O2+U1+U2+`. The empty string is
//! the zero-crossing unknot, and `,` is the two-component unlink.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("malformed token {token:?} at byte {position}")]
    MalformedToken { position: usize, token: String },
    #[error("crossing {id} must appear exactly once over and once under")]
    UnmatchedCrossing { id: u32 },
    #[error("the two passages of crossing {id} carry different signs")]
    SignMismatch { id: u32 },
    #[error("a diagram needs at least one component")]
    NoComponents,
}

impl CodeError {
    /// Byte offset of the offending token, when the error came from text.
    pub fn position(&self) -> Option<usize> {
        match self {
            CodeError::MalformedToken { position, .. } => Some(*position),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Over,
    Under,
}

impl Role {
    pub fn flip(self) -> Role {
        match self {
            Role::Over => Role::Under,
            Role::Under => Role::Over,
        }
    }

    fn letter(self) -> char {
        match self {
            Role::Over => 'O',
            Role::Under => 'U',
        }
    }
}

/// Crossing sign. Positive means the under strand passes from the right of
/// the over strand to its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Sign, String> {
        Sign::from_value(v as i64).ok_or_else(|| format!("sign must be 1 or -1, got {v}"))
    }
}

/// One pass of a component through a classical crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Passage {
    pub id: u32,
    pub role: Role,
    pub sign: Sign,
}

impl Passage {
    pub fn new(id: u32, role: Role, sign: Sign) -> Passage {
        Passage { id, role, sign }
    }

    pub fn over(id: u32, sign: Sign) -> Passage {
        Passage::new(id, Role::Over, sign)
    }

    pub fn under(id: u32, sign: Sign) -> Passage {
        Passage::new(id, Role::Under, sign)
    }
}

impl fmt::Display for Passage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.role.letter(), self.id, self.sign.symbol())
    }
}

/// The four strand-ends meeting at a crossing, named relative to the
/// orientation of the strand they belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum End {
    OverIn,
    OverOut,
    UnderIn,
    UnderOut,
}

impl End {
    pub const ALL: [End; 4] = [End::OverIn, End::OverOut, End::UnderIn, End::UnderOut];

    fn index(self) -> usize {
        match self {
            End::OverIn => 0,
            End::OverOut => 1,
            End::UnderIn => 2,
            End::UnderOut => 3,
        }
    }

    fn from_index(i: usize) -> End {
        End::ALL[i]
    }

    pub fn role(self) -> Role {
        match self {
            End::OverIn | End::OverOut => Role::Over,
            End::UnderIn | End::UnderOut => Role::Under,
        }
    }

    pub fn is_in(self) -> bool {
        matches!(self, End::OverIn | End::UnderIn)
    }

    fn incoming(role: Role) -> End {
        match role {
            Role::Over => End::OverIn,
            Role::Under => End::UnderIn,
        }
    }

    fn outgoing(role: Role) -> End {
        match role {
            Role::Over => End::OverOut,
            Role::Under => End::UnderOut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfEdgeSlot {
    pub crossing: u32,
    pub end: End,
}

/// How a crossing is resolved in a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Smoothing {
    /// Joins OverIn with UnderOut and UnderIn with OverOut.
    Oriented,
    /// Joins OverIn with UnderIn and OverOut with UnderOut.
    Disoriented,
}

/// The strand-end reached from `end` by crossing the vertex, or by passing
/// straight through it when the crossing is not smoothed.
pub fn partner(end: End, smoothing: Option<Smoothing>) -> End {
    match (smoothing, end) {
        (None, End::OverIn) => End::OverOut,
        (None, End::OverOut) => End::OverIn,
        (None, End::UnderIn) => End::UnderOut,
        (None, End::UnderOut) => End::UnderIn,
        (Some(Smoothing::Oriented), End::OverIn) => End::UnderOut,
        (Some(Smoothing::Oriented), End::UnderOut) => End::OverIn,
        (Some(Smoothing::Oriented), End::UnderIn) => End::OverOut,
        (Some(Smoothing::Oriented), End::OverOut) => End::UnderIn,
        (Some(Smoothing::Disoriented), End::OverIn) => End::UnderIn,
        (Some(Smoothing::Disoriented), End::UnderIn) => End::OverIn,
        (Some(Smoothing::Disoriented), End::OverOut) => End::UnderOut,
        (Some(Smoothing::Disoriented), End::UnderOut) => End::OverOut,
    }
}

/// The short arc of a component that ends at passage `index`.
///
/// A component with `k > 0` passages has exactly `k` short arcs; an empty
/// component is a single short arc with index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShortArc {
    pub component: usize,
    pub index: usize,
}

/// A maximal run of short arcs from one under-passage to the next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub component: usize,
    /// Short arcs in traversal order; the last one ends at the under
    /// passage closing this arc (unless the component has no under passage).
    pub short_arcs: Vec<ShortArc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingInfo {
    pub id: u32,
    pub sign: Sign,
    /// (component, index) of the over passage.
    pub over: (usize, usize),
    /// (component, index) of the under passage.
    pub under: (usize, usize),
}

impl CrossingInfo {
    pub fn position(&self, role: Role) -> (usize, usize) {
        match role {
            Role::Over => self.over,
            Role::Under => self.under,
        }
    }
}

/// A validated Gauss code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCode", into = "RawCode")]
pub struct GaussCode {
    components: Vec<Vec<Passage>>,
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    components: Vec<Vec<Passage>>,
}

impl TryFrom<RawCode> for GaussCode {
    type Error = CodeError;

    fn try_from(raw: RawCode) -> Result<GaussCode, CodeError> {
        GaussCode::new(raw.components)
    }
}

impl From<GaussCode> for RawCode {
    fn from(code: GaussCode) -> RawCode {
        RawCode { components: code.components }
    }
}

impl GaussCode {
    pub fn new(components: Vec<Vec<Passage>>) -> Result<GaussCode, CodeError> {
        if components.is_empty() {
            return Err(CodeError::NoComponents);
        }
        let mut seen: BTreeMap<u32, (u8, u8, Sign)> = BTreeMap::new();
        for p in components.iter().flatten() {
            let entry = seen.entry(p.id).or_insert((0, 0, p.sign));
            if entry.2 != p.sign {
                return Err(CodeError::SignMismatch { id: p.id });
            }
            match p.role {
                Role::Over => entry.0 += 1,
                Role::Under => entry.1 += 1,
            }
        }
        if let Some((&id, _)) = seen.iter().find(|(_, (o, u, _))| *o != 1 || *u != 1) {
            return Err(CodeError::UnmatchedCrossing { id });
        }
        Ok(GaussCode { components })
    }

    pub fn unknot() -> GaussCode {
        GaussCode { components: vec![Vec::new()] }
    }

    /// The `n`-component unlink with no crossings.
    pub fn unlink(n: usize) -> GaussCode {
        GaussCode { components: vec![Vec::new(); n.max(1)] }
    }

    pub fn components(&self) -> &[Vec<Passage>] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn num_crossings(&self) -> usize {
        self.components.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn into_components(self) -> Vec<Vec<Passage>> {
        self.components
    }

    /// Crossings sorted by id.
    pub fn crossings(&self) -> Vec<CrossingInfo> {
        let mut map: BTreeMap<u32, CrossingInfo> = BTreeMap::new();
        for (c, comp) in self.components.iter().enumerate() {
            for (i, p) in comp.iter().enumerate() {
                let info = map.entry(p.id).or_insert(CrossingInfo {
                    id: p.id,
                    sign: p.sign,
                    over: (0, 0),
                    under: (0, 0),
                });
                match p.role {
                    Role::Over => info.over = (c, i),
                    Role::Under => info.under = (c, i),
                }
            }
        }
        map.into_values().collect()
    }

    pub fn crossing_ids(&self) -> Vec<u32> {
        self.crossings().iter().map(|c| c.id).collect()
    }

    pub fn max_crossing_id(&self) -> Option<u32> {
        self.components.iter().flatten().map(|p| p.id).max()
    }

    pub fn sign_of(&self, id: u32) -> Option<Sign> {
        self.components.iter().flatten().find(|p| p.id == id).map(|p| p.sign)
    }

    pub fn writhe(&self) -> i64 {
        self.crossings().iter().map(|c| c.sign.value()).sum()
    }

    /// Switch every crossing: the planar mirror image.
    pub fn mirror(&self) -> GaussCode {
        let components = self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .map(|p| Passage::new(p.id, p.role.flip(), p.sign.flip()))
                    .collect()
            })
            .collect();
        GaussCode { components }
    }

    /// Same diagram with crossing ids renumbered 1, 2, ... by first appearance.
    pub fn canonical(&self) -> GaussCode {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut next = 1;
        let components = self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .map(|p| {
                        let id = *map.entry(p.id).or_insert_with(|| {
                            next += 1;
                            next - 1
                        });
                        Passage::new(id, p.role, p.sign)
                    })
                    .collect()
            })
            .collect();
        GaussCode { components }
    }

    pub fn short_arcs(&self) -> Vec<ShortArc> {
        let mut out = Vec::new();
        for (c, comp) in self.components.iter().enumerate() {
            for index in 0..comp.len().max(1) {
                out.push(ShortArc { component: c, index });
            }
        }
        out
    }

    /// Arcs in traversal order: for each component, the arc ending at its
    /// first under passage comes first.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut out = Vec::new();
        for (c, comp) in self.components.iter().enumerate() {
            let unders: Vec<usize> = comp
                .iter()
                .enumerate()
                .filter(|(_, p)| p.role == Role::Under)
                .map(|(i, _)| i)
                .collect();
            if unders.is_empty() {
                let short_arcs = (0..comp.len().max(1))
                    .map(|index| ShortArc { component: c, index })
                    .collect();
                out.push(Arc { component: c, short_arcs });
                continue;
            }
            let n = comp.len();
            for (j, &end) in unders.iter().enumerate() {
                let prev = unders[(j + unders.len() - 1) % unders.len()];
                let mut short_arcs = Vec::new();
                let mut i = (prev + 1) % n;
                loop {
                    short_arcs.push(ShortArc { component: c, index: i });
                    if i == end {
                        break;
                    }
                    i = (i + 1) % n;
                }
                out.push(Arc { component: c, short_arcs });
            }
        }
        out
    }

    /// Index into [`GaussCode::arcs`] of the arc containing each short arc.
    pub fn arc_index_of_short_arcs(&self) -> HashMap<ShortArc, usize> {
        let mut map = HashMap::new();
        for (k, arc) in self.arcs().iter().enumerate() {
            for s in &arc.short_arcs {
                map.insert(*s, k);
            }
        }
        map
    }
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, comp) in self.components.iter().enumerate() {
            if c > 0 {
                f.write_str(",")?;
            }
            for p in comp {
                write!(f, "{p}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for GaussCode {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<GaussCode, CodeError> {
        parse_gauss_code(s)
    }
}

/// Parse the `O1+O2+U1+U2+` text form. Whitespace between tokens is ignored.
pub fn parse_gauss_code(text: &str) -> Result<GaussCode, CodeError> {
    let bytes = text.as_bytes();
    let mut components = vec![Vec::new()];
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b',' {
            components.push(Vec::new());
            i += 1;
            continue;
        }
        let start = i;
        let role = match b {
            b'O' | b'o' => Role::Over,
            b'U' | b'u' => Role::Under,
            _ => return Err(malformed(text, start)),
        };
        i += 1;
        let digits_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == digits_start || i >= bytes.len() {
            return Err(malformed(text, start));
        }
        let id: u32 = text[digits_start..i].parse().map_err(|_| malformed(text, start))?;
        let sign = match bytes[i] {
            b'+' => Sign::Positive,
            b'-' => Sign::Negative,
            _ => return Err(malformed(text, start)),
        };
        i += 1;
        components.last_mut().expect("nonempty").push(Passage::new(id, role, sign));
    }
    GaussCode::new(components)
}

fn malformed(text: &str, position: usize) -> CodeError {
    let token: String = text[position..]
        .chars()
        .take_while(|c| !c.is_whitespace() && *c != ',')
        .take(12)
        .collect();
    CodeError::MalformedToken { position, token }
}

pub fn format_gauss_code(code: &GaussCode) -> String {
    code.to_string()
}

/// One traversal of a crossing by a state loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Visit {
    pub crossing: u32,
    pub entry: End,
    pub exit: End,
}

impl Visit {
    /// Whether the loop runs along the original strand orientation when it
    /// arrives at the crossing.
    pub fn compliant_in(&self) -> bool {
        self.entry.is_in()
    }

    pub fn compliant_out(&self) -> bool {
        !self.exit.is_in()
    }
}

/// A closed curve of a state. Empty components give loops with no visits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Loop {
    pub visits: Vec<Visit>,
}

/// Precomputed slot connectivity used by the state sums.
#[derive(Debug, Clone)]
pub(crate) struct Topology {
    pub ids: Vec<u32>,
    pub signs: Vec<Sign>,
    /// For every slot, the slot at the other end of its short arc.
    along: Vec<usize>,
    /// Component owning each slot.
    component_of: Vec<usize>,
    /// Slot order used to seed traversals: the incoming slot of every
    /// passage in code order.
    seeds: Vec<usize>,
    empty_components: Vec<usize>,
}

impl Topology {
    pub fn new(code: &GaussCode) -> Topology {
        let crossings = code.crossings();
        let ids: Vec<u32> = crossings.iter().map(|c| c.id).collect();
        let signs = crossings.iter().map(|c| c.sign).collect();
        let index_of: HashMap<u32, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let slot = |p: &Passage, end: End| index_of[&p.id] * 4 + end.index();
        let mut along = vec![usize::MAX; ids.len() * 4];
        let mut component_of = vec![usize::MAX; ids.len() * 4];
        let mut seeds = Vec::new();
        let mut empty_components = Vec::new();
        for (c, comp) in code.components().iter().enumerate() {
            if comp.is_empty() {
                empty_components.push(c);
                continue;
            }
            for (i, p) in comp.iter().enumerate() {
                let q = &comp[(i + 1) % comp.len()];
                let out = slot(p, End::outgoing(p.role));
                let inn = slot(q, End::incoming(q.role));
                along[out] = inn;
                along[inn] = out;
                component_of[out] = c;
                component_of[inn] = c;
                seeds.push(slot(p, End::incoming(p.role)));
            }
        }
        Topology { ids, signs, along, component_of, seeds, empty_components }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Trace every loop of the state given by `smoothing` (indexed densely;
    /// `None` passes straight through). Loops starting on `skip` are not
    /// traced and an empty `skip` component is not counted. Each loop is
    /// handed to `visit_loop` as a slice of visits.
    pub fn for_each_loop<F>(&self, smoothing: &[Option<Smoothing>], skip: Option<usize>, mut visit_loop: F)
    where
        F: FnMut(&[Visit]),
    {
        let mut seen = vec![false; self.along.len()];
        let mut buf = Vec::new();
        for &start in &self.seeds {
            if seen[start] || Some(self.component_of[start]) == skip {
                continue;
            }
            buf.clear();
            let mut cur = start;
            loop {
                seen[cur] = true;
                let x = cur / 4;
                let entry = End::from_index(cur % 4);
                let exit = partner(entry, smoothing[x]);
                let t = x * 4 + exit.index();
                seen[t] = true;
                buf.push(Visit { crossing: self.ids[x], entry, exit });
                cur = self.along[t];
                if cur == start {
                    break;
                }
            }
            visit_loop(&buf);
        }
        for &c in &self.empty_components {
            if Some(c) != skip {
                visit_loop(&[]);
            }
        }
    }
}

/// Trace the loops of a (partial) smoothing. Crossings absent from the map
/// are passed straight through.
pub fn trace_loops(code: &GaussCode, smoothing: &BTreeMap<u32, Smoothing>) -> Vec<Loop> {
    let topo = Topology::new(code);
    let dense: Vec<Option<Smoothing>> = topo.ids.iter().map(|id| smoothing.get(id).copied()).collect();
    let mut loops = Vec::new();
    topo.for_each_loop(&dense, None, |visits| loops.push(Loop { visits: visits.to_vec() }));
    loops
}
