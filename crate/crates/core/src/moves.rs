//! Diagram rewriting: oriented Reidemeister moves on Gauss codes, ω moves
//! on Zh diagrams and Alexander-system moves, plus seeded random walks.
//!
//! Detour moves need no implementation: Gauss codes do not record virtual
//! crossings, so a detour move leaves the code unchanged.
//!
//! The R3 move is the braid relation σ1σ2σ1 = σ2σ1σ2 with positive
//! crossings, read as three strands A, B, C:
//!
//! ```text
//! A: O_x O_y      <->   O_y O_x
//! B: U_x O_z      <->   O_z U_x
//! C: U_y U_z      <->   U_z U_y
//! ```
//!
//! together with its mirror image (roles swapped, all signs negative).
//! Random walks use ChaCha8 seeded from a `u64`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{GaussCode, Passage, Role, ShortArc, Sign};
use crate::zh::AlexanderSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move site {0} does not apply to this diagram")]
    IllegalSite(String),
    #[error("unknown move kind {0:?}")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    R1Insert,
    R1Delete,
    R2Insert,
    R2Delete,
    R3,
    OmegaOcc,
    OmegaReconnect,
    As1,
    As2A,
    As2B,
    As3A,
    As3B,
    /// Gamma reordering in an Alexander system (ωOCC on γ).
    AsOcc,
    /// Two same-sign chords inserted as if they were an R2 pair. Not a valid
    /// move; it exists as a negative control for fuzzing.
    BadR2,
}

impl MoveKind {
    pub const REIDEMEISTER: [MoveKind; 5] =
        [MoveKind::R1Insert, MoveKind::R1Delete, MoveKind::R2Insert, MoveKind::R2Delete, MoveKind::R3];
    pub const OMEGA: [MoveKind; 2] = [MoveKind::OmegaOcc, MoveKind::OmegaReconnect];
    pub const ALEXANDER: [MoveKind; 6] =
        [MoveKind::As1, MoveKind::As2A, MoveKind::As2B, MoveKind::As3A, MoveKind::As3B, MoveKind::AsOcc];

    const NAMES: [(MoveKind, &'static str); 14] = [
        (MoveKind::R1Insert, "r1+"),
        (MoveKind::R1Delete, "r1-"),
        (MoveKind::R2Insert, "r2+"),
        (MoveKind::R2Delete, "r2-"),
        (MoveKind::R3, "r3"),
        (MoveKind::OmegaOcc, "occ"),
        (MoveKind::OmegaReconnect, "reconnect"),
        (MoveKind::As1, "as1"),
        (MoveKind::As2A, "as2a"),
        (MoveKind::As2B, "as2b"),
        (MoveKind::As3A, "as3a"),
        (MoveKind::As3B, "as3b"),
        (MoveKind::AsOcc, "as-occ"),
        (MoveKind::BadR2, "bad-r2"),
    ];

    pub fn name(self) -> &'static str {
        MoveKind::NAMES.iter().find(|(k, _)| *k == self).map(|(_, n)| *n).expect("every kind is named")
    }

    /// Parse a comma-separated list; `r` expands to all Reidemeister kinds
    /// and `omega` to both ω kinds.
    pub fn parse_list(text: &str) -> Result<Vec<MoveKind>, MoveError> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "r" => out.extend(MoveKind::REIDEMEISTER),
                "omega" => out.extend(MoveKind::OMEGA),
                "as" => out.extend(MoveKind::ALEXANDER),
                _ => out.push(part.parse()?),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveKind {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<MoveKind, MoveError> {
        MoveKind::NAMES
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(k, _)| *k)
            .ok_or_else(|| MoveError::UnknownKind(s.to_string()))
    }
}

/// Where and how to apply a move. Positions are gaps of a component word:
/// position `p` is just before passage `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveSite {
    R1Insert { component: usize, position: usize, over_first: bool, sign: Sign },
    R1Delete { crossing: u32 },
    /// New crossings x (sign `sign`) and y (opposite sign); the over pair
    /// `O_x O_y` goes in at `over`, the under pair at `under`, as `U_x U_y`
    /// when the strands are parallel and `U_y U_x` otherwise.
    R2Insert { over: (usize, usize), under: (usize, usize), parallel: bool, sign: Sign },
    R2Delete { first: u32, second: u32 },
    R3 { x: u32, y: u32, z: u32, forward: bool },
    OmegaOcc { position: usize },
    OmegaReconnect { start: usize, end: usize },
    As1,
    As2Insert { component: usize, position: usize, first: Sign, gamma_position: usize },
    As2Remove { component: usize, position: usize },
    As3 { crossing: u32, raise: bool },
    AsOcc { component: usize, position: usize },
    BadR2 { over: (usize, usize), under: (usize, usize), sign: Sign },
}

impl MoveSite {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveSite::R1Insert { .. } => MoveKind::R1Insert,
            MoveSite::R1Delete { .. } => MoveKind::R1Delete,
            MoveSite::R2Insert { .. } => MoveKind::R2Insert,
            MoveSite::R2Delete { .. } => MoveKind::R2Delete,
            MoveSite::R3 { .. } => MoveKind::R3,
            MoveSite::OmegaOcc { .. } => MoveKind::OmegaOcc,
            MoveSite::OmegaReconnect { .. } => MoveKind::OmegaReconnect,
            MoveSite::As1 => MoveKind::As1,
            MoveSite::As2Insert { first: Sign::Positive, .. } => MoveKind::As2A,
            MoveSite::As2Insert { first: Sign::Negative, .. } => MoveKind::As2B,
            // the kind of a removal depends on the pair, see `as_sites`
            MoveSite::As2Remove { .. } => MoveKind::As2A,
            MoveSite::As3 { raise: true, .. } => MoveKind::As3A,
            MoveSite::As3 { raise: false, .. } => MoveKind::As3B,
            MoveSite::AsOcc { .. } => MoveKind::AsOcc,
            MoveSite::BadR2 { .. } => MoveKind::BadR2,
        }
    }
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

type Words = Vec<Vec<Passage>>;

fn positions(words: &Words) -> HashMap<(u32, Role), (usize, usize)> {
    let mut map = HashMap::new();
    for (c, w) in words.iter().enumerate() {
        for (i, p) in w.iter().enumerate() {
            map.insert((p.id, p.role), (c, i));
        }
    }
    map
}

/// Whether passage `b` immediately follows passage `a` on the same component.
fn follows(words: &Words, a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 == b.0 && (a.1 + 1) % words[a.0].len() == b.1 && a != b
}

fn gaps(words: &Words, component: usize) -> usize {
    words[component].len().max(1)
}

fn next_id(words: &Words) -> u32 {
    words.iter().flatten().map(|p| p.id).max().unwrap_or(0) + 1
}

fn all_gaps(words: &Words) -> Vec<(usize, usize)> {
    (0..words.len()).flat_map(|c| (0..gaps(words, c)).map(move |p| (c, p))).collect()
}

/// Insert two pairs of passages at two gaps, which may coincide; at equal
/// gaps `first` ends up before `second`.
fn insert_pairs(words: &mut Words, at1: (usize, usize), first: [Passage; 2], at2: (usize, usize), second: [Passage; 2]) {
    let put = |words: &mut Words, (c, p): (usize, usize), pair: [Passage; 2]| {
        words[c].insert(p, pair[1]);
        words[c].insert(p, pair[0]);
    };
    if at1.0 == at2.0 && at1.1 <= at2.1 {
        put(words, at2, second);
        put(words, at1, first);
    } else {
        put(words, at1, first);
        put(words, at2, second);
    }
}

fn remove_crossings(words: &mut Words, ids: &[u32]) {
    for w in words.iter_mut() {
        w.retain(|p| !ids.contains(&p.id));
    }
}

fn r3_pattern(forward: bool, mirror: bool) -> [[Role; 2]; 3] {
    use Role::*;
    let base = if forward {
        [[Over, Over], [Under, Over], [Under, Under]]
    } else {
        [[Over, Over], [Over, Under], [Under, Under]]
    };
    if mirror {
        base.map(|pair| pair.map(Role::flip))
    } else {
        base
    }
}

/// Crossing ids of the three adjacent pairs of an R3 site, in order.
fn r3_ids(x: u32, y: u32, z: u32, forward: bool) -> [[u32; 2]; 3] {
    if forward {
        [[x, y], [x, z], [y, z]]
    } else {
        [[y, x], [z, x], [z, y]]
    }
}

fn r3_matches(words: &Words, pos: &HashMap<(u32, Role), (usize, usize)>, signs: &HashMap<u32, Sign>, site: (u32, u32, u32, bool)) -> bool {
    let (x, y, z, forward) = site;
    let s = signs[&x];
    if signs[&y] != s || signs[&z] != s {
        return false;
    }
    let roles = r3_pattern(forward, s == Sign::Negative);
    let ids = r3_ids(x, y, z, forward);
    (0..3).all(|k| follows(words, pos[&(ids[k][0], roles[k][0])], pos[&(ids[k][1], roles[k][1])]))
}

/// All legal sites of one kind. `omega` names the ω component for the ω
/// kinds; without it they have no sites.
pub fn enumerate_sites(d: &GaussCode, kind: MoveKind, omega: Option<usize>) -> Vec<MoveSite> {
    let words: Words = d.components().to_vec();
    let pos = positions(&words);
    let signs: HashMap<u32, Sign> = d.crossings().iter().map(|x| (x.id, x.sign)).collect();
    let mut out = Vec::new();
    match kind {
        MoveKind::R1Insert => {
            for (component, position) in all_gaps(&words) {
                for over_first in [true, false] {
                    for sign in [Sign::Positive, Sign::Negative] {
                        out.push(MoveSite::R1Insert { component, position, over_first, sign });
                    }
                }
            }
        }
        MoveKind::R1Delete => {
            for x in d.crossings() {
                if follows(&words, x.over, x.under) || follows(&words, x.under, x.over) {
                    out.push(MoveSite::R1Delete { crossing: x.id });
                }
            }
        }
        MoveKind::R2Insert | MoveKind::BadR2 => {
            let g = all_gaps(&words);
            for &over in &g {
                for &under in &g {
                    for sign in [Sign::Positive, Sign::Negative] {
                        if kind == MoveKind::BadR2 {
                            out.push(MoveSite::BadR2 { over, under, sign });
                            continue;
                        }
                        for parallel in [true, false] {
                            out.push(MoveSite::R2Insert { over, under, parallel, sign });
                        }
                    }
                }
            }
        }
        MoveKind::R2Delete => {
            let mut seen = BTreeSet::new();
            for w in &words {
                for i in 0..w.len() {
                    let (p, q) = (w[i], w[(i + 1) % w.len()]);
                    if p.id == q.id || p.role != Role::Over || q.role != Role::Over || p.sign == q.sign {
                        continue;
                    }
                    let ux = pos[&(p.id, Role::Under)];
                    let uy = pos[&(q.id, Role::Under)];
                    if (follows(&words, ux, uy) || follows(&words, uy, ux)) && seen.insert((p.id, q.id)) {
                        out.push(MoveSite::R2Delete { first: p.id, second: q.id });
                    }
                }
            }
        }
        MoveKind::R3 => {
            let ids: Vec<u32> = signs.keys().copied().collect();
            for &x in &ids {
                for &y in &ids {
                    for &z in &ids {
                        if x == y || y == z || x == z {
                            continue;
                        }
                        for forward in [true, false] {
                            if r3_matches(&words, &pos, &signs, (x, y, z, forward)) {
                                out.push(MoveSite::R3 { x, y, z, forward });
                            }
                        }
                    }
                }
            }
        }
        MoveKind::OmegaOcc => {
            if let Some(w) = omega.map(|o| &words[o]) {
                if w.len() >= 2 {
                    out.extend((0..w.len()).map(|position| MoveSite::OmegaOcc { position }));
                }
            }
        }
        MoveKind::OmegaReconnect => {
            if let Some(w) = omega.map(|o| &words[o]) {
                for start in 0..w.len() {
                    for end in start + 1..w.len() {
                        out.push(MoveSite::OmegaReconnect { start, end });
                    }
                }
            }
        }
        MoveKind::As1 | MoveKind::As2A | MoveKind::As2B | MoveKind::As3A | MoveKind::As3B | MoveKind::AsOcc => {}
    }
    out.sort();
    out
}

/// Apply a move to a diagram. The site must be one that
/// [`enumerate_sites`] lists for this diagram.
pub fn apply(d: &GaussCode, site: &MoveSite, omega: Option<usize>) -> Result<GaussCode, MoveError> {
    let illegal = || MoveError::IllegalSite(site.to_string());
    if !enumerate_sites(d, site.kind(), omega).contains(site) {
        return Err(illegal());
    }
    let mut words: Words = d.components().to_vec();
    let m = next_id(&words);
    match *site {
        MoveSite::R1Insert { component, position, over_first, sign } => {
            let (a, b) = (Passage::over(m, sign), Passage::under(m, sign));
            let pair = if over_first { [a, b] } else { [b, a] };
            words[component].insert(position, pair[1]);
            words[component].insert(position, pair[0]);
        }
        MoveSite::R1Delete { crossing } => remove_crossings(&mut words, &[crossing]),
        MoveSite::R2Insert { over, under, parallel, sign } => {
            let (x, y) = (m, m + 1);
            let overs = [Passage::over(x, sign), Passage::over(y, sign.flip())];
            let (ux, uy) = (Passage::under(x, sign), Passage::under(y, sign.flip()));
            let unders = if parallel { [ux, uy] } else { [uy, ux] };
            insert_pairs(&mut words, over, overs, under, unders);
        }
        MoveSite::BadR2 { over, under, sign } => {
            let (x, y) = (m, m + 1);
            let overs = [Passage::over(x, sign), Passage::over(y, sign)];
            let unders = [Passage::under(x, sign), Passage::under(y, sign)];
            insert_pairs(&mut words, over, overs, under, unders);
        }
        MoveSite::R2Delete { first, second } => remove_crossings(&mut words, &[first, second]),
        MoveSite::R3 { x, y, z, forward } => {
            let pos = positions(&words);
            let s = d.sign_of(x).ok_or_else(illegal)?;
            let roles = r3_pattern(forward, s == Sign::Negative);
            let ids = r3_ids(x, y, z, forward);
            for k in 0..3 {
                let a = pos[&(ids[k][0], roles[k][0])];
                let b = pos[&(ids[k][1], roles[k][1])];
                let w = &mut words[a.0];
                w.swap(a.1, b.1);
            }
        }
        MoveSite::OmegaOcc { position } => {
            let w = &mut words[omega.ok_or_else(illegal)?];
            let n = w.len();
            w.swap(position, (position + 1) % n);
        }
        MoveSite::OmegaReconnect { start, end } => {
            words[omega.ok_or_else(illegal)?][start..=end].reverse();
        }
        _ => return Err(illegal()),
    }
    GaussCode::new(words).map_err(|_| illegal())
}

/// One step of a random walk and the diagram it produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStep {
    pub site: MoveSite,
    pub code: GaussCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub start: GaussCode,
    pub steps: Vec<WalkStep>,
}

impl Walk {
    pub fn last(&self) -> &GaussCode {
        self.steps.last().map(|s| &s.code).unwrap_or(&self.start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOptions {
    /// Soft cap: moves that would exceed it are only taken when nothing
    /// else applies.
    pub max_crossings: usize,
    pub omega: Option<usize>,
}

impl Default for WalkOptions {
    fn default() -> WalkOptions {
        WalkOptions { max_crossings: 10, omega: None }
    }
}

fn growth(site: &MoveSite) -> usize {
    match site {
        MoveSite::R1Insert { .. } => 1,
        MoveSite::R2Insert { .. } | MoveSite::BadR2 { .. } => 2,
        _ => 0,
    }
}

/// A seeded random walk of `n_steps` moves of the given kinds.
pub fn random_walk(d: &GaussCode, n_steps: usize, seed: u64, kinds: &[MoveKind]) -> Walk {
    random_walk_with(d, n_steps, seed, kinds, WalkOptions::default())
}

/// Each step picks a kind uniformly among those with a site, then a site
/// uniformly. The walk stops early only if no kind applies at all.
pub fn random_walk_with(d: &GaussCode, n_steps: usize, seed: u64, kinds: &[MoveKind], opts: WalkOptions) -> Walk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = d.clone();
    let mut steps = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let n = current.num_crossings();
        let mut options: Vec<Vec<MoveSite>> = Vec::new();
        let mut fallback: Vec<Vec<MoveSite>> = Vec::new();
        for &k in kinds {
            let sites = enumerate_sites(&current, k, opts.omega);
            let (fit, over): (Vec<MoveSite>, Vec<MoveSite>) =
                sites.into_iter().partition(|s| n + growth(s) <= opts.max_crossings);
            if !fit.is_empty() {
                options.push(fit);
            }
            if !over.is_empty() {
                fallback.push(over);
            }
        }
        let pool = if options.is_empty() { &fallback } else { &options };
        let Some(sites) = pool.choose(&mut rng) else { break };
        let site = *sites.choose(&mut rng).expect("nonempty site list");
        current = apply(&current, &site, opts.omega).expect("enumerated sites apply");
        steps.push(WalkStep { site, code: current.clone() });
    }
    Walk { start: d.clone(), steps }
}

/// Mutable view of an Alexander system used by the AS moves.
struct Editable {
    base: Words,
    /// `labels[c][i]` labels the short arc ending at passage i; empty
    /// components keep one label.
    labels: Vec<Vec<i64>>,
    gamma: Words,
    gamma_ids: HashSet<u32>,
    next_id: u32,
}

impl Editable {
    fn new(s: &AlexanderSystem) -> Editable {
        let comps = s.code.components();
        let base: Words = comps[..s.base_components].to_vec();
        let gamma: Words = comps[s.base_components..].to_vec();
        let labels = base
            .iter()
            .enumerate()
            .map(|(c, w)| {
                (0..w.len().max(1))
                    .map(|i| s.labels.get(&ShortArc { component: c, index: i }).copied().unwrap_or(0))
                    .collect()
            })
            .collect();
        let gamma_ids = gamma.iter().flatten().map(|p| p.id).collect();
        let next_id = s.code.max_crossing_id().unwrap_or(0) + 1;
        Editable { base, labels, gamma, gamma_ids, next_id }
    }

    fn finish(mut self) -> AlexanderSystem {
        if self.gamma.is_empty() {
            self.gamma.push(Vec::new());
        }
        let base_components = self.base.len();
        let mut labels = std::collections::BTreeMap::new();
        for (c, ls) in self.labels.iter().enumerate() {
            for (i, l) in ls.iter().enumerate() {
                labels.insert(ShortArc { component: c, index: i }, *l);
            }
        }
        let mut comps = self.base;
        comps.extend(self.gamma);
        AlexanderSystem { code: GaussCode::new(comps).expect("AS moves keep codes valid"), base_components, labels }
    }

    fn is_gamma(&self, p: &Passage) -> bool {
        self.gamma_ids.contains(&p.id)
    }

    /// Put a new γ crossing of sign `sign` before base passage `k` of
    /// component `c` (k may equal the length). The arc ending at the new
    /// passage gets `label`; the following arc gets `label + sign`.
    fn insert(&mut self, c: usize, k: usize, sign: Sign, label: i64, gamma_position: usize) {
        let id = self.next_id;
        self.next_id += 1;
        self.gamma_ids.insert(id);
        if self.gamma.is_empty() {
            self.gamma.push(Vec::new());
        }
        let g = &mut self.gamma[0];
        g.insert(gamma_position.min(g.len()), Passage::over(id, sign));
        let was_empty = self.base[c].is_empty();
        self.base[c].insert(k, Passage::under(id, sign));
        if was_empty {
            self.labels[c] = vec![label];
            return;
        }
        self.labels[c].insert(k, label);
        let n = self.base[c].len();
        self.labels[c][(k + 1) % n] = label + sign.value();
    }

    /// Remove the γ passages at positions `k` and `k + 1` of component `c`.
    /// The arc after the pair takes the label of the arc before it.
    fn remove_pair(&mut self, c: usize, k: usize) {
        let n = self.base[c].len();
        let (i, j) = (k, (k + 1) % n);
        let keep = self.labels[c][i];
        let follower = self.base[c][(k + 2) % n];
        let ids = [self.base[c][i].id, self.base[c][j].id];
        for &r in [i.max(j), i.min(j)].iter() {
            self.base[c].remove(r);
            self.labels[c].remove(r);
        }
        for w in &mut self.gamma {
            w.retain(|p| !ids.contains(&p.id));
        }
        for id in ids {
            self.gamma_ids.remove(&id);
        }
        if self.base[c].is_empty() {
            self.labels[c] = vec![keep];
        } else {
            let f = self.base[c].iter().position(|p| *p == follower).expect("follower survives");
            self.labels[c][f] = keep;
        }
    }

    fn find(&self, id: u32, role: Role) -> (usize, usize) {
        for (c, w) in self.base.iter().enumerate() {
            if let Some(i) = w.iter().position(|p| p.id == id && p.role == role) {
                return (c, i);
            }
        }
        panic!("passage {id} not in the base diagram")
    }

    /// Whether positions k, k+1 of component c hold γ passages of opposite sign.
    fn cancelling_pair(&self, c: usize, k: usize) -> bool {
        let w = &self.base[c];
        let n = w.len();
        if n < 2 {
            return false;
        }
        let (p, q) = (w[k % n], w[(k + 1) % n]);
        p.id != q.id && self.is_gamma(&p) && self.is_gamma(&q) && p.sign != q.sign
    }

    /// Shift the level of self-crossing x by δ = ±1, cancelling any γ pair
    /// this creates next to x.
    fn shift_level(&mut self, x: u32, delta: Sign) {
        for role in [Role::Over, Role::Under] {
            let (c, i) = self.find(x, role);
            let l = self.labels[c][i];
            let end = self.gamma.first().map_or(0, Vec::len);
            self.insert(c, i, delta, l, end);
            let n = self.base[c].len();
            if self.cancelling_pair(c, (i + n - 1) % n) {
                self.remove_pair(c, (i + n - 1) % n);
            }

            let (c, j) = self.find(x, role);
            let n = self.base[c].len();
            let out = self.labels[c][(j + 1) % n];
            let end = self.gamma.first().map_or(0, Vec::len);
            self.insert(c, j + 1, delta.flip(), out + delta.value(), end);
            if self.cancelling_pair(c, j + 1) {
                self.remove_pair(c, j + 1);
            }
        }
    }
}

fn as2_remove_kind(s: &AlexanderSystem, component: usize, position: usize) -> MoveKind {
    let p = s.code.components()[component][position];
    if p.sign == Sign::Positive {
        MoveKind::As2A
    } else {
        MoveKind::As2B
    }
}

/// Legal AS-move sites of one kind on an Alexander system.
pub fn as_sites(s: &AlexanderSystem, kind: MoveKind) -> Vec<MoveSite> {
    let e = Editable::new(s);
    let mut out = Vec::new();
    match kind {
        MoveKind::As1 => out.push(MoveSite::As1),
        MoveKind::As2A | MoveKind::As2B => {
            let first = if kind == MoveKind::As2A { Sign::Positive } else { Sign::Negative };
            let glen = e.gamma.first().map_or(0, Vec::len);
            for component in 0..e.base.len() {
                for position in 0..gaps(&e.base, component) {
                    for gamma_position in 0..=glen {
                        out.push(MoveSite::As2Insert { component, position, first, gamma_position });
                    }
                }
                for position in 0..e.base[component].len() {
                    if e.cancelling_pair(component, position) && as2_remove_kind(s, component, position) == kind {
                        out.push(MoveSite::As2Remove { component, position });
                    }
                }
            }
        }
        MoveKind::As3A | MoveKind::As3B => {
            let raise = kind == MoveKind::As3A;
            let mut ids: Vec<u32> = e.base.iter().flatten().filter(|p| !e.is_gamma(p)).map(|p| p.id).collect();
            ids.sort();
            ids.dedup();
            out.extend(ids.into_iter().map(|crossing| MoveSite::As3 { crossing, raise }));
        }
        MoveKind::AsOcc => {
            for (g, w) in e.gamma.iter().enumerate() {
                if w.len() >= 2 {
                    for position in 0..w.len() {
                        out.push(MoveSite::AsOcc { component: s.base_components + g, position });
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// Apply an Alexander-system move.
pub fn as_move(s: &AlexanderSystem, site: &MoveSite) -> Result<AlexanderSystem, MoveError> {
    let kind = match *site {
        MoveSite::As2Remove { component, position } => {
            if component >= s.base_components || position >= s.code.components()[component].len() {
                return Err(MoveError::IllegalSite(site.to_string()));
            }
            as2_remove_kind(s, component, position)
        }
        _ => site.kind(),
    };
    if !as_sites(s, kind).contains(site) {
        return Err(MoveError::IllegalSite(site.to_string()));
    }
    let mut e = Editable::new(s);
    match *site {
        MoveSite::As1 => {}
        MoveSite::As2Insert { component, position, first, gamma_position } => {
            let l = e.labels[component][position];
            e.insert(component, position, first, l, gamma_position);
            e.insert(component, position + 1, first.flip(), l + first.value(), gamma_position + 1);
        }
        MoveSite::As2Remove { component, position } => e.remove_pair(component, position),
        MoveSite::As3 { crossing, raise } => {
            e.shift_level(crossing, if raise { Sign::Positive } else { Sign::Negative });
        }
        MoveSite::AsOcc { component, position } => {
            let w = &mut e.gamma[component - s.base_components];
            let n = w.len();
            w.swap(position, (position + 1) % n);
        }
        _ => return Err(MoveError::IllegalSite(site.to_string())),
    }
    Ok(e.finish())
}

/// Seeded random walk of AS moves; returns every intermediate system.
pub fn random_as_walk(s: &AlexanderSystem, n_steps: usize, seed: u64, kinds: &[MoveKind]) -> Vec<(MoveSite, AlexanderSystem)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = s.clone();
    let mut out = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let options: Vec<Vec<MoveSite>> =
            kinds.iter().map(|&k| as_sites(&current, k)).filter(|v| !v.is_empty()).collect();
        let Some(sites) = options.choose(&mut rng) else { break };
        let site = *sites.choose(&mut rng).expect("nonempty site list");
        current = as_move(&current, &site).expect("enumerated sites apply");
        out.push((site, current.clone()));
    }
    out
}
