//! State sums: the Kauffman bracket, the DKM (arrow) bracket with pole
//! reduction, and the Zh-bracket read off from linking with ω^op.
//!
//! The A-smoothing of a positive crossing is the oriented one and the
//! A-smoothing of a negative crossing is the disoriented one. Every state
//! contributes `A^(α−β) · d^(|S|−1) · Π K_{a(C)}` with `d = −A² − A⁻²`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{normalize, ArrowPolynomial, KMonomial};
use crate::diagram::{GaussCode, Role, Sign, Smoothing, Topology, Visit};
use crate::zh::{zh_construct, Orientation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcType {
    /// The smoothing arc joining OverIn and UnderIn.
    InIn,
    /// The smoothing arc joining OverOut and UnderOut.
    OutOut,
}

/// A pole left on a state loop by a disoriented smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PoleToken {
    pub crossing: u32,
    pub arc_type: ArcType,
    pub sigma: i8,
}

impl PoleToken {
    /// The pole created where a loop runs through a disoriented crossing of
    /// the given sign, or `None` if the visit is not disoriented.
    ///
    /// σ records which side of the loop the cusp points to: flipping the
    /// smoothing arc, the strand the loop enters by, or the crossing sign
    /// each flips it.
    pub fn from_visit(v: &Visit, sign: Sign) -> Option<PoleToken> {
        if v.entry.is_in() != v.exit.is_in() || v.entry.role() == v.exit.role() {
            return None;
        }
        let arc_type = if v.entry.is_in() { ArcType::InIn } else { ArcType::OutOut };
        let a = if arc_type == ArcType::InIn { 1 } else { -1 };
        let b = if v.entry.role() == Role::Over { 1 } else { -1 };
        Some(PoleToken { crossing: v.crossing, arc_type, sigma: (a * b * sign.value()) as i8 })
    }
}

/// Cancel cyclically adjacent poles of opposite σ until none are left and
/// return half the number of survivors.
pub fn reduce_poles(tokens: &[PoleToken]) -> usize {
    let sigmas: Vec<i8> = tokens.iter().map(|t| t.sigma).collect();
    reduce_sigmas(&sigmas)
}

/// [`reduce_poles`] on bare σ values.
pub fn reduce_sigmas(sigmas: &[i8]) -> usize {
    let mut stack: Vec<i8> = Vec::with_capacity(sigmas.len());
    for &s in sigmas {
        if stack.last() == Some(&-s) {
            stack.pop();
        } else {
            stack.push(s);
        }
    }
    // the word is cyclic: the two ends may still cancel
    let (mut lo, mut hi) = (0, stack.len());
    while hi - lo >= 2 && stack[lo] == -stack[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    (hi - lo) / 2
}

/// One loop of an arrow state with its poles in traversal order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateLoop {
    pub visits: Vec<Visit>,
    pub poles: Vec<PoleToken>,
}

impl StateLoop {
    pub fn reduced_poles(&self) -> usize {
        reduce_poles(&self.poles)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowState {
    pub smoothing: BTreeMap<u32, Smoothing>,
    pub loops: Vec<StateLoop>,
}

/// Number of A-smoothings and B-smoothings in `smoothing`.
pub fn alpha_beta(d: &GaussCode, smoothing: &BTreeMap<u32, Smoothing>) -> (usize, usize) {
    let mut alpha = 0;
    for x in d.crossings() {
        let oriented = smoothing.get(&x.id) == Some(&Smoothing::Oriented);
        if oriented == (x.sign == Sign::Positive) {
            alpha += 1;
        }
    }
    (alpha, d.num_crossings() - alpha)
}

/// The arrow state of `d` for a complete smoothing.
pub fn arrow_state(d: &GaussCode, smoothing: &BTreeMap<u32, Smoothing>) -> ArrowState {
    let signs: HashMap<u32, Sign> = d.crossings().iter().map(|x| (x.id, x.sign)).collect();
    let loops = crate::diagram::trace_loops(d, smoothing)
        .into_iter()
        .map(|l| {
            let poles = l.visits.iter().filter_map(|v| PoleToken::from_visit(v, signs[&v.crossing])).collect();
            StateLoop { visits: l.visits, poles }
        })
        .collect();
    ArrowState { smoothing: smoothing.clone(), loops }
}

/// Sum over the 2^c smoothings of the crossings at dense indices `smooth`.
/// `loop_var` maps a traced loop to the index i of its variable K_i.
fn state_sum<F>(topo: &Topology, smooth: &[usize], skip: Option<usize>, mut loop_var: F) -> ArrowPolynomial
where
    F: FnMut(&[Visit]) -> u32,
{
    let c = smooth.len();
    assert!(c < 63, "state sum over {c} crossings is out of reach");
    let mut tally: HashMap<(i32, u32, KMonomial), i64> = HashMap::new();
    let mut smoothing = vec![None; topo.len()];
    let mut vars = Vec::new();
    for mask in 0..(1u64 << c) {
        let mut a_exp = 0;
        for (b, &x) in smooth.iter().enumerate() {
            let a_state = (mask >> b) & 1 == 0;
            let positive = topo.signs[x] == Sign::Positive;
            smoothing[x] = Some(if a_state == positive { Smoothing::Oriented } else { Smoothing::Disoriented });
            a_exp += if a_state { 1 } else { -1 };
        }
        let mut loops = 0;
        vars.clear();
        topo.for_each_loop(&smoothing, skip, |visits| {
            loops += 1;
            let k = loop_var(visits);
            if k > 0 {
                vars.push((k, 1));
            }
        });
        *tally.entry((a_exp, loops, KMonomial::from_pairs(vars.iter().copied()))).or_default() += 1;
    }

    let d = ArrowPolynomial::loop_value();
    let mut d_pow = vec![ArrowPolynomial::one()];
    let mut out = ArrowPolynomial::zero();
    for ((a_exp, loops, k), count) in tally {
        while d_pow.len() < loops as usize {
            let next = d_pow.last().expect("nonempty") * &d;
            d_pow.push(next);
        }
        let term = ArrowPolynomial::monomial(count, a_exp, k);
        out = &out + &(&term * &d_pow[loops as usize - 1]);
    }
    out
}

/// The Kauffman bracket ⟨D⟩, normalized so that the unknot is 1.
pub fn kauffman_bracket(d: &GaussCode) -> ArrowPolynomial {
    let topo = Topology::new(d);
    let all: Vec<usize> = (0..topo.len()).collect();
    state_sum(&topo, &all, None, |_| 0)
}

/// The DKM bracket ⟨⟨D⟩⟩: each loop C carries K_{a(C)} where a(C) is half
/// the number of poles left after cancellation.
pub fn dkm_bracket(d: &GaussCode) -> ArrowPolynomial {
    let topo = Topology::new(d);
    let signs: HashMap<u32, Sign> = topo.ids.iter().copied().zip(topo.signs.iter().copied()).collect();
    let all: Vec<usize> = (0..topo.len()).collect();
    let mut sigmas = Vec::new();
    state_sum(&topo, &all, None, |visits| {
        sigmas.clear();
        sigmas.extend(visits.iter().filter_map(|v| PoleToken::from_visit(v, signs[&v.crossing]).map(|t| t.sigma)));
        reduce_sigmas(&sigmas) as u32
    })
}

/// Signed count of ω-crossings along a loop, each counted with the ω
/// crossing sign and negated when the loop runs against D's orientation.
fn omega_linking(visits: &[Visit], omega_signs: &HashMap<u32, Sign>) -> i64 {
    visits
        .iter()
        .filter_map(|v| {
            omega_signs.get(&v.crossing).map(|s| if v.entry.is_in() { s.value() } else { -s.value() })
        })
        .sum()
}

/// The Zh-bracket: expand only the crossings of D inside Zh^op(D), ignore
/// ω, and give each loop C the variable Z_{|vlk(ω^op, C)|/2}. The result is
/// written with K in place of Z; display it with `to_string_with('Z')`.
pub fn zh_bracket(d: &GaussCode) -> ArrowPolynomial {
    let z = zh_construct(d, Orientation::Op);
    zh_bracket_of(&z.code, z.omega)
}

/// The Zh-bracket read off an arbitrary code whose component `omega` only
/// over-crosses, e.g. a Zh^op diagram after ω-moves.
pub fn zh_bracket_of(code: &GaussCode, omega: usize) -> ArrowPolynomial {
    let topo = Topology::new(code);
    let omega_passages = &code.components()[omega];
    let omega_ids: HashSet<u32> = omega_passages.iter().map(|p| p.id).collect();
    let omega_signs: HashMap<u32, Sign> = omega_passages.iter().map(|p| (p.id, p.sign)).collect();
    let smooth: Vec<usize> = (0..topo.len()).filter(|&x| !omega_ids.contains(&topo.ids[x])).collect();
    state_sum(&topo, &smooth, Some(omega), |visits| {
        let l = omega_linking(visits, &omega_signs);
        debug_assert!(l % 2 == 0, "odd linking {l} of a Zh state loop with ω");
        (l.abs() / 2) as u32
    })
}

/// vlk(ω^op, C) for every loop C of a Zh state, the state given as a
/// smoothing of the crossings of D.
pub fn zh_state_linking(d: &GaussCode, smoothing: &BTreeMap<u32, Smoothing>) -> Vec<i64> {
    let z = zh_construct(d, Orientation::Op);
    let topo = Topology::new(&z.code);
    let omega_signs: HashMap<u32, Sign> = z.omega_passages().iter().map(|p| (p.id, p.sign)).collect();
    let dense: Vec<Option<Smoothing>> = topo.ids.iter().map(|id| smoothing.get(id).copied()).collect();
    let mut out = Vec::new();
    topo.for_each_loop(&dense, Some(z.omega), |visits| out.push(omega_linking(visits, &omega_signs)));
    out
}

/// (−A)^(−3w) ⟨D⟩.
pub fn jones_polynomial(d: &GaussCode) -> ArrowPolynomial {
    normalize(&kauffman_bracket(d), d.writhe())
}

pub fn dkm_polynomial(d: &GaussCode) -> ArrowPolynomial {
    normalize(&dkm_bracket(d), d.writhe())
}

pub fn zh_polynomial(d: &GaussCode) -> ArrowPolynomial {
    normalize(&zh_bracket(d), d.writhe())
}

/// AS(D): the k-degrees of the monomials surviving in ⟨⟨D⟩⟩.
pub fn as_set(d: &GaussCode) -> BTreeSet<u64> {
    as_set_of(&dkm_bracket(d))
}

pub fn as_set_of(bracket: &ArrowPolynomial) -> BTreeSet<u64> {
    bracket.k_degrees()
}
