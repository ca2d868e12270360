#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use zhknot::algebra::KMonomial;
use zhknot::{ArrowPolynomial, GaussCode, Passage, Role, Sign};

pub fn code(s: &str) -> GaussCode {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub const VTREF: &str = "O1+O2+U1+U2+";
pub const TREFOIL: &str = "O1+U2+O3+U1+O2+U3+";
pub const FIGURE_EIGHT: &str = "O1-U2+O3+U1-O4-U3+O2+U4-";

/// A random code with `n` crossings spread over `components` words.
pub fn random_code<R: Rng>(rng: &mut R, n: u32, components: usize) -> GaussCode {
    let mut slots: Vec<(u32, bool)> = (1..=n).flat_map(|x| [(x, true), (x, false)]).collect();
    slots.shuffle(rng);
    let signs: BTreeMap<u32, Sign> =
        (1..=n).map(|x| (x, if rng.gen() { Sign::Positive } else { Sign::Negative })).collect();
    let over_first: BTreeMap<u32, bool> = (1..=n).map(|x| (x, rng.gen())).collect();
    let words: Vec<Passage> = slots
        .iter()
        .map(|&(x, first)| {
            let role = if first == over_first[&x] { Role::Over } else { Role::Under };
            Passage::new(x, role, signs[&x])
        })
        .collect();
    let mut cuts: Vec<usize> = (0..components.saturating_sub(1)).map(|_| rng.gen_range(0..=words.len())).collect();
    cuts.sort();
    let mut comps = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain([words.len()]) {
        comps.push(words[start..c].to_vec());
        start = c;
    }
    GaussCode::new(comps).expect("random words pair every crossing")
}

/// Every one-component code with `n` crossings, up to renaming crossings:
/// each chord pattern with every over/under choice and every sign.
pub fn all_knot_codes(n: u32) -> Vec<GaussCode> {
    fn chords(seq: &mut Vec<u32>, open: &mut Vec<u32>, next: u32, n: u32, out: &mut Vec<Vec<u32>>) {
        if seq.len() == 2 * n as usize {
            out.push(seq.clone());
            return;
        }
        if next <= n {
            seq.push(next);
            open.push(next);
            chords(seq, open, next + 1, n, out);
            open.pop();
            seq.pop();
        }
        for i in 0..open.len() {
            let x = open.remove(i);
            seq.push(x);
            chords(seq, open, next, n, out);
            seq.pop();
            open.insert(i, x);
        }
    }
    let mut patterns = Vec::new();
    chords(&mut Vec::new(), &mut Vec::new(), 1, n, &mut patterns);
    let mut out = Vec::new();
    for pat in patterns {
        for roles in 0..1u32 << n {
            for signs in 0..1u32 << n {
                let mut seen = vec![false; n as usize + 1];
                let word = pat
                    .iter()
                    .map(|&x| {
                        let bit = 1 << (x - 1);
                        let first = !seen[x as usize];
                        seen[x as usize] = true;
                        let role = if (roles & bit != 0) == first { Role::Over } else { Role::Under };
                        let sign = if signs & bit != 0 { Sign::Negative } else { Sign::Positive };
                        Passage::new(x, role, sign)
                    })
                    .collect();
                out.push(GaussCode::new(vec![word]).unwrap());
            }
        }
    }
    out
}

/// Substitute K_i = 1.
pub fn forget_k(p: &ArrowPolynomial) -> ArrowPolynomial {
    let mut out = ArrowPolynomial::zero();
    for (c, e, _) in p.terms() {
        out.add_term(c, e, KMonomial::one());
    }
    out
}

/// Kauffman bracket by union-find over strand ends, written without the
/// library's loop tracer. Each passage has an entry end 2g and an exit end
/// 2g+1; consecutive passages are joined exit to entry.
pub fn kauffman_oracle(d: &GaussCode) -> ArrowPolynomial {
    let comps = d.components();
    let mut base = Vec::new();
    let mut empty = 0;
    let mut ends: BTreeMap<(u32, Role), usize> = BTreeMap::new();
    let mut signs = BTreeMap::new();
    let mut g = 0;
    for w in comps {
        if w.is_empty() {
            empty += 1;
            continue;
        }
        for (i, p) in w.iter().enumerate() {
            ends.insert((p.id, p.role), g + i);
            signs.insert(p.id, p.sign);
            let next = g + (i + 1) % w.len();
            base.push((2 * (g + i) + 1, 2 * next));
        }
        g += w.len();
    }
    let ids: Vec<u32> = signs.keys().copied().collect();
    let mut out = ArrowPolynomial::zero();
    let d_loop = ArrowPolynomial::loop_value();
    for mask in 0u64..1 << ids.len() {
        let mut parent: Vec<usize> = (0..2 * g).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut union = |a: usize, b: usize| {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        };
        for &(a, b) in &base {
            union(a, b);
        }
        let mut a_exp = 0;
        for (bit, x) in ids.iter().enumerate() {
            let a_state = mask >> bit & 1 == 0;
            a_exp += if a_state { 1 } else { -1 };
            let (o, u) = (ends[&(*x, Role::Over)], ends[&(*x, Role::Under)]);
            let (oi, oo, ui, uo) = (2 * o, 2 * o + 1, 2 * u, 2 * u + 1);
            if a_state == (signs[x] == Sign::Positive) {
                union(oi, uo);
                union(ui, oo);
            } else {
                union(oi, ui);
                union(oo, uo);
            }
        }
        let loops = (0..2 * g).filter(|&x| find(&mut parent, x) == x).count() + empty;
        out = &out + &(&ArrowPolynomial::a_pow(a_exp) * &d_loop.pow(loops as u32 - 1));
    }
    out
}

/// (−A^3)^(−w) ⟨D⟩ with the oracle bracket.
pub fn jones_oracle(d: &GaussCode) -> ArrowPolynomial {
    let w = d.writhe();
    let f = ArrowPolynomial::a_pow((-3 * w) as i32);
    let f = if w % 2 == 0 { f } else { -f };
    &f * &kauffman_oracle(d)
}
