//! A fixed bundle of invariants computed together, so that fuzzers and the
//! CLI compare exactly the same values.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{normalize, ArrowPolynomial, GroupRingElement};
use crate::bracket::{as_set_of, dkm_bracket, jones_polynomial, zh_bracket};
use crate::diagram::GaussCode;
use crate::quandle::{
    cocycle_invariant, count_colorings, extended_colorings, extended_cocycle_invariant, FiniteQuandle, QuandleError,
    TwoCocycle,
};
use crate::zh::solve_alexander_numbering;

/// A quandle to color with, and optionally a 2-cocycle for state sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuandleProbe {
    pub quandle: FiniteQuandle,
    pub cocycle: Option<TwoCocycle>,
}

impl QuandleProbe {
    pub fn colorings_only(quandle: FiniteQuandle) -> QuandleProbe {
        QuandleProbe { quandle, cocycle: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuandleValues {
    pub quandle: String,
    pub size: usize,
    pub colorings: u64,
    pub extended_colorings: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<GroupRingElement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended_cocycle: Option<GroupRingElement>,
}

/// Values that must not change under Reidemeister moves. The writhe is
/// deliberately absent. `numerable` is a property of the diagram and is
/// kept here so that fuzzing can observe whether it is preserved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub numerable: bool,
    pub jones: ArrowPolynomial,
    pub dkm: ArrowPolynomial,
    pub zh: ArrowPolynomial,
    pub as_set: BTreeSet<u64>,
    pub quandles: Vec<QuandleValues>,
}

impl Invariants {
    pub fn compute(d: &GaussCode, probes: &[QuandleProbe]) -> Result<Invariants, QuandleError> {
        let w = d.writhe();
        let dkm_b = dkm_bracket(d);
        let zh_b = zh_bracket(d);
        let mut quandles = Vec::with_capacity(probes.len());
        for p in probes {
            let (cocycle, extended_cocycle) = match &p.cocycle {
                Some(phi) => (
                    Some(cocycle_invariant(d, &p.quandle, phi)?),
                    Some(extended_cocycle_invariant(d, &p.quandle, phi)?),
                ),
                None => (None, None),
            };
            quandles.push(QuandleValues {
                quandle: p.quandle.name.clone(),
                size: p.quandle.size(),
                colorings: count_colorings(d, &p.quandle),
                extended_colorings: extended_colorings(d, &p.quandle),
                cocycle,
                extended_cocycle,
            });
        }
        Ok(Invariants {
            numerable: solve_alexander_numbering(d).is_some(),
            jones: jones_polynomial(d),
            as_set: as_set_of(&dkm_b),
            dkm: normalize(&dkm_b, w),
            zh: normalize(&zh_b, w),
            quandles,
        })
    }

    /// Names of the fields that differ between two bundles.
    pub fn differences(&self, other: &Invariants) -> Vec<String> {
        let mut out = Vec::new();
        if self.numerable != other.numerable {
            out.push("numerable".to_string());
        }
        if self.jones != other.jones {
            out.push("jones".to_string());
        }
        if self.dkm != other.dkm {
            out.push("dkm".to_string());
        }
        if self.zh != other.zh {
            out.push("zh".to_string());
        }
        if self.as_set != other.as_set {
            out.push("as_set".to_string());
        }
        for (a, b) in self.quandles.iter().zip(&other.quandles) {
            if a.colorings != b.colorings {
                out.push(format!("colorings[{}]", a.quandle));
            }
            if a.extended_colorings != b.extended_colorings {
                out.push(format!("extended_colorings[{}]", a.quandle));
            }
            if a.cocycle != b.cocycle {
                out.push(format!("cocycle[{}]", a.quandle));
            }
            if a.extended_cocycle != b.extended_cocycle {
                out.push(format!("extended_cocycle[{}]", a.quandle));
            }
        }
        out
    }

    /// Relations the values must satisfy among themselves.
    pub fn consistency_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.dkm != self.zh {
            out.push(format!("dkm {} differs from zh {}", self.dkm, self.zh));
        }
        if self.numerable && self.as_set != BTreeSet::from([0]) {
            out.push(format!("numerable diagram with as_set {:?}", self.as_set));
        }
        let k_free: ArrowPolynomial = self
            .dkm
            .terms()
            .map(|(c, e, _)| ArrowPolynomial::monomial(c, e, Default::default()))
            .fold(ArrowPolynomial::zero(), |acc, t| &acc + &t);
        if k_free != self.jones {
            out.push(format!("dkm at K=1 is {k_free}, jones is {}", self.jones));
        }
        for q in &self.quandles {
            if q.extended_colorings < q.colorings {
                out.push(format!("{}: fewer extended colorings than colorings", q.quandle));
            }
            if self.numerable && q.extended_colorings != q.size as u64 * q.colorings {
                out.push(format!("{}: numerable but extended colorings != |X| * colorings", q.quandle));
            }
        }
        out
    }
}
