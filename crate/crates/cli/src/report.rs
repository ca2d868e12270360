//! Serializable reports. Polynomials and group-ring elements appear as
//! strings, in the same notation the library parses back.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use zhknot::algebra::normalize;
use zhknot::bracket::zh_bracket_of;
use zhknot::moves::Walk;
use zhknot::quandle::{cocycle_invariant, count_colorings, QuandleError};
use zhknot::zh::verify_alexander_system;
use zhknot::{AlexanderSystem, GaussCode, Invariants, Orientation, QuandleProbe, ZhDiagram};

#[derive(Serialize)]
pub struct QuandleReport {
    pub quandle: String,
    pub size: usize,
    pub colorings: u64,
    pub extended_colorings: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended_cocycle: Option<String>,
}

#[derive(Serialize)]
pub struct InvariantReport {
    pub code: String,
    pub components: usize,
    pub crossings: usize,
    pub writhe: i64,
    pub numerable: bool,
    pub jones: String,
    /// The DKM bracket ⟨⟨D⟩⟩, not normalized.
    pub dkm: String,
    /// (−A)^(−3w) ⟨⟨D⟩⟩.
    pub dkm_normalized: String,
    /// The Zh-bracket, written with Z variables.
    pub zh: String,
    pub zh_normalized: String,
    pub as_set: Vec<u64>,
    pub quandles: Vec<QuandleReport>,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn compute(d: &GaussCode, probes: &[QuandleProbe]) -> Result<InvariantReport, QuandleError> {
        let inv = Invariants::compute(d, probes)?;
        let w = d.writhe();
        Ok(InvariantReport {
            code: d.to_string(),
            components: d.num_components(),
            crossings: d.num_crossings(),
            writhe: d.writhe(),
            numerable: inv.numerable,
            jones: inv.jones.to_string(),
            dkm: normalize(&inv.dkm, -w).to_string(),
            dkm_normalized: inv.dkm.to_string(),
            zh: normalize(&inv.zh, -w).to_string_with('Z'),
            zh_normalized: inv.zh.to_string_with('Z'),
            as_set: inv.as_set.iter().copied().collect(),
            quandles: inv
                .quandles
                .iter()
                .map(|q| QuandleReport {
                    quandle: q.quandle.clone(),
                    size: q.size,
                    colorings: q.colorings,
                    extended_colorings: q.extended_colorings,
                    cocycle: q.cocycle.as_ref().map(ToString::to_string),
                    extended_cocycle: q.extended_cocycle.as_ref().map(ToString::to_string),
                })
                .collect(),
            violations: inv.consistency_violations(),
        })
    }
}

fn set_text(s: &[u64]) -> String {
    format!("{{{}}}", s.iter().map(u64::to_string).collect::<Vec<_>>().join(", "))
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "code       {}", if self.code.is_empty() { "(unknot)" } else { &self.code })?;
        writeln!(f, "crossings  {} in {} component(s), writhe {}", self.crossings, self.components, self.writhe)?;
        writeln!(f, "numerable  {}", if self.numerable { "yes" } else { "no" })?;
        writeln!(f, "jones      {}", self.jones)?;
        writeln!(f, "dkm        {}", self.dkm)?;
        writeln!(f, "  normalized {}", self.dkm_normalized)?;
        writeln!(f, "zh         {}", self.zh)?;
        writeln!(f, "  normalized {}", self.zh_normalized)?;
        writeln!(f, "as_set     {}", set_text(&self.as_set))?;
        for q in &self.quandles {
            write!(f, "{}: colorings {}, extended {}", q.quandle, q.colorings, q.extended_colorings)?;
            if let (Some(c), Some(e)) = (&q.cocycle, &q.extended_cocycle) {
                write!(f, ", cocycle {c}, extended cocycle {e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn labels_text(s: &AlexanderSystem, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for c in 0..s.base_components {
        let len = s.code.components()[c].len().max(1);
        let ls: Vec<String> = (0..len).map(|i| s.label(c, i).map_or("?".to_string(), |l| l.to_string())).collect();
        writeln!(f, "labels[{c}]  {}", ls.join(" "))?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct ZhReport {
    pub orientation: Orientation,
    pub code: String,
    pub omega: usize,
    pub omega_passages: usize,
    pub valid: bool,
    /// The Alexander sub-numbering, carried by the Zh^op diagram.
    pub system: AlexanderSystem,
}

impl ZhReport {
    pub fn new(z: &ZhDiagram) -> ZhReport {
        let system = z.alexander_system();
        ZhReport {
            orientation: z.orientation,
            code: z.code.to_string(),
            omega: z.omega,
            omega_passages: z.omega_passages().len(),
            valid: verify_alexander_system(&system).is_valid(),
            system,
        }
    }
}

impl fmt::Display for ZhReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.orientation {
            Orientation::Standard => "zh",
            Orientation::Op => "zh^op",
        };
        writeln!(f, "{name:<10} {}", self.code)?;
        writeln!(f, "omega      component {}, {} passages", self.omega, self.omega_passages)?;
        labels_text(&self.system, f)?;
        writeln!(f, "valid      {}", if self.valid { "yes" } else { "no" })
    }
}

#[derive(Serialize)]
pub struct SystemReport {
    pub code: String,
    pub gamma_crossings: usize,
    pub system: AlexanderSystem,
}

impl SystemReport {
    pub fn new(s: &AlexanderSystem) -> SystemReport {
        SystemReport { code: s.code.to_string(), gamma_crossings: s.gamma_crossings(), system: s.clone() }
    }
}

impl fmt::Display for SystemReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system     {}", self.code)?;
        writeln!(f, "gamma      {} crossings", self.gamma_crossings)?;
        labels_text(&self.system, f)
    }
}

#[derive(Serialize)]
pub struct LoggedStep {
    pub step: usize,
    pub site: String,
    pub code: String,
}

#[derive(Serialize)]
pub struct FuzzFailure {
    pub step: usize,
    pub fields: Vec<String>,
    pub before: BTreeMap<String, String>,
    pub after: BTreeMap<String, String>,
}

#[derive(Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub start: String,
    pub steps: usize,
    pub checked: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FuzzFailure>,
    /// Steps up to and including the first failing one; empty on success.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<LoggedStep>,
}

fn plain_fields(inv: &Invariants) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("numerable".to_string(), inv.numerable.to_string());
    m.insert("jones".to_string(), inv.jones.to_string());
    m.insert("dkm".to_string(), inv.dkm.to_string());
    m.insert("zh".to_string(), inv.zh.to_string_with('Z'));
    m.insert("as_set".to_string(), set_text(&inv.as_set.iter().copied().collect::<Vec<_>>()));
    for q in &inv.quandles {
        m.insert(format!("colorings[{}]", q.quandle), q.colorings.to_string());
        m.insert(format!("extended_colorings[{}]", q.quandle), q.extended_colorings.to_string());
        if let (Some(c), Some(e)) = (&q.cocycle, &q.extended_cocycle) {
            m.insert(format!("cocycle[{}]", q.quandle), c.to_string());
            m.insert(format!("extended_cocycle[{}]", q.quandle), e.to_string());
        }
    }
    m
}

fn zh_fields(code: &GaussCode, omega: usize, probes: &[QuandleProbe]) -> Result<BTreeMap<String, String>, QuandleError> {
    let mut m = BTreeMap::new();
    m.insert("zh_bracket".to_string(), zh_bracket_of(code, omega).to_string_with('Z'));
    for p in probes {
        m.insert(format!("extended_colorings[{}]", p.quandle.name), count_colorings(code, &p.quandle).to_string());
        if let Some(phi) = &p.cocycle {
            m.insert(format!("extended_cocycle[{}]", p.quandle.name), cocycle_invariant(code, &p.quandle, phi)?.to_string());
        }
    }
    Ok(m)
}

impl FuzzReport {
    fn run<F>(walk: &Walk, seed: u64, skip: &[String], mut fields: F) -> Result<FuzzReport, QuandleError>
    where
        F: FnMut(&GaussCode) -> Result<BTreeMap<String, String>, QuandleError>,
    {
        let keep = |mut m: BTreeMap<String, String>| {
            m.retain(|k, _| !skip.iter().any(|s| s == k));
            m
        };
        let before = keep(fields(&walk.start)?);
        let mut failure = None;
        let mut steps = 0;
        for (i, step) in walk.steps.iter().enumerate() {
            steps = i + 1;
            let after = keep(fields(&step.code)?);
            let changed: Vec<String> = before.keys().filter(|k| before.get(*k) != after.get(*k)).cloned().collect();
            if !changed.is_empty() {
                failure = Some(FuzzFailure { step: i + 1, fields: changed, before: before.clone(), after });
                break;
            }
        }
        let log = match &failure {
            None => Vec::new(),
            Some(f) => walk.steps[..f.step]
                .iter()
                .enumerate()
                .map(|(i, s)| LoggedStep { step: i + 1, site: s.site.to_string(), code: s.code.to_string() })
                .collect(),
        };
        Ok(FuzzReport { seed, start: walk.start.to_string(), steps, checked: before.into_keys().collect(), failure, log })
    }

    pub fn plain(walk: &Walk, probes: &[QuandleProbe], skip: &[String], seed: u64) -> Result<FuzzReport, QuandleError> {
        FuzzReport::run(walk, seed, skip, |d| Ok(plain_fields(&Invariants::compute(d, probes)?)))
    }

    pub fn zh(walk: &Walk, omega: usize, probes: &[QuandleProbe], seed: u64) -> Result<FuzzReport, QuandleError> {
        FuzzReport::run(walk, seed, &[], |d| zh_fields(d, omega, probes))
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => writeln!(f, "pass: {} steps from {:?}, seed {}, checked {}", self.steps, self.start, self.seed, self.checked.join(", ")),
            Some(fail) => {
                writeln!(f, "FAIL at step {} (seed {}), start {:?}", fail.step, self.seed, self.start)?;
                for s in &self.log {
                    writeln!(f, "  {:>4} {}  ->  {}", s.step, s.site, s.code)?;
                }
                for k in &fail.fields {
                    writeln!(f, "  {k}: {} -> {}", fail.before[k], fail.after.get(k).map_or("(missing)", String::as_str))?;
                }
                Ok(())
            }
        }
    }
}
