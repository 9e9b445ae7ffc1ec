//! Growth indicators and the growth comparison report.
//!
//! The growth indicator of a regular language is 0 for finite languages, 1
//! for infinite languages with polynomially many words per length, and the
//! dominant eigenvalue of the count matrix otherwise. The report compares
//! the completion's indicator, assembled from its prefix and middle
//! languages, against the hairpin-formable restrictions of the two inputs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter};
use crate::bridges::{build_bridge_nfa, compute_bridges, extract_pair_languages};
use crate::decide::Decision;
use crate::dfa::Dfa;
use crate::grammar::KAPPA_CAP;
use crate::nfa::Nfa;
use crate::oracle::HairpinInstance;
use crate::scc::tarjan;

/// Convergence target of the eigenvalue iteration.
pub const POWER_TOLERANCE: f64 = 1e-9;
pub const POWER_ITERATION_CAP: usize = 100_000;
/// Refusal threshold for subset constructions inside the growth pipeline.
pub const DETERMINIZE_CAP: usize = 4096;
/// Default comparison tolerance of the report's assertions.
pub const GROWTH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum GrowthError {
    #[error("kappa {kappa} exceeds the pattern cap {cap}: the pattern automaton has |Sigma|^kappa branches")]
    KappaTooLarge { kappa: usize, cap: usize },
    #[error("subset construction exceeded {cap} states")]
    StateBlowup { cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClassKind {
    Finite,
    Polynomial,
    Exponential,
}

impl GrowthClassKind {
    fn rank(self) -> u8 {
        match self {
            GrowthClassKind::Finite => 0,
            GrowthClassKind::Polynomial => 1,
            GrowthClassKind::Exponential => 2,
        }
    }
}

/// Classification plus numeric indicator. The class is always decided
/// structurally; only exponential indicators carry numeric error, bounded by
/// `tolerance` (widened when the iteration cap was hit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthClass {
    pub class: GrowthClassKind,
    pub indicator: f64,
    pub tolerance: f64,
    pub widened: bool,
}

impl GrowthClass {
    fn finite() -> GrowthClass {
        GrowthClass {
            class: GrowthClassKind::Finite,
            indicator: 0.0,
            tolerance: 0.0,
            widened: false,
        }
    }

    fn polynomial() -> GrowthClass {
        GrowthClass {
            class: GrowthClassKind::Polynomial,
            indicator: 1.0,
            tolerance: 0.0,
            widened: false,
        }
    }
}

/// Pointwise larger growth: rank first, indicator as tie-break.
pub fn max_growth(a: GrowthClass, b: GrowthClass) -> GrowthClass {
    if (b.class.rank(), b.indicator) > (a.class.rank(), a.indicator) {
        b
    } else {
        a
    }
}

/// Growth of the path language of an automaton; equals word growth for DFAs,
/// unambiguous NFAs, and more generally NFAs with polynomially many
/// accepting paths per word. Finite and polynomial classes are structural:
/// no nontrivial strongly connected component, respectively only
/// simple-cycle components (counting arc multiplicity). Everything else is
/// exponential with the dominant eigenvalue computed per component.
pub fn growth_indicator(a: &Nfa) -> GrowthClass {
    let (t, _) = a.trim();
    if t.n == 0 {
        return GrowthClass::finite();
    }
    let scc = tarjan(t.n, &t.adjacency_targets());
    if !scc.nontrivial.iter().any(|&b| b) {
        return GrowthClass::finite();
    }
    // Internal out-multiplicity per state; a nontrivial component is a
    // simple cycle exactly when every member keeps one arc inside it.
    let mut internal_out = vec![0usize; t.n];
    for &(u, _, v) in &t.arcs {
        if scc.comp_of[u] == scc.comp_of[v] {
            internal_out[u] += 1;
        }
    }
    let mut result: Option<GrowthClass> = None;
    for (ci, comp) in scc.comps.iter().enumerate() {
        if !scc.nontrivial[ci] {
            continue;
        }
        if comp.iter().all(|&u| internal_out[u] == 1) {
            continue;
        }
        let (lambda, tol, widened) = component_spectral_radius(&t, comp);
        let g = GrowthClass {
            class: GrowthClassKind::Exponential,
            indicator: lambda,
            tolerance: tol,
            widened,
        };
        result = Some(match result {
            None => g,
            Some(prev) => max_growth(prev, g),
        });
    }
    result.unwrap_or_else(GrowthClass::polynomial)
}

pub fn growth_indicator_dfa(d: &Dfa) -> GrowthClass {
    growth_indicator(&Nfa::from_dfa(d))
}

/// Dominant eigenvalue of one strongly connected component's count matrix,
/// by power iteration on M + I (primitive, so the iterate ratios converge).
/// Each step brackets the eigenvalue between the extreme component ratios;
/// the bracket midpoint is returned once it is tight or the cap is hit.
fn component_spectral_radius(t: &Nfa, comp: &[usize]) -> (f64, f64, bool) {
    let m = comp.len();
    let mut local = vec![usize::MAX; t.n];
    for (i, &u) in comp.iter().enumerate() {
        local[u] = i;
    }
    let mut counts = vec![vec![0.0f64; m]; m];
    for &(u, _, v) in &t.arcs {
        if local[u] != usize::MAX && local[v] != usize::MAX {
            counts[local[u]][local[v]] += 1.0;
        }
    }
    let mut x = vec![1.0f64; m];
    let mut bracket = (0.0, f64::INFINITY);
    for _ in 0..POWER_ITERATION_CAP {
        let mut y = x.clone();
        for i in 0..m {
            for j in 0..m {
                if counts[i][j] > 0.0 {
                    y[i] += counts[i][j] * x[j];
                }
            }
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..m {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        bracket = (lo, hi);
        if hi - lo < POWER_TOLERANCE {
            return ((lo + hi) / 2.0 - 1.0, POWER_TOLERANCE, false);
        }
        let norm = hi.max(1.0);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    let (lo, hi) = bracket;
    ((lo + hi) / 2.0 - 1.0, (hi - lo) / 2.0, true)
}

/// Acceptor of all prefixes of the language: every state that can still
/// reach a final state becomes final.
pub fn prefix_closure(d: &Dfa) -> Dfa {
    let mut radj = vec![Vec::new(); d.n];
    for p in 0..d.n {
        for a in 0..d.k {
            radj[d.delta[p][a]].push(p);
        }
    }
    let mut co = d.finals.clone();
    let mut queue: VecDeque<usize> = (0..d.n).filter(|&q| co[q]).collect();
    while let Some(q) = queue.pop_front() {
        for &p in &radj[q] {
            if !co[p] {
                co[p] = true;
                queue.push_back(p);
            }
        }
    }
    Dfa { n: d.n, k: d.k, initial: d.initial, finals: co, delta: d.delta.clone() }
}

/// Which end of a word must carry the bonding pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternSide {
    /// alpha Sigma* bar(alpha) Sigma*: the word opens with the pair.
    PrefixForming,
    /// Sigma* alpha Sigma* bar(alpha): the word closes with the pair.
    SuffixForming,
}

/// Acceptor of the union over alpha in Sigma^kappa of the side's pattern.
/// States remember the prefix of alpha read so far, then the part of
/// bar(alpha) still owed; a run guesses where alpha starts (suffix side) or
/// where bar(alpha) starts, so acceptance is nondeterministic but each word
/// has at most linearly many accepting paths.
pub fn hairpin_pattern_nfa(al: &Alphabet, kappa: usize, side: PatternSide) -> Nfa {
    assert!(kappa >= 1);
    let k = al.len();
    // P-states: prefixes of alpha, lengths 0..=kappa; T-states: the part of
    // alpha whose complement is still unread, lengths 0..kappa.
    let mut p_off = vec![0usize; kappa + 2];
    for j in 0..=kappa {
        p_off[j + 1] = p_off[j] + k.pow(j as u32);
    }
    let n_p = p_off[kappa + 1];
    let mut t_off = vec![n_p; kappa + 1];
    for j in 0..kappa {
        t_off[j + 1] = t_off[j] + k.pow(j as u32);
    }
    let n = t_off[kappa];
    let rank = |w: &[Letter]| -> usize { w.iter().fold(0, |acc, &c| acc * k + c as usize) };

    let mut arcs: Vec<(usize, Letter, usize)> = Vec::new();
    for j in 0..=kappa {
        for w in crate::alphabet::words_of_length(k, j) {
            let here = p_off[j] + rank(&w);
            if j < kappa {
                for a in 0..k as Letter {
                    let mut wa = w.clone();
                    wa.push(a);
                    arcs.push((here, a, p_off[j + 1] + rank(&wa)));
                }
            } else {
                for a in 0..k as Letter {
                    arcs.push((here, a, here));
                }
                arcs.push((here, al.bar(w[kappa - 1]), t_off[kappa - 1] + rank(&w[..kappa - 1])));
            }
        }
    }
    for j in 1..kappa {
        for w in crate::alphabet::words_of_length(k, j) {
            let here = t_off[j] + rank(&w);
            arcs.push((here, al.bar(w[j - 1]), t_off[j - 1] + rank(&w[..j - 1])));
        }
    }
    match side {
        PatternSide::SuffixForming => {
            for a in 0..k as Letter {
                arcs.push((0, a, 0));
            }
        }
        PatternSide::PrefixForming => {
            for a in 0..k as Letter {
                arcs.push((t_off[0], a, t_off[0]));
            }
        }
    }
    let mut finals = vec![false; n];
    finals[t_off[0]] = true;
    Nfa::new(n, k, vec![0], finals, arcs)
}

/// Intersection with the hairpin-formable pattern, as a DFA. The subset
/// construction can genuinely explode here (subsets encode factor sets), so
/// it is capped; the growth pipeline avoids this by staying nondeterministic.
pub fn restrict_hairpin_formable(
    d: &Dfa,
    al: &Alphabet,
    kappa: usize,
    side: PatternSide,
) -> Result<Dfa, GrowthError> {
    if kappa > KAPPA_CAP {
        return Err(GrowthError::KappaTooLarge { kappa, cap: KAPPA_CAP });
    }
    let pat = hairpin_pattern_nfa(al, kappa, side);
    let (prod, _) = pat.intersect_dfa(d).trim();
    prod.determinize_capped(DETERMINIZE_CAP)
        .ok_or(GrowthError::StateBlowup { cap: DETERMINIZE_CAP })
}

/// Growth of the hairpin-formable part of a language, computed on the
/// pattern product without determinizing: the pattern has at most linearly
/// many accepting paths per word, which leaves class and indicator intact.
pub fn restricted_growth(d: &Dfa, al: &Alphabet, kappa: usize) -> Result<GrowthClass, GrowthError> {
    if kappa > KAPPA_CAP {
        return Err(GrowthError::KappaTooLarge { kappa, cap: KAPPA_CAP });
    }
    let pat = hairpin_pattern_nfa(al, kappa, PatternSide::SuffixForming);
    Ok(growth_indicator(&pat.intersect_dfa(d)))
}

/// Growth comparison: lambda from the restricted inputs, sigma and rho from
/// the completion's middle and prefix languages, eta = max(sigma, sqrt(rho)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub lambda: GrowthClass,
    pub sigma: GrowthClass,
    pub rho: GrowthClass,
    pub eta: GrowthClass,
    /// Unrestricted input growths, informational only; the assertions below
    /// compare against the restricted languages.
    pub lambda_l1_raw: GrowthClass,
    pub lambda_l2_raw: GrowthClass,
    pub bounds_ok: bool,
    pub regular_equality_ok: Option<bool>,
    pub tolerance: f64,
}

pub fn growth_report(
    inst: &HairpinInstance,
    decision: &Decision,
    tolerance: f64,
) -> Result<GrowthReport, GrowthError> {
    let al = &inst.alphabet;
    // Both inputs use the suffix side: the second DFA holds the reversed
    // complement of the second language, under which the prefix-forming
    // pattern maps to the suffix-forming one and growth is preserved.
    let lam1 = restricted_growth(&inst.dfa1, al, inst.kappa)?;
    let lam2 = restricted_growth(&inst.dfa2, al, inst.kappa)?;
    let lambda = max_growth(lam1, lam2);

    let tables = compute_bridges(&inst.dfa1, &inst.dfa2, al);
    let automaton = build_bridge_nfa(inst, &tables);
    let mut sigma = GrowthClass::finite();
    let mut rho = GrowthClass::finite();
    for pl in extract_pair_languages(&automaton, &tables) {
        let b_dfa = pl
            .b_mu
            .determinize_capped(DETERMINIZE_CAP)
            .ok_or(GrowthError::StateBlowup { cap: DETERMINIZE_CAP })?;
        sigma = max_growth(sigma, growth_indicator_dfa(&b_dfa));
        // Prefix path languages have unique accepting paths, so the
        // nondeterministic growth is the word growth.
        rho = max_growth(rho, growth_indicator(&pl.r_mu));
    }

    let eta_class = if sigma.class == GrowthClassKind::Exponential
        || rho.class == GrowthClassKind::Exponential
    {
        GrowthClassKind::Exponential
    } else if sigma.class == GrowthClassKind::Polynomial
        || rho.class == GrowthClassKind::Polynomial
    {
        GrowthClassKind::Polynomial
    } else {
        GrowthClassKind::Finite
    };
    let eta = GrowthClass {
        class: eta_class,
        indicator: sigma.indicator.max(rho.indicator.sqrt()),
        tolerance: sigma.tolerance.max(rho.tolerance),
        widened: sigma.widened || rho.widened,
    };

    let bounds_ok = lambda.indicator.sqrt() - tolerance <= eta.indicator
        && eta.indicator <= lambda.indicator + tolerance;
    let regular_equality_ok = decision.is_regular().then(|| {
        (eta.indicator - lambda.indicator).abs() <= tolerance
            && rho.class != GrowthClassKind::Exponential
    });

    Ok(GrowthReport {
        lambda,
        sigma,
        rho,
        eta,
        lambda_l1_raw: growth_indicator_dfa(&inst.dfa1),
        lambda_l2_raw: growth_indicator_dfa(&inst.dfa2),
        bounds_ok,
        regular_equality_ok,
        tolerance,
    })
}
