//! Instance files: the JSON input format of the command line tool.
//!
//! An instance declares the involutive alphabet as complement pairs, the
//! primer length kappa, a DFA for the first language, and at most one
//! description of the second language: a DFA for its reversed complement, an
//! NFA for the language itself (converted internally), or nothing (empty).
//! Transition tables may be partial; completion with a sink is reported as a
//! note rather than an error.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, AlphabetError, Letter};
use crate::dfa::Dfa;
use crate::nfa::Nfa;
use crate::oracle::HairpinInstance;

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed instance file: {0}")]
    Malformed(String),
    #[error("alphabet: {0}")]
    Alphabet(#[from] AlphabetError),
    #[error("kappa must be at least 1, got {0}")]
    KappaTooSmall(i64),
    #[error("{field}: undeclared letter {token:?}")]
    UndeclaredLetter { field: String, token: String },
    #[error("{field}: state {state} is out of range for {n} states")]
    BadState { field: String, state: usize, n: usize },
    #[error("{field}: needs at least one state")]
    NoStates { field: String },
    #[error("{field}: transitions map state {state} on {token:?} to two different states")]
    DuplicateTransition { field: String, state: usize, token: String },
    #[error("give at most one of dfa_ov_l2 and nfa_l2")]
    TwoSecondLanguages,
}

/// Transition table with letters as declared tokens and numeric states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaRecord {
    pub states: usize,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub transitions: Vec<(usize, String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfaRecord {
    pub states: usize,
    pub initials: Vec<usize>,
    pub finals: Vec<usize>,
    pub arcs: Vec<(usize, String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub alphabet: Vec<(String, String)>,
    pub kappa: i64,
    pub dfa_l1: DfaRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dfa_ov_l2: Option<DfaRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nfa_l2: Option<NfaRecord>,
}

/// A validated instance plus human-readable notes about applied conversions
/// (sink completion, second-language determinization).
#[derive(Debug, Clone)]
pub struct ParsedInstance {
    pub instance: HairpinInstance,
    pub notes: Vec<String>,
}

pub fn parse_instance(path: &Path) -> Result<ParsedInstance, InstanceError> {
    let src = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance_str(&src)
}

pub fn parse_instance_str(src: &str) -> Result<ParsedInstance, InstanceError> {
    let file: InstanceFile =
        serde_json::from_str(src).map_err(|e| InstanceError::Malformed(e.to_string()))?;
    instance_from_file(&file)
}

pub fn instance_from_file(file: &InstanceFile) -> Result<ParsedInstance, InstanceError> {
    let alphabet = Alphabet::from_pairs(&file.alphabet)?;
    if file.kappa < 1 {
        return Err(InstanceError::KappaTooSmall(file.kappa));
    }
    let kappa = file.kappa as usize;
    let mut notes = Vec::new();

    let dfa1 = dfa_from_record(&file.dfa_l1, &alphabet, "dfa_l1", &mut notes)?;
    let dfa2 = match (&file.dfa_ov_l2, &file.nfa_l2) {
        (Some(_), Some(_)) => return Err(InstanceError::TwoSecondLanguages),
        (Some(rec), None) => dfa_from_record(rec, &alphabet, "dfa_ov_l2", &mut notes)?,
        (None, Some(rec)) => {
            let nfa = nfa_from_record(rec, &alphabet, "nfa_l2")?;
            let det = nfa.reverse_complement(&alphabet).determinize();
            notes.push(format!(
                "nfa_l2: converted to a reversed-complement acceptor and determinized ({} states)",
                det.n
            ));
            det
        }
        (None, None) => {
            notes.push("no second language given; using the empty language".to_string());
            Dfa::empty_language(alphabet.len())
        }
    };
    Ok(ParsedInstance { instance: HairpinInstance::new(alphabet, kappa, dfa1, dfa2), notes })
}

fn check_state(field: &str, part: &str, state: usize, n: usize) -> Result<(), InstanceError> {
    if state >= n {
        Err(InstanceError::BadState { field: format!("{field}.{part}"), state, n })
    } else {
        Ok(())
    }
}

fn letter_checked(field: &str, al: &Alphabet, token: &str) -> Result<Letter, InstanceError> {
    al.letter_of(token).map_err(|_| InstanceError::UndeclaredLetter {
        field: field.to_string(),
        token: token.to_string(),
    })
}

fn dfa_from_record(
    rec: &DfaRecord,
    al: &Alphabet,
    field: &str,
    notes: &mut Vec<String>,
) -> Result<Dfa, InstanceError> {
    if rec.states == 0 {
        return Err(InstanceError::NoStates { field: field.to_string() });
    }
    check_state(field, "initial", rec.initial, rec.states)?;
    for &f in &rec.finals {
        check_state(field, "finals", f, rec.states)?;
    }
    let mut table = Vec::with_capacity(rec.transitions.len());
    let mut seen = vec![vec![usize::MAX; al.len()]; rec.states];
    for (i, (p, token, q)) in rec.transitions.iter().enumerate() {
        let part = format!("transitions[{i}]");
        check_state(field, &part, *p, rec.states)?;
        check_state(field, &part, *q, rec.states)?;
        let a = letter_checked(&format!("{field}.{part}"), al, token)?;
        let slot = &mut seen[*p][a as usize];
        if *slot != usize::MAX && *slot != *q {
            return Err(InstanceError::DuplicateTransition {
                field: field.to_string(),
                state: *p,
                token: token.clone(),
            });
        }
        *slot = *q;
        table.push((*p, a, *q));
    }
    let (dfa, sink_added) = Dfa::from_partial(rec.states, al.len(), rec.initial, &rec.finals, &table);
    if sink_added {
        notes.push(format!(
            "{field}: partial transition table completed with a non-accepting sink (state {})",
            dfa.n - 1
        ));
    }
    Ok(dfa)
}

fn nfa_from_record(rec: &NfaRecord, al: &Alphabet, field: &str) -> Result<Nfa, InstanceError> {
    for &i in &rec.initials {
        check_state(field, "initials", i, rec.states)?;
    }
    let mut finals = vec![false; rec.states];
    for &f in &rec.finals {
        check_state(field, "finals", f, rec.states)?;
        finals[f] = true;
    }
    let mut arcs = Vec::with_capacity(rec.arcs.len());
    for (i, (p, token, q)) in rec.arcs.iter().enumerate() {
        let part = format!("arcs[{i}]");
        check_state(field, &part, *p, rec.states)?;
        check_state(field, &part, *q, rec.states)?;
        let a = letter_checked(&format!("{field}.{part}"), al, token)?;
        arcs.push((*p, a, *q));
    }
    Ok(Nfa::new(rec.states, al.len(), rec.initials.clone(), finals, arcs))
}

/// The canonical file form of an instance: alphabet pairs in letter order,
/// the full transition tables, and the second language always as the DFA of
/// its reversed complement.
pub fn instance_to_file(inst: &HairpinInstance) -> InstanceFile {
    let al = &inst.alphabet;
    let mut pairs = Vec::new();
    for a in al.letters() {
        if al.bar(a) >= a {
            pairs.push((al.token(a).to_string(), al.token(al.bar(a)).to_string()));
        }
    }
    InstanceFile {
        alphabet: pairs,
        kappa: inst.kappa as i64,
        dfa_l1: dfa_to_record(&inst.dfa1, al),
        dfa_ov_l2: Some(dfa_to_record(&inst.dfa2, al)),
        nfa_l2: None,
    }
}

fn dfa_to_record(d: &Dfa, al: &Alphabet) -> DfaRecord {
    let mut transitions = Vec::with_capacity(d.n * d.k);
    for p in 0..d.n {
        for a in 0..d.k {
            transitions.push((p, al.token(a as Letter).to_string(), d.delta[p][a]));
        }
    }
    DfaRecord {
        states: d.n,
        initial: d.initial,
        finals: (0..d.n).filter(|&q| d.finals[q]).collect(),
        transitions,
    }
}

pub fn render_instance(inst: &HairpinInstance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_to_file(inst)).expect("instance to JSON");
    s.push('\n');
    s
}
