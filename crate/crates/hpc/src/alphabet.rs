//! Alphabets with an involutive antimorphism ("bar" / complement).
//!
//! Letters are dense `u8` indices into a token table. The involution is a
//! letter permutation `bar` with `bar(bar(a)) = a`; fixed points are allowed
//! (a letter may be its own complement). Words are plain `Vec<Letter>`.

use std::collections::HashMap;
use std::fmt;

pub type Letter = u8;
pub type Word = Vec<Letter>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlphabetError {
    #[error("alphabet must contain at least two letters, got {0}")]
    TooSmall(usize),
    #[error("alphabet exceeds {max} letters", max = u8::MAX)]
    TooLarge,
    #[error("token {0:?} is empty or contains whitespace")]
    BadToken(String),
    #[error("token {0:?} declared twice with conflicting complements")]
    Conflict(String),
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("cannot parse {0:?}: character {1:?} is not a letter token")]
    UnknownChar(String, char),
}

/// Token table plus complement permutation. Construction guarantees the
/// involution is self-inverse and total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    tokens: Vec<String>,
    bar: Vec<Letter>,
    by_token: HashMap<String, Letter>,
}

impl Alphabet {
    /// Builds from complement pairs. A pair `("a", "A")` declares `bar(a) = A`
    /// and `bar(A) = a`; a self-pair `("b", "b")` declares a fixed point.
    /// Letter indices follow first occurrence in the pair list.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Self, AlphabetError> {
        let mut tokens: Vec<String> = Vec::new();
        let mut by_token: HashMap<String, Letter> = HashMap::new();
        let intern = |tok: &str,
                          tokens: &mut Vec<String>,
                          by_token: &mut HashMap<String, Letter>|
         -> Result<Letter, AlphabetError> {
            if tok.is_empty() || tok.chars().any(char::is_whitespace) {
                return Err(AlphabetError::BadToken(tok.to_string()));
            }
            if let Some(&l) = by_token.get(tok) {
                return Ok(l);
            }
            if tokens.len() >= usize::from(u8::MAX) {
                return Err(AlphabetError::TooLarge);
            }
            let l = tokens.len() as Letter;
            tokens.push(tok.to_string());
            by_token.insert(tok.to_string(), l);
            Ok(l)
        };

        let mut bar: Vec<Option<Letter>> = Vec::new();
        for (x, y) in pairs {
            let a = intern(x.as_ref(), &mut tokens, &mut by_token)?;
            let b = intern(y.as_ref(), &mut tokens, &mut by_token)?;
            bar.resize(tokens.len(), None);
            for (from, to) in [(a, b), (b, a)] {
                match bar[from as usize] {
                    None => bar[from as usize] = Some(to),
                    Some(prev) if prev == to => {}
                    Some(_) => return Err(AlphabetError::Conflict(tokens[from as usize].clone())),
                }
            }
        }
        if tokens.len() < 2 {
            return Err(AlphabetError::TooSmall(tokens.len()));
        }
        // Total by construction: every interned letter came from some pair.
        let bar: Vec<Letter> = bar.into_iter().map(|b| b.expect("involution total")).collect();
        debug_assert!((0..bar.len()).all(|i| bar[bar[i] as usize] as usize == i));
        Ok(Alphabet { tokens, bar, by_token })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction demands >= 2 letters
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.tokens.len() as u8).map(|l| l as Letter)
    }

    pub fn bar(&self, a: Letter) -> Letter {
        self.bar[a as usize]
    }

    /// Involutive antimorphism on words: `bar(a1 .. am) = bar(am) .. bar(a1)`.
    pub fn bar_word(&self, w: &[Letter]) -> Word {
        w.iter().rev().map(|&a| self.bar(a)).collect()
    }

    pub fn token(&self, a: Letter) -> &str {
        &self.tokens[a as usize]
    }

    pub fn letter_of(&self, tok: &str) -> Result<Letter, AlphabetError> {
        self.by_token
            .get(tok)
            .copied()
            .ok_or_else(|| AlphabetError::UnknownToken(tok.to_string()))
    }

    /// Concatenates tokens with no separator.
    pub fn render(&self, w: &[Letter]) -> String {
        w.iter().map(|&a| self.token(a)).collect()
    }

    /// Parses a rendered word. If the input contains whitespace it is split on
    /// whitespace into tokens; otherwise every character must be a
    /// single-character token.
    pub fn parse(&self, s: &str) -> Result<Word, AlphabetError> {
        if s.is_empty() {
            return Ok(Vec::new());
        }
        if s.chars().any(char::is_whitespace) {
            return s.split_whitespace().map(|t| self.letter_of(t)).collect();
        }
        s.chars()
            .map(|c| {
                self.letter_of(&c.to_string())
                    .map_err(|_| AlphabetError::UnknownChar(s.to_string(), c))
            })
            .collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.tokens.join(","))
    }
}

/// Sorts words by length, then lexicographically by letter index.
pub fn canonical_sort(words: &mut [Word]) {
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

/// All words of exactly the given length over k letters, lexicographic order.
pub fn words_of_length(k: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a as Letter);
                    w2
                })
            })
            .collect();
    }
    out
}
