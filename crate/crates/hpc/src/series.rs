//! Exact rational generating functions.
//!
//! The length-generating series of a regular language is a quotient of two
//! integer polynomials. It is computed here from the transfer system of the
//! trimmed automaton, f_q = sum over arcs q -> q' of z f_q' plus [q final],
//! solved by fraction-free (Bareiss) elimination over integer polynomials:
//! the summed solution entries equal a bordered determinant divided by the
//! system determinant, and both determinants stay in Z[z] throughout.
//! Unambiguous linear grammars get the analogous system with z^2 weights on
//! wrapping rules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dfa::Dfa;
use crate::grammar::{LinearGrammar, Rhs};
use crate::nfa::Nfa;

/// Refusal threshold for the exact linear solver; elimination is cubic with
/// polynomial entries, so unbounded systems could stall the caller.
pub const MAX_SERIES_UNKNOWNS: usize = 300;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("transfer system has {0} unknowns, above the limit of {MAX_SERIES_UNKNOWNS}")]
    SystemTooLarge(usize),
}

/// Polynomial over the rationals, coefficients ascending, no trailing zeros.
type QPoly = Vec<BigRational>;

fn qtrim(p: &mut QPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn qadd(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    qtrim(&mut out);
    out
}

fn qmul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    qtrim(&mut out);
    out
}

/// Euclidean division, divisor nonzero.
fn qdivmod(a: &QPoly, d: &QPoly) -> (QPoly, QPoly) {
    debug_assert!(!d.is_empty());
    let mut rem = a.clone();
    if rem.len() < d.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - d.len() + 1];
    let lead = d.last().unwrap().clone();
    while rem.len() >= d.len() {
        let deg = rem.len() - d.len();
        let c = rem.last().unwrap() / &lead;
        quot[deg] = c.clone();
        for (i, dc) in d.iter().enumerate() {
            let v = &c * dc;
            rem[deg + i] -= v;
        }
        // The leading coefficient cancels exactly; drop it and any new zeros.
        rem.pop();
        qtrim(&mut rem);
        if rem.is_empty() {
            break;
        }
        if rem.len() < d.len() {
            break;
        }
    }
    (quot, rem)
}

/// Monic greatest common divisor by the Euclidean algorithm.
fn qgcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let (_, r) = qdivmod(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in &mut x {
            *c /= &lead;
        }
    }
    x
}

/// Rational function in lowest terms with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
struct RatFn {
    num: QPoly,
    den: QPoly,
}

impl RatFn {
    fn new(num: QPoly, den: QPoly) -> RatFn {
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return RatFn { num, den: vec![BigRational::one()] };
        }
        let g = qgcd(&num, &den);
        let (mut num, _) = qdivmod(&num, &g);
        let (mut den, _) = qdivmod(&den, &g);
        let lead = den.last().unwrap().clone();
        for c in num.iter_mut().chain(den.iter_mut()) {
            *c /= &lead;
        }
        RatFn { num, den }
    }

    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn add(&self, other: &RatFn) -> RatFn {
        let num = qadd(&qmul(&self.num, &other.den), &qmul(&other.num, &self.den));
        RatFn::new(num, qmul(&self.den, &other.den))
    }

    fn mul(&self, other: &RatFn) -> RatFn {
        RatFn::new(qmul(&self.num, &other.num), qmul(&self.den, &other.den))
    }
}

/// Integer polynomial, coefficients ascending, no trailing zeros; empty
/// means zero.
type ZPoly = Vec<BigInt>;

fn ztrim(p: &mut ZPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn zsub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    ztrim(&mut out);
    out
}

fn zneg(a: &ZPoly) -> ZPoly {
    a.iter().map(|c| -c).collect()
}

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    out
}

/// Quotient of an exact division; panics if the division leaves a remainder,
/// which cannot happen for the Sylvester-identity divisions in `bareiss_det`
/// or after a gcd.
fn zdiv_exact(a: &ZPoly, d: &ZPoly) -> ZPoly {
    if a.is_empty() {
        return Vec::new();
    }
    assert!(!d.is_empty() && a.len() >= d.len(), "division is not exact");
    let lead = d.last().unwrap();
    let mut rem = a.clone();
    let mut quot = vec![BigInt::zero(); a.len() - d.len() + 1];
    while rem.len() >= d.len() {
        let deg = rem.len() - d.len();
        let (q, r) = rem.last().unwrap().div_rem(lead);
        assert!(r.is_zero(), "division is not exact");
        for (i, dc) in d.iter().enumerate() {
            let v = &q * dc;
            rem[deg + i] -= v;
        }
        quot[deg] = q;
        ztrim(&mut rem);
    }
    assert!(rem.is_empty(), "division is not exact");
    quot
}

fn zcontent(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

fn zprimitive(mut p: ZPoly) -> ZPoly {
    let mut c = zcontent(&p);
    if c.is_zero() {
        return p;
    }
    if p.last().unwrap().is_negative() {
        c = -c;
    }
    for x in &mut p {
        *x /= &c;
    }
    p
}

/// Remainder of lc(b)^s a / b for the s that keeps everything integral.
fn zpseudo_rem(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let lead = b.last().unwrap();
    let mut rem = a.clone();
    while rem.len() >= b.len() {
        let deg = rem.len() - b.len();
        let top = rem.last().unwrap().clone();
        for c in &mut rem {
            *c *= lead;
        }
        for (i, bc) in b.iter().enumerate() {
            let v = &top * bc;
            rem[deg + i] -= v;
        }
        ztrim(&mut rem);
    }
    rem
}

/// Primitive greatest common divisor with positive leading coefficient.
fn zgcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let (mut x, mut y) = (zprimitive(a.clone()), zprimitive(b.clone()));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = zpseudo_rem(&x, &y);
        x = y;
        y = zprimitive(r);
    }
    x
}

/// Determinant by fraction-free elimination: each update divides by the
/// previous pivot, exactly, so every entry stays an integer polynomial
/// (a minor of the input). Rows may be swapped to find a pivot; among the
/// candidates the sparsest row limits fill-in.
fn bareiss_det(mut m: Vec<Vec<ZPoly>>) -> ZPoly {
    let n = m.len();
    if n == 0 {
        return vec![BigInt::one()];
    }
    let mut negate = false;
    let mut prev: ZPoly = vec![BigInt::one()];
    for k in 0..n - 1 {
        let pivot = (k..n)
            .filter(|&r| !m[r][k].is_empty())
            .min_by_key(|&r| (k..n).filter(|&c| !m[r][c].is_empty()).count());
        let Some(pivot) = pivot else { return Vec::new() };
        if pivot != k {
            m.swap(pivot, k);
            negate = !negate;
        }
        for i in k + 1..n {
            if m[i][k].is_empty() {
                for j in k + 1..n {
                    if !m[i][j].is_empty() {
                        let t = zmul(&m[k][k], &m[i][j]);
                        m[i][j] = zdiv_exact(&t, &prev);
                    }
                }
                continue;
            }
            for j in k + 1..n {
                let t = zsub(&zmul(&m[k][k], &m[i][j]), &zmul(&m[i][k], &m[k][j]));
                m[i][j] = zdiv_exact(&t, &prev);
            }
            m[i][k] = Vec::new();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        zneg(&det)
    } else {
        det
    }
}

/// The summed solution sum_{i in wanted} x_i of M x = b as a reduced series,
/// via the bordered determinant: appending the selector row c and the column
/// b gives det [[M, b], [c, 0]] = -det(M) (c M^-1 b).
fn transfer_series(m: Vec<Vec<ZPoly>>, b: Vec<ZPoly>, wanted: &[usize]) -> RationalSeries {
    let n = b.len();
    let mut bordered = m.clone();
    for (i, row) in bordered.iter_mut().enumerate() {
        row.push(b[i].clone());
    }
    let mut selector = vec![Vec::new(); n + 1];
    for &i in wanted {
        selector[i] = vec![BigInt::one()];
    }
    bordered.push(selector);

    let num = zneg(&bareiss_det(bordered));
    let den = bareiss_det(m);
    normalize_fraction(num, den)
}

/// Lowest terms, no shared integer content, positive constant term in the
/// denominator.
fn normalize_fraction(mut num: ZPoly, mut den: ZPoly) -> RationalSeries {
    assert!(!den.is_empty(), "transfer determinant vanishes");
    if num.is_empty() {
        return RationalSeries::zero();
    }
    let g = zgcd(&num, &den);
    if g.len() > 1 || g[0] != BigInt::one() {
        num = zdiv_exact(&num, &g);
        den = zdiv_exact(&den, &g);
    }
    let mut content = zcontent(&num).gcd(&zcontent(&den));
    assert!(!den[0].is_zero(), "series denominator vanishes at the origin");
    if den[0].is_negative() {
        content = -content;
    }
    for c in num.iter_mut().chain(den.iter_mut()) {
        *c /= &content;
    }
    RationalSeries { numerator: num, denominator: den }
}

/// Quotient of two integer polynomials, coefficients ascending, normalized:
/// no common integer content, denominator constant term positive and
/// nonzero. Taylor coefficients of language series count words by length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalSeries {
    #[serde(with = "bigint_strings")]
    pub numerator: Vec<BigInt>,
    #[serde(with = "bigint_strings")]
    pub denominator: Vec<BigInt>,
}

/// Coefficients travel as decimal strings; JSON numbers cannot carry
/// arbitrary precision.
mod bigint_strings {
    use num_bigint::BigInt;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|c| c.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigInt>().map_err(|e| D::Error::custom(format!("{e}: {s}"))))
            .collect()
    }
}

impl RationalSeries {
    pub fn zero() -> RationalSeries {
        RationalSeries { numerator: vec![BigInt::zero()], denominator: vec![BigInt::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.iter().all(Zero::is_zero)
    }

    fn from_ratfn(r: &RatFn) -> RationalSeries {
        if r.is_zero() {
            return RationalSeries::zero();
        }
        let mut scale = BigInt::one();
        for c in r.num.iter().chain(r.den.iter()) {
            scale = scale.lcm(c.denom());
        }
        let clear = |p: &QPoly| -> Vec<BigInt> {
            p.iter().map(|c| c.numer() * (&scale / c.denom())).collect()
        };
        let mut num = clear(&r.num);
        let mut den = clear(&r.den);
        let mut content = BigInt::zero();
        for c in num.iter().chain(den.iter()) {
            content = content.gcd(c);
        }
        assert!(!den[0].is_zero(), "series denominator vanishes at the origin");
        if den[0].is_negative() {
            content = -content;
        }
        for c in num.iter_mut().chain(den.iter_mut()) {
            *c /= &content;
        }
        RationalSeries { numerator: num, denominator: den }
    }

    fn to_ratfn(&self) -> RatFn {
        let lift = |p: &[BigInt]| -> QPoly {
            let mut q: QPoly = p.iter().map(|c| BigRational::from(c.clone())).collect();
            qtrim(&mut q);
            q
        };
        RatFn::new(lift(&self.numerator), lift(&self.denominator))
    }

    pub fn add(&self, other: &RationalSeries) -> RationalSeries {
        RationalSeries::from_ratfn(&self.to_ratfn().add(&other.to_ratfn()))
    }

    pub fn mul(&self, other: &RationalSeries) -> RationalSeries {
        RationalSeries::from_ratfn(&self.to_ratfn().mul(&other.to_ratfn()))
    }

    /// Substitutes z^e for z: each word letter then accounts for e symbols.
    pub fn substitute_power(&self, e: usize) -> RationalSeries {
        assert!(e >= 1);
        let spread = |p: &[BigInt]| -> Vec<BigInt> {
            let mut out = vec![BigInt::zero(); (p.len() - 1) * e + 1];
            for (i, c) in p.iter().enumerate() {
                out[i * e] = c.clone();
            }
            out
        };
        RationalSeries {
            numerator: spread(&self.numerator),
            denominator: spread(&self.denominator),
        }
    }

    /// Taylor coefficients c_0..c_up_to by the linear recurrence
    /// den_0 c_m = num_m - sum_{j>=1} den_j c_{m-j}; exact at every step.
    pub fn coefficients(&self, up_to: usize) -> Vec<BigInt> {
        let d0 = &self.denominator[0];
        let mut out: Vec<BigInt> = Vec::with_capacity(up_to + 1);
        for m in 0..=up_to {
            let mut acc = self.numerator.get(m).cloned().unwrap_or_default();
            for j in 1..self.denominator.len().min(m + 1) {
                acc -= &self.denominator[j] * &out[m - j];
            }
            let (q, r) = acc.div_rem(d0);
            assert!(r.is_zero(), "series coefficient is not an integer");
            out.push(q);
        }
        out
    }
}

/// Generating function of the path language of an automaton. For a DFA or
/// an unambiguous NFA the path counts equal word counts, so the Taylor
/// coefficients enumerate the language by length. Callers pass ambiguous
/// automata at their own peril.
pub fn generating_function(a: &Nfa) -> Result<RationalSeries, SeriesError> {
    let (t, _) = a.trim();
    if t.n == 0 {
        return Ok(RationalSeries::zero());
    }
    if t.n > MAX_SERIES_UNKNOWNS {
        return Err(SeriesError::SystemTooLarge(t.n));
    }
    let mut counts = vec![vec![0i64; t.n]; t.n];
    for &(p, _, q) in &t.arcs {
        counts[p][q] += 1;
    }
    let m: Vec<Vec<ZPoly>> = (0..t.n)
        .map(|r| {
            (0..t.n)
                .map(|c| {
                    let unit = if r == c { BigInt::one() } else { BigInt::zero() };
                    let mut p = vec![unit, BigInt::from(-counts[r][c])];
                    ztrim(&mut p);
                    p
                })
                .collect()
        })
        .collect();
    let b: Vec<ZPoly> = (0..t.n)
        .map(|r| if t.finals[r] { vec![BigInt::one()] } else { Vec::new() })
        .collect();
    Ok(transfer_series(m, b, &t.initials))
}

pub fn generating_function_dfa(d: &Dfa) -> Result<RationalSeries, SeriesError> {
    generating_function(&Nfa::from_dfa(d))
}

/// Generating function of an unambiguous linear grammar: letter rules weigh
/// z, wrap rules z^2, primer rules z^(2 kappa), axioms are summed.
pub fn grammar_generating_function(g: &LinearGrammar) -> Result<RationalSeries, SeriesError> {
    let n = g.nonterminals.len();
    if n == 0 {
        return Ok(RationalSeries::zero());
    }
    if n > MAX_SERIES_UNKNOWNS {
        return Err(SeriesError::SystemTooLarge(n));
    }
    let add_mono = |p: &mut ZPoly, deg: usize, c: i64| {
        if p.len() <= deg {
            p.resize(deg + 1, BigInt::zero());
        }
        p[deg] += c;
        ztrim(p);
    };
    let mut m: Vec<Vec<ZPoly>> = vec![vec![Vec::new(); n]; n];
    let mut b: Vec<ZPoly> = vec![Vec::new(); n];
    for i in 0..n {
        m[i][i] = vec![BigInt::one()];
        for rhs in &g.rules[i] {
            match rhs {
                Rhs::Empty => add_mono(&mut b[i], 0, 1),
                Rhs::Letter { to, .. } => add_mono(&mut m[i][*to], 1, -1),
                Rhs::Wrap { to, .. } => add_mono(&mut m[i][*to], 2, -1),
                Rhs::Primer { alpha, to } => add_mono(&mut m[i][*to], 2 * alpha.len(), -1),
            }
        }
    }
    Ok(transfer_series(m, b, &g.axioms))
}
