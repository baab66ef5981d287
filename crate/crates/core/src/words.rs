//! Words in the free monoid on `g_1, g_1*, ..., g_s, g_s*` and the
//! congruence generated by unitarity (`g g* = g* g = e`) and finite
//! cycle orders (`g^d = e`).
//!
//! Identity testing goes through the normal form of the free product of
//! cyclic groups: maximal runs of one color collapse to a net exponent,
//! exponents reduce modulo the color's order, and vanished runs merge
//! their neighbors until stable.

use std::fmt;

use crate::error::{Error, Result};

/// Cycle order of a generator: a positive integer or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn is_finite(self) -> bool {
        matches!(self, Order::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(d) => Some(d),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(d) => write!(f, "{d}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// The generator orders `d_1, ..., d_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    orders: Vec<Order>,
}

impl Signature {
    /// At least one generator; finite orders must be >= 1.
    pub fn new(orders: Vec<Order>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::invalid("signature needs at least one generator"));
        }
        if orders.iter().any(|o| o.finite() == Some(0)) {
            return Err(Error::invalid("finite orders must be positive"));
        }
        Ok(Signature { orders })
    }

    /// Number of generators.
    pub fn s(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    /// Order of the generator with 1-based `color`.
    pub fn order(&self, color: usize) -> Result<Order> {
        if color == 0 || color > self.orders.len() {
            return Err(Error::ColorOutOfRange {
                color,
                s: self.orders.len(),
            });
        }
        Ok(self.orders[color - 1])
    }

    /// Comma-separated orders, `inf` for infinity: `2,inf,3`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut orders = Vec::new();
        for tok in text.split(',') {
            let tok = tok.trim();
            let order = if tok.eq_ignore_ascii_case("inf") {
                Order::Infinite
            } else {
                let d: u64 = tok
                    .parse()
                    .map_err(|_| Error::parse("signature", text))?;
                if d == 0 {
                    return Err(Error::parse("signature", text));
                }
                Order::Finite(d)
            };
            orders.push(order);
        }
        Signature::new(orders)
    }

    /// Every letter color must lie in `[s]`.
    pub fn check_word(&self, w: &Word) -> Result<()> {
        for letter in w.letters() {
            self.order(letter.color)?;
        }
        Ok(())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.orders.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}

/// One symbol `g_r` (unstarred) or `g_r*` (starred), `color` 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub color: usize,
    pub starred: bool,
}

impl Letter {
    pub fn plain(color: usize) -> Self {
        Letter {
            color,
            starred: false,
        }
    }

    pub fn starred(color: usize) -> Self {
        Letter {
            color,
            starred: true,
        }
    }

    /// `g_r <-> g_r*`.
    pub fn star(self) -> Self {
        Letter {
            color: self.color,
            starred: !self.starred,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}{}", self.color, if self.starred { "*" } else { "" })
    }
}

/// A finite, possibly empty sequence of letters. The empty word is the
/// identity `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// The formal inverse: reverse the sequence and star every letter.
    pub fn star_reverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.star()).collect(),
        }
    }

    /// Rotate left by `k`, keeping the cyclic reading of the word.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return self.clone();
        }
        let n = self.letters.len();
        let k = k % n;
        let mut letters = Vec::with_capacity(n);
        letters.extend_from_slice(&self.letters[k..]);
        letters.extend_from_slice(&self.letters[..k]);
        Word { letters }
    }

    /// Whitespace-separated tokens `g<r>` / `g<r>*`; the empty string
    /// (or the single token `e`) is the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "e" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for tok in trimmed.split_whitespace() {
            let rest = tok
                .strip_prefix('g')
                .ok_or_else(|| Error::parse("word", text))?;
            let (digits, starred) = match rest.strip_suffix('*') {
                Some(d) => (d, true),
                None => (rest, false),
            };
            let color: usize = digits.parse().map_err(|_| Error::parse("word", text))?;
            if color == 0 {
                return Err(Error::parse("word", text));
            }
            letters.push(Letter { color, starred });
        }
        Ok(Word { letters })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Reduced syllable run: a color with a nonzero net exponent.
#[derive(Debug, Clone, Copy)]
struct Syllable {
    color: usize,
    /// For a finite order d this lies in `1..d`; otherwise any nonzero
    /// signed exponent.
    exp: i64,
}

/// Push one unit of `color` with sign `delta` onto a reduced stack,
/// keeping it reduced.
fn push_letter(stack: &mut Vec<Syllable>, color: usize, delta: i64, order: Order) {
    if let Some(top) = stack.last_mut() {
        if top.color == color {
            top.exp += delta;
            if let Order::Finite(d) = order {
                top.exp = top.exp.rem_euclid(d as i64);
            }
            if top.exp == 0 {
                stack.pop();
            }
            return;
        }
    }
    let mut exp = delta;
    if let Order::Finite(d) = order {
        exp = exp.rem_euclid(d as i64);
    }
    if exp != 0 {
        stack.push(Syllable { color, exp });
    }
}

/// The unique reduced representative of `w` under the congruence: runs
/// collapsed, exponents reduced mod `d_r` (spelled with unstarred
/// letters for finite orders), empty runs deleted with neighbor
/// re-merging.
pub fn normal_form(w: &Word, sig: &Signature) -> Result<Word> {
    sig.check_word(w)?;
    let mut stack: Vec<Syllable> = Vec::new();
    for letter in w.letters() {
        let delta = if letter.starred { -1 } else { 1 };
        let order = sig.order(letter.color)?;
        push_letter(&mut stack, letter.color, delta, order);
    }
    let mut letters = Vec::new();
    for syl in stack {
        if syl.exp > 0 {
            letters.extend(std::iter::repeat(Letter::plain(syl.color)).take(syl.exp as usize));
        } else {
            letters
                .extend(std::iter::repeat(Letter::starred(syl.color)).take(-syl.exp as usize));
        }
    }
    Ok(Word { letters })
}

/// `w ≈ e`?
pub fn is_identity(w: &Word, sig: &Signature) -> Result<bool> {
    Ok(normal_form(w, sig)?.is_empty())
}

/// Moment of the corresponding word in a *-free family of d-Haar
/// unitaries: 1 iff `w ≈ e`, else 0.
pub fn haar_moment(w: &Word, sig: &Signature) -> Result<u8> {
    Ok(if is_identity(w, sig)? { 1 } else { 0 })
}

/// `w1 ≈ w2`, decided through `w1 · w2^{-1} ≈ e`.
pub fn equivalent(w1: &Word, w2: &Word, sig: &Signature) -> Result<bool> {
    is_identity(&w1.concat(&w2.star_reverse()), sig)
}

/// All words of length at most `max_len` over `s` generators, in
/// length-then-lexicographic order with `g1 < g1* < g2 < g2* < ...`.
pub fn enumerate_words(s: usize, max_len: usize) -> impl Iterator<Item = Word> {
    let alphabet: Vec<Letter> = (1..=s)
        .flat_map(|c| [Letter::plain(c), Letter::starred(c)])
        .collect();
    (0..=max_len).flat_map(move |len| {
        let alphabet = alphabet.clone();
        WordsOfLength::new(alphabet, len)
    })
}

struct WordsOfLength {
    alphabet: Vec<Letter>,
    digits: Vec<usize>,
    done: bool,
}

impl WordsOfLength {
    fn new(alphabet: Vec<Letter>, len: usize) -> Self {
        let done = alphabet.is_empty() && len > 0;
        WordsOfLength {
            alphabet,
            digits: vec![0; len],
            done,
        }
    }
}

impl Iterator for WordsOfLength {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let word = Word::new(self.digits.iter().map(|&d| self.alphabet[d]).collect());
        // increment the base-(2s) counter, most significant digit first
        let base = self.alphabet.len();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < base {
                break;
            }
            self.digits[i] = 0;
        }
        Some(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(text: &str) -> Signature {
        Signature::parse(text).unwrap()
    }

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    #[test]
    fn unitarity_relation_reduces() {
        let s = sig("inf");
        assert_eq!(normal_form(&w("g1 g1*"), &s).unwrap(), Word::empty());
        assert_eq!(normal_form(&w("g1* g1"), &s).unwrap(), Word::empty());
    }

    #[test]
    fn order_relation_reduces() {
        let s = sig("3");
        assert_eq!(normal_form(&w("g1 g1 g1"), &s).unwrap(), Word::empty());
        assert_eq!(normal_form(&w("g1* g1* g1*"), &s).unwrap(), Word::empty());
        // net exponent 2 mod 3
        assert_eq!(normal_form(&w("g1 g1"), &s).unwrap(), w("g1 g1"));
        assert!(!is_identity(&w("g1 g1"), &s).unwrap());
    }

    #[test]
    fn distinct_colors_do_not_interact() {
        let s = sig("2,5");
        assert_eq!(normal_form(&w("g1 g2"), &s).unwrap(), w("g1 g2"));
    }

    #[test]
    fn nested_cancellation() {
        let s = sig("inf,inf");
        assert!(is_identity(&w("g1 g2 g2* g1*"), &s).unwrap());
        assert!(!is_identity(&w("g1 g2 g1* g2*"), &s).unwrap());
    }

    #[test]
    fn starred_letters_reduce_mod_finite_order() {
        let s = sig("3");
        // g1* = g1^2 in the cyclic group of order 3
        assert_eq!(normal_form(&w("g1*"), &s).unwrap(), w("g1 g1"));
    }

    #[test]
    fn order_one_generator_vanishes() {
        let s = sig("1");
        assert!(is_identity(&w("g1"), &s).unwrap());
        assert!(is_identity(&w("g1* g1 g1"), &s).unwrap());
    }

    #[test]
    fn haar_moment_values() {
        assert_eq!(haar_moment(&Word::empty(), &sig("inf")).unwrap(), 1);
        assert_eq!(haar_moment(&w("g1"), &sig("inf")).unwrap(), 0);
        assert_eq!(haar_moment(&w("g1 g1"), &sig("2")).unwrap(), 1);
    }

    #[test]
    fn color_out_of_range_is_rejected() {
        let s = sig("inf");
        assert_eq!(
            normal_form(&w("g2"), &s),
            Err(Error::ColorOutOfRange { color: 2, s: 1 })
        );
    }

    #[test]
    fn enumeration_counts_and_order() {
        let words: Vec<Word> = enumerate_words(1, 1).collect();
        assert_eq!(words, vec![Word::empty(), w("g1"), w("g1*")]);
        assert_eq!(enumerate_words(2, 2).count(), 21);
        assert_eq!(enumerate_words(1, 3).count(), 15);
    }

    #[test]
    fn parse_display_round_trip() {
        let text = "g3* g1* g2 g2* g1 g4 g2* g1*";
        assert_eq!(w(text).to_string(), text);
        assert_eq!(Word::parse("").unwrap(), Word::empty());
        assert_eq!(Word::parse("e").unwrap(), Word::empty());
        assert_eq!(Word::empty().to_string(), "e");
        assert!(Word::parse("h1").is_err());
        assert!(Word::parse("g0").is_err());
        assert!(Signature::parse("2,0").is_err());
    }

    #[test]
    fn equivalence_via_star_reverse() {
        let s = sig("3");
        assert!(equivalent(&w("g1*"), &w("g1 g1"), &s).unwrap());
        assert!(!equivalent(&w("g1"), &w("g1 g1"), &s).unwrap());
    }
}
