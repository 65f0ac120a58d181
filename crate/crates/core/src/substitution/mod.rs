//! Substitution rules over finite alphabets, their two-sided fixed points,
//! and Dekking's column coincidence for constant-length rules.

mod mfs;

pub use mfs::{
    iterate_mfs, mfs_from_substitution, modular_coincidence, symmetric_difference_density,
    Coincidence, FixedMultiset, MfsRule,
};

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Letters are stored as indices into the rule's alphabet.
pub type Word = Vec<usize>;

/// A substitution `σ` on a finite alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionRule {
    alphabet: Vec<char>,
    images: Vec<Word>,
}

impl SubstitutionRule {
    /// Builds a rule from `(letter, image)` pairs. Every image letter must
    /// be in the alphabet; constant-length rules need length at least 2.
    pub fn new(rules: &[(char, &str)]) -> Result<Self> {
        let alphabet: Vec<char> = rules.iter().map(|(c, _)| *c).collect();
        let distinct: HashSet<char> = alphabet.iter().copied().collect();
        if alphabet.is_empty() || distinct.len() != alphabet.len() {
            return Err(Error::InvalidParameter(
                "alphabet must be non-empty with one image per letter".into(),
            ));
        }
        let mut images = Vec::with_capacity(rules.len());
        for (_, image) in rules {
            let word = image
                .chars()
                .map(|c| {
                    alphabet
                        .iter()
                        .position(|&a| a == c)
                        .ok_or(Error::UnknownLetter(c))
                })
                .collect::<Result<Word>>()?;
            if word.is_empty() {
                return Err(Error::InvalidParameter("images must be non-empty".into()));
            }
            images.push(word);
        }
        let rule = Self { alphabet, images };
        if rule.length() == Some(1) {
            return Err(Error::InvalidParameter(
                "constant-length rules need image length at least 2".into(),
            ));
        }
        Ok(rule)
    }

    /// Parses the text format: one `letter: image` line per letter. Blank
    /// lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(char, String)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line.split_once(':').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `letter: image`", no + 1))
            })?;
            let mut lhs = lhs.trim().chars();
            let (Some(letter), None) = (lhs.next(), lhs.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: left side must be one letter",
                    no + 1
                )));
            };
            pairs.push((letter, rhs.trim().to_string()));
        }
        let borrowed: Vec<(char, &str)> = pairs.iter().map(|(c, s)| (*c, s.as_str())).collect();
        Self::new(&borrowed)
    }

    /// The paperfolding rule `a→ab, b→cb, c→ad, d→cd`.
    pub fn paperfolding() -> Self {
        Self::new(&[('a', "ab"), ('b', "cb"), ('c', "ad"), ('d', "cd")]).expect("valid rule")
    }

    /// Thue–Morse `a→ab, b→ba`.
    pub fn thue_morse() -> Self {
        Self::new(&[('a', "ab"), ('b', "ba")]).expect("valid rule")
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn image(&self, letter: usize) -> &[usize] {
        &self.images[letter]
    }

    /// Common image length, if the rule has constant length.
    pub fn length(&self) -> Option<usize> {
        let l = self.images[0].len();
        self.images.iter().all(|w| w.len() == l).then_some(l)
    }

    pub fn letter_index(&self, c: char) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|&a| a == c)
            .ok_or(Error::UnknownLetter(c))
    }

    pub fn encode(&self, word: &str) -> Result<Word> {
        word.chars().map(|c| self.letter_index(c)).collect()
    }

    pub fn decode(&self, word: &[usize]) -> String {
        word.iter().map(|&i| self.alphabet[i]).collect()
    }

    /// `σ(w)`: concatenation of the images.
    pub fn apply(&self, word: &[usize]) -> Word {
        word.iter()
            .flat_map(|&c| self.images[c].iter().copied())
            .collect()
    }

    /// `σ(w)` on a string.
    pub fn apply_str(&self, word: &str) -> Result<String> {
        Ok(self.decode(&self.apply(&self.encode(word)?)))
    }

    /// `σᵏ(w)`.
    pub fn power(&self, word: &[usize], k: u32) -> Word {
        let mut w = word.to_vec();
        for _ in 0..k {
            w = self.apply(&w);
        }
        w
    }

    /// `M_ij` = number of letters `i` in the image of letter `j`.
    pub fn substitution_matrix(&self) -> Vec<Vec<u64>> {
        let m = self.size();
        let mut mat = vec![vec![0u64; m]; m];
        for (j, image) in self.images.iter().enumerate() {
            for &i in image {
                mat[i][j] += 1;
            }
        }
        mat
    }

    /// `σᵏ` as a new rule.
    pub fn compose_power(&self, k: u32) -> Self {
        let images = (0..self.size()).map(|c| self.power(&[c], k)).collect();
        Self {
            alphabet: self.alphabet.clone(),
            images,
        }
    }

    /// All letter pairs `(l, r)` with `σ(l)` ending in `l` and `σ(r)`
    /// starting with `r`.
    pub fn fixed_point_seeds(&self) -> Vec<(char, char)> {
        let ends: Vec<usize> = (0..self.size())
            .filter(|&c| self.images[c].last() == Some(&c))
            .collect();
        let starts: Vec<usize> = (0..self.size())
            .filter(|&c| self.images[c].first() == Some(&c))
            .collect();
        ends.iter()
            .flat_map(|&l| starts.iter().map(move |&r| (l, r)))
            .map(|(l, r)| (self.alphabet[l], self.alphabet[r]))
            .collect()
    }
}

impl fmt::Display for SubstitutionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, image) in self.alphabet.iter().zip(&self.images) {
            writeln!(f, "{c}: {}", self.decode(image))?;
        }
        Ok(())
    }
}

/// `M` is primitive iff some power `M^k`, `k ≤ m²`, has only positive entries.
pub fn primitive(matrix: &[Vec<u64>]) -> bool {
    let m = matrix.len();
    if m == 0 || matrix.iter().any(|row| row.len() != m) {
        return false;
    }
    let base: Vec<Vec<bool>> = matrix
        .iter()
        .map(|row| row.iter().map(|&x| x > 0).collect())
        .collect();
    let mut power = base.clone();
    for _ in 0..m * m {
        if power.iter().flatten().all(|&x| x) {
            return true;
        }
        power = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).any(|k| power[i][k] && base[k][j]))
                    .collect()
            })
            .collect();
    }
    false
}

/// A two-sided fixed point `σ(w) = w` grown lazily from a seed `l|r`.
/// Index 0 holds `r`, index −1 holds `l`.
#[derive(Clone, Debug)]
pub struct FixedPointWord {
    rule: SubstitutionRule,
    seed: (usize, usize),
    /// Letters at −len..−1, in reading order.
    left: Word,
    /// Letters at 0..len.
    right: Word,
}

impl FixedPointWord {
    pub fn rule(&self) -> &SubstitutionRule {
        &self.rule
    }

    pub fn seed(&self) -> (char, char) {
        (
            self.rule.alphabet[self.seed.0],
            self.rule.alphabet[self.seed.1],
        )
    }

    fn grow(&mut self, extent: usize) {
        while self.right.len() < extent {
            self.right = self.rule.apply(&self.right);
        }
        while self.left.len() < extent {
            self.left = self.rule.apply(&self.left);
        }
    }

    /// Letter index at position `i`.
    pub fn letter(&mut self, i: i64) -> usize {
        let extent = i.unsigned_abs() as usize + 1;
        self.grow(extent);
        if i >= 0 {
            self.right[i as usize]
        } else {
            self.left[self.left.len() - i.unsigned_abs() as usize]
        }
    }

    /// Letters at positions `lo..hi`.
    pub fn segment(&mut self, lo: i64, hi: i64) -> Word {
        if hi <= lo {
            return Vec::new();
        }
        let extent = lo.unsigned_abs().max(hi.unsigned_abs()) as usize + 1;
        self.grow(extent);
        (lo..hi)
            .map(|i| {
                if i >= 0 {
                    self.right[i as usize]
                } else {
                    self.left[self.left.len() - i.unsigned_abs() as usize]
                }
            })
            .collect()
    }

    pub fn segment_str(&mut self, lo: i64, hi: i64) -> String {
        let seg = self.segment(lo, hi);
        self.rule.decode(&seg)
    }

    /// Letter positions in `[−extent, extent]`, one sorted list per letter.
    pub fn multiset(&mut self, extent: i64) -> FixedMultiset {
        let seg = self.segment(-extent, extent + 1);
        let mut components = vec![Vec::new(); self.rule.size()];
        for (offset, &c) in seg.iter().enumerate() {
            components[c].push(offset as i64 - extent);
        }
        FixedMultiset::new(components, extent)
    }
}

/// Two-sided fixed point from the seed `left|right`.
pub fn fixed_point(rule: &SubstitutionRule, seed: (char, char)) -> Result<FixedPointWord> {
    let l = rule.letter_index(seed.0)?;
    let r = rule.letter_index(seed.1)?;
    if rule.images[l].last() != Some(&l) || rule.images[r].first() != Some(&r) {
        return Err(Error::SeedNotFixed {
            left: seed.0,
            right: seed.1,
        });
    }
    Ok(FixedPointWord {
        rule: rule.clone(),
        seed: (l, r),
        left: vec![l],
        right: vec![r],
    })
}

/// Smallest `k` such that some column of `σᵏ` (the letters at one position
/// across the images of all letters) is constant. `None` means no power
/// ever coincides, detected by a repeated set of columns.
pub fn dekking_coincidence(rule: &SubstitutionRule) -> Result<Option<u32>> {
    let length = rule.length().ok_or(Error::NonConstantLength)?;
    if !primitive(&rule.substitution_matrix()) {
        return Err(Error::InvalidParameter(
            "substitution is not primitive".into(),
        ));
    }
    let m = rule.size();
    // Column p of σ: the map α ↦ σ(α)_p.
    let base: Vec<Word> = (0..length)
        .map(|p| (0..m).map(|a| rule.images[a][p]).collect())
        .collect();
    let is_constant = |c: &Word| c.iter().all(|&x| x == c[0]);
    let mut level: BTreeSet<Word> = base.iter().cloned().collect();
    let mut seen: HashSet<BTreeSet<Word>> = HashSet::new();
    let mut k = 1u32;
    loop {
        if level.iter().any(is_constant) {
            return Ok(Some(k));
        }
        if !seen.insert(level.clone()) {
            return Ok(None);
        }
        // σ^{k+1}(α) = σᵏ(σ(α)): column (p, c) is α ↦ c(σ(α)_p).
        level = level
            .iter()
            .flat_map(|c| base.iter().map(move |b| b.iter().map(|&x| c[x]).collect()))
            .collect();
        k += 1;
    }
}

/// Bounded legality check: every length-`width` subword of the fixed point
/// inside `[−extent, extent]` occurs in `σⁿ(α)` for some letter `α` and
/// `n ≤ n_max`.
pub fn clusters_legal(word: &mut FixedPointWord, width: usize, n_max: u32, extent: i64) -> bool {
    let rule = word.rule.clone();
    let mut legal: HashSet<Word> = HashSet::new();
    for a in 0..rule.size() {
        let mut w = vec![a];
        for _ in 0..=n_max {
            if w.len() >= width {
                legal.extend(w.windows(width).map(<[usize]>::to_vec));
            }
            w = rule.apply(&w);
        }
    }
    let seg = word.segment(-extent, extent + 1);
    seg.windows(width).all(|c| legal.contains(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_examples() {
        let pf = SubstitutionRule::paperfolding();
        assert_eq!(pf.apply_str("a").unwrap(), "ab");
        assert_eq!(pf.apply_str("").unwrap(), "");
        assert_eq!(pf.apply_str("ab").unwrap(), "abcb");
        assert!(matches!(pf.apply_str("ax"), Err(Error::UnknownLetter('x'))));
    }

    #[test]
    fn parse_rule_file() {
        let text = "# paperfolding\na: ab\nb: cb\n\nc: ad\nd: cd\n";
        assert_eq!(
            SubstitutionRule::parse(text).unwrap(),
            SubstitutionRule::paperfolding()
        );
        assert!(SubstitutionRule::parse("a ab").is_err());
        assert!(matches!(
            SubstitutionRule::parse("a: ax"),
            Err(Error::UnknownLetter('x'))
        ));
        assert!(SubstitutionRule::parse("a: a\n").is_err());
    }

    #[test]
    fn paperfolding_seeds() {
        let pf = SubstitutionRule::paperfolding();
        assert_eq!(pf.fixed_point_seeds(), vec![('b', 'a'), ('d', 'a')]);
        assert!(SubstitutionRule::thue_morse()
            .fixed_point_seeds()
            .is_empty());
    }

    #[test]
    fn paperfolding_fixed_points() {
        let pf = SubstitutionRule::paperfolding();
        let mut w1 = fixed_point(&pf, ('b', 'a')).unwrap();
        let mut w2 = fixed_point(&pf, ('d', 'a')).unwrap();
        assert_eq!(w1.segment_str(0, 16), "abcbadcbabcdadcb");
        let a = w1.segment(-4096, 4096);
        let b = w2.segment(-4096, 4096);
        let differing: Vec<i64> = (0..a.len())
            .filter(|&i| a[i] != b[i])
            .map(|i| i as i64 - 4096)
            .collect();
        assert_eq!(differing, vec![-1]);
        assert_eq!(w2.letter(-1), pf.letter_index('d').unwrap());
    }

    #[test]
    fn unfixed_seed_rejected() {
        let pf = SubstitutionRule::paperfolding();
        assert!(matches!(
            fixed_point(&pf, ('a', 'a')),
            Err(Error::SeedNotFixed { .. })
        ));
    }

    #[test]
    fn fixed_point_is_self_similar() {
        let pf = SubstitutionRule::paperfolding();
        for seed in pf.fixed_point_seeds() {
            let mut w = fixed_point(&pf, seed).unwrap();
            for k in 0..=10u32 {
                let e = 2i64.pow(k);
                let inner = w.segment(-e, e);
                let outer = w.segment(-2 * e, 2 * e);
                assert_eq!(pf.apply(&inner), outer);
            }
        }
    }

    #[test]
    fn primitivity() {
        assert!(primitive(
            &SubstitutionRule::paperfolding().substitution_matrix()
        ));
        assert!(!primitive(&[vec![1, 0], vec![0, 1]]));
        assert!(primitive(&[vec![2]]));
        // Periodic (irreducible, imprimitive) matrix.
        assert!(!primitive(&[vec![0, 1], vec![1, 0]]));
    }

    #[test]
    fn dekking_examples() {
        assert_eq!(
            dekking_coincidence(&SubstitutionRule::paperfolding()).unwrap(),
            Some(2)
        );
        assert_eq!(
            dekking_coincidence(&SubstitutionRule::thue_morse()).unwrap(),
            None
        );
        let trivial = SubstitutionRule::new(&[('a', "aa")]).unwrap();
        assert_eq!(dekking_coincidence(&trivial).unwrap(), Some(1));
        let fib = SubstitutionRule::new(&[('a', "ab"), ('b', "a")]).unwrap();
        assert!(matches!(
            dekking_coincidence(&fib),
            Err(Error::NonConstantLength)
        ));
    }

    #[test]
    fn thue_morse_columns_never_coincide_by_brute_force() {
        // Independent oracle: scan every column of σᵏ directly.
        let tm = SubstitutionRule::thue_morse();
        for k in 1..=12 {
            let a = tm.power(&[0], k);
            let b = tm.power(&[1], k);
            assert!(a.iter().zip(&b).all(|(x, y)| x != y));
        }
    }

    #[test]
    fn paperfolding_clusters_are_legal() {
        let pf = SubstitutionRule::paperfolding();
        let mut w = fixed_point(&pf, ('b', 'a')).unwrap();
        assert!(clusters_legal(&mut w, 16, 12, 4096));
    }
}
