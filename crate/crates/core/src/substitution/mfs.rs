//! Matrix function systems on `Z`: matrices of affine maps `x ↦ Qx + a`
//! acting on multisets of integers.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{primitive, SubstitutionRule, Word};
use crate::error::{Error, Result};

/// An MFS `Φ` on `Z`: `maps[i][j]` holds the translations `a` of the maps
/// `x ↦ Qx + a` sending type `j` to type `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MfsRule {
    q: i64,
    maps: Vec<Vec<Vec<i64>>>,
}

impl MfsRule {
    /// Validates the disjointness of the unions in `Φ(U)`: within a row,
    /// congruent translations must coincide (they then act on disjoint
    /// components), and within a column translations must be pairwise
    /// incongruent modulo `Q`.
    pub fn new(q: i64, mut maps: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if q.abs() < 2 {
            return Err(Error::InvalidParameter(format!(
                "inflation |Q| must be ≥ 2, got {q}"
            )));
        }
        let m = maps.len();
        if m == 0 || maps.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParameter(
                "MFS must be a non-empty square matrix".into(),
            ));
        }
        for cell in maps.iter_mut().flatten() {
            cell.sort_unstable();
            cell.dedup();
        }
        let qa = q.abs();
        for (i, row) in maps.iter().enumerate() {
            let mut by_residue: HashMap<i64, i64> = HashMap::new();
            for &a in row.iter().flatten() {
                if let Some(&prev) = by_residue.get(&a.rem_euclid(qa)) {
                    if prev != a {
                        return Err(Error::NotLatticeSubstitution(format!(
                            "row {i}: translations {prev} and {a} are congruent mod {qa}"
                        )));
                    }
                }
                by_residue.insert(a.rem_euclid(qa), a);
            }
        }
        for j in 0..m {
            let mut residues = HashSet::new();
            for row in &maps {
                for &a in &row[j] {
                    if !residues.insert(a.rem_euclid(qa)) {
                        return Err(Error::NotLatticeSubstitution(format!(
                            "column {j}: two maps share residue {} mod {qa}",
                            a.rem_euclid(qa)
                        )));
                    }
                }
            }
        }
        Ok(Self { q, maps })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn size(&self) -> usize {
        self.maps.len()
    }

    pub fn translations(&self, i: usize, j: usize) -> &[i64] {
        &self.maps[i][j]
    }

    /// `M_ij = #Φ_ij`.
    pub fn substitution_matrix(&self) -> Vec<Vec<u64>> {
        self.maps
            .iter()
            .map(|row| row.iter().map(|cell| cell.len() as u64).collect())
            .collect()
    }
}

/// The MFS of a constant-length substitution: `Q = L` and
/// `Φ_ij = {x ↦ Lx + p | σ(j)_p = i}`.
pub fn mfs_from_substitution(rule: &SubstitutionRule) -> Result<MfsRule> {
    let length = rule.length().ok_or(Error::NonConstantLength)?;
    let m = rule.size();
    let mut maps = vec![vec![Vec::new(); m]; m];
    #[allow(clippy::needless_range_loop)] // j indexes the column of maps[i]
    for j in 0..m {
        for (p, &i) in rule.image(j).iter().enumerate() {
            maps[i][j].push(p as i64);
        }
    }
    MfsRule::new(length as i64, maps)
}

/// A multiset `(U_1, …, U_m)` of sorted integer sets known exactly on
/// `[−extent, extent]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedMultiset {
    components: Vec<Vec<i64>>,
    extent: i64,
}

impl FixedMultiset {
    pub fn new(mut components: Vec<Vec<i64>>, extent: i64) -> Self {
        for c in &mut components {
            c.sort_unstable();
            c.dedup();
        }
        Self { components, extent }
    }

    pub fn components(&self) -> &[Vec<i64>] {
        &self.components
    }

    pub fn extent(&self) -> i64 {
        self.extent
    }

    fn contains(&self, i: usize, x: i64) -> bool {
        self.components[i].binary_search(&x).is_ok()
    }
}

/// Applies `Φ(U)_i = ⋃_j ⋃_{f ∈ Φ_ij} f(U_j)` `steps` times, checking that
/// the input components and every union are disjoint.
pub fn iterate_mfs(mfs: &MfsRule, multiset: &[Vec<i64>], steps: u32) -> Result<Vec<Vec<i64>>> {
    if multiset.len() != mfs.size() {
        return Err(Error::InvalidParameter(format!(
            "multiset has {} components, MFS has {}",
            multiset.len(),
            mfs.size()
        )));
    }
    let mut seen = HashSet::new();
    for (j, comp) in multiset.iter().enumerate() {
        for &x in comp {
            if !seen.insert(x) {
                return Err(Error::NotLatticeSubstitution(format!(
                    "input components overlap at {x} (component {j})"
                )));
            }
        }
    }
    let mut current: Vec<Vec<i64>> = multiset.to_vec();
    for _ in 0..steps {
        let mut taken = HashSet::new();
        let mut next = vec![Vec::new(); mfs.size()];
        for (i, out) in next.iter_mut().enumerate() {
            for (j, comp) in current.iter().enumerate() {
                for &a in mfs.translations(i, j) {
                    for &x in comp {
                        let y = x
                            .checked_mul(mfs.q)
                            .and_then(|v| v.checked_add(a))
                            .ok_or_else(|| {
                                Error::OutOfRange(format!("{}·{x}+{a} overflows", mfs.q))
                            })?;
                        if !taken.insert(y) {
                            return Err(Error::NotLatticeSubstitution(format!(
                                "union is not disjoint at {y}"
                            )));
                        }
                        out.push(y);
                    }
                }
            }
            out.sort_unstable();
        }
        current = next;
    }
    Ok(current)
}

/// Verdict of the modular coincidence search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coincidence {
    /// Some residue class modulo `Q^M` is mapped into a single type by `Φ^M`.
    At(u32),
    /// No coincidence up to the search bound.
    NotFoundUpTo(u32),
    /// The residue-class refinement entered a cycle without coinciding.
    Never,
}

/// Searches `M = 1..=max_power` for a modular coincidence of `Φ^M` relative
/// to `Q^M Z`.
///
/// Only MFS whose columns carry exactly one map per residue `0..|Q|` are
/// accepted; these are the systems on `Γ = Z` arising from constant-length
/// substitutions.
pub fn modular_coincidence(mfs: &MfsRule, max_power: u32) -> Result<Coincidence> {
    let m = mfs.size();
    let qa = mfs.q.unsigned_abs() as usize;
    // step[k][r] = type reached from type k by the map with translation r.
    let mut step = vec![vec![usize::MAX; qa]; m];
    for (i, row) in mfs.maps.iter().enumerate() {
        for (k, cell) in row.iter().enumerate() {
            for &a in cell {
                if !(0..qa as i64).contains(&a) {
                    return Err(Error::UnsupportedLattice(format!(
                        "translation {a} outside 0..{qa}; only digit-set MFS on Z are supported"
                    )));
                }
                step[k][a as usize] = i;
            }
        }
    }
    if step.iter().flatten().any(|&t| t == usize::MAX) {
        return Err(Error::UnsupportedLattice(
            "some residue class is not covered; the fixed multiset does not tile Z".into(),
        ));
    }
    if !primitive(&mfs.substitution_matrix()) {
        return Err(Error::InvalidParameter("MFS is not primitive".into()));
    }
    // A state is the map (type of x) ↦ (type of Φ^M image in one residue
    // class); Φ^{M+1} = Φ ∘ Φ^M refines class b into Qb + r.
    let identity: Word = (0..m).collect();
    let mut level: BTreeSet<Word> = BTreeSet::from([identity]);
    let mut seen: HashSet<BTreeSet<Word>> = HashSet::new();
    for power in 1..=max_power {
        level = level
            .iter()
            .flat_map(|col| {
                let step = &step;
                (0..qa).map(move |r| col.iter().map(|&k| step[k][r]).collect::<Word>())
            })
            .collect();
        if level.iter().any(|c| c.iter().all(|&t| t == c[0])) {
            return Ok(Coincidence::At(power));
        }
        if !seen.insert(level.clone()) {
            return Ok(Coincidence::Never);
        }
    }
    Ok(Coincidence::NotFoundUpTo(max_power))
}

/// Per-component density of `U_i △ (Qⁿα + U_i)` in `[−window, window]`,
/// normalized by `2·window`.
pub fn symmetric_difference_density(
    mfs: &MfsRule,
    multiset: &FixedMultiset,
    alpha: i64,
    n: u32,
    window: i64,
) -> Result<Vec<f64>> {
    if window <= 0 {
        return Err(Error::InvalidParameter("window must be positive".into()));
    }
    let shift = mfs
        .q
        .checked_pow(n)
        .and_then(|qn| qn.checked_mul(alpha))
        .ok_or_else(|| Error::OutOfRange("shift Qⁿα overflows".into()))?;
    if window + shift.abs() > multiset.extent {
        return Err(Error::OutOfRange(format!(
            "multiset known on ±{} but window ±{window} shifted by {shift} is needed",
            multiset.extent
        )));
    }
    Ok((0..multiset.components.len())
        .map(|i| {
            let count = (-window..=window)
                .filter(|&x| multiset.contains(i, x) != multiset.contains(i, x - shift))
                .count();
            count as f64 / (2 * window) as f64
        })
        .collect())
}
