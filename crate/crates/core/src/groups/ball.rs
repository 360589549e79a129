use std::collections::HashMap;

use rayon::prelude::*;

use super::spec::{GroupSpec, Letter};
use crate::error::{Error, Result};
use crate::product::{kappa, ProductIsometry, VectorR};

/// Default element cap; `HORO_BALL_CAP` overrides it.
pub const DEFAULT_BALL_CAP: usize = 5_000_000;
pub const BALL_CAP_ENV: &str = "HORO_BALL_CAP";

/// Cap from the environment, or [`DEFAULT_BALL_CAP`].
pub fn ball_cap() -> usize {
    std::env::var(BALL_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BALL_CAP)
}

/// A group element with a shortest reduced word found in the enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub word: Vec<Letter>,
    pub matrix: ProductIsometry,
    /// `κ(z₀, g z₀)`.
    pub cartan: VectorR,
}

impl GroupElement {
    pub fn new(spec: &GroupSpec, word: Vec<Letter>) -> Self {
        let matrix = spec.word_matrix(&word);
        Self::from_parts(spec, word, matrix)
    }

    pub fn from_parts(spec: &GroupSpec, word: Vec<Letter>, matrix: ProductIsometry) -> Self {
        let z0 = spec.basepoint();
        let cartan = kappa(z0, &matrix.apply(z0)).expect("dimensions agree");
        Self {
            word,
            matrix,
            cartan,
        }
    }

    pub fn identity(spec: &GroupSpec) -> Self {
        Self::new(spec, Vec::new())
    }

    pub fn word_length(&self) -> usize {
        self.word.len()
    }

    pub fn inverse(&self, spec: &GroupSpec) -> Self {
        let word = self.word.iter().rev().map(|l| l.inv()).collect();
        Self::from_parts(spec, word, self.matrix.inverse())
    }

    /// Product `self · other` with the concatenated word, freely reduced.
    pub fn compose(&self, spec: &GroupSpec, other: &GroupElement) -> Self {
        let mut word = self.word.clone();
        for l in &other.word {
            if word.last() == Some(&l.inv()) {
                word.pop();
            } else {
                word.push(*l);
            }
        }
        Self::from_parts(spec, word, &self.matrix * &other.matrix)
    }
}

/// The word ball, stored sphere by sphere.
#[derive(Debug, Clone)]
pub struct Ball {
    pub elements: Vec<GroupElement>,
    /// `sphere_ends[k]` is one past the last element of word length `k`.
    pub sphere_ends: Vec<usize>,
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.sphere_ends.len() - 1
    }

    /// Elements of word length at most `l` (a prefix of the enumeration).
    pub fn upto(&self, l: usize) -> &[GroupElement] {
        let k = l.min(self.radius());
        &self.elements[..self.sphere_ends[k]]
    }

    pub fn sphere(&self, l: usize) -> &[GroupElement] {
        if l > self.radius() {
            return &[];
        }
        let lo = if l == 0 { 0 } else { self.sphere_ends[l - 1] };
        &self.elements[lo..self.sphere_ends[l]]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn non_identity(&self) -> &[GroupElement] {
        &self.elements[1..]
    }
}

/// Up-to-sign lookup of product matrices within a tolerance relative to the
/// entry scale.
struct DedupIndex {
    tol: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

// Quantization cell for the normalized entries; far above any dedup tolerance.
const CELL: f64 = 1e-6;

impl DedupIndex {
    fn new(tol: f64) -> Self {
        Self {
            tol,
            cells: HashMap::new(),
        }
    }

    fn scale(m: &ProductIsometry) -> f64 {
        m.0.iter()
            .flat_map(|g| g.entries())
            .fold(1.0f64, |s, x| s.max(x.abs()))
    }

    /// Sign choices for one factor: the sign of its largest entry, plus the
    /// opposite sign when the two largest entries nearly tie.
    fn signs(entries: [f64; 4]) -> Vec<f64> {
        let mut sorted = entries;
        sorted.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
        let lead = if sorted[0] < 0.0 { -1.0 } else { 1.0 };
        let close = sorted[0].abs() - sorted[1].abs() <= 1e-6 * sorted[0].abs();
        if close && sorted[0].signum() != sorted[1].signum() {
            vec![lead, -lead]
        } else {
            vec![lead]
        }
    }

    fn extend(keys: Vec<Vec<i64>>, opts: &[Vec<i64>]) -> Vec<Vec<i64>> {
        if opts.len() == 1 {
            return keys
                .into_iter()
                .map(|mut k| {
                    k.extend_from_slice(&opts[0]);
                    k
                })
                .collect();
        }
        keys.into_iter()
            .flat_map(|k| {
                opts.iter().map(move |o| {
                    let mut k = k.clone();
                    k.extend_from_slice(o);
                    k
                })
            })
            .collect()
    }

    /// Candidate keys for `m`, covering sign ambiguity and neighbouring cells.
    fn keys(&self, m: &ProductIsometry) -> Vec<Vec<i64>> {
        let scale = Self::scale(m);
        let slack = 4.0 * self.tol / CELL;
        let mut keys = vec![Vec::new()];
        for g in &m.0 {
            let entries = g.entries();
            let mut factor_opts: Vec<Vec<i64>> = Vec::new();
            for sign in Self::signs(entries) {
                let mut partial = vec![Vec::new()];
                for e in entries {
                    let q = sign * e / scale / CELL;
                    let base = q.floor();
                    let frac = q - base;
                    let mut opts = vec![vec![base as i64]];
                    if frac < slack {
                        opts.push(vec![base as i64 - 1]);
                    }
                    if frac > 1.0 - slack {
                        opts.push(vec![base as i64 + 1]);
                    }
                    partial = Self::extend(partial, &opts);
                }
                factor_opts.extend(partial);
            }
            keys = Self::extend(keys, &factor_opts);
        }
        keys
    }

    fn home_key(m: &ProductIsometry) -> Vec<i64> {
        let scale = Self::scale(m);
        m.0.iter()
            .flat_map(|g| {
                let e = g.entries();
                let sign = Self::signs(e)[0];
                e.map(|x| (sign * x / scale / CELL).floor() as i64)
            })
            .collect()
    }

    fn find(&self, m: &ProductIsometry, elements: &[GroupElement]) -> Option<usize> {
        let limit = self.tol * Self::scale(m);
        for key in self.keys(m) {
            if let Some(ids) = self.cells.get(&key) {
                for &id in ids {
                    if elements[id].matrix.psl_distance(m) <= limit {
                        return Some(id);
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, m: &ProductIsometry, id: usize) {
        self.cells.entry(Self::home_key(m)).or_default().push(id);
    }
}

/// Ball of radius `l` with the cap from [`ball_cap`].
pub fn enumerate_ball(spec: &GroupSpec, l: usize) -> Result<Ball> {
    enumerate_ball_with_cap(spec, l, ball_cap())
}

/// Breadth-first enumeration over freely reduced words, deduplicated by
/// matrix (each factor up to sign, tolerance relative to the entry scale).
/// Within a sphere, elements are ordered by parent index and then by letter.
pub fn enumerate_ball_with_cap(spec: &GroupSpec, l: usize, cap: usize) -> Result<Ball> {
    let letters = spec.letters();
    let letter_mats: Vec<ProductIsometry> = letters.iter().map(|x| spec.letter_matrix(*x)).collect();
    let mut elements = vec![GroupElement::identity(spec)];
    let mut index = DedupIndex::new(spec.dedup_tolerance());
    index.insert(&elements[0].matrix, 0);
    let mut sphere_ends = vec![1];
    for length in 1..=l {
        let lo = if length == 1 { 0 } else { sphere_ends[length - 2] };
        let hi = sphere_ends[length - 1];
        let candidates: Vec<(usize, usize)> = (lo..hi)
            .flat_map(|p| {
                let last = elements[p].word.last().copied();
                letters
                    .iter()
                    .enumerate()
                    .filter(move |(_, x)| last != Some(x.inv()))
                    .map(move |(k, _)| (p, k))
            })
            .collect();
        let products: Vec<ProductIsometry> = candidates
            .par_iter()
            .map(|&(p, k)| &elements[p].matrix * &letter_mats[k])
            .collect();
        for ((p, k), m) in candidates.into_iter().zip(products) {
            if index.find(&m, &elements).is_some() {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::BallTooLarge { cap, length });
            }
            index.insert(&m, elements.len());
            let mut word = elements[p].word.clone();
            word.push(letters[k]);
            elements.push(GroupElement {
                word,
                matrix: m,
                cartan: VectorR(Vec::new()),
            });
        }
        let start = sphere_ends[length - 1];
        let z0 = spec.basepoint();
        elements[start..].par_iter_mut().for_each(|e| {
            e.cartan = kappa(z0, &e.matrix.apply(z0)).expect("dimensions agree");
        });
        sphere_ends.push(elements.len());
    }
    Ok(Ball {
        elements,
        sphere_ends,
    })
}
