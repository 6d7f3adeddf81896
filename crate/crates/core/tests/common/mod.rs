//! Independent reference implementations used as test oracles. Nothing here
//! calls into the code paths it is used to check.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

/// Op codes in tie-break preference order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Match,
    Sub,
    Del,
    Ins,
}

/// Every monotone alignment of `a` onto `b`, as op sequences (front to back).
pub fn all_alignments<T: PartialEq>(a: &[T], b: &[T]) -> Vec<Vec<Op>> {
    fn go<T: PartialEq>(a: &[T], b: &[T], i: usize, j: usize, cur: &mut Vec<Op>, out: &mut Vec<Vec<Op>>) {
        if i == a.len() && j == b.len() {
            out.push(cur.clone());
            return;
        }
        if i < a.len() && j < b.len() {
            cur.push(if a[i] == b[j] { Op::Match } else { Op::Sub });
            go(a, b, i + 1, j + 1, cur, out);
            cur.pop();
        }
        if i < a.len() {
            cur.push(Op::Del);
            go(a, b, i + 1, j, cur, out);
            cur.pop();
        }
        if j < b.len() {
            cur.push(Op::Ins);
            go(a, b, i, j + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(a, b, 0, 0, &mut Vec::new(), &mut out);
    out
}

pub fn cost(ops: &[Op]) -> usize {
    ops.iter().filter(|o| **o != Op::Match).count()
}

/// Minimum-cost script by full enumeration; among ties, the one whose
/// reversed op sequence is lexicographically smallest.
pub fn enumerate_best<T: PartialEq>(a: &[T], b: &[T]) -> (usize, Vec<Op>) {
    all_alignments(a, b)
        .into_iter()
        .map(|ops| {
            let rev: Vec<Op> = ops.iter().rev().copied().collect();
            (cost(&ops), rev, ops)
        })
        .min_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)))
        .map(|(c, _, ops)| (c, ops))
        .unwrap()
}

/// Same selection as [`enumerate_best`] by depth-first enumeration from the
/// end of both sequences in preference order, abandoning branches that
/// cannot beat the best complete script found so far. Visiting order is the
/// reversed-lexicographic order, so the first script reaching the optimum is
/// the tie-break winner.
pub fn search_best<T: PartialEq>(a: &[T], b: &[T]) -> (usize, Vec<Op>) {
    struct S<'x, T> {
        a: &'x [T],
        b: &'x [T],
        best: usize,
        best_ops: Vec<Op>,
        cur: Vec<Op>,
    }
    fn go<T: PartialEq>(s: &mut S<'_, T>, i: usize, j: usize, c: usize) {
        // Any completion costs at least the length difference of the remainders.
        if c + i.abs_diff(j) >= s.best {
            return;
        }
        if i == 0 && j == 0 {
            s.best = c;
            s.best_ops = s.cur.iter().rev().copied().collect();
            return;
        }
        if i > 0 && j > 0 && s.a[i - 1] == s.b[j - 1] {
            s.cur.push(Op::Match);
            go(s, i - 1, j - 1, c);
            s.cur.pop();
        }
        if i > 0 && j > 0 && s.a[i - 1] != s.b[j - 1] {
            s.cur.push(Op::Sub);
            go(s, i - 1, j - 1, c + 1);
            s.cur.pop();
        }
        if i > 0 {
            s.cur.push(Op::Del);
            go(s, i - 1, j, c + 1);
            s.cur.pop();
        }
        if j > 0 {
            s.cur.push(Op::Ins);
            go(s, i, j - 1, c + 1);
            s.cur.pop();
        }
    }
    let mut s = S { a, b, best: a.len() + b.len() + 1, best_ops: Vec::new(), cur: Vec::new() };
    go(&mut s, a.len(), b.len(), 0);
    (s.best, s.best_ops)
}

/// Labels for the corrupted side of an op sequence: substituted or inserted
/// tokens, and a matched token directly after a deletion, are incorrect; a
/// trailing deletion marks the last corrupted token.
pub fn oracle_labels(ops: &[Op]) -> Vec<bool> {
    let mut labels = Vec::new();
    let mut prev_del = false;
    for op in ops {
        match op {
            Op::Del => {
                prev_del = true;
                continue;
            }
            Op::Match => labels.push(prev_del),
            Op::Sub | Op::Ins => labels.push(true),
        }
        prev_del = false;
    }
    if prev_del {
        if let Some(last) = labels.last_mut() {
            *last = true;
        }
    }
    labels
}

/// All sequences over `alphabet` of length `0..=max_len`.
pub fn all_sequences(alphabet: &[&'static str], max_len: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for a in alphabet {
                let mut t: Vec<&'static str> = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Textbook unrestricted Damerau-Levenshtein (Lowrance-Wagner).
pub fn reference_dl(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (m, n) = (a.len(), b.len());
    let max = m + n;
    let mut da: HashMap<char, usize> = HashMap::new();
    let mut h = vec![vec![0usize; n + 2]; m + 2];
    h[0][0] = max;
    for i in 0..=m {
        h[i + 1][0] = max;
        h[i + 1][1] = i;
    }
    for j in 0..=n {
        h[0][j + 1] = max;
        h[1][j + 1] = j;
    }
    for i in 1..=m {
        let mut db = 0;
        for j in 1..=n {
            let i1 = *da.get(&b[j - 1]).unwrap_or(&0);
            let j1 = db;
            let mut c = 1;
            if a[i - 1] == b[j - 1] {
                c = 0;
                db = j;
            }
            h[i + 1][j + 1] = (h[i][j] + c)
                .min(h[i + 1][j] + 1)
                .min(h[i][j + 1] + 1)
                .min(h[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1));
        }
        da.insert(a[i - 1], i);
    }
    h[m + 1][n + 1]
}

/// Shortest edit path by breadth-first search over strings with unit
/// insert, delete, substitute and adjacent-transpose steps. Exponential;
/// only for short strings over tiny alphabets.
pub fn bfs_distance(a: &str, b: &str, alphabet: &[char], limit: usize) -> Option<usize> {
    let mut seen: HashSet<String> = HashSet::new();
    let mut queue = VecDeque::from([(a.to_owned(), 0usize)]);
    seen.insert(a.to_owned());
    while let Some((s, d)) = queue.pop_front() {
        if s == b {
            return Some(d);
        }
        if d == limit {
            continue;
        }
        let chars: Vec<char> = s.chars().collect();
        let mut next = Vec::new();
        for p in 0..=chars.len() {
            for &c in alphabet {
                let mut t = chars.clone();
                t.insert(p, c);
                next.push(t);
            }
        }
        for p in 0..chars.len() {
            let mut t = chars.clone();
            t.remove(p);
            next.push(t);
            for &c in alphabet {
                let mut t = chars.clone();
                t[p] = c;
                next.push(t);
            }
            if p + 1 < chars.len() {
                let mut t = chars.clone();
                t.swap(p, p + 1);
                next.push(t);
            }
        }
        for t in next {
            let t: String = t.into_iter().collect();
            if seen.insert(t.clone()) {
                queue.push_back((t, d + 1));
            }
        }
    }
    None
}

/// Linear scan: dictionary words within `max` of `query`, excluding it,
/// ranked by (distance, frequency desc, word).
pub fn scan(dict: &[(String, u64)], query: &str, max: usize) -> Vec<(String, usize)> {
    let mut hits: Vec<(usize, std::cmp::Reverse<u64>, String)> = dict
        .iter()
        .filter(|(w, _)| w != query)
        .filter_map(|(w, c)| {
            let d = reference_dl(query, w);
            (d <= max).then(|| (d, std::cmp::Reverse(*c), w.clone()))
        })
        .collect();
    hits.sort();
    hits.into_iter().map(|(d, _, w)| (w, d)).collect()
}

/// Deterministic pseudo-word dictionary built from syllables, so that
/// words have realistic edit-distance neighborhoods.
pub fn synthetic_dictionary(size: usize, seed: u64) -> Vec<(String, u64)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let onsets = ["", "b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "st", "tr", "pl", "gr"];
    let vowels = ["a", "e", "i", "o", "u", "ou", "ea", "ie"];
    let codas = ["", "", "n", "r", "s", "t", "l", "ck", "m"];
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let syllables = rng.gen_range(1..=4);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(onsets[rng.gen_range(0..onsets.len())]);
            w.push_str(vowels[rng.gen_range(0..vowels.len())]);
            w.push_str(codas[rng.gen_range(0..codas.len())]);
        }
        if w.chars().count() >= 2 && seen.insert(w.clone()) {
            let count = rng.gen_range(1..1000);
            out.push((w, count));
        }
    }
    out
}
