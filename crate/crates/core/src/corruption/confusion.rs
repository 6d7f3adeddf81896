//! Confusion sets from a word list: every dictionary word within a small
//! Damerau-Levenshtein distance of the query.
//!
//! Lookup uses a symmetric-delete index. Each dictionary word contributes
//! every string obtainable by deleting up to `max_distance` characters; a
//! query generates its own delete variants and collects the words that share
//! one. Two strings at distance `k` always share a variant with at most `k`
//! deletions on each side (a transposition costs one deletion per side), so
//! the candidate set is complete and exact distances only filter it.

use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::CorruptionError;

/// Word list with frequencies; duplicate entries have their counts summed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    entries: Vec<(String, u64)>,
}

impl Dictionary {
    pub fn from_words<S: AsRef<str>>(words: impl IntoIterator<Item = S>) -> Self {
        let mut dict = Dictionary::default();
        let mut seen = HashMap::new();
        for w in words {
            dict.add(&mut seen, w.as_ref(), 1);
        }
        dict
    }

    pub fn from_counts<S: AsRef<str>>(entries: impl IntoIterator<Item = (S, u64)>) -> Self {
        let mut dict = Dictionary::default();
        let mut seen = HashMap::new();
        for (w, c) in entries {
            dict.add(&mut seen, w.as_ref(), c);
        }
        dict
    }

    fn add(&mut self, seen: &mut HashMap<String, usize>, word: &str, count: u64) {
        match seen.get(word) {
            Some(&i) => self.entries[i].1 += count,
            None => {
                seen.insert(word.to_owned(), self.entries.len());
                self.entries.push((word.to_owned(), count));
            }
        }
    }

    /// Parses `word` or `word<TAB>count` lines; blank lines are skipped.
    pub fn parse(content: &str) -> Result<Self, CorruptionError> {
        let mut entries = Vec::new();
        for (i, line) in content.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let word = fields.next().unwrap_or_default().trim();
            let count = match fields.next() {
                None => 1,
                Some(c) => c.trim().parse::<u64>().map_err(|_| CorruptionError::Dictionary {
                    line: i + 1,
                    message: format!("bad frequency {c:?}"),
                })?,
            };
            if fields.next().is_some() || word.is_empty() || word.contains(char::is_whitespace) {
                return Err(CorruptionError::Dictionary {
                    line: i + 1,
                    message: "expected `word` or `word<TAB>count`".into(),
                });
            }
            entries.push((word.to_owned(), count));
        }
        Ok(Self::from_counts(entries))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorruptionError> {
        let path = path.as_ref();
        let content = std::fs::read_to_string(path).map_err(|source| CorruptionError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&content)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }
}

/// Unrestricted Damerau-Levenshtein distance over Unicode scalar values.
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    damerau_levenshtein_chars(&a, &b)
}

pub(crate) fn damerau_levenshtein_chars(a: &[char], b: &[char]) -> usize {
    DlScratch::default().distance(a, b)
}

/// Reusable buffers for repeated distance computations.
#[derive(Default)]
struct DlScratch {
    table: Vec<usize>,
    // Last row in which each character of `a` occurred. Words are short, so a
    // linear list beats hashing.
    last_row: Vec<(char, usize)>,
}

impl DlScratch {
    fn distance(&mut self, a: &[char], b: &[char]) -> usize {
        let (m, n) = (a.len(), b.len());
        if m == 0 {
            return n;
        }
        if n == 0 {
            return m;
        }
        // Lowrance-Wagner with a sentinel row/column holding m + n.
        let inf = m + n;
        let width = n + 2;
        let d = &mut self.table;
        d.clear();
        d.resize((m + 2) * width, 0);
        d[0] = inf;
        for i in 0..=m {
            d[(i + 1) * width] = inf;
            d[(i + 1) * width + 1] = i;
        }
        for j in 0..=n {
            d[j + 1] = inf;
            d[width + j + 1] = j;
        }
        let last_row = &mut self.last_row;
        last_row.clear();
        for i in 1..=m {
            let mut last_match_col = 0;
            for j in 1..=n {
                let k = last_row.iter().find(|(c, _)| *c == b[j - 1]).map_or(0, |&(_, r)| r);
                let l = last_match_col;
                let cost = if a[i - 1] == b[j - 1] {
                    last_match_col = j;
                    0
                } else {
                    1
                };
                let sub = d[i * width + j] + cost;
                let ins = d[(i + 1) * width + j] + 1;
                let del = d[i * width + j + 1] + 1;
                let trans = d[k * width + l] + (i - k - 1) + 1 + (j - l - 1);
                d[(i + 1) * width + j + 1] = sub.min(ins).min(del).min(trans);
            }
            match last_row.iter_mut().find(|(c, _)| *c == a[i - 1]) {
                Some(entry) => entry.1 = i,
                None => last_row.push((a[i - 1], i)),
            }
        }
        d[(m + 1) * width + n + 1]
    }
}

/// Start offsets of each top-bits bucket of a sorted hash list, sized so that
/// buckets hold about one entry. Saves a binary search over the whole list.
fn bucket_directory(sorted: &[(u64, u32)]) -> (Vec<u32>, u32) {
    let bits = sorted.len().next_power_of_two().trailing_zeros().clamp(1, 30);
    let shift = 64 - bits;
    let mut buckets = Vec::with_capacity((1 << bits) + 1);
    let mut i = 0;
    for b in 0..=(1u64 << bits) {
        while i < sorted.len() && (sorted[i].0 >> shift) < b {
            i += 1;
        }
        buckets.push(i as u32);
    }
    (buckets, shift)
}

/// One bit per character class (code point mod 64). An edit removes at most one class from
/// either side, so the larger count of classes present on only one side bounds the distance.
fn char_mask(chars: impl Iterator<Item = char>) -> u64 {
    chars.fold(0, |m, c| m | 1 << (c as u32 % 64))
}

fn hash_chars(chars: &[char]) -> u64 {
    let mut h = DefaultHasher::new();
    chars.hash(&mut h);
    h.finish()
}

/// Hashes of every string reachable by deleting at most `max` characters, the word included.
/// Sorted and deduplicated.
fn delete_hashes(word: &[char], max: usize) -> Vec<u64> {
    fn walk(word: &[char], from: usize, left: usize, buf: &mut Vec<char>, out: &mut Vec<u64>) {
        out.push(hash_chars(buf));
        if left == 0 {
            return;
        }
        for skip in from..word.len() {
            // Earlier deletions all sit before `from`.
            let at = skip - (word.len() - buf.len());
            let c = buf.remove(at);
            walk(word, skip + 1, left - 1, buf, out);
            buf.insert(at, c);
        }
    }
    let mut buf = word.to_vec();
    let mut out = Vec::new();
    walk(word, 0, max, &mut buf, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbor<'a> {
    pub word: &'a str,
    pub distance: usize,
    pub count: u64,
}

#[derive(Debug, Clone)]
pub struct ConfusionIndex {
    words: Vec<String>,
    counts: Vec<u64>,
    char_lens: Vec<usize>,
    masks: Vec<u64>,
    /// (variant hash, word id), sorted.
    deletes: Vec<(u64, u32)>,
    /// `buckets[b]..buckets[b + 1]` is the run of `deletes` whose hash has top bits `b`.
    buckets: Vec<u32>,
    bucket_shift: u32,
    max_distance: usize,
    alphabet: Vec<(char, u64)>,
    word_sampler: WeightedIndex<u64>,
    char_sampler: WeightedIndex<u64>,
}

pub fn build_confusion_index(dictionary: &Dictionary, max_distance: usize) -> Result<ConfusionIndex, CorruptionError> {
    ConfusionIndex::build(dictionary, max_distance)
}

impl ConfusionIndex {
    pub fn build(dictionary: &Dictionary, max_distance: usize) -> Result<Self, CorruptionError> {
        if dictionary.is_empty() {
            return Err(CorruptionError::EmptyDictionary);
        }
        if !(1..=2).contains(&max_distance) {
            return Err(CorruptionError::MaxDistance(max_distance));
        }
        let words: Vec<String> = dictionary.entries.iter().map(|(w, _)| w.clone()).collect();
        let counts: Vec<u64> = dictionary.entries.iter().map(|(_, c)| *c).collect();
        let char_lens = words.iter().map(|w| w.chars().count()).collect();
        let masks = words.iter().map(|w| char_mask(w.chars())).collect();

        let mut deletes = Vec::new();
        let mut char_counts: HashMap<char, u64> = HashMap::new();
        let mut chars: Vec<char> = Vec::new();
        for (id, word) in words.iter().enumerate() {
            chars.clear();
            chars.extend(word.chars());
            deletes.extend(delete_hashes(&chars, max_distance).into_iter().map(|h| (h, id as u32)));
            for c in word.chars() {
                *char_counts.entry(c).or_default() += 1;
            }
        }
        deletes.sort_unstable();
        deletes.dedup();
        let (buckets, bucket_shift) = bucket_directory(&deletes);

        let mut alphabet: Vec<(char, u64)> = char_counts.into_iter().collect();
        alphabet.sort_unstable();
        // Zero-count dictionaries still need a valid sampler.
        let word_weights: Vec<u64> = if counts.iter().all(|&c| c == 0) {
            vec![1; counts.len()]
        } else {
            counts.clone()
        };
        let word_sampler = WeightedIndex::new(&word_weights).expect("positive total weight");
        let char_sampler =
            WeightedIndex::new(alphabet.iter().map(|(_, c)| *c)).expect("dictionary words are non-empty");

        Ok(ConfusionIndex {
            words,
            counts,
            char_lens,
            masks,
            deletes,
            buckets,
            bucket_shift,
            max_distance,
            alphabet,
            word_sampler,
            char_sampler,
        })
    }

    pub fn max_distance(&self) -> usize {
        self.max_distance
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Number of stored (variant, word) entries.
    pub fn variant_count(&self) -> usize {
        self.deletes.len()
    }

    pub fn alphabet(&self) -> &[(char, u64)] {
        &self.alphabet
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.iter().any(|w| w == word)
    }

    /// Dictionary words within `max_distance` of `word`, excluding `word`,
    /// ranked by distance, then frequency (descending), then lexicographically.
    pub fn lookup(&self, word: &str) -> Vec<Neighbor<'_>> {
        let query: Vec<char> = word.chars().collect();
        let query_mask = char_mask(query.iter().copied());
        let mut candidates: Vec<u32> = Vec::new();
        for key in delete_hashes(&query, self.max_distance) {
            let b = (key >> self.bucket_shift) as usize;
            let run = &self.deletes[self.buckets[b] as usize..self.buckets[b + 1] as usize];
            let start = run.partition_point(|&(h, _)| h < key);
            candidates.extend(run[start..].iter().take_while(|&&(h, _)| h == key).map(|&(_, id)| id));
        }
        candidates.sort_unstable();
        candidates.dedup();

        let mut scratch = DlScratch::default();
        let mut cand_chars: Vec<char> = Vec::new();
        let mut found: Vec<Neighbor<'_>> = candidates
            .into_iter()
            .filter_map(|id| {
                let id = id as usize;
                let cand = &self.words[id];
                if cand == word || self.char_lens[id].abs_diff(query.len()) > self.max_distance {
                    return None;
                }
                let mask = self.masks[id];
                let only_one_side = (query_mask & !mask).count_ones().max((mask & !query_mask).count_ones());
                if only_one_side as usize > self.max_distance {
                    return None;
                }
                cand_chars.clear();
                cand_chars.extend(cand.chars());
                let distance = scratch.distance(&query, &cand_chars);
                (distance <= self.max_distance).then(|| Neighbor {
                    word: cand.as_str(),
                    distance,
                    count: self.counts[id],
                })
            })
            .collect();
        found.sort_by(|a, b| (a.distance, Reverse(a.count), a.word).cmp(&(b.distance, Reverse(b.count), b.word)));
        found
    }

    pub(crate) fn sample_word<R: Rng + ?Sized>(&self, rng: &mut R) -> &str {
        &self.words[self.word_sampler.sample(rng)]
    }

    pub(crate) fn sample_char<R: Rng + ?Sized>(&self, rng: &mut R) -> char {
        self.alphabet[self.char_sampler.sample(rng)].0
    }
}
