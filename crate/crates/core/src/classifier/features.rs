use std::collections::{BTreeSet, HashMap};

use crate::infusion::tokenize;

/// Term to column mapping. Columns follow the sorted term order so that the
/// same training texts always produce the same layout.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Every distinct token of the given texts.
    pub fn build<I, S>(texts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut terms = BTreeSet::new();
        for text in texts {
            terms.extend(tokenize(text.as_ref()));
        }
        Self::from_sorted(terms.into_iter().collect())
    }

    /// Builds from an explicit term list; `None` if a term repeats.
    pub fn from_terms(terms: Vec<String>) -> Option<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return None;
            }
        }
        Some(Vocabulary { terms, index })
    }

    fn from_sorted(terms: Vec<String>) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

/// Sparse token counts, sorted by column.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    entries: Vec<(usize, u32)>,
}

impl FeatureVector {
    /// From `(column, count)` pairs; zero counts are dropped and repeated
    /// columns summed.
    pub fn from_pairs(mut pairs: Vec<(usize, u32)>) -> Self {
        pairs.sort_unstable_by_key(|&(i, _)| i);
        let mut entries: Vec<(usize, u32)> = Vec::with_capacity(pairs.len());
        for (i, c) in pairs {
            if c == 0 {
                continue;
            }
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => entries.push((i, c)),
            }
        }
        FeatureVector { entries }
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, c)| weights[i] * f64::from(c))
            .sum()
    }
}

/// Counts of in-vocabulary tokens; everything else is dropped.
pub fn featurize(vocab: &Vocabulary, text: &str) -> FeatureVector {
    let pairs = tokenize(text)
        .iter()
        .filter_map(|t| vocab.get(t))
        .map(|i| (i, 1))
        .collect();
    FeatureVector::from_pairs(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_oov() {
        let vocab = Vocabulary::from_terms(vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(featurize(&vocab, "a a b").entries(), &[(0, 2), (1, 1)]);
        let vocab = Vocabulary::from_terms(vec!["a".into()]).unwrap();
        assert!(featurize(&vocab, "z z").is_empty());
    }

    #[test]
    fn build_enumerates_unique_tokens() {
        let vocab = Vocabulary::build(["a b", "b c"]);
        assert_eq!(vocab.len(), 3);
        assert_eq!(vocab.terms(), ["a", "b", "c"]);
        assert_eq!(vocab.get("c"), Some(2));
    }

    #[test]
    fn duplicate_terms_rejected() {
        assert!(Vocabulary::from_terms(vec!["a".into(), "a".into()]).is_none());
    }

    #[test]
    fn from_pairs_merges() {
        let v = FeatureVector::from_pairs(vec![(3, 1), (1, 0), (3, 2), (0, 1)]);
        assert_eq!(v.entries(), &[(0, 1), (3, 3)]);
    }
}
