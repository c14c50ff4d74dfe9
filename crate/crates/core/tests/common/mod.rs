//! Synthetic data shared by the integration tests and the bench.
#![allow(dead_code)]

use std::collections::BTreeSet;

use kinfuse::corpus::{Document, LabeledCorpus};
use kinfuse::kg::{Entry, EntryType, KnowledgeGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ONSETS: [&str; 12] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t"];
const NUCLEI: [&str; 5] = ["a", "e", "i", "o", "u"];

const FILLER: [&str; 24] = [
    "the", "a", "today", "people", "said", "just", "really", "this", "that", "news", "city",
    "about", "know", "think", "again", "never", "always", "see", "read", "post", "thread", "time",
    "world", "still",
];

const HOSTILE_GLOSS: [&str; 6] = [
    "a derogatory ethnic insult used to demean jews",
    "an antisemitic epithet used to dehumanize jewish people",
    "a hateful slur aimed at jews as a group",
    "a derogatory antisemitic insult",
    "an ethnic slur used to demean jews",
    "a dehumanizing antisemitic epithet",
];

const NEUTRAL_GLOSS: [&str; 4] = [
    "a painter who exhibited landscapes",
    "a chemist known for work on catalysts",
    "a football coach from the north",
    "a novelist who wrote about rivers",
];

/// A pronounceable nonsense word of `syllables` syllables.
pub fn pseudo_word(rng: &mut impl Rng, syllables: usize) -> String {
    (0..syllables)
        .map(|_| {
            format!(
                "{}{}",
                ONSETS.choose(rng).unwrap(),
                NUCLEI.choose(rng).unwrap()
            )
        })
        .collect()
}

fn unique_words(
    rng: &mut impl Rng,
    n: usize,
    syllables: usize,
    taken: &mut BTreeSet<String>,
) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = pseudo_word(rng, syllables);
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn sentence(rng: &mut impl Rng, len: usize) -> Vec<String> {
    (0..len)
        .map(|_| FILLER.choose(rng).unwrap().to_string())
        .collect()
}

/// A graph plus a corpus in which positives mention rare slur keys. Each slur
/// key appears in very few documents, so the surface form carries little
/// signal; the shared wording of the slur descriptions carries most of it.
/// Negatives mention unrelated person keys at a similar rate.
pub fn synthetic_task(n: usize, positive_rate: f64, seed: u64) -> (KnowledgeGraph, LabeledCorpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken = BTreeSet::new();
    let n_pos = ((n as f64) * positive_rate).round() as usize;
    let slurs = unique_words(&mut rng, n_pos.max(1), 4, &mut taken);
    let people = unique_words(&mut rng, (n / 4).max(1), 4, &mut taken);

    let mut kg = KnowledgeGraph::new();
    for s in &slurs {
        kg.insert(
            s,
            Entry::new(EntryType::Slur).with_description(*HOSTILE_GLOSS.choose(&mut rng).unwrap()),
        );
    }
    for p in &people {
        kg.insert(
            p,
            Entry::new(EntryType::Person)
                .with_description(*NEUTRAL_GLOSS.choose(&mut rng).unwrap()),
        );
    }

    let mut docs = Vec::with_capacity(n);
    for i in 0..n {
        let label = i < n_pos;
        let len = rng.gen_range(6..14);
        let mut words = sentence(&mut rng, len);
        let key = if label {
            slurs[i % slurs.len()].clone()
        } else if rng.gen_bool(0.5) {
            people.choose(&mut rng).unwrap().clone()
        } else {
            pseudo_word(&mut rng, 3)
        };
        let at = rng.gen_range(0..=words.len());
        words.insert(at, key);
        docs.push(Document::new(words.join(" "), label));
    }
    docs.shuffle(&mut rng);
    (kg, LabeledCorpus::new(docs))
}
