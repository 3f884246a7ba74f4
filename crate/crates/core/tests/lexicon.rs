//! Lexicon queries against the bundled WordNet excerpt, checked by a
//! separate brute-force reader of the raw data files.

mod common;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use posrank::lexicon::{is_single_word, parse_lexicon, Lexicon, LexiconWarning};
use posrank::{Error, Pos};

const CLASSES: [(Pos, &str); 4] = [
    (Pos::Noun, "noun"),
    (Pos::Verb, "verb"),
    (Pos::Adj, "adj"),
    (Pos::Adv, "adv"),
];

struct RawPointer {
    symbol: String,
    target: (char, u32),
    source: usize,
    target_word: usize,
}

/// Straight line-by-line reading of the database, sharing no code with the
/// library parser.
struct Raw {
    synsets: HashMap<(char, u32), (Vec<String>, Vec<RawPointer>)>,
    index: HashMap<(String, char), Vec<u32>>,
}

fn class_char(c: &str) -> char {
    match c {
        "s" => 'a',
        other => other.chars().next().unwrap(),
    }
}

impl Raw {
    fn read(dir: &Path) -> Raw {
        let mut synsets: HashMap<(char, u32), (Vec<String>, Vec<RawPointer>)> = HashMap::new();
        let mut index = HashMap::new();
        for (_, name) in CLASSES {
            let data = std::fs::read_to_string(dir.join(format!("data.{name}"))).unwrap();
            for line in data.lines().filter(|l| !l.starts_with("  ")) {
                let f: Vec<&str> = line.split(" | ").next().unwrap().split_whitespace().collect();
                let offset: u32 = f[0].parse().unwrap();
                let words = usize::from_str_radix(f[3], 16).unwrap();
                let lemmas: Vec<String> = (0..words)
                    .map(|k| {
                        let w = f[4 + 2 * k].to_lowercase();
                        w.split('(').next().unwrap().to_string()
                    })
                    .collect();
                let mut at = 4 + 2 * words;
                let count: usize = f[at].parse().unwrap();
                at += 1;
                let pointers: Vec<RawPointer> = (0..count)
                    .map(|k| {
                        let p = &f[at + 4 * k..at + 4 * k + 4];
                        RawPointer {
                            symbol: p[0].to_string(),
                            target: (class_char(p[2]), p[1].parse().unwrap()),
                            source: usize::from_str_radix(&p[3][..2], 16).unwrap(),
                            target_word: usize::from_str_radix(&p[3][2..], 16).unwrap(),
                        }
                    })
                    .collect();
                synsets.insert((class_char(f[2]), offset), (lemmas, pointers));
            }
            let text = std::fs::read_to_string(dir.join(format!("index.{name}"))).unwrap();
            for line in text.lines().filter(|l| !l.starts_with("  ")) {
                let f: Vec<&str> = line.split_whitespace().collect();
                let senses: usize = f[2].parse().unwrap();
                let offsets = f[f.len() - senses..].iter().map(|o| o.parse().unwrap()).collect();
                index.insert((f[0].to_string(), class_char(f[1])), offsets);
            }
        }
        // mirror every antonym pointer that lacks its reverse
        let mut keys: Vec<(char, u32)> = synsets.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let forward: Vec<((char, u32), usize, usize)> = synsets[&key]
                .1
                .iter()
                .filter(|p| p.symbol == "!")
                .map(|p| (p.target, p.source, p.target_word))
                .collect();
            for (target, source, target_word) in forward {
                let Some((_, back)) = synsets.get_mut(&target) else {
                    continue;
                };
                let exists = back
                    .iter()
                    .any(|p| p.symbol == "!" && p.target == key && p.source == target_word && p.target_word == source);
                if !exists {
                    back.push(RawPointer {
                        symbol: "!".into(),
                        target: key,
                        source: target_word,
                        target_word: source,
                    });
                }
            }
        }
        Raw { synsets, index }
    }

    fn senses(&self, lemma: &str, pos: char) -> Vec<(char, u32)> {
        let mut offsets = self.index.get(&(lemma.to_string(), pos)).cloned().unwrap_or_default();
        offsets.sort_unstable();
        offsets.dedup();
        offsets
            .into_iter()
            .map(|o| (pos, o))
            .filter(|k| self.synsets.contains_key(k))
            .collect()
    }

    /// Antonym words reached from `synset`, only from `source` when given.
    fn antonyms_from(&self, synset: (char, u32), source: Option<&str>) -> Vec<String> {
        let (words, pointers) = &self.synsets[&synset];
        let mut out = Vec::new();
        for p in pointers.iter().filter(|p| p.symbol == "!") {
            let Some((targets, _)) = self.synsets.get(&p.target) else {
                continue;
            };
            if p.source == 0 {
                out.extend(targets.iter().cloned());
            } else if source.is_none_or(|s| words[p.source - 1] == s) {
                out.push(targets[p.target_word - 1].clone());
            }
        }
        out
    }

    fn antonyms(&self, lemma: &str, pos: char) -> Vec<String> {
        let mut seen = HashSet::new();
        self.senses(lemma, pos)
            .into_iter()
            .flat_map(|s| self.antonyms_from(s, Some(lemma)))
            .filter(|w| w != lemma && !w.contains('_') && seen.insert(w.clone()))
            .collect()
    }

    fn related(&self, lemma: &str, pos: char) -> Vec<String> {
        let hops: &[&str] = if matches!(pos, 'a' | 'r') {
            &["&"]
        } else {
            &["@", "@i", "~", "~i"]
        };
        let mut seen: HashSet<String> = self.antonyms(lemma, pos).into_iter().collect();
        seen.insert(lemma.to_string());
        let mut visited = HashSet::new();
        let mut out = Vec::new();
        for sense in self.senses(lemma, pos) {
            for p in &self.synsets[&sense].1 {
                if !hops.contains(&p.symbol.as_str())
                    || !visited.insert(p.target)
                    || !self.synsets.contains_key(&p.target)
                {
                    continue;
                }
                for w in self.antonyms_from(p.target, None) {
                    if !w.contains('_') && seen.insert(w.clone()) {
                        out.push(w);
                    }
                }
            }
        }
        out
    }
}

fn pos_char(pos: Pos) -> char {
    match pos {
        Pos::Noun => 'n',
        Pos::Verb => 'v',
        Pos::Adj => 'a',
        _ => 'r',
    }
}

fn check_against_oracle(lex: &Lexicon, raw: &Raw) -> usize {
    let mut checked = 0;
    for (pos, _) in CLASSES {
        for lemma in lex.lemmas(pos) {
            let c = pos_char(pos);
            assert_eq!(
                lex.antonyms(lemma, pos),
                raw.antonyms(lemma, c),
                "antonyms of {lemma}/{pos}"
            );
            assert_eq!(
                lex.related_antonyms(lemma, pos),
                raw.related(lemma, c),
                "related of {lemma}/{pos}"
            );
            checked += 1;
        }
    }
    checked
}

/// (a, b) pairs with b an antonym of a but not the reverse.
fn asymmetric_pairs(lex: &Lexicon) -> Vec<(Pos, String, String)> {
    let mut out = Vec::new();
    for (pos, _) in CLASSES {
        for a in lex.lemmas(pos).into_iter().filter(|a| is_single_word(a)) {
            for b in lex.antonyms(a, pos) {
                if !lex.antonyms(&b, pos).iter().any(|x| x == a) {
                    out.push((pos, a.to_string(), b));
                }
            }
        }
    }
    out
}

fn assert_disjoint(lex: &Lexicon) {
    for (pos, _) in CLASSES {
        for lemma in lex.lemmas(pos) {
            let direct: HashSet<String> = lex.antonyms(lemma, pos).into_iter().collect();
            let related = lex.related_antonyms(lemma, pos);
            assert!(
                related.iter().all(|w| !direct.contains(w) && w != lemma),
                "{lemma}/{pos}"
            );
        }
    }
}

#[test]
fn paper_pairs() {
    let lex = common::fixture_lexicon();
    assert!(lex.antonyms("slow", Pos::Adj).contains(&"fast".to_string()));
    assert!(lex.antonyms("fast", Pos::Adj).contains(&"slow".to_string()));
    assert_eq!(lex.antonyms("forward", Pos::Adv), ["backward"]);
    assert!(lex.antonyms("black", Pos::Adj).contains(&"white".to_string()));
    assert!(lex.antonyms("qwzx", Pos::Noun).is_empty());
    assert!(lex.related_antonyms("qwzx", Pos::Noun).is_empty());
}

#[test]
fn fixture_matches_brute_force_oracle() {
    let lex = common::fixture_lexicon();
    let raw = Raw::read(&common::fixture_dir());
    assert!(check_against_oracle(&lex, &raw) > 1000);
    // spot values from the oracle, kept as regression anchors
    assert!(!lex.related_antonyms("walk", Pos::Verb).is_empty());
    assert_eq!(lex.related_antonyms("red", Pos::Adj), raw.related("red", 'a'));
}

#[test]
fn fixture_antonyms_are_symmetric_and_disjoint() {
    let lex = common::fixture_lexicon();
    assert_eq!(asymmetric_pairs(&lex), []);
    assert_disjoint(&lex);
}

#[test]
fn retained_pointers_resolve() {
    let lex = common::fixture_lexicon();
    assert!(lex.synset_count() > 2000);
    // the excerpt cuts the graph, so pointers leaving it are dropped and
    // reported, never kept
    assert!(!lex.warnings().is_empty());
    for w in lex.warnings() {
        match w {
            LexiconWarning::DanglingPointer { to, .. } => assert!(lex.synset(*to).is_none()),
            other => panic!("unexpected {other:?}"),
        }
    }
    for (pos, _) in CLASSES {
        for lemma in lex.lemmas(pos) {
            for synset in lex.synsets_of(lemma, pos) {
                for p in &synset.pointers {
                    let target = lex.synset(p.target).expect("pointer resolves");
                    assert_eq!(target.id.pos, p.target.pos);
                }
            }
        }
    }
}

#[test]
fn parsing_is_idempotent() {
    assert_eq!(common::fixture_lexicon(), common::fixture_lexicon());
}

#[test]
fn header_only_and_empty_streams() {
    let data = std::fs::read_to_string(common::fixture_dir().join("data.adv")).unwrap();
    let header: String = data
        .lines()
        .take_while(|l| l.starts_with("  "))
        .map(|l| format!("{l}\n"))
        .collect();
    assert!(header.lines().count() > 10);
    let lex = parse_lexicon([(Pos::Adv, header.as_bytes())], [(Pos::Adv, header.as_bytes())]).unwrap();
    assert_eq!(lex.synset_count(), 0);
    let lex = parse_lexicon([(Pos::Adv, &b""[..])], [(Pos::Adv, &b""[..])]).unwrap();
    assert!(lex.antonyms("forward", Pos::Adv).is_empty());
}

#[test]
fn malformed_line_reports_position() {
    let data = "  1 header\n00000001 00 r 01 up 0 001 ! 0000000x r 0101 | gloss\n";
    let err = parse_lexicon([(Pos::Adv, &b""[..])], [(Pos::Adv, data.as_bytes())]).unwrap_err();
    match err {
        Error::MalformedLine { line, .. } => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn full_database_when_available() {
    let Some(dir) = common::full_wordnet_dir() else {
        eprintln!("skipped: set POSRANK_WORDNET_DIR to check the full database");
        return;
    };
    let lex = Lexicon::from_dir(&dir).unwrap();
    let raw = Raw::read(&dir);
    assert!(check_against_oracle(&lex, &raw) > 140_000);
    assert!(lex.antonyms("slow", Pos::Adj).contains(&"fast".to_string()));
    assert_eq!(lex.antonyms("forward", Pos::Adv), ["backward"]);
    let asym = asymmetric_pairs(&lex);
    let mut by_pos: BTreeMap<Pos, usize> = BTreeMap::new();
    for (pos, _, _) in &asym {
        *by_pos.entry(*pos).or_default() += 1;
    }
    assert_eq!(asym, [], "asymmetric antonym pairs per class: {by_pos:?}");
    assert!(lex.warnings().is_empty());
    assert_disjoint(&lex);
}
