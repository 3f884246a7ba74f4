//! Synthetic compositional video/caption pairs.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Corpus, TaggedCaption, Token};
use crate::error::{Error, Result};
use crate::rng::SeedKey;
use crate::Pos;

const NOUNS: [&str; 8] = ["man", "woman", "dog", "cat", "boy", "girl", "horse", "bird"];
const VERBS: [&str; 8] = ["runs", "walks", "jumps", "swims", "dances", "sings", "sits", "climbs"];
const ADJS: [&str; 8] = ["red", "blue", "green", "black", "white", "small", "big", "old"];
const ADVS: [&str; 8] = [
    "quickly",
    "slowly",
    "happily",
    "quietly",
    "loudly",
    "gracefully",
    "carefully",
    "eagerly",
];
const PREPS: [&str; 8] = [
    "inside", "outside", "near", "behind", "under", "above", "beside", "across",
];
const PLACES: [&str; 64] = [
    "park",
    "kitchen",
    "street",
    "beach",
    "forest",
    "garden",
    "stage",
    "field",
    "river",
    "office",
    "school",
    "market",
    "bridge",
    "tunnel",
    "stadium",
    "library",
    "church",
    "hospital",
    "airport",
    "station",
    "harbor",
    "desert",
    "mountain",
    "lake",
    "farm",
    "barn",
    "garage",
    "bakery",
    "cafe",
    "restaurant",
    "hotel",
    "museum",
    "theater",
    "gym",
    "pool",
    "court",
    "playground",
    "classroom",
    "bedroom",
    "bathroom",
    "hallway",
    "basement",
    "attic",
    "rooftop",
    "balcony",
    "alley",
    "highway",
    "plaza",
    "temple",
    "castle",
    "palace",
    "cave",
    "island",
    "valley",
    "canyon",
    "meadow",
    "jungle",
    "swamp",
    "glacier",
    "volcano",
    "factory",
    "warehouse",
    "studio",
    "arena",
];

/// Slot order in a video's attribute tuple.
pub const SLOTS: [Pos; 5] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv, Pos::Prep];

fn slot_words(pos: Pos) -> &'static [&'static str] {
    match pos {
        Pos::Noun => &NOUNS,
        Pos::Verb => &VERBS,
        Pos::Adj => &ADJS,
        Pos::Adv => &ADVS,
        Pos::Prep => &PREPS,
        Pos::Other => &[],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub videos: usize,
    /// Words per slot, at most 8.
    pub options: usize,
    pub test_fraction: f64,
    /// Size of the place list that context words are drawn from.
    pub places: usize,
    /// Place words per video, shown to both video and caption and never
    /// perturbed. Zero closes every caption with "the room".
    pub context: usize,
    pub seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            videos: 512,
            options: 8,
            test_fraction: 0.2,
            places: 64,
            context: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Video {
    pub id: String,
    /// Word ids of the latent attributes, in [`SLOTS`] order, then the place.
    pub attrs: Vec<usize>,
}

/// Videos with one templated caption each, split into train and test.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    words: Vec<String>,
    ids: HashMap<String, usize>,
    videos: Vec<Video>,
    captions: Vec<TaggedCaption>,
    caption_tokens: Vec<Vec<usize>>,
    train: Vec<usize>,
    test: Vec<usize>,
}

impl SyntheticDataset {
    pub fn generate(config: &DatasetConfig) -> Result<Self> {
        if !(1..=8).contains(&config.options) {
            return Err(Error::InvalidArgument("options must be in 1..=8".into()));
        }
        if config.places > PLACES.len() {
            return Err(Error::InvalidArgument(format!("at most {} places", PLACES.len())));
        }
        if !(0.0..1.0).contains(&config.test_fraction) {
            return Err(Error::InvalidArgument("test fraction must be in [0, 1)".into()));
        }
        if config.context > 0 && config.places < config.context {
            return Err(Error::InvalidArgument(
                "need at least as many places as context words".into(),
            ));
        }
        let mut columns = SLOTS.iter().map(|_| config.options).collect::<Vec<_>>();
        columns.extend(std::iter::repeat_n(config.places, config.context));
        if config.videos < 2 * columns.iter().max().unwrap() {
            return Err(Error::InvalidArgument(
                "too few videos for every attribute to occur twice".into(),
            ));
        }

        let mut words: Vec<String> = ["a", "the", "room"].iter().map(|w| w.to_string()).collect();
        let mut slot_ids: Vec<Vec<usize>> = Vec::new();
        for pos in SLOTS {
            let ids = slot_words(pos)[..config.options]
                .iter()
                .map(|w| {
                    words.push(w.to_string());
                    words.len() - 1
                })
                .collect();
            slot_ids.push(ids);
        }
        let place_ids: Vec<usize> = PLACES[..config.places]
            .iter()
            .map(|w| {
                words.push(w.to_string());
                words.len() - 1
            })
            .collect();
        for _ in 0..config.context {
            slot_ids.push(place_ids.clone());
        }
        words.push("and".into());
        let ids: HashMap<String, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();

        // balanced columns: every option appears equally often (±1)
        let mut rng = SeedKey::new(config.seed).str("toy-dataset").rng();
        let mut grid: Vec<Vec<usize>> = vec![Vec::with_capacity(columns.len()); config.videos];
        for (c, &n) in columns.iter().enumerate() {
            let mut col: Vec<usize> = (0..config.videos).map(|v| slot_ids[c][v % n]).collect();
            col.shuffle(&mut rng);
            for (row, value) in grid.iter_mut().zip(col) {
                row.push(value);
            }
        }
        // swap single cells between rows until all tuples are distinct and
        // no video repeats a place
        let repeats = |row: &[usize]| {
            let ctx = &row[SLOTS.len()..];
            ctx.iter().collect::<HashSet<_>>().len() != ctx.len()
        };
        for _ in 0..100 * config.videos {
            let mut seen = HashSet::new();
            let Some(dup) = (0..grid.len()).find(|&i| !seen.insert(grid[i].clone()) || repeats(&grid[i])) else {
                break;
            };
            let other = rng.random_range(0..grid.len());
            let c = rng.random_range(0..columns.len());
            let tmp = grid[dup][c];
            grid[dup][c] = grid[other][c];
            grid[other][c] = tmp;
        }
        if grid.iter().collect::<HashSet<_>>().len() != grid.len() || grid.iter().any(|r| repeats(r)) {
            return Err(Error::InvalidArgument("could not make video tuples distinct".into()));
        }

        let width = config.videos.to_string().len();
        let mut videos = Vec::with_capacity(config.videos);
        let mut captions = Vec::with_capacity(config.videos);
        let mut caption_tokens = Vec::with_capacity(config.videos);
        for (i, attrs) in grid.into_iter().enumerate() {
            let id = format!("toy{i:0width$}");
            let w = |slot: usize| words[attrs[slot]].as_str();
            let mut tokens = vec![
                Token::new("a", "a", Pos::Other),
                Token::new(w(2), w(2), Pos::Adj),
                Token::new(w(0), w(0), Pos::Noun),
                Token::new(w(1), w(1), Pos::Verb),
                Token::new(w(3), w(3), Pos::Adv),
                Token::new(w(4), w(4), Pos::Prep),
            ];
            if config.context == 0 {
                tokens.push(Token::new("the", "the", Pos::Other));
                tokens.push(Token::new("room", "room", Pos::Other));
            }
            for c in 0..config.context {
                if c > 0 {
                    tokens.push(Token::new("and", "and", Pos::Other));
                }
                let place = w(SLOTS.len() + c);
                tokens.push(Token::new("the", "the", Pos::Other));
                tokens.push(Token::new(place, place, Pos::Other));
            }
            caption_tokens.push(tokens.iter().map(|t| ids[&t.surface]).collect());
            let caption = TaggedCaption {
                video_id: id.clone(),
                caption_id: format!("{id}#0"),
                text: String::new(),
                tokens,
            };
            captions.push(TaggedCaption {
                text: caption.normalized_text(),
                ..caption
            });
            videos.push(Video { id, attrs });
        }
        let n_test = (config.videos as f64 * config.test_fraction).round() as usize;
        let split = config.videos - n_test;
        Ok(Self {
            words,
            ids,
            videos,
            captions,
            caption_tokens,
            train: (0..split).collect(),
            test: (split..config.videos).collect(),
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn videos(&self) -> &[Video] {
        &self.videos
    }

    pub fn captions(&self) -> &[TaggedCaption] {
        &self.captions
    }

    pub fn caption_tokens(&self, video: usize) -> &[usize] {
        &self.caption_tokens[video]
    }

    pub fn train(&self) -> &[usize] {
        &self.train
    }

    pub fn test(&self) -> &[usize] {
        &self.test
    }

    /// Word ids of `text`; words outside the vocabulary are dropped.
    pub fn encode(&self, text: &str) -> Vec<usize> {
        tokenize(text).iter().filter_map(|w| self.ids.get(w).copied()).collect()
    }

    pub fn corpus(&self, videos: &[usize]) -> Corpus {
        Corpus::from_captions(videos.iter().map(|&v| self.captions[v].clone()).collect())
            .expect("caption ids are unique")
    }
}
