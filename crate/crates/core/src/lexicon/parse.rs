//! Line parsers for the WordNet 3.x `index.*` and `data.*` files.

use super::{LemmaLink, Pointer, Relation, Synset, SynsetId};
use crate::error::{Error, Result};
use crate::Pos;

/// Parsed `index.<pos>` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IndexEntry {
    pub lemma: String,
    pub pos: Pos,
    pub offsets: Vec<u32>,
}

/// License header lines start with two spaces; blank lines carry nothing.
pub(crate) fn is_skippable(line: &str) -> bool {
    line.starts_with("  ") || line.trim().is_empty()
}

fn malformed(file: &str, line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedLine {
        file: file.to_string(),
        line,
        reason: reason.into(),
    }
}

fn parse_offset(s: &str, file: &str, line: usize) -> Result<u32> {
    if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(file, line, format!("bad synset offset `{s}`")));
    }
    s.parse()
        .map_err(|_| malformed(file, line, format!("bad synset offset `{s}`")))
}

fn parse_count(s: Option<&str>, radix: u32, what: &str, file: &str, line: usize) -> Result<usize> {
    let s = s.ok_or_else(|| malformed(file, line, format!("missing {what}")))?;
    usize::from_str_radix(s, radix).map_err(|_| malformed(file, line, format!("bad {what} `{s}`")))
}

/// Strips the adjective syntactic marker, e.g. `able(a)` or `galore(ip)`.
fn strip_marker(word: &str) -> &str {
    match word.find('(') {
        Some(i) if word.ends_with(')') => &word[..i],
        _ => word,
    }
}

pub(crate) fn parse_index_line(raw: &str, file: &str, line: usize) -> Result<IndexEntry> {
    let mut fields = raw.split_ascii_whitespace();
    let lemma = fields
        .next()
        .ok_or_else(|| malformed(file, line, "empty line"))?
        .to_lowercase();
    let pos_char = fields.next().ok_or_else(|| malformed(file, line, "missing pos"))?;
    let pos = Pos::from_wordnet_char(pos_char).ok_or_else(|| malformed(file, line, format!("bad pos `{pos_char}`")))?;
    let synset_cnt = parse_count(fields.next(), 10, "synset_cnt", file, line)?;
    let p_cnt = parse_count(fields.next(), 10, "p_cnt", file, line)?;
    for _ in 0..p_cnt {
        fields
            .next()
            .ok_or_else(|| malformed(file, line, "truncated pointer symbol list"))?;
    }
    // sense_cnt and tagsense_cnt
    parse_count(fields.next(), 10, "sense_cnt", file, line)?;
    parse_count(fields.next(), 10, "tagsense_cnt", file, line)?;
    let offsets = fields
        .map(|f| parse_offset(f, file, line))
        .collect::<Result<Vec<_>>>()?;
    if offsets.len() != synset_cnt {
        return Err(malformed(
            file,
            line,
            format!("expected {synset_cnt} synset offsets, found {}", offsets.len()),
        ));
    }
    Ok(IndexEntry { lemma, pos, offsets })
}

pub(crate) fn parse_data_line(raw: &str, file: &str, line: usize) -> Result<Synset> {
    let head = raw.split(" | ").next().unwrap_or(raw);
    let mut fields = head.split_ascii_whitespace();
    let offset = parse_offset(
        fields.next().ok_or_else(|| malformed(file, line, "empty line"))?,
        file,
        line,
    )?;
    fields
        .next()
        .ok_or_else(|| malformed(file, line, "missing lex_filenum"))?;
    let ss_type = fields.next().ok_or_else(|| malformed(file, line, "missing ss_type"))?;
    let pos =
        Pos::from_wordnet_char(ss_type).ok_or_else(|| malformed(file, line, format!("bad ss_type `{ss_type}`")))?;

    let w_cnt = parse_count(fields.next(), 16, "w_cnt", file, line)?;
    let mut lemmas = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = fields
            .next()
            .ok_or_else(|| malformed(file, line, "truncated word list"))?;
        fields.next().ok_or_else(|| malformed(file, line, "missing lex_id"))?;
        lemmas.push(strip_marker(word).to_lowercase());
    }
    if lemmas.is_empty() {
        return Err(malformed(file, line, "synset has no words"));
    }

    let p_cnt = parse_count(fields.next(), 10, "p_cnt", file, line)?;
    let mut pointers = Vec::new();
    for _ in 0..p_cnt {
        let (Some(symbol), Some(target), Some(target_pos), Some(link)) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(malformed(file, line, "truncated pointer list"));
        };
        let target_offset = parse_offset(target, file, line)?;
        let target_pos = Pos::from_wordnet_char(target_pos)
            .ok_or_else(|| malformed(file, line, format!("bad pointer pos `{target_pos}`")))?;
        if link.len() != 4 {
            return Err(malformed(file, line, format!("bad source/target field `{link}`")));
        }
        let source = u8::from_str_radix(&link[..2], 16);
        let dest = u8::from_str_radix(&link[2..], 16);
        let (Ok(source), Ok(dest)) = (source, dest) else {
            return Err(malformed(file, line, format!("bad source/target field `{link}`")));
        };
        let Some(relation) = Relation::from_symbol(symbol) else {
            continue;
        };
        let lemma_link = (source != 0 || dest != 0).then_some(LemmaLink { source, target: dest });
        pointers.push(Pointer {
            relation,
            target: SynsetId::new(target_pos, target_offset),
            lemma_link,
        });
    }

    Ok(Synset {
        id: SynsetId::new(pos, offset),
        lemmas,
        pointers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABLE: &str = "00001740 00 a 01 able 0 005 = 05200169 n 0000 = 05616246 n 0000 + 05616246 n 0101 + 05200169 n 0101 ! 00002098 a 0101 | (usually followed by `to') having the necessary means";

    #[test]
    fn data_line_keeps_only_enumerated_relations() {
        let s = parse_data_line(ABLE, "data.adj", 30).unwrap();
        assert_eq!(s.id, SynsetId::new(Pos::Adj, 1740));
        assert_eq!(s.lemmas, vec!["able"]);
        assert_eq!(s.pointers.len(), 1);
        assert_eq!(s.pointers[0].relation, Relation::Antonym);
        assert_eq!(s.pointers[0].target, SynsetId::new(Pos::Adj, 2098));
        assert_eq!(s.pointers[0].lemma_link, Some(LemmaLink { source: 1, target: 1 }));
    }

    #[test]
    fn satellite_markers_and_hex_counts() {
        let line = "00003356 00 s 0b galore(ip) 0 a 0 b 0 c 0 d 0 e 0 f 0 g 0 h 0 i 0 j 0 000 | gloss";
        let s = parse_data_line(line, "data.adj", 1).unwrap();
        assert_eq!(s.lemmas.len(), 11);
        assert_eq!(s.lemmas[0], "galore");
        assert_eq!(s.id.pos, Pos::Adj);
    }

    #[test]
    fn pointer_count_mismatch_is_malformed() {
        let line = "00002098 00 a 01 unable 0 002 = 05200169 n 0000 | gloss";
        let err = parse_data_line(line, "data.adj", 31).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 31, .. }));
    }

    #[test]
    fn bad_offset_is_malformed() {
        let err = parse_data_line("0000x740 00 a 01 able 0 000 | g", "data.adj", 2).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 2, .. }));
    }

    #[test]
    fn index_line_fields() {
        let line = "slow a 6 6 ! & ^ = + ; 6 3 00980527 00982602 00440579 00983722 01345307 00036998  ";
        let e = parse_index_line(line, "index.adj", 9).unwrap();
        assert_eq!(e.lemma, "slow");
        assert_eq!(e.pos, Pos::Adj);
        assert_eq!(e.offsets.len(), 6);
        assert_eq!(e.offsets[0], 980527);
    }

    #[test]
    fn index_line_offset_count_checked() {
        let line = "slow a 3 0 3 0 00980527 00982602";
        assert!(parse_index_line(line, "index.adj", 4).is_err());
    }

    #[test]
    fn header_lines_are_skipped() {
        assert!(is_skippable("  1 This software and database is being provided"));
        assert!(is_skippable(""));
        assert!(!is_skippable("00001740 00 a 01 able 0 000 | x"));
    }
}
