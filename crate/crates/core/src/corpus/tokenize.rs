/// Punctuation split off the end of a word into its own token.
pub const TERMINAL_PUNCT: [char; 6] = ['.', ',', '!', '?', ';', ':'];

pub fn is_punct_token(token: &str) -> bool {
    let mut chars = token.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if TERMINAL_PUNCT.contains(&c))
}

/// Lowercases, splits on whitespace and peels trailing `.,!?;:` off each
/// word. Hyphens and apostrophes inside words are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let lower = chunk.to_lowercase();
        let word = lower.trim_end_matches(TERMINAL_PUNCT);
        if !word.is_empty() {
            out.push(word.to_string());
        }
        out.extend(lower[word.len()..].chars().map(String::from));
    }
    out
}

/// Inverse of [`tokenize`] up to whitespace and case: joins with single
/// spaces, attaching punctuation tokens to the preceding word.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for (i, tok) in tokens.iter().enumerate() {
        let tok = tok.as_ref();
        if i > 0 && !is_punct_token(tok) {
            out.push(' ');
        }
        out.push_str(tok);
    }
    out
}

/// Canonical text form used for equality of captions.
pub fn normalize(text: &str) -> String {
    detokenize(&tokenize(text))
}
