use crate::error::{SmilesError, SmilesErrorKind};

/// A lexeme with its byte offset in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lexeme<'a> {
    pub text: &'a str,
    pub offset: usize,
}

/// Split SMILES text into tokens. Two-letter organic atoms (`Cl`, `Br`),
/// bracket atoms and `%nn` ring closures are single tokens; every other
/// character is its own token. Concatenating the tokens gives back the input.
pub fn tokenize_smiles(text: &str) -> Result<Vec<String>, SmilesError> {
    Ok(lex(text)?.into_iter().map(|l| l.text.to_string()).collect())
}

pub(crate) fn lex(text: &str) -> Result<Vec<Lexeme<'_>>, SmilesError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        match bytes[i] {
            b'[' => {
                let close = text[i..]
                    .find(']')
                    .ok_or(SmilesError::new(SmilesErrorKind::UnclosedBracket, i))?;
                i += close + 1;
            }
            b'C' if bytes.get(i + 1) == Some(&b'l') => i += 2,
            b'B' if bytes.get(i + 1) == Some(&b'r') => i += 2,
            b'%' if bytes.len() > i + 2
                && bytes[i + 1].is_ascii_digit()
                && bytes[i + 2].is_ascii_digit() =>
            {
                i += 3
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                i += ch.len_utf8();
            }
        }
        out.push(Lexeme { text: &text[start..i], offset: start });
    }
    Ok(out)
}
