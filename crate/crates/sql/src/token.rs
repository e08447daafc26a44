use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    StringLiteral,
    NumberLiteral,
    Symbol,
}

/// A lexical token. Keyword text is stored upper-cased; identifier text keeps
/// its source case; string literal text has its quotes stripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offset of the token's first character in the source text.
    pub position: usize,
}

impl Token {
    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == kw
    }

    pub fn is_symbol(&self, sym: &str) -> bool {
        self.kind == TokenKind::Symbol && self.text == sym
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::StringLiteral => write!(f, "'{}'", self.text),
            _ => f.write_str(&self.text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TokenizeError {
    #[error("unterminated string literal starting at byte {position}")]
    UnterminatedString { position: usize },
    #[error("illegal character {ch:?} at byte {position}")]
    IllegalCharacter { ch: char, position: usize },
}

impl TokenizeError {
    pub fn position(&self) -> usize {
        match self {
            TokenizeError::UnterminatedString { position }
            | TokenizeError::IllegalCharacter { position, .. } => *position,
        }
    }
}

/// Reserved words. Anything else made of identifier characters is an
/// identifier.
pub const KEYWORDS: &[&str] = &[
    "SELECT",
    "FROM",
    "WHERE",
    "AND",
    "OR",
    "ORDER",
    "GROUP",
    "BY",
    "ASC",
    "DESC",
    "COUNT",
    "DISTINCT",
    "UPPER",
    "UCASE",
    "SUBSTRING",
    "SUBSTR",
    "JOIN",
    "INNER",
    "LEFT",
    "RIGHT",
    "FULL",
    "OUTER",
    "CROSS",
    "ON",
    "LIMIT",
    "FETCH",
    "HAVING",
    "UNION",
    "INSERT",
    "UPDATE",
    "DELETE",
    "IS",
    "NOT",
    "IN",
    "LIKE",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(word))
}

const SYMBOLS: &[char] = &['(', ')', ',', '*', '=', ';', '<', '>', '!', '.', '-'];

pub fn tokenize(text: &str) -> Result<Vec<Token>, TokenizeError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();

    while let Some(&(start, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
        } else if ch == '\'' {
            chars.next();
            let body_start = start + 1;
            let mut end = None;
            for (i, c) in chars.by_ref() {
                if c == '\'' {
                    end = Some(i);
                    break;
                }
            }
            let end = end.ok_or(TokenizeError::UnterminatedString { position: start })?;
            tokens.push(Token {
                kind: TokenKind::StringLiteral,
                text: text[body_start..end].to_string(),
                position: start,
            });
        } else if ch.is_ascii_alphabetic() {
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = i + c.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let word = &text[start..end];
            let (kind, text) = if is_keyword(word) {
                (TokenKind::Keyword, word.to_ascii_uppercase())
            } else {
                (TokenKind::Identifier, word.to_string())
            };
            tokens.push(Token {
                kind,
                text,
                position: start,
            });
        } else if ch.is_ascii_digit() {
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if c.is_ascii_digit() {
                    end = i + 1;
                    chars.next();
                } else {
                    break;
                }
            }
            tokens.push(Token {
                kind: TokenKind::NumberLiteral,
                text: text[start..end].to_string(),
                position: start,
            });
        } else if SYMBOLS.contains(&ch) {
            chars.next();
            tokens.push(Token {
                kind: TokenKind::Symbol,
                text: ch.to_string(),
                position: start,
            });
        } else {
            return Err(TokenizeError::IllegalCharacter {
                ch,
                position: start,
            });
        }
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(tokens: &[Token]) -> Vec<(TokenKind, &str)> {
        tokens.iter().map(|t| (t.kind, t.text.as_str())).collect()
    }

    #[test]
    fn count_query() {
        let toks = tokenize("SELECT COUNT(State) FROM teachers").unwrap();
        use TokenKind::*;
        assert_eq!(
            kinds(&toks),
            vec![
                (Keyword, "SELECT"),
                (Keyword, "COUNT"),
                (Symbol, "("),
                (Identifier, "State"),
                (Symbol, ")"),
                (Keyword, "FROM"),
                (Identifier, "teachers"),
            ]
        );
        assert_eq!(toks[3].position, 13);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  \n\t ").unwrap().is_empty());
    }

    #[test]
    fn string_literal_strips_quotes() {
        let toks = tokenize("WHERE State = 'Andhra Pradesh'").unwrap();
        let last = toks.last().unwrap();
        assert_eq!(last.kind, TokenKind::StringLiteral);
        assert_eq!(last.text, "Andhra Pradesh");
        assert_eq!(last.position, 14);
    }

    #[test]
    fn keywords_case_insensitive_identifiers_not() {
        let toks = tokenize("select Count(sTaTe) frOm Teachers").unwrap();
        assert_eq!(toks[0].text, "SELECT");
        assert_eq!(toks[1].text, "COUNT");
        assert_eq!(toks[3].text, "sTaTe");
        assert_eq!(toks[5].text, "FROM");
        assert_eq!(toks[6].text, "Teachers");
    }

    #[test]
    fn literal_keeps_interior_verbatim() {
        let toks = tokenize("'  a,b (c)  SELECT '").unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].text, "  a,b (c)  SELECT ");
    }

    #[test]
    fn errors() {
        assert_eq!(
            tokenize("WHERE a = 'open").unwrap_err(),
            TokenizeError::UnterminatedString { position: 10 }
        );
        assert_eq!(
            tokenize("SELECT # FROM t").unwrap_err(),
            TokenizeError::IllegalCharacter {
                ch: '#',
                position: 7
            }
        );
        assert!(matches!(
            tokenize("SELECT ü").unwrap_err(),
            TokenizeError::IllegalCharacter { ch: 'ü', .. }
        ));
    }

    #[test]
    fn numbers_and_symbols() {
        let toks = tokenize("SUBSTRING(State,1,5);").unwrap();
        let texts: Vec<_> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(
            texts,
            ["SUBSTRING", "(", "State", ",", "1", ",", "5", ")", ";"]
        );
        assert_eq!(toks[4].kind, TokenKind::NumberLiteral);
    }
}
