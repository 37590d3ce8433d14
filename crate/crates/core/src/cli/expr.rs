//! Window-expression mini-grammar.
//!
//! ```text
//! expr  := FUNC '(' ident ')' 'OVER' '(' [ 'ORDER' 'BY' ident ]
//!          ('ROWS' | 'ROW' | 'RANGE') 'BETWEEN' bound 'AND' bound ')'
//! bound := 'UNBOUNDED PRECEDING' | 'UNBOUNDED FOLLOWING'
//!        | 'CURRENT ROW' | integer ('PRECEDING' | 'FOLLOWING')
//! ```
//!
//! Function names and keywords match case-insensitively; column identifiers
//! keep their spelling and are matched against CSV headers exactly. Both the
//! ROWS and ROW spellings are accepted. Shorthand clauses without BETWEEN are
//! not. A failed parse reports the byte offset of the offending token and the
//! full set of tokens that were legal there.

use crate::aggregators::AggregateKind;
use crate::error::{ParseError, Result};
use crate::frames::{Boundary, FrameMode, FrameSpec};

/// A parsed expression: which aggregate, over which column, under which frame.
/// The ORDER BY column, when present, lives in `spec.order_key`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowExpr {
    pub kind: AggregateKind,
    pub column: String,
    pub spec: FrameSpec,
}

impl WindowExpr {
    /// Canonical result-column header, e.g. `AVG(Score)`.
    pub fn display(&self) -> String {
        format!("{}({})", self.kind.sql_name(), self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Ident,
    Int(u64),
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    offset: usize,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

pub fn parse_window_expr(text: &str) -> Result<WindowExpr> {
    let mut p = Parser { src: text, pos: 0 };

    let func_names: Vec<&'static str> = AggregateKind::ALL.iter().map(|k| k.sql_name()).collect();
    let func = p.take(&func_names)?;
    let kind = match AggregateKind::ALL
        .iter()
        .find(|k| func.tok == Tok::Ident && func.text.eq_ignore_ascii_case(k.sql_name()))
    {
        Some(&k) => k,
        None => return Err(fail(&func, func_names).into()),
    };

    p.expect_punct(Tok::LParen, "(")?;
    let column = p.expect_ident()?;
    p.expect_punct(Tok::RParen, ")")?;
    p.expect_keyword("OVER")?;
    p.expect_punct(Tok::LParen, "(")?;

    let head = p.take(&["ORDER BY", "ROWS", "ROW", "RANGE"])?;
    let (order_key, mode_tok) = if is_kw(&head, "ORDER") {
        p.expect_keyword("BY")?;
        let key = p.expect_ident()?;
        (Some(key), p.take(&["ROWS", "ROW", "RANGE"])?)
    } else {
        (None, head)
    };
    let mode = if is_kw(&mode_tok, "ROWS") || is_kw(&mode_tok, "ROW") {
        FrameMode::Rows
    } else if is_kw(&mode_tok, "RANGE") {
        FrameMode::Range
    } else {
        let expected = if order_key.is_some() {
            vec!["ROWS", "ROW", "RANGE"]
        } else {
            vec!["ORDER BY", "ROWS", "ROW", "RANGE"]
        };
        return Err(fail(&mode_tok, expected).into());
    };

    p.expect_keyword("BETWEEN")?;
    let start = p.bound()?;
    p.expect_keyword("AND")?;
    let end = p.bound()?;
    p.expect_punct(Tok::RParen, ")")?;
    p.expect_end()?;

    let spec = FrameSpec::new(mode, start, end, order_key)?;
    Ok(WindowExpr { kind, column, spec })
}

fn is_kw(t: &Token, kw: &str) -> bool {
    t.tok == Tok::Ident && t.text.eq_ignore_ascii_case(kw)
}

fn fail<S: Into<Vec<&'static str>>>(tok: &Token, expected: S) -> ParseError {
    ParseError {
        position: tok.offset,
        expected: expected.into(),
        found: tok.text.clone(),
    }
}

impl<'a> Parser<'a> {
    /// Next token, or a parse error naming `expected` when the input ends,
    /// holds an illegal character, or carries an oversized integer.
    fn take(&mut self, expected: &[&'static str]) -> Result<Token, ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let err = |found: String| ParseError {
            position: start,
            expected: expected.to_vec(),
            found,
        };
        if start >= bytes.len() {
            return Err(err("end of input".into()));
        }
        let tok = match bytes[start] {
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = &self.src[start..self.pos];
                match text.parse::<u64>() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => {
                        return Err(ParseError {
                            position: start,
                            expected: vec!["integer that fits in 64 bits"],
                            found: text.to_string(),
                        })
                    }
                }
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap();
                return Err(err(ch.to_string()));
            }
        };
        Ok(Token {
            tok,
            text: self.src[start..self.pos].to_string(),
            offset: start,
        })
    }

    fn expect_punct(&mut self, want: Tok, name: &'static str) -> Result<(), ParseError> {
        let t = self.take(&[name])?;
        if t.tok == want {
            Ok(())
        } else {
            Err(fail(&t, vec![name]))
        }
    }

    fn expect_keyword(&mut self, kw: &'static str) -> Result<(), ParseError> {
        let t = self.take(&[kw])?;
        if is_kw(&t, kw) {
            Ok(())
        } else {
            Err(fail(&t, vec![kw]))
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        let t = self.take(&["identifier"])?;
        if t.tok == Tok::Ident {
            Ok(t.text)
        } else {
            Err(fail(&t, vec!["identifier"]))
        }
    }

    fn bound(&mut self) -> Result<Boundary, ParseError> {
        let head = self.take(&[
            "UNBOUNDED PRECEDING",
            "UNBOUNDED FOLLOWING",
            "CURRENT ROW",
            "integer",
        ])?;
        if is_kw(&head, "UNBOUNDED") {
            let dir = self.take(&["PRECEDING", "FOLLOWING"])?;
            if is_kw(&dir, "PRECEDING") {
                Ok(Boundary::UnboundedPreceding)
            } else if is_kw(&dir, "FOLLOWING") {
                Ok(Boundary::UnboundedFollowing)
            } else {
                Err(fail(&dir, vec!["PRECEDING", "FOLLOWING"]))
            }
        } else if is_kw(&head, "CURRENT") {
            self.expect_keyword("ROW")?;
            Ok(Boundary::CurrentRow)
        } else if let Tok::Int(k) = head.tok {
            let dir = self.take(&["PRECEDING", "FOLLOWING"])?;
            if is_kw(&dir, "PRECEDING") {
                Ok(Boundary::Preceding(k))
            } else if is_kw(&dir, "FOLLOWING") {
                Ok(Boundary::Following(k))
            } else {
                Err(fail(&dir, vec!["PRECEDING", "FOLLOWING"]))
            }
        } else {
            Err(fail(
                &head,
                vec![
                    "UNBOUNDED PRECEDING",
                    "UNBOUNDED FOLLOWING",
                    "CURRENT ROW",
                    "integer",
                ],
            ))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.take(&["end of input"]) {
            Err(e) if e.found == "end of input" => Ok(()),
            Err(e) => Err(e),
            Ok(t) => Err(fail(&t, vec!["end of input"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn parse(text: &str) -> Result<WindowExpr> {
        parse_window_expr(text)
    }

    fn parse_err(text: &str) -> ParseError {
        match parse(text) {
            Err(Error::Parse(e)) => e,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn row_frame_with_offsets() {
        let e = parse("AVG(Score) OVER (ROW BETWEEN 2 PRECEDING AND 1 FOLLOWING)").unwrap();
        assert_eq!(e.kind, AggregateKind::Avg);
        assert_eq!(e.column, "Score");
        assert_eq!(e.spec.mode, FrameMode::Rows);
        assert_eq!(e.spec.start, Boundary::Preceding(2));
        assert_eq!(e.spec.end, Boundary::Following(1));
        assert_eq!(e.spec.order_key, None);
        assert_eq!(e.display(), "AVG(Score)");
    }

    #[test]
    fn rows_spelling_is_equivalent() {
        let a = parse("AVG(Score) OVER (ROW BETWEEN 2 PRECEDING AND 1 FOLLOWING)").unwrap();
        let b = parse("AVG(Score) OVER (ROWS BETWEEN 2 PRECEDING AND 1 FOLLOWING)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn range_frame_with_order_key() {
        let e = parse("AVG(Score) OVER (ORDER BY Score RANGE BETWEEN 2 PRECEDING AND 1 FOLLOWING)")
            .unwrap();
        assert_eq!(e.kind, AggregateKind::Avg);
        assert_eq!(e.spec.mode, FrameMode::Range);
        assert_eq!(e.spec.order_key.as_deref(), Some("Score"));
        assert_eq!(e.spec.start, Boundary::Preceding(2));
        assert_eq!(e.spec.end, Boundary::Following(1));
    }

    #[test]
    fn keywords_fold_case_but_identifiers_do_not() {
        let e =
            parse("avg(ScOrE) over (rows between unbounded preceding and current row)").unwrap();
        assert_eq!(e.kind, AggregateKind::Avg);
        assert_eq!(e.column, "ScOrE");
        assert_eq!(e.spec.start, Boundary::UnboundedPreceding);
        assert_eq!(e.spec.end, Boundary::CurrentRow);
    }

    #[test]
    fn start_after_end_is_rejected() {
        let err = parse("MAX(x) OVER (ROWS BETWEEN 1 FOLLOWING AND 2 PRECEDING)").unwrap_err();
        assert!(matches!(err, Error::InvalidFrame(_)), "got {err:?}");
    }

    #[test]
    fn range_without_order_key_is_rejected() {
        let err = parse("SUM(x) OVER (RANGE BETWEEN 1 PRECEDING AND CURRENT ROW)").unwrap_err();
        assert!(matches!(err, Error::InvalidFrame(_)), "got {err:?}");
    }

    #[test]
    fn misspelled_mode_reports_offset_and_choices() {
        let e = parse_err("AVG(Score) OVER (ROWQ BETWEEN 2 PRECEDING AND 1 FOLLOWING)");
        assert_eq!(e.position, 17);
        assert_eq!(e.found, "ROWQ");
        assert_eq!(e.expected, vec!["ORDER BY", "ROWS", "ROW", "RANGE"]);
    }

    #[test]
    fn unknown_function_lists_the_legal_names() {
        let e = parse_err("MEDIAN(x) OVER (ROWS BETWEEN 1 PRECEDING AND CURRENT ROW)");
        assert_eq!(e.position, 0);
        assert_eq!(e.found, "MEDIAN");
        assert!(e.expected.contains(&"AVG"));
        assert!(e.expected.contains(&"STDDEV_POP"));
        assert_eq!(e.expected.len(), 10);
    }

    #[test]
    fn missing_and_is_reported_at_its_offset() {
        let text = "SUM(x) OVER (ROWS BETWEEN 1 PRECEDING 2 FOLLOWING)";
        let e = parse_err(text);
        assert_eq!(e.position, text.find(" 2 ").unwrap() + 1);
        assert_eq!(e.expected, vec!["AND"]);
        assert_eq!(e.found, "2");
    }

    #[test]
    fn truncated_input_reports_end_of_input() {
        let e = parse_err("AVG(Score) OVER (ROWS BETWEEN 2 PRECEDING AND");
        assert_eq!(e.found, "end of input");
        assert_eq!(
            e.expected,
            vec![
                "UNBOUNDED PRECEDING",
                "UNBOUNDED FOLLOWING",
                "CURRENT ROW",
                "integer"
            ]
        );
    }

    #[test]
    fn trailing_tokens_are_rejected() {
        let e = parse_err("AVG(x) OVER (ROWS BETWEEN 1 PRECEDING AND CURRENT ROW) extra");
        assert_eq!(e.expected, vec!["end of input"]);
        assert_eq!(e.found, "extra");
    }

    #[test]
    fn illegal_character_is_the_found_token() {
        let e = parse_err("AVG(Score) OVER %");
        assert_eq!(e.found, "%");
        assert_eq!(e.expected, vec!["("]);
    }

    #[test]
    fn oversized_integer_is_rejected() {
        let e =
            parse_err("SUM(x) OVER (ROWS BETWEEN 99999999999999999999 PRECEDING AND CURRENT ROW)");
        assert_eq!(e.expected, vec!["integer that fits in 64 bits"]);
        assert_eq!(e.found, "99999999999999999999");
    }

    #[test]
    fn zero_offsets_normalize_to_current_row() {
        let e = parse("SUM(x) OVER (ROWS BETWEEN 0 PRECEDING AND 0 FOLLOWING)").unwrap();
        assert_eq!(e.spec.start, Boundary::CurrentRow);
        assert_eq!(e.spec.end, Boundary::CurrentRow);
    }

    #[test]
    fn every_function_name_parses() {
        for kind in AggregateKind::ALL {
            let text = format!(
                "{}(col_1) OVER (ROWS BETWEEN UNBOUNDED PRECEDING AND UNBOUNDED FOLLOWING)",
                kind.sql_name()
            );
            let e = parse(&text).unwrap();
            assert_eq!(e.kind, kind);
            assert_eq!(e.column, "col_1");
        }
    }

    #[test]
    fn parse_error_display_reads_well() {
        let e = parse_err("AVG(Score) OVER (ROWQ BETWEEN 2 PRECEDING AND 1 FOLLOWING)");
        let msg = e.to_string();
        assert!(msg.contains("byte 17"), "{msg}");
        assert!(msg.contains("ORDER BY | ROWS | ROW | RANGE"), "{msg}");
        assert!(msg.contains("ROWQ"), "{msg}");
    }
}
