use super::{ActionAlphabet, Formula, QuantifierSignature};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("fixpoint variable {variable:?} occurs negatively in its body")]
    Positivity { variable: String },
    #[error("unknown action {action:?} at byte {offset}")]
    UnknownAction { action: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nabla(String),
    /// `E{` or `A{`; the brace is consumed with the letter.
    Quant(bool),
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
    True,
    False,
    Mu,
    Nu,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier {s:?}"),
        Tok::Nabla(a) => format!("nabla_{a}"),
        Tok::Quant(true) => "E{".into(),
        Tok::Quant(false) => "A{".into(),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'!' => Some(Tok::Not),
            b'&' => Some(Tok::And),
            b'|' => Some(Tok::Or),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b'<' => Some(Tok::Lt),
            b'>' => Some(Tok::Gt),
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b',' => Some(Tok::Comma),
            b';' => Some(Tok::Semi),
            b'.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
            continue;
        }
        if c == b'-' && bytes.get(i + 1) == Some(&b'>') {
            out.push((Tok::Arrow, start));
            i += 2;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
            {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                "mu" => Tok::Mu,
                "nu" => Tok::Nu,
                "E" | "A" if bytes.get(i) == Some(&b'{') => {
                    i += 1;
                    Tok::Quant(word == "E")
                }
                w if w.starts_with("nabla_") && w.len() > "nabla_".len() => {
                    Tok::Nabla(w["nabla_".len()..].to_string())
                }
                w => Tok::Ident(w.to_string()),
            };
            out.push((tok, start));
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character {ch:?}"),
        });
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    alphabet: Option<&'a ActionAlphabet>,
    seen_actions: BTreeSet<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                describe(&want),
                describe(self.peek())
            ))
        }
    }

    fn action(&mut self, name: String, offset: usize) -> Result<String, ParseError> {
        if let Some(alpha) = self.alphabet {
            if !alpha.contains(&name) {
                return Err(ParseError::UnknownAction {
                    action: name,
                    offset,
                });
            }
        }
        self.seen_actions.insert(name.clone());
        Ok(name)
    }

    fn action_ident(&mut self) -> Result<String, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Ident(a) => self.action(a, offset),
            t => Err(ParseError::Syntax {
                offset,
                message: format!("expected action name, found {}", describe(&t)),
            }),
        }
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.expr()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn signature(&mut self) -> Result<QuantifierSignature, ParseError> {
        let start = self.offset();
        let mut cov = Vec::new();
        let mut contra = Vec::new();
        let mut in_contra = false;
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Semi if !in_contra => {
                    self.bump();
                    in_contra = true;
                }
                Tok::Comma => {
                    self.bump();
                }
                Tok::Ident(_) => {
                    let a = self.action_ident()?;
                    if in_contra {
                        contra.push(a);
                    } else {
                        cov.push(a);
                    }
                }
                t => return self.error(format!("unexpected {} in signature", describe(t))),
            }
        }
        if !in_contra {
            return Err(ParseError::Syntax {
                offset: start,
                message: "signature needs ';' between covariant and contravariant actions".into(),
            });
        }
        QuantifierSignature::new(cov, contra).map_err(|e| ParseError::Syntax {
            offset: start,
            message: e.to_string(),
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Not => Ok(Formula::neg(self.unary()?)),
            Tok::LBracket => {
                let a = self.action_ident()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::boxed(a, self.unary()?))
            }
            Tok::Lt => {
                let a = self.action_ident()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::diamond(a, self.unary()?))
            }
            Tok::Nabla(a) => {
                let a = self.action(a, offset)?;
                self.expect(Tok::LBrace)?;
                let mut members = Vec::new();
                if *self.peek() != Tok::RBrace {
                    members.push(self.expr()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        members.push(self.expr()?);
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(Formula::cover(a, members))
            }
            Tok::Quant(exists) => {
                let sig = self.signature()?;
                let body = self.unary()?;
                Ok(if exists {
                    Formula::exists(sig, body)
                } else {
                    Formula::forall(sig, body)
                })
            }
            Tok::Mu | Tok::Nu => {
                let is_mu = self.toks[self.pos - 1].0 == Tok::Mu;
                let var = match self.bump() {
                    Tok::Ident(v) => v,
                    t => {
                        return Err(ParseError::Syntax {
                            offset: self.toks[self.pos - 1].1,
                            message: format!("expected variable after binder, found {}", describe(&t)),
                        })
                    }
                };
                self.expect(Tok::Dot)?;
                let body = self.expr()?;
                Ok(if is_mu {
                    Formula::mu(var, body)
                } else {
                    Formula::nu(var, body)
                })
            }
            Tok::True => Ok(Formula::Top),
            Tok::False => Ok(Formula::Bot),
            Tok::Ident(x) => Ok(Formula::Atom(x)),
            Tok::LParen => {
                let f = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            t => Err(ParseError::Syntax {
                offset,
                message: format!("expected a formula, found {}", describe(&t)),
            }),
        }
    }
}

fn run(text: &str, alphabet: Option<&ActionAlphabet>) -> Result<(Formula, BTreeSet<String>), ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        alphabet,
        seen_actions: BTreeSet::new(),
    };
    let f = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    f.check_positivity()
        .map_err(|variable| ParseError::Positivity { variable })?;
    Ok((f, p.seen_actions))
}

/// Parses formula text. Every action must belong to `alphabet`.
pub fn parse(text: &str, alphabet: &ActionAlphabet) -> Result<Formula, ParseError> {
    run(text, Some(alphabet)).map(|(f, _)| f)
}

/// Parses formula text, collecting the alphabet from the actions it mentions.
/// The alphabet is `None` when the formula mentions no action at all.
pub fn parse_inferring_alphabet(
    text: &str,
) -> Result<(Formula, Option<ActionAlphabet>), ParseError> {
    let (f, seen) = run(text, None)?;
    let alpha = if seen.is_empty() {
        None
    } else {
        Some(ActionAlphabet::new(seen).expect("parsed action names are identifiers"))
    };
    Ok((f, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> ActionAlphabet {
        ActionAlphabet::new(["a", "b"]).unwrap()
    }

    fn p(s: &str) -> Formula {
        parse(s, &ab()).unwrap()
    }

    #[test]
    fn atom() {
        assert_eq!(p("p"), Formula::atom("p"));
    }

    #[test]
    fn quantified_greatest_fixpoint() {
        let expected = Formula::exists(
            QuantifierSignature::singleton("a", "b"),
            Formula::nu(
                "q",
                Formula::and(Formula::atom("p"), Formula::boxed("a", Formula::atom("q"))),
            ),
        );
        assert_eq!(p("E{a;b} nu q. (p & [a]q)"), expected);
    }

    #[test]
    fn negative_fixpoint_variable_is_rejected() {
        assert_eq!(
            parse("mu q. !q", &ab()),
            Err(ParseError::Positivity {
                variable: "q".into()
            })
        );
        // the left side of an implication counts as negated
        assert!(matches!(
            parse("nu q. (q -> p)", &ab()),
            Err(ParseError::Positivity { .. })
        ));
    }

    #[test]
    fn unknown_action() {
        assert_eq!(
            parse("p & <c>q", &ab()),
            Err(ParseError::UnknownAction {
                action: "c".into(),
                offset: 5
            })
        );
        assert!(matches!(
            parse("nabla_z {}", &ab()),
            Err(ParseError::UnknownAction { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("p & (q | ", &ab()) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 9),
            other => panic!("{other:?}"),
        }
        match parse("p $ q", &ab()) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn precedence() {
        // & binds tighter than |, | tighter than ->, -> associates right
        assert_eq!(
            p("p | q & r"),
            Formula::or(
                Formula::atom("p"),
                Formula::and(Formula::atom("q"), Formula::atom("r"))
            )
        );
        assert_eq!(
            p("p -> q -> r"),
            Formula::implies(
                Formula::atom("p"),
                Formula::implies(Formula::atom("q"), Formula::atom("r"))
            )
        );
        // prefix operators are tightest
        assert_eq!(
            p("!p & [a]q"),
            Formula::and(
                Formula::neg(Formula::atom("p")),
                Formula::boxed("a", Formula::atom("q"))
            )
        );
        // a binder extends to the end of its parenthesised scope
        assert_eq!(
            p("p & (mu q. q | r) & s"),
            Formula::and(
                Formula::and(
                    Formula::atom("p"),
                    Formula::mu("q", Formula::or(Formula::atom("q"), Formula::atom("r")))
                ),
                Formula::atom("s")
            )
        );
    }

    #[test]
    fn covers_and_signatures() {
        assert_eq!(p("nabla_a {}"), Formula::cover("a", []));
        assert_eq!(
            p("nabla_b {true, p & q}"),
            Formula::cover(
                "b",
                [
                    Formula::Top,
                    Formula::and(Formula::atom("p"), Formula::atom("q"))
                ]
            )
        );
        let sig = QuantifierSignature::new(Vec::<String>::new(), ["b"]).unwrap();
        assert_eq!(p("A{;b} p"), Formula::forall(sig, Formula::atom("p")));
        // E without a brace is just an atom
        assert_eq!(p("E & A"), Formula::and(Formula::atom("E"), Formula::atom("A")));
    }

    #[test]
    fn inferred_alphabet() {
        let (_, alpha) = parse_inferring_alphabet("E{a;b} <c>p").unwrap();
        assert_eq!(alpha.unwrap().actions(), ["a", "b", "c"]);
        let (_, none) = parse_inferring_alphabet("p | !p").unwrap();
        assert!(none.is_none());
    }
}
