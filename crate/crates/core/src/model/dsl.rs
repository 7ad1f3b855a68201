//! The textual chart language.
//!
//! ```text
//! object RBC { var conf in {false, true, abort} init false; }
//! external createOrder, createAbort;
//! chart create_order [atomic] {
//!   instances: RBC, STC;
//!   prechart:
//!     msg Env->RBC createOrder hot;
//!   main:
//!     assign RBC.conf := false;
//!     msg RBC->STC sendOrder hot;
//!     cond STC (STC.conf = false && RBC.conf != true) cold;
//!     sync RBC, STC;
//! }
//! ```
//!
//! Element terminators (`;`) are optional. `#` and `//` start comments.

use std::fmt::Write as _;

use super::{
    Chart, CmpOp, Element, ElementKind, ModelError, ObjectDecl, Operand, PredAtom,
    Predicate, SystemModel, Temperature, VarDecl, VarRef,
};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Arrow,
    Assign,
    Eq,
    Ne,
    And,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::And => "`&&`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ModelError {
    ModelError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, ModelError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' {
                    ident.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Ident(ident),
                line: l,
                column: col,
            });
            continue;
        }
        bump(&mut chars);
        let next = chars.peek().copied();
        let tok = match (c, next) {
            ('/', Some('/')) => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
                continue;
            }
            ('-', Some('>')) => {
                bump(&mut chars);
                Tok::Arrow
            }
            (':', Some('=')) => {
                bump(&mut chars);
                Tok::Assign
            }
            ('!', Some('=')) => {
                bump(&mut chars);
                Tok::Ne
            }
            ('&', Some('&')) => {
                bump(&mut chars);
                Tok::And
            }
            ('→', _) => Tok::Arrow,
            ('≠', _) => Tok::Ne,
            ('∧', _) => Tok::And,
            ('{', _) => Tok::LBrace,
            ('}', _) => Tok::RBrace,
            ('(', _) => Tok::LParen,
            (')', _) => Tok::RParen,
            (',', _) => Tok::Comma,
            (';', _) => Tok::Semi,
            (':', _) => Tok::Colon,
            ('.', _) => Tok::Dot,
            ('=', _) => Tok::Eq,
            _ => return Err(syntax(l, col, format!("unexpected character `{c}`"))),
        };
        out.push(Spanned {
            tok,
            line: l,
            column: col,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.eof)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ModelError> {
        let (line, column) = self.here();
        Err(syntax(line, column, message))
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ModelError> {
        match self.peek() {
            Some(tok) => self.error(format!("expected {wanted}, found {}", tok.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ModelError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ModelError> {
        if self.is_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ModelError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>, ModelError> {
        let mut out = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn model(&mut self) -> Result<SystemModel, ModelError> {
        let mut model = SystemModel::default();
        while self.peek().is_some() {
            if self.is_keyword("object") {
                model.objects.push(self.object()?);
            } else if self.is_keyword("external") {
                self.pos += 1;
                model.external_events.extend(self.ident_list()?);
                self.expect(Tok::Semi)?;
            } else if self.is_keyword("chart") {
                model.charts.push(self.chart()?);
            } else {
                return self.unexpected("`object`, `external` or `chart`");
            }
        }
        Ok(model)
    }

    fn object(&mut self) -> Result<ObjectDecl, ModelError> {
        self.keyword("object")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut vars = Vec::new();
        while !self.eat(&Tok::RBrace) {
            self.keyword("var")?;
            let var = self.ident()?;
            self.keyword("in")?;
            self.expect(Tok::LBrace)?;
            let domain = if self.peek() == Some(&Tok::RBrace) {
                Vec::new()
            } else {
                self.ident_list()?
            };
            self.expect(Tok::RBrace)?;
            self.keyword("init")?;
            let init = self.ident()?;
            self.expect(Tok::Semi)?;
            vars.push(VarDecl {
                name: var,
                domain,
                init,
            });
        }
        Ok(ObjectDecl { name, vars })
    }

    fn chart(&mut self) -> Result<Chart, ModelError> {
        self.keyword("chart")?;
        let name = self.ident()?;
        let atomic = if self.is_keyword("atomic") {
            self.pos += 1;
            true
        } else {
            false
        };
        self.expect(Tok::LBrace)?;
        self.keyword("instances")?;
        self.expect(Tok::Colon)?;
        let instances = self.ident_list()?;
        self.expect(Tok::Semi)?;
        let mut prechart = Vec::new();
        let mut main = Vec::new();
        if self.is_keyword("prechart") {
            self.pos += 1;
            self.expect(Tok::Colon)?;
            prechart = self.elements()?;
        }
        if self.is_keyword("main") {
            self.pos += 1;
            self.expect(Tok::Colon)?;
            main = self.elements()?;
        }
        self.expect(Tok::RBrace)?;
        Ok(Chart {
            name,
            instances,
            prechart,
            main,
            atomic,
        })
    }

    fn elements(&mut self) -> Result<Vec<Element>, ModelError> {
        let mut out = Vec::new();
        loop {
            let element = match self.peek() {
                Some(Tok::Ident(kw)) => match kw.as_str() {
                    "msg" => self.message()?,
                    "cond" => self.condition()?,
                    "assign" => self.assignment()?,
                    "sync" => {
                        self.pos += 1;
                        Element {
                            kind: ElementKind::Sync {
                                instances: self.ident_list()?,
                            },
                            temperature: Temperature::Cold,
                        }
                    }
                    "main" => return Ok(out),
                    _ => return self.unexpected("`msg`, `cond`, `assign` or `sync`"),
                },
                _ => return Ok(out),
            };
            out.push(element);
            self.eat(&Tok::Semi);
        }
    }

    fn temperature(&mut self) -> Result<Temperature, ModelError> {
        if self.is_keyword("hot") {
            self.pos += 1;
            Ok(Temperature::Hot)
        } else if self.is_keyword("cold") {
            self.pos += 1;
            Ok(Temperature::Cold)
        } else {
            self.unexpected("`hot` or `cold`")
        }
    }

    fn message(&mut self) -> Result<Element, ModelError> {
        self.keyword("msg")?;
        let src = self.ident()?;
        self.expect(Tok::Arrow)?;
        let dst = self.ident()?;
        let event = self.ident()?;
        let temperature = self.temperature()?;
        Ok(Element {
            kind: ElementKind::Message { src, dst, event },
            temperature,
        })
    }

    fn condition(&mut self) -> Result<Element, ModelError> {
        self.keyword("cond")?;
        let instance = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut atoms = vec![self.pred_atom()?];
        while self.eat(&Tok::And) {
            atoms.push(self.pred_atom()?);
        }
        self.expect(Tok::RParen)?;
        let temperature = self.temperature()?;
        Ok(Element {
            kind: ElementKind::Condition {
                instance,
                predicate: Predicate(atoms),
            },
            temperature,
        })
    }

    fn var_ref(&mut self) -> Result<VarRef, ModelError> {
        let object = self.ident()?;
        self.expect(Tok::Dot)?;
        let var = self.ident()?;
        Ok(VarRef { object, var })
    }

    fn pred_atom(&mut self) -> Result<PredAtom, ModelError> {
        if self.peek_at(1) != Some(&Tok::Dot) {
            if self.is_keyword("true") || self.is_keyword("false") {
                let value = self.is_keyword("true");
                self.pos += 1;
                return Ok(PredAtom::Const(value));
            }
            return self.unexpected("`obj.var`, `true` or `false`");
        }
        let lhs = self.var_ref()?;
        let op = if self.eat(&Tok::Eq) {
            CmpOp::Eq
        } else if self.eat(&Tok::Ne) {
            CmpOp::Ne
        } else {
            return self.unexpected("`=` or `!=`");
        };
        let rhs = if self.peek_at(1) == Some(&Tok::Dot) {
            Operand::Var(self.var_ref()?)
        } else {
            Operand::Literal(self.ident()?)
        };
        Ok(PredAtom::Cmp { lhs, op, rhs })
    }

    fn assignment(&mut self) -> Result<Element, ModelError> {
        self.keyword("assign")?;
        let target = self.var_ref()?;
        self.expect(Tok::Assign)?;
        let value = self.ident()?;
        Ok(Element::assignment(&target.object, &target.var, &value))
    }
}

/// Parses chart-language text without semantic validation.
pub fn parse_model_unchecked(text: &str) -> Result<SystemModel, ModelError> {
    let toks = lex(text)?;
    let eof = match text.lines().count() {
        0 => (1, 1),
        n => (n, text.lines().last().map_or(0, |l| l.chars().count()) + 1),
    };
    let mut parser = Parser { toks, pos: 0, eof };
    parser.model()
}

/// Parses and validates a model.
pub fn parse_model(text: &str) -> Result<SystemModel, ModelError> {
    parse_model_unchecked(text)?.validated()
}

/// Renders a model back into the chart language. Parsing the output yields an
/// equal model.
pub fn pretty_print(model: &SystemModel) -> String {
    let mut out = String::new();
    for object in &model.objects {
        let _ = writeln!(out, "object {} {{", object.name);
        for var in &object.vars {
            let _ = writeln!(
                out,
                "  var {} in {{{}}} init {};",
                var.name,
                var.domain.join(", "),
                var.init
            );
        }
        out.push_str("}\n");
    }
    if !model.external_events.is_empty() {
        let _ = writeln!(out, "external {};", model.external_events.join(", "));
    }
    for chart in &model.charts {
        out.push('\n');
        let atomic = if chart.atomic { " atomic" } else { "" };
        let _ = writeln!(out, "chart {}{atomic} {{", chart.name);
        let _ = writeln!(out, "  instances: {};", chart.instances.join(", "));
        if !chart.prechart.is_empty() {
            out.push_str("  prechart:\n");
            for element in &chart.prechart {
                let _ = writeln!(out, "    {element};");
            }
        }
        if !chart.main.is_empty() {
            out.push_str("  main:\n");
            for element in &chart.main {
                let _ = writeln!(out, "    {element};");
            }
        }
        out.push_str("}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_objects_and_events() {
        let model = parse_model_unchecked(
            "object A { var x in {a, b, c} init b; }\nexternal go, stop;\n",
        )
        .unwrap();
        assert_eq!(model.objects[0].vars[0].domain, vec!["a", "b", "c"]);
        assert_eq!(model.objects[0].vars[0].init, "b");
        assert_eq!(model.external_events, vec!["go", "stop"]);
    }

    #[test]
    fn parses_every_element_kind() {
        let text = "chart c atomic {
            instances: A, B;
            prechart:
              msg Env->A go hot
              cond A (A.x = a && B.y != A.x) cold;
            main:
              assign A.x := b
              sync A, B;
              msg A->B ping cold
              cond B (false) hot
        }";
        let model = parse_model_unchecked(text).unwrap();
        let chart = &model.charts[0];
        assert!(chart.atomic);
        assert_eq!(chart.prechart.len(), 2);
        assert_eq!(chart.main.len(), 4);
        assert_eq!(chart.main[3].to_string(), "cond B (false) hot");
        assert_eq!(
            chart.prechart[1].to_string(),
            "cond A (A.x = a && B.y != A.x) cold"
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_model_unchecked("object A {\n  var x in {a} init ;\n}").unwrap_err();
        match err {
            ModelError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 21)),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_model_unchecked("chart c { instances: A; main: msg A->A e warm }")
            .unwrap_err();
        assert!(err.to_string().contains("`hot` or `cold`"), "{err}");
        let err = parse_model_unchecked("external a").unwrap_err();
        assert!(err.to_string().contains("end of input"), "{err}");
    }

    #[test]
    fn comments_are_skipped() {
        let model = parse_model_unchecked("# hello\nexternal a; // trailing\n").unwrap();
        assert_eq!(model.external_events, vec!["a"]);
    }

    #[test]
    fn unicode_operators() {
        let model =
            parse_model_unchecked("chart c { instances: A; main: cond A (A.x ≠ a ∧ true) cold }")
                .unwrap();
        assert_eq!(model.charts[0].main[0].to_string(), "cond A (A.x != a && true) cold");
    }
}
