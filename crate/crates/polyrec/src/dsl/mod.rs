//! Textual sequence-definition format and the rule-expression parser.
//!
//! A document is UTF-8 text: `#` comments and blank lines are ignored,
//! a `kind:` header picks the definition family, header fields follow, and
//! system kinds carry one rule per line in the form `name' = expr`
//! (recurrence kinds use `next = expr` over their window variables).
//! Rational literals are exact (`1/3`); decimal floats do not parse.

mod expr;

pub use expr::{parse_expr, parse_rational_expr, parse_window_poly, RationalExpr};

use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::automata::{UnaryWeightedAutomaton, WcfgRule, WcfgUnary, WmsoExpr};
use crate::engines::{
    EngineError, LinearRecurrence, OracleSequence, PolySystem, RationalSystem, SimpleRecurrence,
};
use crate::poly::{MultiPoly, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownVariable(String),
    NegativeExponent,
    ExponentTooLarge(u32),
    DivisionByZero,
    NonPolynomial,
    ExpressionTooLarge,
}

/// Expression-level parse failure with 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind:?}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn name(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax(_) => "SyntaxError",
            ParseErrorKind::UnknownVariable(_) => "UnknownVariable",
            ParseErrorKind::NegativeExponent => "NegativeExponent",
            ParseErrorKind::ExponentTooLarge(_) => "ExponentTooLarge",
            ParseErrorKind::DivisionByZero => "DivisionByZero",
            ParseErrorKind::NonPolynomial => "NonPolynomial",
            ParseErrorKind::ExpressionTooLarge => "ExpressionTooLarge",
        }
    }

    pub fn message(&self) -> String {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => msg.clone(),
            ParseErrorKind::UnknownVariable(v) => format!("unknown variable `{v}`"),
            ParseErrorKind::NegativeExponent => "exponents must be nonnegative".to_string(),
            ParseErrorKind::ExponentTooLarge(max) => {
                format!("exponent exceeds the supported maximum {max}")
            }
            ParseErrorKind::DivisionByZero => "division by zero".to_string(),
            ParseErrorKind::NonPolynomial => {
                "expression divides by a non-constant polynomial".to_string()
            }
            ParseErrorKind::ExpressionTooLarge => {
                "expression expands beyond the supported size".to_string()
            }
        }
    }
}

/// Document-level failure: structural problems plus wrapped expression and
/// construction errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocError {
    #[error("line {line}: {message}")]
    Structure { line: usize, message: String },
    #[error(transparent)]
    Expr(#[from] ParseError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("line {line}: {source}")]
    Automata {
        line: usize,
        source: crate::automata::AutomataError,
    },
}

impl DocError {
    pub fn name(&self) -> &'static str {
        match self {
            DocError::Structure { .. } => "DocumentError",
            DocError::Expr(e) => e.name(),
            DocError::Engine(e) => e.name(),
            DocError::Automata { source, .. } => source.name(),
        }
    }
}

/// A parsed sequence definition with its surface names preserved for
/// printing.
#[derive(Debug, Clone)]
pub enum SequenceDoc {
    PolySystem {
        names: Vec<String>,
        system: PolySystem,
    },
    LinearRecurrence {
        names: Vec<String>,
        recurrence: LinearRecurrence,
    },
    SimpleRecurrence {
        names: Vec<String>,
        recurrence: SimpleRecurrence,
    },
    RationalSystem {
        names: Vec<String>,
        system: RationalSystem,
    },
    Oracle {
        oracle: OracleSequence,
    },
    Automaton {
        automaton: UnaryWeightedAutomaton,
    },
    Wcfg {
        names: Vec<String>,
        grammar: WcfgUnary,
    },
    Wmso {
        expr: WmsoExpr,
    },
}

impl PartialEq for SequenceDoc {
    fn eq(&self, other: &Self) -> bool {
        use SequenceDoc::*;
        match (self, other) {
            (
                PolySystem { names: a, system: x },
                PolySystem { names: b, system: y },
            ) => a == b && x == y,
            (
                LinearRecurrence {
                    names: a,
                    recurrence: x,
                },
                LinearRecurrence {
                    names: b,
                    recurrence: y,
                },
            ) => a == b && x == y,
            (
                SimpleRecurrence {
                    names: a,
                    recurrence: x,
                },
                SimpleRecurrence {
                    names: b,
                    recurrence: y,
                },
            ) => a == b && x == y,
            (
                RationalSystem { names: a, system: x },
                RationalSystem { names: b, system: y },
            ) => a == b && x == y,
            (Oracle { oracle: a }, Oracle { oracle: b }) => a.name() == b.name(),
            (Automaton { automaton: a }, Automaton { automaton: b }) => a == b,
            (
                Wcfg {
                    names: a,
                    grammar: x,
                },
                Wcfg {
                    names: b,
                    grammar: y,
                },
            ) => a == b && x == y,
            (Wmso { expr: a }, Wmso { expr: b }) => a == b,
            _ => false,
        }
    }
}

impl crate::engines::SequenceOracle for SequenceDoc {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        match self {
            SequenceDoc::PolySystem { system, .. } => system.value(n),
            SequenceDoc::LinearRecurrence { recurrence, .. } => recurrence.value(n),
            SequenceDoc::SimpleRecurrence { recurrence, .. } => recurrence.value(n),
            SequenceDoc::RationalSystem { system, .. } => system.value(n),
            SequenceDoc::Oracle { oracle } => oracle.value(n),
            SequenceDoc::Automaton { automaton } => automaton.value(n),
            SequenceDoc::Wcfg { grammar, .. } => grammar.value(n),
            SequenceDoc::Wmso { expr } => expr.value(n),
        }
    }

    fn prefix(&self, len: u64) -> Result<Vec<Rat>, EngineError> {
        use crate::engines::SequenceOracle as S;
        match self {
            SequenceDoc::PolySystem { system, .. } => S::prefix(system, len),
            SequenceDoc::LinearRecurrence { recurrence, .. } => S::prefix(recurrence, len),
            SequenceDoc::SimpleRecurrence { recurrence, .. } => S::prefix(recurrence, len),
            SequenceDoc::RationalSystem { system, .. } => S::prefix(system, len),
            SequenceDoc::Oracle { oracle } => S::prefix(oracle, len),
            SequenceDoc::Automaton { automaton } => S::prefix(automaton, len),
            SequenceDoc::Wcfg { grammar, .. } => S::prefix(grammar, len),
            SequenceDoc::Wmso { expr } => S::prefix(expr, len),
        }
    }
}

impl SequenceDoc {
    pub fn kind(&self) -> &'static str {
        match self {
            SequenceDoc::PolySystem { .. } => "poly_system",
            SequenceDoc::LinearRecurrence { .. } => "linear_recurrence",
            SequenceDoc::SimpleRecurrence { .. } => "simple_recurrence",
            SequenceDoc::RationalSystem { .. } => "rational_system",
            SequenceDoc::Oracle { .. } => "oracle",
            SequenceDoc::Automaton { .. } => "automaton",
            SequenceDoc::Wcfg { .. } => "wcfg",
            SequenceDoc::Wmso { .. } => "wmso",
        }
    }
}

struct Lines<'a> {
    /// (1-based line number, content with comments stripped)
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, raw)| {
                let content = match raw.find('#') {
                    Some(p) => &raw[..p],
                    None => raw,
                };
                (i + 1, content.trim())
            })
            .filter(|(_, s)| !s.is_empty())
            .collect();
        Lines { items, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.items.get(self.pos).copied();
        self.pos += 1;
        item
    }

    fn rest(&mut self) -> Vec<(usize, &'a str)> {
        let out = self.items[self.pos..].to_vec();
        self.pos = self.items.len();
        out
    }

    /// Expect `key: value`; returns the value.
    fn field(&mut self, key: &str) -> Result<(usize, &'a str), DocError> {
        let (line, content) = self.next().ok_or_else(|| DocError::Structure {
            line: self.items.last().map(|(l, _)| *l).unwrap_or(0) + 1,
            message: format!("missing `{key}:` field"),
        })?;
        let Some(value) = content.strip_prefix(key).and_then(|r| r.strip_prefix(':')) else {
            return Err(DocError::Structure {
                line,
                message: format!("expected `{key}: ...`, found `{content}`"),
            });
        };
        Ok((line, value.trim()))
    }

    /// Peek whether the next line starts with `key:`.
    fn peek_field(&self, key: &str) -> bool {
        self.items
            .get(self.pos)
            .is_some_and(|(_, s)| s.strip_prefix(key).is_some_and(|r| r.starts_with(':')))
    }
}

fn parse_rat(s: &str, line: usize) -> Result<Rat, DocError> {
    s.parse::<Rat>().map_err(|_| DocError::Structure {
        line,
        message: format!("`{s}` is not an exact rational (use integers or a/b, not decimals)"),
    })
}

fn parse_rat_list(s: &str, line: usize) -> Result<Vec<Rat>, DocError> {
    s.split_whitespace().map(|w| parse_rat(w, line)).collect()
}

fn parse_names(s: &str, line: usize) -> Result<Vec<String>, DocError> {
    let names: Vec<String> = s.split_whitespace().map(|w| w.to_string()).collect();
    if names.is_empty() {
        return Err(DocError::Structure {
            line,
            message: "at least one variable name is required".to_string(),
        });
    }
    for (i, n) in names.iter().enumerate() {
        if !n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(DocError::Structure {
                line,
                message: format!("`{n}` is not a valid variable name"),
            });
        }
        if names[..i].contains(n) {
            return Err(DocError::Structure {
                line,
                message: format!("duplicate variable name `{n}`"),
            });
        }
    }
    Ok(names)
}

/// Parse a sequence document.
pub fn parse_doc(text: &str) -> Result<SequenceDoc, DocError> {
    let mut lines = Lines::new(text);
    let (kind_line, kind) = lines.field("kind")?;
    match kind {
        "poly_system" => parse_system_body(&mut lines, false),
        "rational_system" => parse_system_body(&mut lines, true),
        "linear_recurrence" => parse_recurrence_body(&mut lines, true),
        "simple_recurrence" => parse_recurrence_body(&mut lines, false),
        "oracle" => {
            let (line, name) = lines.field("name")?;
            let oracle = OracleSequence::by_name(name).ok_or_else(|| DocError::Structure {
                line,
                message: format!("unknown oracle `{name}`"),
            })?;
            expect_end(&mut lines)?;
            Ok(SequenceDoc::Oracle { oracle })
        }
        "automaton" => parse_automaton_body(&mut lines),
        "wcfg" => parse_wcfg_body(&mut lines),
        "wmso" => {
            let (line, text) = lines.field("expr")?;
            let expr = parse_wmso(text, line)?;
            expr.validate()
                .map_err(|source| DocError::Automata { line, source })?;
            expect_end(&mut lines)?;
            Ok(SequenceDoc::Wmso { expr })
        }
        other => Err(DocError::Structure {
            line: kind_line,
            message: format!("unknown kind `{other}`"),
        }),
    }
}

fn expect_end(lines: &mut Lines) -> Result<(), DocError> {
    if let Some((line, content)) = lines.next() {
        return Err(DocError::Structure {
            line,
            message: format!("unexpected trailing content `{content}`"),
        });
    }
    Ok(())
}

fn parse_system_body(lines: &mut Lines, rational: bool) -> Result<SequenceDoc, DocError> {
    let (vline, vars) = lines.field("vars")?;
    let names = parse_names(vars, vline)?;
    let (iline, init_text) = lines.field("init")?;
    let init = parse_rat_list(init_text, iline)?;
    if init.len() != names.len() {
        return Err(DocError::Structure {
            line: iline,
            message: format!("{} initial values for {} variables", init.len(), names.len()),
        });
    }
    let output = if lines.peek_field("output") {
        let (oline, oname) = lines.field("output")?;
        names
            .iter()
            .position(|n| n == oname)
            .ok_or_else(|| DocError::Structure {
                line: oline,
                message: format!("output variable `{oname}` is not declared"),
            })?
    } else {
        0
    };

    // one rule per declared variable, `name' = expr`, in declaration order
    let mut rules: Vec<Option<(usize, String)>> = vec![None; names.len()];
    for (line, content) in lines.rest() {
        let Some((lhs, rhs)) = content.split_once('=') else {
            return Err(DocError::Structure {
                line,
                message: format!("expected `name' = expression`, found `{content}`"),
            });
        };
        let lhs = lhs.trim();
        let Some(base) = lhs.strip_suffix('\'') else {
            return Err(DocError::Structure {
                line,
                message: format!("rule left-hand side `{lhs}` must end with `'`"),
            });
        };
        let idx = names
            .iter()
            .position(|n| n == base.trim())
            .ok_or_else(|| DocError::Structure {
                line,
                message: format!("rule for undeclared variable `{}`", base.trim()),
            })?;
        if rules[idx].is_some() {
            return Err(DocError::Structure {
                line,
                message: format!("duplicate rule for `{}`", base.trim()),
            });
        }
        rules[idx] = Some((line, rhs.trim().to_string()));
    }
    let mut parsed_rules = Vec::with_capacity(names.len());
    for (i, slot) in rules.iter().enumerate() {
        let Some((line, rhs)) = slot else {
            return Err(DocError::Structure {
                line: 0,
                message: format!("missing rule for `{}`", names[i]),
            });
        };
        parsed_rules.push((*line, rhs.clone()));
    }

    if rational {
        let rules: Vec<(MultiPoly, MultiPoly)> = parsed_rules
            .iter()
            .map(|(line, rhs)| expr::parse_rational_expr_at(rhs, &names, *line))
            .collect::<Result<_, _>>()?;
        let system = RationalSystem::new(rules, init, output)?;
        Ok(SequenceDoc::RationalSystem { names, system })
    } else {
        let rules: Vec<MultiPoly> = parsed_rules
            .iter()
            .map(|(line, rhs)| expr::parse_expr_at(rhs, &names, *line))
            .collect::<Result<_, _>>()?;
        let system = PolySystem::new(rules, init, output)?;
        Ok(SequenceDoc::PolySystem { names, system })
    }
}

fn parse_recurrence_body(lines: &mut Lines, linear: bool) -> Result<SequenceDoc, DocError> {
    let (vline, vars) = lines.field("vars")?;
    let names = parse_names(vars, vline)?;
    let (iline, init_text) = lines.field("init")?;
    let init = parse_rat_list(init_text, iline)?;
    if init.len() != names.len() {
        return Err(DocError::Structure {
            line: iline,
            message: format!(
                "{} initial values for a window of {}",
                init.len(),
                names.len()
            ),
        });
    }
    let Some((rline, content)) = lines.next() else {
        return Err(DocError::Structure {
            line: iline + 1,
            message: "missing `next = expression` rule".to_string(),
        });
    };
    let rule_text = content
        .strip_prefix("next")
        .map(|r| r.trim_start())
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| DocError::Structure {
            line: rline,
            message: format!("expected `next = expression`, found `{content}`"),
        })?;
    expect_end(lines)?;
    let rule = expr::parse_expr_at(rule_text.trim(), &names, rline)?;

    if linear {
        if rule.total_degree().is_some_and(|d| d >= 2) {
            return Err(DocError::Structure {
                line: rline,
                message: "linear_recurrence rules must have degree at most 1".to_string(),
            });
        }
        let coeffs: Vec<Rat> = (0..names.len()).map(|i| rule.linear_coefficient(i)).collect();
        let constant = rule.constant_term();
        let recurrence = LinearRecurrence::new(coeffs, init, Some(constant))?;
        Ok(SequenceDoc::LinearRecurrence { names, recurrence })
    } else {
        let recurrence = SimpleRecurrence::new(rule, init)?;
        Ok(SequenceDoc::SimpleRecurrence { names, recurrence })
    }
}

fn parse_automaton_body(lines: &mut Lines) -> Result<SequenceDoc, DocError> {
    let (dline, dim_text) = lines.field("dim")?;
    let dim: usize = dim_text.parse().map_err(|_| DocError::Structure {
        line: dline,
        message: format!("`{dim_text}` is not a dimension"),
    })?;
    let mut matrix = Vec::with_capacity(dim);
    for _ in 0..dim {
        let (line, row_text) = lines.field("row")?;
        matrix.push(parse_rat_list(row_text, line)?);
    }
    let (iline, i_text) = lines.field("initial")?;
    let initial = parse_rat_list(i_text, iline)?;
    let (fline, f_text) = lines.field("final")?;
    let final_ = parse_rat_list(f_text, fline)?;
    expect_end(lines)?;
    let automaton = UnaryWeightedAutomaton::new(matrix, initial, final_)
        .map_err(|source| DocError::Automata { line: fline, source })?;
    if automaton.dim() != dim {
        return Err(DocError::Structure {
            line: dline,
            message: "matrix size does not match `dim`".to_string(),
        });
    }
    Ok(SequenceDoc::Automaton { automaton })
}

fn parse_wcfg_body(lines: &mut Lines) -> Result<SequenceDoc, DocError> {
    let (nline, nt_text) = lines.field("nonterminals")?;
    let names = parse_names(nt_text, nline)?;
    let (sline, start_name) = lines.field("start")?;
    let start = names
        .iter()
        .position(|n| n == start_name)
        .ok_or_else(|| DocError::Structure {
            line: sline,
            message: format!("start symbol `{start_name}` is not declared"),
        })?;
    let mut rules = Vec::new();
    let mut last_line = sline;
    for (line, content) in lines.rest() {
        last_line = line;
        let Some(rule_text) = content
            .strip_prefix("rule")
            .and_then(|r| r.strip_prefix(':'))
        else {
            return Err(DocError::Structure {
                line,
                message: format!("expected `rule: N -> a ...`, found `{content}`"),
            });
        };
        // optional trailing `: weight`
        let (body, weight) = match rule_text.rsplit_once(':') {
            Some((body, w)) => (body.trim(), parse_rat(w.trim(), line)?),
            None => (rule_text.trim(), Rat::one()),
        };
        let Some((lhs_name, rhs)) = body.split_once("->") else {
            return Err(DocError::Structure {
                line,
                message: format!("expected `N -> a ...`, found `{body}`"),
            });
        };
        let lhs = names
            .iter()
            .position(|n| n == lhs_name.trim())
            .ok_or_else(|| DocError::Structure {
                line,
                message: format!("unknown nonterminal `{}`", lhs_name.trim()),
            })?;
        let symbols: Vec<&str> = rhs.split_whitespace().collect();
        let rule = match symbols.as_slice() {
            ["a"] => WcfgRule::Terminal { lhs, weight },
            ["a", left, right] => {
                let find = |n: &str| {
                    names
                        .iter()
                        .position(|x| x == n)
                        .ok_or_else(|| DocError::Structure {
                            line,
                            message: format!("unknown nonterminal `{n}`"),
                        })
                };
                WcfgRule::Binary {
                    lhs,
                    left: find(left)?,
                    right: find(right)?,
                    weight,
                }
            }
            _ => {
                return Err(DocError::Structure {
                    line,
                    message: "rules must be `N -> a` or `N -> a N1 N2`".to_string(),
                })
            }
        };
        rules.push(rule);
    }
    let grammar = WcfgUnary::new(names.len(), start, rules).map_err(|source| {
        DocError::Automata {
            line: last_line,
            source,
        }
    })?;
    Ok(SequenceDoc::Wcfg { names, grammar })
}

/// Parse the s-expression form of quantifier-fragment expressions:
/// integers, `a/b`, `(+ e e ...)`, `(* e e ...)`, `(sum x e)`, `(prod x e)`.
pub fn parse_wmso(text: &str, line: usize) -> Result<WmsoExpr, DocError> {
    #[derive(Debug)]
    enum SToken {
        Open,
        Close,
        Atom(String),
    }
    let mut toks = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    toks.push(SToken::Atom(std::mem::take(&mut cur)));
                }
                toks.push(if c == '(' { SToken::Open } else { SToken::Close });
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    toks.push(SToken::Atom(std::mem::take(&mut cur)));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        toks.push(SToken::Atom(cur));
    }

    fn parse_one(
        toks: &[SToken],
        pos: &mut usize,
        line: usize,
    ) -> Result<WmsoExpr, DocError> {
        let err = |message: String| DocError::Structure { line, message };
        match toks.get(*pos) {
            None => Err(err("unexpected end of expression".to_string())),
            Some(SToken::Close) => Err(err("unexpected `)`".to_string())),
            Some(SToken::Atom(a)) => {
                *pos += 1;
                let c = a
                    .parse::<Rat>()
                    .map_err(|_| err(format!("`{a}` is not a rational constant")))?;
                Ok(WmsoExpr::Const(c))
            }
            Some(SToken::Open) => {
                *pos += 1;
                let Some(SToken::Atom(op)) = toks.get(*pos) else {
                    return Err(err("expected an operator after `(`".to_string()));
                };
                let op = op.clone();
                *pos += 1;
                let expr = match op.as_str() {
                    "+" | "*" => {
                        let mut args = Vec::new();
                        while !matches!(toks.get(*pos), Some(SToken::Close) | None) {
                            args.push(parse_one(toks, pos, line)?);
                        }
                        if args.len() < 2 {
                            return Err(err(format!("`{op}` needs at least two arguments")));
                        }
                        let mut acc = args.remove(0);
                        for a in args {
                            acc = if op == "+" {
                                WmsoExpr::Add(Box::new(acc), Box::new(a))
                            } else {
                                WmsoExpr::Mul(Box::new(acc), Box::new(a))
                            };
                        }
                        expr_close(toks, pos, line)?;
                        return Ok(acc);
                    }
                    "sum" | "prod" => {
                        let Some(SToken::Atom(var)) = toks.get(*pos) else {
                            return Err(err(format!("`{op}` needs a variable name")));
                        };
                        let var = var.clone();
                        *pos += 1;
                        let body = Box::new(parse_one(toks, pos, line)?);
                        if op == "sum" {
                            WmsoExpr::SumOver { var, body }
                        } else {
                            WmsoExpr::ProdOver { var, body }
                        }
                    }
                    other => return Err(err(format!("unknown operator `{other}`"))),
                };
                expr_close(toks, pos, line)?;
                Ok(expr)
            }
        }
    }

    fn expr_close(toks: &[SToken], pos: &mut usize, line: usize) -> Result<(), DocError> {
        match toks.get(*pos) {
            Some(SToken::Close) => {
                *pos += 1;
                Ok(())
            }
            _ => Err(DocError::Structure {
                line,
                message: "expected `)`".to_string(),
            }),
        }
    }

    let mut pos = 0;
    let expr = parse_one(&toks, &mut pos, line)?;
    if pos != toks.len() {
        return Err(DocError::Structure {
            line,
            message: "trailing content after expression".to_string(),
        });
    }
    Ok(expr)
}

fn render_wmso(e: &WmsoExpr) -> String {
    match e {
        WmsoExpr::Const(c) => c.to_string(),
        WmsoExpr::Add(a, b) => format!("(+ {} {})", render_wmso(a), render_wmso(b)),
        WmsoExpr::Mul(a, b) => format!("(* {} {})", render_wmso(a), render_wmso(b)),
        WmsoExpr::SumOver { var, body } => format!("(sum {} {})", var, render_wmso(body)),
        WmsoExpr::ProdOver { var, body } => format!("(prod {} {})", var, render_wmso(body)),
    }
}

fn render_rat_list(vs: &[Rat]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for SequenceDoc {
    /// Canonical serialization; `parse_doc` of the output reproduces an
    /// identical document.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceDoc::PolySystem { names, system } => {
                writeln!(f, "kind: poly_system")?;
                writeln!(f, "vars: {}", names.join(" "))?;
                writeln!(f, "init: {}", render_rat_list(system.init()))?;
                writeln!(f, "output: {}", names[system.output_index()])?;
                for (name, rule) in names.iter().zip(system.rules()) {
                    writeln!(f, "{}' = {}", name, rule.render(names))?;
                }
                Ok(())
            }
            SequenceDoc::RationalSystem { names, system } => {
                writeln!(f, "kind: rational_system")?;
                writeln!(f, "vars: {}", names.join(" "))?;
                writeln!(f, "init: {}", render_rat_list(system.init()))?;
                writeln!(f, "output: {}", names[system.output_index()])?;
                for (name, (num, den)) in names.iter().zip(system.rules()) {
                    if den.total_degree() == Some(0) && den.constant_term().is_one() {
                        writeln!(f, "{}' = {}", name, num.render(names))?;
                    } else {
                        writeln!(
                            f,
                            "{}' = ({}) / ({})",
                            name,
                            num.render(names),
                            den.render(names)
                        )?;
                    }
                }
                Ok(())
            }
            SequenceDoc::LinearRecurrence { names, recurrence } => {
                writeln!(f, "kind: linear_recurrence")?;
                writeln!(f, "vars: {}", names.join(" "))?;
                writeln!(f, "init: {}", render_rat_list(recurrence.init()))?;
                let mut rule = MultiPoly::zero(names.len());
                for (i, c) in recurrence.coeffs().iter().enumerate() {
                    rule = rule.add(&MultiPoly::var(names.len(), i).scale(c));
                }
                if let Some(c) = recurrence.constant() {
                    rule = rule.add(&MultiPoly::constant(names.len(), c.clone()));
                }
                writeln!(f, "next = {}", rule.render(names))
            }
            SequenceDoc::SimpleRecurrence { names, recurrence } => {
                writeln!(f, "kind: simple_recurrence")?;
                writeln!(f, "vars: {}", names.join(" "))?;
                writeln!(f, "init: {}", render_rat_list(recurrence.init()))?;
                writeln!(f, "next = {}", recurrence.rule().render(names))
            }
            SequenceDoc::Oracle { oracle } => {
                writeln!(f, "kind: oracle")?;
                writeln!(f, "name: {}", oracle.name())
            }
            SequenceDoc::Automaton { automaton } => {
                writeln!(f, "kind: automaton")?;
                writeln!(f, "dim: {}", automaton.dim())?;
                for row in automaton.matrix() {
                    writeln!(f, "row: {}", render_rat_list(row))?;
                }
                writeln!(f, "initial: {}", render_rat_list(automaton.initial()))?;
                writeln!(f, "final: {}", render_rat_list(automaton.final_vector()))
            }
            SequenceDoc::Wcfg { names, grammar } => {
                writeln!(f, "kind: wcfg")?;
                writeln!(f, "nonterminals: {}", names.join(" "))?;
                writeln!(f, "start: {}", names[grammar.start()])?;
                for rule in grammar.rules() {
                    match rule {
                        WcfgRule::Terminal { lhs, weight } => {
                            writeln!(f, "rule: {} -> a : {}", names[*lhs], weight)?
                        }
                        WcfgRule::Binary {
                            lhs,
                            left,
                            right,
                            weight,
                        } => writeln!(
                            f,
                            "rule: {} -> a {} {} : {}",
                            names[*lhs], names[*left], names[*right], weight
                        )?,
                    }
                }
                Ok(())
            }
            SequenceDoc::Wmso { expr } => {
                writeln!(f, "kind: wmso")?;
                writeln!(f, "expr: {}", render_wmso(expr))
            }
        }
    }
}

#[cfg(test)]
mod tests;
