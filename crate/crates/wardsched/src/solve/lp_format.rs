//! Reading and writing constraint systems as LP-format text.
//!
//! The dialect is the widely shared one: a `Minimize`/`Maximize` line, a
//! `Subject To` block of named rows, then optional `Bounds`, `Generals`
//! and `Binaries` sections closed by `End`. Comments run from `\` to the
//! end of the line. The writer emits only what the parser (and the usual
//! external engines) accept, so a system survives a round trip through
//! text unchanged.
//!
//! Variable and row names are restricted to `[A-Za-z0-9_.]` starting
//! with a letter or underscore; section keywords are only recognized in
//! keyword position, but a variable literally named `bounds`, `end`,
//! etc. is still asking for trouble and the builders here never produce
//! one.

use thiserror::Error;

use crate::linear::{ConstraintSystem, Relation, VarKind};
use crate::num::Scalar;

/// Parse failure with the 1-based source line it occurred on.
#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct LpParseError {
    pub line: usize,
    pub message: String,
}

/// A parsed LP file: the system always minimizes, with the original
/// sense and any constant objective term carried alongside.
#[derive(Debug)]
pub struct ParsedLp<T> {
    pub system: ConstraintSystem<T>,
    /// Whether the source asked to maximize (the stored objective is
    /// negated in that case).
    pub maximize: bool,
    /// Constant term on the source objective, in the source's sense.
    pub offset: T,
}

impl<T: Scalar> ParsedLp<T> {
    /// Translate an optimal value of the stored (minimizing) system back
    /// into the source file's objective.
    pub fn original_objective(&self, minimized: T) -> T {
        if self.maximize {
            self.offset - minimized
        } else {
            self.offset + minimized
        }
    }
}

fn name_is_writable(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn push_wrapped(out: &mut String, prefix: &str, pieces: &[String]) {
    out.push_str(prefix);
    let mut width = prefix.len();
    for piece in pieces {
        if width + 1 + piece.len() > 76 && width > 4 {
            out.push_str("\n   ");
            width = 3;
        }
        out.push(' ');
        out.push_str(piece);
        width += 1 + piece.len();
    }
    out.push('\n');
}

fn expression_pieces<T: Scalar>(terms: impl Iterator<Item = (String, T)>) -> Vec<String> {
    let mut pieces = Vec::new();
    for (i, (name, c)) in terms.enumerate() {
        let mag = c.abs();
        let piece = if i == 0 {
            if c < T::zero() {
                format!("- {mag} {name}")
            } else {
                format!("{mag} {name}")
            }
        } else if c < T::zero() {
            format!("- {mag} {name}")
        } else {
            format!("+ {mag} {name}")
        };
        pieces.push(piece);
    }
    pieces
}

/// Render `sys` as LP-format text.
pub fn write_lp<T: Scalar>(sys: &ConstraintSystem<T>) -> String {
    for var in sys.vars() {
        assert!(
            name_is_writable(&var.name),
            "variable name {:?} is not LP-safe",
            var.name
        );
    }
    for con in sys.cons() {
        assert!(
            name_is_writable(&con.name),
            "constraint name {:?} is not LP-safe",
            con.name
        );
    }

    let mut out = String::new();
    out.push_str("Minimize\n");
    let obj_terms = sys
        .vars()
        .iter()
        .filter(|v| v.objective != T::zero())
        .map(|v| (v.name.clone(), v.objective));
    push_wrapped(&mut out, " obj:", &expression_pieces(obj_terms));

    out.push_str("Subject To\n");
    for con in sys.cons() {
        let terms = con
            .terms
            .iter()
            .map(|&(v, c)| (sys.var(v).name.clone(), c));
        let mut pieces = expression_pieces(terms);
        let rel = match con.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        pieces.push(rel.to_string());
        pieces.push(format!("{}", con.rhs));
        push_wrapped(&mut out, &format!(" {}:", con.name), &pieces);
    }

    let mut bounds = Vec::new();
    for var in sys.vars() {
        let (def_lo, def_hi) = match var.kind {
            VarKind::Binary => (T::zero(), T::one()),
            _ => (T::zero(), T::infinity()),
        };
        if var.lower == def_lo && var.upper == def_hi {
            continue;
        }
        let line = if var.lower == T::neg_infinity() && var.upper == T::infinity() {
            format!(" {} free", var.name)
        } else if var.upper == T::infinity() {
            format!(" {} >= {}", var.name, var.lower)
        } else if var.lower == T::neg_infinity() {
            format!(" -inf <= {} <= {}", var.name, var.upper)
        } else {
            format!(" {} <= {} <= {}", var.lower, var.name, var.upper)
        };
        bounds.push(line);
    }
    if !bounds.is_empty() {
        out.push_str("Bounds\n");
        for line in bounds {
            out.push_str(&line);
            out.push('\n');
        }
    }

    let generals: Vec<String> = sys
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .map(|v| v.name.clone())
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        push_wrapped(&mut out, "", &generals);
    }
    let binaries: Vec<String> = sys
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.clone())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        push_wrapped(&mut out, "", &binaries);
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone)]
struct Tok {
    line: usize,
    text: String,
}

fn tokenize(text: &str) -> Result<Vec<Tok>, LpParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = match raw.find('\\') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c == ':' || c == '+' || c == '-' {
                out.push(Tok {
                    line,
                    text: c.to_string(),
                });
                i += 1;
            } else if matches!(c, '<' | '>' | '=') {
                let mut t = String::new();
                while i < chars.len() && matches!(chars[i], '<' | '>' | '=') {
                    t.push(chars[i]);
                    i += 1;
                }
                out.push(Tok { line, text: t });
            } else if c.is_ascii_digit() || c == '.' {
                let mut t = String::new();
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    t.push(chars[i]);
                    i += 1;
                }
                // Exponent suffix, only when digits follow it.
                if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                    let mut k = i + 1;
                    let mut exp = String::from(chars[i]);
                    if k < chars.len() && matches!(chars[k], '+' | '-') {
                        exp.push(chars[k]);
                        k += 1;
                    }
                    let digits_at = k;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        exp.push(chars[k]);
                        k += 1;
                    }
                    if k > digits_at {
                        t.push_str(&exp);
                        i = k;
                    }
                }
                out.push(Tok { line, text: t });
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut t = String::new();
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.')
                {
                    t.push(chars[i]);
                    i += 1;
                }
                out.push(Tok { line, text: t });
            } else {
                return Err(LpParseError {
                    line,
                    message: format!("unexpected character {c:?}"),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Draft {
    kind: Option<VarKind>,
    lower: Option<f64>,
    upper: Option<f64>,
    objective: f64,
}

struct Row {
    name: Option<String>,
    terms: Vec<(usize, f64)>,
    relation: Relation,
    rhs: f64,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    names: std::collections::BTreeMap<String, usize>,
    order: Vec<String>,
    drafts: Vec<Draft>,
}

const ROW_SECTION: &[&str] = &["subject", "such", "st", "s.t."];
const TAIL_SECTION: &[&str] = &[
    "bounds", "bound", "generals", "general", "gen", "integers", "integer", "int", "binaries",
    "binary", "bin", "end",
];

fn is_relop(t: &str) -> bool {
    matches!(t, "<=" | "=<" | "<" | ">=" | "=>" | ">" | "=")
}

fn is_number(t: &str) -> bool {
    t.starts_with(|c: char| c.is_ascii_digit() || c == '.')
}

fn is_inf(t: &str) -> bool {
    matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity")
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn last_line(&self) -> usize {
        self.toks.last().map_or(1, |t| t.line)
    }

    fn fail<V>(&self, line: usize, message: impl Into<String>) -> Result<V, LpParseError> {
        Err(LpParseError {
            line,
            message: message.into(),
        })
    }

    fn unexpected_end<V>(&self, what: &str) -> Result<V, LpParseError> {
        self.fail(self.last_line(), format!("unexpected end of file, wanted {what}"))
    }

    fn draft_index(&mut self, name: &str) -> usize {
        if let Some(&i) = self.names.get(name) {
            return i;
        }
        let i = self.drafts.len();
        self.names.insert(name.to_string(), i);
        self.order.push(name.to_string());
        self.drafts.push(Draft::default());
        i
    }

    /// `[sign] (number | inf)` — used for right-hand sides and bounds.
    fn parse_value(&mut self) -> Result<f64, LpParseError> {
        let mut sign = 1.0;
        loop {
            let Some(t) = self.next() else {
                return self.unexpected_end("a number");
            };
            match t.text.as_str() {
                "+" => {}
                "-" => sign = -sign,
                s if is_number(s) => {
                    let v: f64 = s.parse().map_err(|_| LpParseError {
                        line: t.line,
                        message: format!("bad number {s:?}"),
                    })?;
                    return Ok(sign * v);
                }
                s if is_inf(s) => return Ok(sign * f64::INFINITY),
                s => {
                    return self.fail(t.line, format!("expected a number, found {s:?}"));
                }
            }
        }
    }

    /// Linear expression, stopping at a relation operator or any token
    /// for which `stop` returns true. Returns terms plus any constant.
    fn parse_expression(
        &mut self,
        stop: impl Fn(&str) -> bool,
    ) -> Result<(Vec<(usize, f64)>, f64), LpParseError> {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        let mut constant = 0.0;
        while let Some(t) = self.peek() {
            let lower = t.text.to_ascii_lowercase();
            if is_relop(&t.text) || stop(&lower) {
                break;
            }
            let mut sign = 1.0;
            loop {
                let Some(t) = self.peek() else {
                    return self.unexpected_end("an expression term");
                };
                match t.text.as_str() {
                    "+" => {
                        self.next();
                    }
                    "-" => {
                        sign = -sign;
                        self.next();
                    }
                    _ => break,
                }
            }
            let Some(t) = self.next() else {
                return self.unexpected_end("an expression term");
            };
            if is_number(&t.text) {
                let v: f64 = t.text.parse().map_err(|_| LpParseError {
                    line: t.line,
                    message: format!("bad number {:?}", t.text),
                })?;
                let coef = sign * v;
                let takes_name = self
                    .peek()
                    .map(|n| {
                        let l = n.text.to_ascii_lowercase();
                        !is_relop(&n.text)
                            && !is_number(&n.text)
                            && !stop(&l)
                            && n.text != "+"
                            && n.text != "-"
                            && n.text != ":"
                    })
                    .unwrap_or(false);
                if takes_name {
                    let name = self.next().expect("peeked");
                    let idx = self.draft_index(&name.text);
                    terms.push((idx, coef));
                } else {
                    constant += coef;
                }
            } else if t.text.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
                let idx = self.draft_index(&t.text);
                terms.push((idx, sign));
            } else {
                return self.fail(t.line, format!("unexpected token {:?}", t.text));
            }
        }
        Ok((terms, constant))
    }
}

/// Parse LP-format text into a minimizing constraint system.
pub fn parse_lp<T: Scalar>(text: &str) -> Result<ParsedLp<T>, LpParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        names: Default::default(),
        order: Vec::new(),
        drafts: Vec::new(),
    };

    // Sense line.
    let Some(t) = p.next() else {
        return Err(LpParseError {
            line: 1,
            message: "empty file".into(),
        });
    };
    let maximize = match t.text.to_ascii_lowercase().as_str() {
        "minimize" | "minimum" | "min" => false,
        "maximize" | "maximum" | "max" => true,
        other => {
            return p.fail(t.line, format!("expected Minimize or Maximize, found {other:?}"));
        }
    };

    // Optional objective label.
    if p.peek().is_some()
        && p.toks.get(p.pos + 1).is_some_and(|n| n.text == ":")
    {
        p.next();
        p.next();
    }
    let (obj_terms, offset) =
        p.parse_expression(|t| ROW_SECTION.contains(&t) || TAIL_SECTION.contains(&t))?;
    for (idx, c) in obj_terms {
        p.drafts[idx].objective += c;
    }

    // "Subject To" (or an alias) introduces the rows.
    match p.next() {
        Some(t) => match t.text.to_ascii_lowercase().as_str() {
            "subject" | "such" => {
                let Some(n) = p.next() else {
                    return p.unexpected_end("To/That");
                };
                let l = n.text.to_ascii_lowercase();
                if l != "to" && l != "that" {
                    return p.fail(n.line, format!("expected To/That, found {:?}", n.text));
                }
            }
            "st" | "s.t." => {}
            other => {
                return p.fail(t.line, format!("expected Subject To, found {other:?}"));
            }
        },
        None => return p.unexpected_end("Subject To"),
    }

    // Rows until a tail section begins.
    let mut rows: Vec<Row> = Vec::new();
    let mut seen_names = std::collections::BTreeSet::new();
    while let Some(t) = p.peek() {
        if TAIL_SECTION.contains(&t.text.to_ascii_lowercase().as_str()) {
            break;
        }
        let mut label = None;
        if p.toks.get(p.pos + 1).is_some_and(|n| n.text == ":") {
            let t = p.next().expect("peeked");
            if !seen_names.insert(t.text.clone()) {
                return p.fail(t.line, format!("duplicate constraint name {:?}", t.text));
            }
            label = Some(t.text);
            p.next();
        }
        let (terms, constant) = p.parse_expression(|t| TAIL_SECTION.contains(&t))?;
        let Some(op) = p.next() else {
            return p.unexpected_end("a relation operator");
        };
        if !is_relop(&op.text) {
            return p.fail(op.line, format!("expected <=, >= or =, found {:?}", op.text));
        }
        let relation = match op.text.as_str() {
            "<=" | "=<" | "<" => Relation::Le,
            ">=" | "=>" | ">" => Relation::Ge,
            _ => Relation::Eq,
        };
        let rhs = p.parse_value()? - constant;
        rows.push(Row {
            name: label,
            terms,
            relation,
            rhs,
        });
    }

    // Tail sections in any order.
    while let Some(t) = p.next() {
        match t.text.to_ascii_lowercase().as_str() {
            "bounds" | "bound" => while let Some(head) = p.peek() {
                let head_lower = head.text.to_ascii_lowercase();
                if TAIL_SECTION.contains(&head_lower.as_str()) {
                    break;
                }
                if is_number(&head.text) || head.text == "-" || head.text == "+" || is_inf(&head.text)
                {
                    // value <= name [<= value]
                    let v1 = p.parse_value()?;
                    let Some(op) = p.next() else {
                        return p.unexpected_end("a relation operator");
                    };
                    let le = matches!(op.text.as_str(), "<=" | "=<" | "<");
                    let ge = matches!(op.text.as_str(), ">=" | "=>" | ">");
                    if !le && !ge {
                        return p.fail(op.line, "bounds need <= or >=".to_string());
                    }
                    let Some(name) = p.next() else {
                        return p.unexpected_end("a variable name");
                    };
                    let idx = p.draft_index(&name.text);
                    if le {
                        p.drafts[idx].lower = Some(v1);
                    } else {
                        p.drafts[idx].upper = Some(v1);
                    }
                    if p.peek().is_some_and(|n| is_relop(&n.text)) {
                        let op2 = p.next().expect("peeked");
                        let le2 = matches!(op2.text.as_str(), "<=" | "=<" | "<");
                        let v2 = p.parse_value()?;
                        if le == le2 {
                            if le {
                                p.drafts[idx].upper = Some(v2);
                            } else {
                                p.drafts[idx].lower = Some(v2);
                            }
                        } else {
                            return p.fail(op2.line, "mixed directions in a bounds range".to_string());
                        }
                    }
                } else {
                    // name free | name <= v | name >= v | name = v
                    let name = p.next().expect("peeked");
                    if p.peek().is_some_and(|n| n.text.eq_ignore_ascii_case("free")) {
                        p.next();
                        let idx = p.draft_index(&name.text);
                        p.drafts[idx].lower = Some(f64::NEG_INFINITY);
                        p.drafts[idx].upper = Some(f64::INFINITY);
                        continue;
                    }
                    let Some(op) = p.next() else {
                        return p.unexpected_end("a relation operator");
                    };
                    if !is_relop(&op.text) {
                        return p.fail(
                            op.line,
                            format!("expected a bound relation, found {:?}", op.text),
                        );
                    }
                    let v = p.parse_value()?;
                    let idx = p.draft_index(&name.text);
                    match op.text.as_str() {
                        "<=" | "=<" | "<" => p.drafts[idx].upper = Some(v),
                        ">=" | "=>" | ">" => p.drafts[idx].lower = Some(v),
                        _ => {
                            p.drafts[idx].lower = Some(v);
                            p.drafts[idx].upper = Some(v);
                        }
                    }
                }
            },
            "generals" | "general" | "gen" | "integers" | "integer" | "int" => while let Some(head) = p.peek() {
                if TAIL_SECTION.contains(&head.text.to_ascii_lowercase().as_str()) {
                    break;
                }
                let name = p.next().expect("peeked");
                let idx = p.draft_index(&name.text);
                p.drafts[idx].kind = Some(VarKind::Integer);
            },
            "binaries" | "binary" | "bin" => while let Some(head) = p.peek() {
                if TAIL_SECTION.contains(&head.text.to_ascii_lowercase().as_str()) {
                    break;
                }
                let name = p.next().expect("peeked");
                let idx = p.draft_index(&name.text);
                p.drafts[idx].kind = Some(VarKind::Binary);
            },
            "end" => {
                if let Some(extra) = p.next() {
                    return p.fail(extra.line, format!("content after End: {:?}", extra.text));
                }
                break;
            }
            other => {
                return p.fail(t.line, format!("unexpected section {other:?}"));
            }
        }
    }

    // Assemble the system in first-appearance order.
    let mut sys: ConstraintSystem<T> = ConstraintSystem::new();
    let mut ids = Vec::with_capacity(p.drafts.len());
    for (i, name) in p.order.iter().enumerate() {
        let draft = &p.drafts[i];
        let kind = draft.kind.unwrap_or(VarKind::Continuous);
        let (mut lo, mut hi) = match kind {
            VarKind::Binary => (
                draft.lower.unwrap_or(0.0).max(0.0),
                draft.upper.unwrap_or(1.0).min(1.0),
            ),
            _ => (draft.lower.unwrap_or(0.0), draft.upper.unwrap_or(f64::INFINITY)),
        };
        if lo > hi {
            // An empty box is a modeling statement, not a syntax error,
            // but the system type refuses inverted bounds; pinch to an
            // explicit infeasible-but-valid pair is not possible, so
            // reject with a clear message.
            return Err(LpParseError {
                line: 1,
                message: format!("variable {name:?} has empty bounds [{lo}, {hi}]"),
            });
        }
        if kind != VarKind::Continuous {
            lo = lo.ceil();
            hi = hi.floor();
            if lo > hi {
                return Err(LpParseError {
                    line: 1,
                    message: format!("variable {name:?} has no integer value in its bounds"),
                });
            }
        }
        let id = sys.add_var(
            name.clone(),
            kind,
            T::from_f64_const(lo),
            T::from_f64_const(hi),
        );
        let sense = if maximize { -1.0 } else { 1.0 };
        sys.add_objective(id, T::from_f64_const(sense * draft.objective));
        ids.push(id);
    }
    for (i, row) in rows.into_iter().enumerate() {
        let name = row.name.unwrap_or_else(|| format!("r{i}"));
        let terms: Vec<_> = row
            .terms
            .into_iter()
            .map(|(idx, c)| (ids[idx], T::from_f64_const(c)))
            .collect();
        sys.add_con(name, terms, row.relation, T::from_f64_const(row.rhs));
    }

    Ok(ParsedLp {
        system: sys,
        maximize,
        offset: T::from_f64_const(offset),
    })
}
