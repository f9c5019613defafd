//! The `.wsbn` model format.
//!
//! ```text
//! wsbn 1
//! process vass dim=1
//! init q0 vector=(1)
//! trans q0 -> q1 on !!a delta=(-1)
//! option complete-receives dead=qdead
//! query cover state=q1 semantics=rbn
//! ```
//!
//! One directive per line, `#` starts a comment. The header must come first
//! and `process` before every other directive.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;
use wsbn::process::{is_identifier, parse_label, FiniteSpec, VassConfig, VassSpec};
use wsbn::pushdown::{PdsConfig, PushdownSpec, BOTTOM_NAME};
use wsbn::topology::{TopologyClass, MAX_ENUMERATION_ORDER};
use wsbn::Semantics;

pub const HEADER: &str = "wsbn 1";

const EPS: &str = "eps";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    UndeclaredIdentifier,
    DimensionMismatch,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::UndeclaredIdentifier => "undeclared identifier",
            DiagnosticKind::DimensionMismatch => "dimension mismatch",
        })
    }
}

/// A positioned model error with a one-line remedy.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {message}\n  help: {remedy}")]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub remedy: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    fn error(self, kind: DiagnosticKind, message: impl Into<String>, remedy: impl Into<String>) -> Diagnostic {
        Diagnostic {
            kind,
            line: self.line,
            column: self.column,
            message: message.into(),
            remedy: remedy.into(),
        }
    }

    fn syntax(self, message: impl Into<String>, remedy: impl Into<String>) -> Diagnostic {
        self.error(DiagnosticKind::Syntax, message, remedy)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProcessDecl {
    Finite,
    Vass { dim: usize },
    Pushdown { stack: Vec<String> },
}

impl ProcessDecl {
    fn dim(&self) -> Option<usize> {
        match self {
            ProcessDecl::Finite => Some(0),
            ProcessDecl::Vass { dim } => Some(*dim),
            ProcessDecl::Pushdown { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitDecl {
    pub pos: Pos,
    pub state: String,
    pub vector: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransDecl {
    pub pos: Pos,
    pub source: String,
    pub target: String,
    /// `!!a` or `??a`.
    pub label: String,
    pub delta: Option<Vec<i64>>,
    /// Stack symbol popped, `None` for `eps`.
    pub pop: Option<String>,
    /// Pushed word, top first.
    pub push: Vec<String>,
}

impl fmt::Display for TransDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} on {}", self.source, self.target, self.label)
    }
}

/// The semantics clause of a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuerySemantics {
    Rbn,
    PathBounded(usize),
    Clique,
    DiamDeg { k: usize, d: usize, n_max: usize },
}

impl QuerySemantics {
    /// The static topology class, if any.
    pub fn class(&self) -> Option<TopologyClass> {
        match *self {
            QuerySemantics::Rbn => None,
            QuerySemantics::PathBounded(k) => Some(TopologyClass::PathBounded(k)),
            QuerySemantics::Clique => Some(TopologyClass::Clique),
            QuerySemantics::DiamDeg { k, d, .. } => Some(TopologyClass::DiamDeg { k, d }),
        }
    }
}

impl fmt::Display for QuerySemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuerySemantics::Rbn => f.write_str("rbn"),
            QuerySemantics::PathBounded(k) => write!(f, "path-bounded:{k}"),
            QuerySemantics::Clique => f.write_str("clique"),
            QuerySemantics::DiamDeg { k, d, n_max } => write!(f, "diam-deg:{k},{d},{n_max}"),
        }
    }
}

const SEMANTICS_REMEDY: &str = "use rbn, clique, path-bounded:K or diam-deg:K,D,N";

impl std::str::FromStr for QuerySemantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let number = |t: &str| t.parse::<usize>().map_err(|_| format!("`{t}` is not a natural number"));
        match s.split_once(':') {
            None if s == "rbn" => Ok(QuerySemantics::Rbn),
            None if s == "clique" => Ok(QuerySemantics::Clique),
            Some(("path-bounded", k)) => {
                let k = number(k)?;
                if k == 0 {
                    return Err("path bound must be at least 1".into());
                }
                Ok(QuerySemantics::PathBounded(k))
            }
            Some(("diam-deg", rest)) => {
                let parts: Vec<&str> = rest.split(',').collect();
                let [k, d, n] = parts[..] else {
                    return Err(format!("`{rest}` must be three numbers K,D,N"));
                };
                let (k, d, n_max) = (number(k)?, number(d)?, number(n)?);
                if n_max > MAX_ENUMERATION_ORDER {
                    return Err(format!("N = {n_max} exceeds the enumeration limit {MAX_ENUMERATION_ORDER}"));
                }
                Ok(QuerySemantics::DiamDeg { k, d, n_max })
            }
            _ => Err(format!("unknown semantics `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryDecl {
    pub pos: Pos,
    pub state: String,
    pub vector: Option<Vec<i64>>,
    /// Stack pattern, top first; may omit the bottom symbol.
    pub stack: Option<Vec<String>>,
    pub semantics: QuerySemantics,
    pub max_basis: Option<usize>,
    pub max_iters: Option<usize>,
}

/// A parsed and validated model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFile {
    pub process: ProcessDecl,
    pub inits: Vec<InitDecl>,
    pub transitions: Vec<TransDecl>,
    pub complete_receives: Option<String>,
    pub queries: Vec<QueryDecl>,
}

struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

impl Token<'_> {
    /// Position of the value in a `key=value` token.
    fn value_pos(&self) -> Pos {
        let offset = self.text.find('=').map_or(0, |i| self.text[..=i].chars().count());
        Pos {
            line: self.pos.line,
            column: self.pos.column + offset,
        }
    }
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token<'_>>, Diagnostic> {
    let column = |byte: usize| line[..byte].chars().count() + 1;
    let pos = |byte: usize| Pos {
        line: line_no,
        column: column(byte),
    };
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    let mut open: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        match ch {
            '(' => {
                if open.is_some() {
                    return Err(pos(i).syntax("nested `(`", "vectors are flat lists such as (1,0,2)"));
                }
                start.get_or_insert(i);
                open = Some(i);
            }
            ')' => {
                if open.take().is_none() {
                    return Err(pos(i).syntax("unmatched `)`", "remove it or add the opening `(`"));
                }
            }
            c if c.is_whitespace() && open.is_none() => {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &line[s..i],
                        pos: pos(s),
                    });
                }
            }
            _ => {
                start.get_or_insert(i);
            }
        }
    }
    if let Some(i) = open {
        return Err(pos(i).syntax("unclosed `(`", "close the vector with `)`"));
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &line[s..],
            pos: pos(s),
        });
    }
    Ok(tokens)
}

/// `key=value` options of one directive.
struct Options<'t, 'a> {
    values: HashMap<&'a str, &'t Token<'a>>,
}

impl<'t, 'a> Options<'t, 'a> {
    fn parse(tokens: &'t [Token<'a>], allowed: &[&str], directive: &str) -> Result<Self, Diagnostic> {
        let mut values = HashMap::new();
        for t in tokens {
            let Some((key, _)) = t.text.split_once('=') else {
                return Err(t.pos.syntax(
                    format!("unexpected `{}`", t.text),
                    format!("`{directive}` takes options of the form key=value"),
                ));
            };
            if !allowed.contains(&key) {
                return Err(t.pos.syntax(
                    format!("unknown option `{key}` for `{directive}`"),
                    format!("allowed options: {}", allowed.join(", ")),
                ));
            }
            if values.insert(key, t).is_some() {
                return Err(t.pos.syntax(format!("option `{key}` given twice"), "keep one occurrence"));
            }
        }
        Ok(Options { values })
    }

    fn get(&self, key: &str) -> Option<(&'a str, Pos)> {
        self.values.get(key).map(|t| {
            let value = t.text.split_once('=').map_or("", |(_, v)| v);
            (value, t.value_pos())
        })
    }
}

fn identifier(text: &str, pos: Pos, what: &str) -> Result<String, Diagnostic> {
    if is_identifier(text) {
        Ok(text.to_owned())
    } else {
        Err(pos.syntax(
            format!("`{text}` is not a valid {what} name"),
            "names start with a letter or `_` and continue with letters, digits, `_` or `'`",
        ))
    }
}

fn vector(text: &str, pos: Pos) -> Result<Vec<i64>, Diagnostic> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| pos.syntax(format!("`{text}` is not a vector"), "write vectors as (n,...), e.g. (1,0)"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .ok()
                .filter(|v| v.unsigned_abs() <= u64::from(u32::MAX))
                .ok_or_else(|| pos.syntax(format!("`{}` is not an integer", x.trim()), "vector entries are integers"))
        })
        .collect()
}

fn natural(text: &str, pos: Pos, what: &str) -> Result<usize, Diagnostic> {
    text.parse::<usize>()
        .map_err(|_| pos.syntax(format!("{what} `{text}` is not a natural number"), "use a value such as 1000"))
}

fn word(text: &str) -> Vec<String> {
    if text == EPS {
        Vec::new()
    } else {
        text.split('.').map(str::to_owned).collect()
    }
}

#[derive(Default)]
struct Parser {
    process: Option<ProcessDecl>,
    inits: Vec<InitDecl>,
    transitions: Vec<TransDecl>,
    complete_receives: Option<(Pos, String)>,
    queries: Vec<QueryDecl>,
    /// First mention of every state.
    states: HashMap<String, Pos>,
}

impl Parser {
    fn process(&self, pos: Pos, directive: &str) -> Result<&ProcessDecl, Diagnostic> {
        self.process.as_ref().ok_or_else(|| {
            pos.syntax(
                format!("`{directive}` before the process declaration"),
                "declare `process finite`, `process vass dim=D` or `process pushdown stack=...` first",
            )
        })
    }

    fn mention(&mut self, state: &str, pos: Pos) {
        self.states.entry(state.to_owned()).or_insert(pos);
    }

    fn directive(&mut self, tokens: &[Token<'_>]) -> Result<(), Diagnostic> {
        let head = &tokens[0];
        match head.text {
            "process" => self.process_line(tokens),
            "init" => self.init_line(tokens),
            "trans" => self.trans_line(tokens),
            "option" => self.option_line(tokens),
            "query" => self.query_line(tokens),
            "wsbn" => Err(head.pos.syntax("repeated header", "the `wsbn 1` header appears once, on the first line")),
            other => Err(head.pos.syntax(
                format!("unknown directive `{other}`"),
                "lines start with process, init, trans, option or query",
            )),
        }
    }

    fn process_line(&mut self, tokens: &[Token<'_>]) -> Result<(), Diagnostic> {
        let head = &tokens[0];
        if self.process.is_some() {
            return Err(head.pos.syntax("second process declaration", "a model file declares exactly one process"));
        }
        let Some(kind) = tokens.get(1) else {
            return Err(head.pos.syntax("missing process kind", "write `process finite`, `process vass dim=D` or `process pushdown stack=A,B`"));
        };
        let decl = match kind.text {
            "finite" => {
                Options::parse(&tokens[2..], &[], "process finite")?;
                ProcessDecl::Finite
            }
            "vass" => {
                let opts = Options::parse(&tokens[2..], &["dim"], "process vass")?;
                let (dim, pos) = opts
                    .get("dim")
                    .ok_or_else(|| kind.pos.syntax("missing `dim=`", "write e.g. `process vass dim=1`"))?;
                let dim = natural(dim, pos, "dimension")?;
                if dim == 0 {
                    return Err(pos.syntax("VASS dimension must be positive", "use `process finite` for processes without counters"));
                }
                ProcessDecl::Vass { dim }
            }
            "pushdown" => {
                let opts = Options::parse(&tokens[2..], &["stack"], "process pushdown")?;
                let (list, pos) = opts
                    .get("stack")
                    .ok_or_else(|| kind.pos.syntax("missing `stack=`", "write e.g. `process pushdown stack=A,B`"))?;
                let mut stack: Vec<String> = Vec::new();
                for s in list.split(',').filter(|s| !s.is_empty()) {
                    let s = identifier(s, pos, "stack symbol")?;
                    if s == BOTTOM_NAME || s == EPS {
                        return Err(pos.syntax(format!("`{s}` is reserved"), "choose another stack symbol name"));
                    }
                    if stack.contains(&s) {
                        return Err(pos.syntax(format!("stack symbol `{s}` listed twice"), "list each symbol once"));
                    }
                    stack.push(s);
                }
                ProcessDecl::Pushdown { stack }
            }
            other => {
                return Err(kind.pos.syntax(format!("unknown process kind `{other}`"), "use finite, vass or pushdown"));
            }
        };
        self.process = Some(decl);
        Ok(())
    }

    fn check_dim(&self, v: &[i64], pos: Pos, what: &str) -> Result<(), Diagnostic> {
        if let Some(dim) = self.process.as_ref().and_then(ProcessDecl::dim) {
            if v.len() != dim {
                return Err(pos.error(
                    DiagnosticKind::DimensionMismatch,
                    format!("{what} has {} entries, expected {dim}", v.len()),
                    format!("the process has dimension {dim}; give one entry per counter"),
                ));
            }
        }
        Ok(())
    }

    fn natural_vector(&self, text: &str, pos: Pos, what: &str) -> Result<Vec<i64>, Diagnostic> {
        if matches!(self.process, Some(ProcessDecl::Pushdown { .. })) {
            return Err(pos.syntax("pushdown processes have no counters", "remove the vector; use stack= for stack contents"));
        }
        let v = vector(text, pos)?;
        if v.iter().any(|&x| x < 0) {
            return Err(pos.syntax(format!("{what} has a negative entry"), "counter values are natural numbers"));
        }
        self.check_dim(&v, pos, what)?;
        Ok(v)
    }

    fn init_line(&mut self, tokens: &[Token<'_>]) -> Result<(), Diagnostic> {
        let head = &tokens[0];
        self.process(head.pos, "init")?;
        let Some(state) = tokens.get(1) else {
            return Err(head.pos.syntax("missing state", "write `init <state> [vector=(n,...)]`"));
        };
        let name = identifier(state.text, state.pos, "state")?;
        let opts = Options::parse(&tokens[2..], &["vector"], "init")?;
        let vector = match opts.get("vector") {
            Some((text, pos)) => Some(self.natural_vector(text, pos, &format!("initial vector of `{name}`"))?),
            None => None,
        };
        self.mention(&name, state.pos);
        self.inits.push(InitDecl {
            pos: head.pos,
            state: name,
            vector,
        });
        Ok(())
    }

    fn stack_symbol(&self, name: &str, pos: Pos, allow_bottom: bool) -> Result<(), Diagnostic> {
        let Some(ProcessDecl::Pushdown { stack }) = &self.process else {
            return Ok(());
        };
        if name == BOTTOM_NAME {
            return if allow_bottom {
                Ok(())
            } else {
                Err(pos.syntax("the bottom symbol is never pushed or popped", "use a declared stack symbol"))
            };
        }
        if stack.iter().any(|s| s == name) {
            Ok(())
        } else {
            Err(pos.error(
                DiagnosticKind::UndeclaredIdentifier,
                format!("stack symbol `{name}` is not declared"),
                format!("add `{name}` to the `stack=` list of the process"),
            ))
        }
    }

    fn trans_line(&mut self, tokens: &[Token<'_>]) -> Result<(), Diagnostic> {
        let head = &tokens[0];
        let process = self.process(head.pos, "trans")?.clone();
        let shape = "write `trans <src> -> <dst> on !!a|??a [options]`";
        if tokens.len() < 6 {
            return Err(head.pos.syntax("incomplete transition", shape));
        }
        if tokens[2].text != "->" {
            return Err(tokens[2].pos.syntax(format!("expected `->`, found `{}`", tokens[2].text), shape));
        }
        if tokens[4].text != "on" {
            return Err(tokens[4].pos.syntax(format!("expected `on`, found `{}`", tokens[4].text), shape));
        }
        let source = identifier(tokens[1].text, tokens[1].pos, "state")?;
        let target = identifier(tokens[3].text, tokens[3].pos, "state")?;
        let label = tokens[5].text;
        if parse_label(label).is_none() {
            return Err(tokens[5].pos.syntax(format!("malformed label `{label}`"), "labels are !!letter (broadcast) or ??letter (receive)"));
        }
        let mut decl = TransDecl {
            pos: head.pos,
            source,
            target,
            label: label.to_owned(),
            delta: None,
            pop: None,
            push: Vec::new(),
        };
        match process {
            ProcessDecl::Finite | ProcessDecl::Vass { .. } => {
                let opts = Options::parse(&tokens[6..], &["delta"], "trans")?;
                if let Some((text, pos)) = opts.get("delta") {
                    let delta = vector(text, pos)?;
                    self.check_dim(&delta, pos, &format!("delta of transition `{decl}`"))?;
                    decl.delta = Some(delta);
                } else if let Some(dim @ 1..) = process.dim() {
                    return Err(head.pos.error(
                        DiagnosticKind::DimensionMismatch,
                        format!("transition `{decl}` has no delta"),
                        format!("add `delta=(...)` with {dim} entries"),
                    ));
                }
            }
            ProcessDecl::Pushdown { .. } => {
                let opts = Options::parse(&tokens[6..], &["pre", "push"], "trans")?;
                if let Some((text, pos)) = opts.get("pre") {
                    if text != EPS {
                        self.stack_symbol(text, pos, false)?;
                        decl.pop = Some(text.to_owned());
                    }
                }
                if let Some((text, pos)) = opts.get("push") {
                    let push = word(text);
                    for s in &push {
                        self.stack_symbol(s, pos, false)?;
                    }
                    decl.push = push;
                }
            }
        }
        self.mention(&decl.source.clone(), tokens[1].pos);
        self.mention(&decl.target.clone(), tokens[3].pos);
        self.transitions.push(decl);
        Ok(())
    }

    fn option_line(&mut self, tokens: &[Token<'_>]) -> Result<(), Diagnostic> {
        let head = &tokens[0];
        let process = self.process(head.pos, "option")?;
        let Some(name) = tokens.get(1) else {
            return Err(head.pos.syntax("missing option name", "write `option complete-receives dead=<state>`"));
        };
        if name.text != "complete-receives" {
            return Err(name.pos.syntax(format!("unknown option `{}`", name.text), "the only option is complete-receives"));
        }
        if matches!(process, ProcessDecl::Pushdown { .. }) {
            return Err(name.pos.syntax(
                "receive completion applies to finite and VASS processes",
                "remove the option; pushdown models are queried under rbn only",
            ));
        }
        if self.complete_receives.is_some() {
            return Err(name.pos.syntax("receive completion requested twice", "keep one occurrence"));
        }
        let opts = Options::parse(&tokens[2..], &["dead"], "option complete-receives")?;
        let (dead, pos) = opts
            .get("dead")
            .ok_or_else(|| name.pos.syntax("missing `dead=`", "name the dead state, e.g. dead=qdead"))?;
        let dead = identifier(dead, pos, "state")?;
        self.mention(&dead, pos);
        self.complete_receives = Some((pos, dead));
        Ok(())
    }

    fn query_line(&mut self, tokens: &[Token<'_>]) -> Result<(), Diagnostic> {
        let head = &tokens[0];
        let process = self.process(head.pos, "query")?.clone();
        match tokens.get(1) {
            Some(t) if t.text == "cover" => {}
            Some(t) => return Err(t.pos.syntax(format!("unknown query kind `{}`", t.text), "the only query kind is `cover`")),
            None => return Err(head.pos.syntax("missing query kind", "write `query cover state=<state> semantics=...`")),
        }
        let opts = Options::parse(
            &tokens[2..],
            &["state", "vector", "stack", "semantics", "max-basis", "max-iters"],
            "query cover",
        )?;
        let (state, state_pos) = opts
            .get("state")
            .ok_or_else(|| head.pos.syntax("missing `state=`", "name the state to cover, e.g. state=q4"))?;
        let state = identifier(state, state_pos, "state")?;
        let vector = match opts.get("vector") {
            Some((text, pos)) => Some(self.natural_vector(text, pos, "target vector")?),
            None => None,
        };
        let stack = match opts.get("stack") {
            Some((text, pos)) => {
                if !matches!(process, ProcessDecl::Pushdown { .. }) {
                    return Err(pos.syntax("only pushdown targets have a stack", "remove `stack=`"));
                }
                let w = word(text);
                for (i, s) in w.iter().enumerate() {
                    self.stack_symbol(s, pos, i + 1 == w.len())?;
                }
                Some(w)
            }
            None => None,
        };
        let (semantics, sem_pos) = opts
            .get("semantics")
            .ok_or_else(|| head.pos.syntax("missing `semantics=`", SEMANTICS_REMEDY))?;
        let semantics: QuerySemantics = semantics.parse().map_err(|m: String| sem_pos.syntax(m, SEMANTICS_REMEDY))?;
        if matches!(process, ProcessDecl::Pushdown { .. }) && semantics != QuerySemantics::Rbn {
            return Err(sem_pos.syntax(
                "static semantics need a well-quasi-ordered process; the stack prefix order is not one",
                "use semantics=rbn for pushdown processes",
            ));
        }
        let limit = |key: &str| -> Result<Option<usize>, Diagnostic> {
            opts.get(key).map(|(t, p)| natural(t, p, key)).transpose()
        };
        let max_basis = limit("max-basis")?;
        let max_iters = limit("max-iters")?;
        self.queries.push(QueryDecl {
            pos: Pos {
                line: head.pos.line,
                column: state_pos.column,
            },
            state,
            vector,
            stack,
            semantics,
            max_basis,
            max_iters,
        });
        Ok(())
    }

    fn finish(self, last_line: usize) -> Result<ModelFile, Diagnostic> {
        let end = Pos {
            line: last_line.max(1),
            column: 1,
        };
        let process = self
            .process
            .ok_or_else(|| end.syntax("no process declared", "add `process finite`, `process vass dim=D` or `process pushdown stack=...`"))?;
        if self.inits.is_empty() {
            return Err(end.syntax("no initial state declared", "add `init <state>`"));
        }
        if self.queries.is_empty() {
            return Err(end.syntax("no query declared", "add `query cover state=<state> semantics=rbn`"));
        }
        for q in &self.queries {
            if !self.states.contains_key(&q.state) {
                return Err(q.pos.error(
                    DiagnosticKind::UndeclaredIdentifier,
                    format!("state `{}` is not declared", q.state),
                    "use a state that appears in an init or trans line",
                ));
            }
        }
        Ok(ModelFile {
            process,
            inits: self.inits,
            transitions: self.transitions,
            complete_receives: self.complete_receives.map(|(_, s)| s),
            queries: self.queries,
        })
    }
}

/// Parses and validates a model. Every input yields a model or a positioned
/// diagnostic.
pub fn parse_model(text: &str) -> Result<ModelFile, Diagnostic> {
    let mut parser = Parser::default();
    let mut header = false;
    let mut last_line = 0;
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or_default();
        let tokens = tokenize(content, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        if !header {
            let texts: Vec<&str> = tokens.iter().map(|t| t.text).collect();
            match texts[..] {
                ["wsbn", "1"] => {}
                ["wsbn", version] => {
                    return Err(tokens[1].pos.syntax(format!("unsupported format version `{version}`"), "this tool reads `wsbn 1`"));
                }
                _ => return Err(tokens[0].pos.syntax("missing header", "start the file with `wsbn 1`")),
            }
            header = true;
            continue;
        }
        parser.directive(&tokens)?;
    }
    if !header {
        return Err(Pos { line: 1, column: 1 }.syntax("missing header", "start the file with `wsbn 1`"));
    }
    parser.finish(last_line)
}

/// Like [`parse_model`], for raw bytes that may not be UTF-8.
pub fn parse_model_bytes(bytes: &[u8]) -> Result<ModelFile, Diagnostic> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_model(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let column = String::from_utf8_lossy(&valid[line_start..]).chars().count() + 1;
            Err(Pos { line, column }.syntax("invalid UTF-8", "save the model as UTF-8 text"))
        }
    }
}

/// A compiled process.
#[derive(Debug, Clone)]
pub enum Process {
    Vass(VassSpec),
    Pushdown(PushdownSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Vass(VassConfig),
    Pushdown(PdsConfig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub line: usize,
    pub target: Target,
    /// The target as written back by the process.
    pub target_text: String,
    pub semantics: QuerySemantics,
    pub max_basis: Option<usize>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub process: Process,
    pub queries: Vec<Query>,
}

fn model_error(e: impl fmt::Display) -> Diagnostic {
    Pos { line: 1, column: 1 }.syntax(e.to_string(), "check the process declaration")
}

impl ModelFile {
    /// Builds the process and targets.
    pub fn compile(&self) -> Result<Model, Diagnostic> {
        let process = match &self.process {
            ProcessDecl::Finite => {
                let mut f = FiniteSpec::new();
                for i in &self.inits {
                    f = f.initial(&i.state);
                }
                for t in &self.transitions {
                    f = f.transition(&t.source, &t.label, &t.target);
                }
                Process::Vass(self.completed(f.into_vass().map_err(model_error)?)?)
            }
            ProcessDecl::Vass { dim } => {
                let mut b = VassSpec::builder(*dim);
                for i in &self.inits {
                    b.add_initial(&i.state, i.vector.as_deref().unwrap_or(&vec![0; *dim]));
                }
                for t in &self.transitions {
                    b.add_transition(&t.source, &t.label, t.delta.as_deref().unwrap_or_default(), &t.target);
                }
                Process::Vass(self.completed(b.build().map_err(model_error)?)?)
            }
            ProcessDecl::Pushdown { stack } => {
                let symbols: Vec<&str> = stack.iter().map(String::as_str).collect();
                let mut b = PushdownSpec::builder(&symbols);
                for i in &self.inits {
                    b.add_initial(&i.state);
                }
                for t in &self.transitions {
                    let push: Vec<&str> = t.push.iter().map(String::as_str).collect();
                    b.add_rule(&t.source, &t.label, t.pop.as_deref(), &t.target, &push);
                }
                Process::Pushdown(b.build().map_err(model_error)?)
            }
        };
        let queries = self
            .queries
            .iter()
            .map(|q| {
                let (target, target_text) = match &process {
                    Process::Vass(p) => {
                        let counters: Vec<u32> = match &q.vector {
                            Some(v) => v.iter().map(|&x| x as u32).collect(),
                            None => vec![0; p.dim()],
                        };
                        let c = p.config(&q.state, &counters);
                        let text = p.describe(&c);
                        (Target::Vass(c), text)
                    }
                    Process::Pushdown(p) => {
                        let w = q.stack.as_ref().map_or(EPS.to_owned(), |w| {
                            if w.is_empty() {
                                EPS.to_owned()
                            } else {
                                w.join(".")
                            }
                        });
                        let c = p.config(&q.state, &w);
                        let text = p.describe(&c);
                        (Target::Pushdown(c), text)
                    }
                };
                Query {
                    line: q.pos.line,
                    target,
                    target_text,
                    semantics: q.semantics,
                    max_basis: q.max_basis,
                    max_iters: q.max_iters,
                }
            })
            .collect();
        Ok(Model { process, queries })
    }

    fn completed(&self, spec: VassSpec) -> Result<VassSpec, Diagnostic> {
        match &self.complete_receives {
            Some(dead) => spec.complete_receives(dead).map_err(model_error),
            None => Ok(spec),
        }
    }
}

/// Parses, validates and compiles a model.
pub fn load_model(text: &str) -> Result<Model, Diagnostic> {
    parse_model(text)?.compile()
}
