//! Text formats for concepts, distributions and query logs.
//!
//! Every concept file starts with a header line naming the class and the
//! dimension; `#` starts a comment and blank lines are ignored. Variables are
//! 1-based.
//!
//! ```text
//! dnf 4            one term per line, signed variables: "1 -2" is x1 ∧ ¬x2;
//! 1 -2             a line holding just "T" is the empty (always true) term
//! -3 4
//!
//! tree 3           (var minus-subtree plus-subtree), leaves 0 / 1
//! (1 0 (3 1 0))
//!
//! dfa 3            "start s", "accept s...", then one row per state in order:
//! start 0          "s: next-on-minus next-on-plus"
//! accept 1
//! 0: 0 1
//! 1: 1 0
//!
//! junta 5          truth table bit i is the label when relevant variable k
//! relevant 2 4     is +1 exactly for the set bits k of i
//! table 0110
//!
//! poly 3 signed    "coeff: i j k" monomial lines; "coeff:" is the constant.
//! 1/2: 1           The alphabet is "signed" (values ±1, +1 is label 1)
//! -1/2: 1 3        or "01" (values 0/1)
//!
//! ptf 3 1/2        threshold on the header line, monomials as for poly
//! 1: 1 2
//! ```
//!
//! A distribution file lists atoms as `point-string probability` lines, e.g.
//! `+-+ 1/4`. The masses must sum to exactly 1.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use localq_core::concepts::{Concept, DecisionTree, Dfa, DnfFormula, Junta, Node, OutputAlphabet, SparsePoly, SparsePtf, Term};
use localq_core::cube::CubePoint;
use localq_core::distributions::{Distribution, FiniteSupport};
use localq_core::oracle::QueryRecord;
use localq_core::{ratio_str, Rational};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] localq_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

type Result<T> = std::result::Result<T, FormatError>;

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_var(tok: &str, n: usize, line: usize) -> Result<usize> {
    let v: usize = tok.parse().map_err(|_| syntax(line, format!("bad variable {tok:?}")))?;
    if v == 0 || v > n {
        return Err(syntax(line, format!("variable {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

fn parse_ratio(tok: &str, line: usize) -> Result<Rational> {
    ratio_str::parse(tok).ok_or_else(|| syntax(line, format!("bad number {tok:?}")))
}

fn parse_dim(tok: Option<&str>, line: usize) -> Result<usize> {
    tok.ok_or_else(|| syntax(line, "missing dimension"))?
        .parse()
        .map_err(|_| syntax(line, "dimension must be a non-negative integer"))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn read_concept(path: &Path) -> Result<Concept> {
    parse_concept(&read_file(path)?)
}

pub fn parse_concept(text: &str) -> Result<Concept> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "empty concept file"))?;
    let mut head = header.split_whitespace();
    let class = head.next().unwrap_or_default();
    let n = parse_dim(head.next(), hline)?;
    let extra: Vec<&str> = head.collect();
    let body: Vec<(usize, &str)> = lines.collect();
    let no_extra = |what: &str| -> Result<()> {
        if extra.is_empty() {
            Ok(())
        } else {
            Err(syntax(hline, format!("unexpected tokens after {what} header")))
        }
    };
    Ok(match class {
        "dnf" => {
            no_extra("dnf")?;
            Concept::Dnf(parse_dnf_body(n, &body)?)
        }
        "tree" => {
            no_extra("tree")?;
            Concept::Tree(parse_tree_body(n, &body)?)
        }
        "dfa" => {
            no_extra("dfa")?;
            Concept::Dfa(parse_dfa_body(n, &body)?)
        }
        "junta" => {
            no_extra("junta")?;
            Concept::Junta(parse_junta_body(n, &body)?)
        }
        "poly" => {
            let alphabet = match extra.as_slice() {
                [] | ["signed"] => OutputAlphabet::Signed,
                ["01"] => OutputAlphabet::ZeroOne,
                _ => return Err(syntax(hline, "poly alphabet must be \"signed\" or \"01\"")),
            };
            Concept::Poly(parse_poly_body(n, alphabet, &body)?)
        }
        "ptf" => {
            let [threshold] = extra.as_slice() else {
                return Err(syntax(hline, "ptf header needs exactly one threshold"));
            };
            let threshold = parse_ratio(threshold, hline)?;
            Concept::Ptf(SparsePtf::new(parse_poly_body(n, OutputAlphabet::Signed, &body)?, threshold))
        }
        other => return Err(syntax(hline, format!("unknown concept class {other:?}"))),
    })
}

fn parse_dnf_body(n: usize, body: &[(usize, &str)]) -> Result<DnfFormula> {
    let mut terms = Vec::with_capacity(body.len());
    for &(line, l) in body {
        if l == "T" {
            terms.push(Term::empty());
            continue;
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for tok in l.split_whitespace() {
            let (negated, digits) = match tok.strip_prefix('-') {
                Some(d) => (true, d),
                None => (false, tok),
            };
            let v = parse_var(digits, n, line)?;
            if negated {
                neg.push(v)
            } else {
                pos.push(v)
            }
        }
        terms.push(Term::new(pos, neg).map_err(|e| syntax(line, e.to_string()))?);
    }
    Ok(DnfFormula::new(n, terms)?)
}

fn parse_tree_body(n: usize, body: &[(usize, &str)]) -> Result<DecisionTree> {
    let mut tokens = Vec::new();
    for &(line, l) in body {
        let spaced = l.replace('(', " ( ").replace(')', " ) ");
        tokens.extend(spaced.split_whitespace().map(|t| (line, t.to_string())));
    }
    let mut pos = 0;
    let root = parse_node(&tokens, &mut pos, n)?;
    if let Some((line, t)) = tokens.get(pos) {
        return Err(syntax(*line, format!("trailing token {t:?}")));
    }
    Ok(DecisionTree::new(n, root)?)
}

fn parse_node(tokens: &[(usize, String)], pos: &mut usize, n: usize) -> Result<Node> {
    let last_line = tokens.last().map_or(1, |t| t.0);
    let (line, tok) = tokens.get(*pos).ok_or_else(|| syntax(last_line, "unexpected end of tree"))?;
    *pos += 1;
    match tok.as_str() {
        "0" => Ok(Node::leaf(false)),
        "1" => Ok(Node::leaf(true)),
        "(" => {
            let (vline, vtok) = tokens.get(*pos).ok_or_else(|| syntax(*line, "missing split variable"))?;
            let var = parse_var(vtok, n, *vline)?;
            *pos += 1;
            let minus = parse_node(tokens, pos, n)?;
            let plus = parse_node(tokens, pos, n)?;
            match tokens.get(*pos) {
                Some((_, t)) if t == ")" => {
                    *pos += 1;
                    Ok(Node::split(var, minus, plus))
                }
                Some((l, t)) => Err(syntax(*l, format!("expected ')', found {t:?}"))),
                None => Err(syntax(last_line, "missing ')'")),
            }
        }
        other => Err(syntax(*line, format!("expected a leaf or '(', found {other:?}"))),
    }
}

fn parse_dfa_body(n: usize, body: &[(usize, &str)]) -> Result<Dfa> {
    let mut start = None;
    let mut accept: Vec<usize> = Vec::new();
    let mut rows: Vec<[usize; 2]> = Vec::new();
    let num = |t: &str, line: usize| t.parse::<usize>().map_err(|_| syntax(line, format!("bad state {t:?}")));
    for &(line, l) in body {
        if let Some(rest) = l.strip_prefix("start") {
            start = Some(num(rest.trim(), line)?);
        } else if let Some(rest) = l.strip_prefix("accept") {
            for t in rest.split_whitespace() {
                accept.push(num(t, line)?);
            }
        } else if let Some((s, next)) = l.split_once(':') {
            if num(s.trim(), line)? != rows.len() {
                return Err(syntax(line, format!("expected the row of state {}", rows.len())));
            }
            let next: Vec<&str> = next.split_whitespace().collect();
            let [m, p] = next.as_slice() else {
                return Err(syntax(line, "a state row needs two successors"));
            };
            rows.push([num(m, line)?, num(p, line)?]);
        } else {
            return Err(syntax(line, format!("unrecognised dfa line {l:?}")));
        }
    }
    let start = start.ok_or_else(|| syntax(body.first().map_or(1, |b| b.0), "missing start state"))?;
    let mut accepting = vec![false; rows.len()];
    for s in accept {
        *accepting.get_mut(s).ok_or_else(|| syntax(1, format!("accepting state {s} does not exist")))? = true;
    }
    Ok(Dfa::new(start, accepting, rows, n)?)
}

fn parse_junta_body(n: usize, body: &[(usize, &str)]) -> Result<Junta> {
    let mut relevant = None;
    let mut table = None;
    for &(line, l) in body {
        if let Some(rest) = l.strip_prefix("relevant") {
            relevant = Some(rest.split_whitespace().map(|t| parse_var(t, n, line)).collect::<Result<Vec<_>>>()?);
        } else if let Some(rest) = l.strip_prefix("table") {
            let bits = rest
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(syntax(line, format!("truth table entry {c:?} is not 0 or 1"))),
                })
                .collect::<Result<Vec<_>>>()?;
            table = Some(bits);
        } else {
            return Err(syntax(line, format!("unrecognised junta line {l:?}")));
        }
    }
    let relevant = relevant.unwrap_or_default();
    let table = table.ok_or_else(|| syntax(1, "missing truth table"))?;
    Ok(Junta::new(n, relevant, table)?)
}

fn parse_poly_body(n: usize, alphabet: OutputAlphabet, body: &[(usize, &str)]) -> Result<SparsePoly> {
    let mut terms = Vec::with_capacity(body.len());
    for &(line, l) in body {
        let (c, vars) = l.split_once(':').ok_or_else(|| syntax(line, "monomial line needs \"coeff:\""))?;
        let c = parse_ratio(c, line)?;
        let vars = vars.split_whitespace().map(|t| parse_var(t, n, line)).collect::<Result<Vec<_>>>()?;
        terms.push((vars, c));
    }
    Ok(SparsePoly::new(n, alphabet, terms)?)
}

/// Writes `concept` in the format read by [`parse_concept`]. Pullbacks have no
/// text form.
pub fn write_concept(concept: &Concept) -> Option<String> {
    let mut out = String::new();
    match concept {
        Concept::Dnf(f) => {
            let _ = writeln!(out, "dnf {}", f.dim());
            for t in f.terms() {
                let lits = t.signed_literals();
                if lits.is_empty() {
                    out.push_str("T\n");
                } else {
                    let line: Vec<String> = lits.iter().map(i64::to_string).collect();
                    let _ = writeln!(out, "{}", line.join(" "));
                }
            }
        }
        Concept::Tree(t) => {
            let _ = writeln!(out, "tree {}", t.dim());
            write_node(t.root(), &mut out);
            out.push('\n');
        }
        Concept::Dfa(a) => {
            let _ = writeln!(out, "dfa {}", a.input_len());
            let _ = writeln!(out, "start {}", a.start());
            let acc: Vec<String> = (0..a.state_count()).filter(|&s| a.is_accepting(s)).map(|s| s.to_string()).collect();
            let _ = writeln!(out, "accept {}", acc.join(" "));
            for (s, [m, p]) in a.transitions().iter().enumerate() {
                let _ = writeln!(out, "{s}: {m} {p}");
            }
        }
        Concept::Junta(h) => {
            let _ = writeln!(out, "junta {}", h.dim());
            let rel: Vec<String> = h.relevant().iter().map(|v| (v + 1).to_string()).collect();
            let _ = writeln!(out, "relevant {}", rel.join(" "));
            let table: String = h.table().iter().map(|&b| if b { '1' } else { '0' }).collect();
            let _ = writeln!(out, "table {table}");
        }
        Concept::Poly(p) => {
            let alphabet = match p.alphabet() {
                OutputAlphabet::Signed => "signed",
                OutputAlphabet::ZeroOne => "01",
            };
            let _ = writeln!(out, "poly {} {alphabet}", p.dim());
            write_monomials(p, &mut out);
        }
        Concept::Ptf(f) => {
            let _ = writeln!(out, "ptf {} {}", f.dim(), f.threshold);
            write_monomials(&f.poly, &mut out);
        }
        Concept::Pullback { .. } => return None,
    }
    Some(out)
}

fn write_node(node: &Node, out: &mut String) {
    match node {
        Node::Leaf(b) => out.push(if *b { '1' } else { '0' }),
        Node::Split { var, minus, plus } => {
            let _ = write!(out, "({} ", var + 1);
            write_node(minus, out);
            out.push(' ');
            write_node(plus, out);
            out.push(')');
        }
    }
}

fn write_monomials(p: &SparsePoly, out: &mut String) {
    for (m, c) in p.monomials() {
        let _ = write!(out, "{c}:");
        for v in m {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
}

pub fn parse_support(text: &str) -> Result<FiniteSupport> {
    let mut atoms = Vec::new();
    let mut n = None;
    for (line, l) in content_lines(text) {
        let mut parts = l.split_whitespace();
        let (Some(p), Some(mass), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(syntax(line, "expected \"point probability\""));
        };
        let x: CubePoint = p.parse().map_err(|e: localq_core::Error| syntax(line, e.to_string()))?;
        if *n.get_or_insert(x.dim()) != x.dim() {
            return Err(syntax(line, "points of different dimensions"));
        }
        atoms.push((x, parse_ratio(mass, line)?));
    }
    let n = n.ok_or_else(|| syntax(1, "distribution file has no atoms"))?;
    Ok(FiniteSupport::new(n, atoms)?)
}

pub fn write_support(d: &FiniteSupport) -> String {
    d.atoms().iter().map(|(x, p)| format!("{x} {p}\n")).collect()
}

/// Parses `uniform:n`, `product:p1,...,pn` (each `p` the probability of `+1`)
/// or `file:path`.
pub fn parse_distribution(spec: &str) -> Result<Distribution> {
    let (kind, arg) = spec.split_once(':').ok_or_else(|| syntax(1, format!("bad distribution spec {spec:?}")))?;
    match kind {
        "uniform" => Ok(Distribution::UniformCube(parse_dim(Some(arg), 1)?)),
        "product" => {
            let probs = arg.split(',').map(|t| parse_ratio(t, 1)).collect::<Result<Vec<_>>>()?;
            Ok(Distribution::product(probs)?)
        }
        "file" => Ok(Distribution::FiniteSupport(parse_support(&read_file(Path::new(arg))?)?)),
        other => Err(syntax(1, format!("unknown distribution kind {other:?}"))),
    }
}

/// One JSON object per line.
pub fn write_query_log(log: &[QueryRecord], mut w: impl Write) -> std::io::Result<()> {
    for r in log {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use localq_core::cube::enumerate_cube;

    #[test]
    fn dnf_example() {
        let c = parse_concept("# comment\ndnf 3\n1 -2\nT\n").unwrap();
        let Concept::Dnf(f) = &c else { panic!() };
        assert_eq!(f.terms()[0].to_string(), "x1∧¬x2");
        assert_eq!(f.terms()[1].width(), 0);
        assert_eq!(parse_concept(&write_concept(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn tree_and_dfa_round_trip() {
        let tree = parse_concept("tree 3\n(1 0\n  (3 1 0))").unwrap();
        assert!(!tree.eval(&"+-+".parse().unwrap()).unwrap());
        assert!(tree.eval(&"+--".parse().unwrap()).unwrap());
        assert_eq!(parse_concept(&write_concept(&tree).unwrap()).unwrap(), tree);

        let dfa = parse_concept("dfa 3\nstart 0\naccept 1\n0: 0 1\n1: 1 0\n").unwrap();
        for x in enumerate_cube(3).unwrap() {
            assert_eq!(dfa.eval(&x).unwrap(), x.bits().filter(|&b| b).count() % 2 == 1);
        }
        assert_eq!(parse_concept(&write_concept(&dfa).unwrap()).unwrap(), dfa);
    }

    #[test]
    fn junta_poly_ptf_round_trip() {
        for text in [
            "junta 4\nrelevant 2 4\ntable 0110\n",
            "poly 3 signed\n1/2: 1\n1/2: 2\n1/2: 3\n-1/2: 1 2 3\n",
            "poly 2 01\n1: 1 2\n",
            "ptf 3 1/2\n1: 1 2\n-1: 3\n",
        ] {
            let c = parse_concept(text).unwrap();
            assert_eq!(parse_concept(&write_concept(&c).unwrap()).unwrap(), c, "{text}");
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_concept("dnf 2\n1 2\n1 3\n").unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        assert!(parse_concept("tree 2\n(1 0 1").is_err());
        assert!(parse_concept("dfa 2\nstart 0\n1: 0 0\n").is_err());
        assert!(parse_concept("cnf 2\n").is_err());
    }

    #[test]
    fn distribution_specs() {
        assert_eq!(parse_distribution("uniform:3").unwrap(), Distribution::UniformCube(3));
        let d = parse_distribution("product:1/2,0.25").unwrap();
        assert_eq!(d.dim(), 2);
        assert!(parse_distribution("product:3/2").is_err());
        let s = parse_support("+-+ 1/4\n--- 3/4\n").unwrap();
        assert_eq!(parse_support(&write_support(&s)).unwrap(), s);
        assert!(parse_support("+-+ 1/4\n").is_err());
    }

    #[test]
    fn query_log_lines() {
        let log = vec![QueryRecord { query: "+-+".parse().unwrap(), answer: true, dist: 1 }];
        let mut buf = Vec::new();
        write_query_log(&log, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "{\"query\":\"+-+\",\"answer\":1,\"dist\":1}\n");
    }
}
