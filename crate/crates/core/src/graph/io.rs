//! Edge-list and matrix-exchange (Matrix Market coordinate) readers.
//!
//! Edge list: a header line `n m`, then `m` lines `i j w` with 1-based
//! vertex indices (`w` defaults to 1 when omitted). Blank lines and text
//! after `#` are ignored. Every unordered pair may be listed once.
//!
//! Matrix Market: `coordinate` files with `real`, `integer` or `pattern`
//! fields and `general` or `symmetric` symmetry. A symmetric matrix `S`
//! yields `a_ij = 1` whenever `s_ij != 0` (`i != j`); a nonsymmetric or
//! rectangular `S` yields the zero-one pattern of `SᵀS` with zero diagonal.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    MatrixMarket,
}

impl GraphFormat {
    /// Guesses the format from a file extension (`.mtx` is Matrix Market).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => GraphFormat::MatrixMarket,
            _ => GraphFormat::EdgeList,
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "el" | "edge-list" | "edgelist" => Ok(GraphFormat::EdgeList),
            "mtx" | "matrix-market" | "mm" => Ok(GraphFormat::MatrixMarket),
            other => Err(Error::InvalidArgument(format!("unknown graph format '{other}'"))),
        }
    }
}

pub fn load_graph<T: Scalar>(path: impl AsRef<Path>, format: GraphFormat) -> Result<WeightedGraph<T>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    match format {
        GraphFormat::EdgeList => parse_edge_list(&text),
        GraphFormat::MatrixMarket => parse_matrix_market(&text),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<N: FromStr>(tok: &str, line: usize, what: &str) -> Result<N> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

fn parse_weight<T: Scalar>(tok: &str, line: usize) -> Result<T> {
    let v: f64 = parse_num(tok, line, "weight")?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite weight '{tok}'")));
    }
    Ok(T::of(v))
}

pub fn parse_edge_list<T: Scalar>(text: &str) -> Result<WeightedGraph<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "missing header 'n m'"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(hline, "header must be 'n m'"));
    }
    let n: usize = parse_num(toks[0], hline, "vertex count")?;
    let m: usize = parse_num(toks[1], hline, "edge count")?;

    let mut edges = Vec::with_capacity(m);
    for (line, body) in lines {
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(parse_err(line, "edge line must be 'i j w'"));
        }
        let i: usize = parse_num(toks[0], line, "vertex index")?;
        let j: usize = parse_num(toks[1], line, "vertex index")?;
        for idx in [i, j] {
            if idx == 0 || idx > n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        let w = match toks.get(2) {
            Some(t) => parse_weight(t, line)?,
            None => T::one(),
        };
        edges.push((i - 1, j - 1, w));
    }
    if edges.len() != m {
        return Err(parse_err(hline, format!("header declares {m} edges, found {}", edges.len())));
    }
    WeightedGraph::from_edges(n, &edges)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmField {
    Real,
    Pattern,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    General,
    Symmetric,
}

pub fn parse_matrix_market<T: Scalar>(text: &str) -> Result<WeightedGraph<T>> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let toks: Vec<String> = banner.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if toks[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported storage '{}'", toks[2])));
    }
    let field = match toks[3].as_str() {
        "real" | "integer" | "double" => MmField::Real,
        "pattern" => MmField::Pattern,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sline, size) = body.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let st: Vec<&str> = size.split_whitespace().collect();
    if st.len() != 3 {
        return Err(parse_err(sline, "size line must be 'rows cols nnz'"));
    }
    let rows: usize = parse_num(st[0], sline, "row count")?;
    let cols: usize = parse_num(st[1], sline, "column count")?;
    let nnz: usize = parse_num(st[2], sline, "entry count")?;
    if symmetry == MmSymmetry::Symmetric && rows != cols {
        return Err(parse_err(sline, "symmetric matrix must be square"));
    }

    // duplicate coordinates are summed, as in the exchange format convention
    let mut entries: BTreeMap<(usize, usize), T> = BTreeMap::new();
    let mut count = 0;
    for (line, l) in body {
        let t: Vec<&str> = l.split_whitespace().collect();
        let want = if field == MmField::Pattern { 2 } else { 3 };
        if t.len() < want {
            return Err(parse_err(line, "short entry line"));
        }
        let i: usize = parse_num(t[0], line, "row index")?;
        let j: usize = parse_num(t[1], line, "column index")?;
        if i == 0 || i > rows {
            return Err(Error::IndexOutOfRange { index: i, n: rows });
        }
        if j == 0 || j > cols {
            return Err(Error::IndexOutOfRange { index: j, n: cols });
        }
        let v = match field {
            MmField::Pattern => T::one(),
            MmField::Real => parse_weight(t[2], line)?,
        };
        *entries.entry((i - 1, j - 1)).or_insert(T::zero()) += v;
        if symmetry == MmSymmetry::Symmetric && i != j {
            *entries.entry((j - 1, i - 1)).or_insert(T::zero()) += v;
        }
        count += 1;
    }
    if count != nnz {
        return Err(parse_err(sline, format!("size line declares {nnz} entries, found {count}")));
    }

    let symmetric = rows == cols
        && entries
            .iter()
            .all(|(&(i, j), &v)| entries.get(&(j, i)).copied().unwrap_or(T::zero()) == v);

    let mut edges = Vec::new();
    if symmetric {
        for (&(i, j), &v) in &entries {
            if i < j && v != T::zero() {
                edges.push((i, j, T::one()));
            }
        }
        return WeightedGraph::from_edges(rows, &edges);
    }

    // pattern of SᵀS: (SᵀS)_ij = Σ_k s_ki s_kj
    let mut by_row: Vec<Vec<(usize, T)>> = vec![Vec::new(); rows];
    for (&(i, j), &v) in &entries {
        if v != T::zero() {
            by_row[i].push((j, v));
        }
    }
    let mut gram: HashMap<(usize, usize), T> = HashMap::new();
    for row in &by_row {
        for (a, &(i, vi)) in row.iter().enumerate() {
            for &(j, vj) in &row[a + 1..] {
                *gram.entry((i.min(j), i.max(j))).or_insert(T::zero()) += vi * vj;
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = gram
        .into_iter()
        .filter(|(_, v)| *v != T::zero())
        .map(|(k, _)| k)
        .collect();
    pairs.sort_unstable();
    edges.extend(pairs.into_iter().map(|(i, j)| (i, j, T::one())));
    WeightedGraph::from_edges(cols, &edges)
}

/// Serializes in the edge-list format accepted by [`parse_edge_list`].
pub fn write_edge_list<T: Scalar>(g: &WeightedGraph<T>) -> String {
    let edges = g.edges();
    let mut out = String::with_capacity(16 * (edges.len() + 1));
    let _ = writeln!(out, "{} {}", g.n(), edges.len());
    for (i, j, w) in edges {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
    }
    out
}
