//! Matrix Market ingestion and distance-table output.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId, Weight};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    EntryCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: index {index} out of bounds for {size}x{size} matrix")]
    IndexOutOfBounds { line: usize, index: u64, size: usize },
    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: Weight },
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

impl ParseError {
    /// Line number (1-based) the error refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::EntryCount { line, .. }
            | ParseError::IndexOutOfBounds { line, .. }
            | ParseError::NegativeWeight { line, .. } => Some(*line),
            ParseError::Io(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Ignore stored values and give every edge weight 1.
    pub force_unit_weights: bool,
    /// For `symmetric` files, add the mirrored edge of every off-diagonal entry.
    pub expand_symmetric: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub num_vertices: usize,
    pub edges: Vec<(VertexId, VertexId, Weight)>,
}

impl EdgeList {
    pub fn into_graph(self) -> Result<Graph, GraphError> {
        Graph::from_edges(&self.edges, self.num_vertices)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(Field, bool), ParseError> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(syntax(line_no, format!("malformed header: {line:?}")));
    }
    if tokens[1] != "matrix" {
        return Err(syntax(line_no, format!("unsupported object {:?}", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(syntax(line_no, format!("unsupported format {:?}", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(syntax(line_no, format!("unsupported field {other:?}"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(syntax(line_no, format!("unsupported symmetry {other:?}"))),
    };
    Ok((field, symmetric))
}

fn parse_index(line_no: usize, token: &str, size: usize) -> Result<VertexId, ParseError> {
    let index: u64 = token
        .parse()
        .map_err(|_| syntax(line_no, format!("invalid index {token:?}")))?;
    if index == 0 || index > size as u64 {
        return Err(ParseError::IndexOutOfBounds {
            line: line_no,
            index,
            size,
        });
    }
    Ok(index as usize - 1)
}

/// Reads a `coordinate` Matrix Market file into a 0-based edge list.
pub fn parse_matrix_market<R: BufRead>(
    reader: R,
    options: ParseOptions,
) -> Result<EdgeList, ParseError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (field, symmetric) = match lines.next() {
        Some((no, line)) => parse_header(no, &line?)?,
        None => return Err(syntax(1, "empty input, expected %%MatrixMarket header")),
    };

    let mut last_line = 1;
    let mut size_line = None;
    for (no, line) in lines.by_ref() {
        let line = line?;
        last_line = no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some((no, trimmed.to_owned()));
        break;
    }
    let (size_no, size_text) =
        size_line.ok_or_else(|| syntax(last_line, "missing size line"))?;
    let dims: Vec<usize> = size_text
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| syntax(size_no, format!("malformed size line {size_text:?}")))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(syntax(size_no, format!("malformed size line {size_text:?}")));
    };
    if rows != cols {
        return Err(syntax(
            size_no,
            format!("matrix is {rows}x{cols}; graphs must be square"),
        ));
    }

    let arity = if field == Field::Pattern { 2 } else { 3 };
    let mut edges = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
    let mut found = 0usize;
    last_line = size_no;
    for (no, line) in lines {
        let line = line?;
        last_line = no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        found += 1;
        if found > nnz {
            return Err(ParseError::EntryCount {
                line: no,
                expected: nnz,
                found,
            });
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != arity {
            return Err(syntax(
                no,
                format!("expected {arity} fields, found {}", tokens.len()),
            ));
        }
        let src = parse_index(no, tokens[0], rows)?;
        let dst = parse_index(no, tokens[1], rows)?;
        let weight = match field {
            Field::Pattern => 1.0,
            Field::Real => tokens[2]
                .parse::<f64>()
                .map_err(|_| syntax(no, format!("invalid value {:?}", tokens[2])))?,
            Field::Integer => tokens[2]
                .parse::<i64>()
                .map_err(|_| syntax(no, format!("invalid integer {:?}", tokens[2])))?
                as f64,
        };
        if !weight.is_finite() {
            return Err(syntax(no, format!("non-finite value {:?}", tokens[2])));
        }
        if weight < 0.0 {
            return Err(ParseError::NegativeWeight { line: no, weight });
        }
        let weight = if options.force_unit_weights { 1.0 } else { weight };
        edges.push((src, dst, weight));
        if symmetric && options.expand_symmetric && src != dst {
            edges.push((dst, src, weight));
        }
    }
    if found != nnz {
        return Err(ParseError::EntryCount {
            line: last_line,
            expected: nnz,
            found,
        });
    }

    Ok(EdgeList {
        num_vertices: rows,
        edges,
    })
}

/// Writes `edges` as a `coordinate real general` Matrix Market file.
/// Weights are printed in shortest round-trip form, so reading the file
/// back yields bit-identical values.
pub fn write_matrix_market<W: Write>(edges: &EdgeList, mut sink: W) -> io::Result<()> {
    writeln!(sink, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(
        sink,
        "{n} {n} {}",
        edges.edges.len(),
        n = edges.num_vertices
    )?;
    for &(src, dst, w) in &edges.edges {
        writeln!(sink, "{} {} {w}", src + 1, dst + 1)?;
    }
    sink.flush()
}

/// Formats like C's `%g`: six significant digits, trailing zeros dropped.
pub fn format_significant(value: f64) -> String {
    const PRECISION: i32 = 6;
    if value == 0.0 {
        return "0".into();
    }
    if !value.is_finite() {
        return if value.is_nan() {
            "nan".into()
        } else if value > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Exponent after rounding to the target precision.
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= PRECISION {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_zeros(&format!("{value:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `<vertex> <distance|inf> <predecessor|->` per vertex.
pub fn write_distances<W: Write>(
    dist: &[Weight],
    pred: &[Option<VertexId>],
    mut sink: W,
) -> io::Result<()> {
    if dist.len() != pred.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!(
                "distance and predecessor arrays differ in length ({} vs {})",
                dist.len(),
                pred.len()
            ),
        ));
    }
    for (v, (&d, p)) in dist.iter().zip(pred).enumerate() {
        let d = if d == f64::INFINITY {
            "inf".to_owned()
        } else {
            format_significant(d)
        };
        match p {
            Some(p) => writeln!(sink, "{v} {d} {p}")?,
            None => writeln!(sink, "{v} {d} -")?,
        }
    }
    sink.flush()
}

/// Parses a table produced by [`write_distances`].
pub fn read_distances<R: BufRead>(
    reader: R,
) -> Result<(Vec<Weight>, Vec<Option<VertexId>>), ParseError> {
    let mut dist = Vec::new();
    let mut pred = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let no = i + 1;
        let line = line?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [v, d, p] = tokens[..] else {
            return Err(syntax(no, "expected `<vertex> <distance> <predecessor>`"));
        };
        if v.parse::<usize>().ok() != Some(dist.len()) {
            return Err(syntax(no, format!("expected vertex {}, found {v:?}", dist.len())));
        }
        dist.push(match d {
            "inf" => f64::INFINITY,
            _ => d
                .parse()
                .map_err(|_| syntax(no, format!("invalid distance {d:?}")))?,
        });
        pred.push(match p {
            "-" => None,
            _ => Some(
                p.parse()
                    .map_err(|_| syntax(no, format!("invalid predecessor {p:?}")))?,
            ),
        });
    }
    Ok((dist, pred))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, options: ParseOptions) -> Result<EdgeList, ParseError> {
        parse_matrix_market(text.as_bytes(), options)
    }

    #[test]
    fn general_real() {
        let el = parse(
            "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 2 1.0\n2 3 2.0\n",
            ParseOptions::default(),
        )
        .unwrap();
        assert_eq!(el.num_vertices, 3);
        assert_eq!(el.edges, vec![(0, 1, 1.0), (1, 2, 2.0)]);
    }

    #[test]
    fn pattern_symmetric_expands() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n1 2\n";
        let opts = ParseOptions {
            expand_symmetric: true,
            ..Default::default()
        };
        assert_eq!(parse(text, opts).unwrap().edges, vec![(0, 1, 1.0), (1, 0, 1.0)]);
        assert_eq!(
            parse(text, ParseOptions::default()).unwrap().edges,
            vec![(0, 1, 1.0)]
        );
    }

    #[test]
    fn symmetric_diagonal_emitted_once() {
        let text = "%%MatrixMarket matrix coordinate integer symmetric\n2 2 2\n1 1 3\n2 1 4\n";
        let opts = ParseOptions {
            expand_symmetric: true,
            ..Default::default()
        };
        assert_eq!(
            parse(text, opts).unwrap().edges,
            vec![(0, 0, 3.0), (1, 0, 4.0), (0, 1, 4.0)]
        );
    }

    #[test]
    fn comments_blank_lines_and_unit_weights() {
        let text = "%%MatrixMarket matrix coordinate real general\n% a comment\n\n3 3 2\n% mid\n1 2 7.5\n\n3 1 0\n";
        let opts = ParseOptions {
            force_unit_weights: true,
            ..Default::default()
        };
        assert_eq!(parse(text, opts).unwrap().edges, vec![(0, 1, 1.0), (2, 0, 1.0)]);
        assert_eq!(
            parse(text, ParseOptions::default()).unwrap().edges,
            vec![(0, 1, 7.5), (2, 0, 0.0)]
        );
    }

    #[test]
    fn entry_count_mismatch() {
        let text = "%%MatrixMarket matrix coordinate real general\n3 3 5\n1 2 1\n2 3 1\n3 1 1\n1 3 1\n";
        let err = parse(text, ParseOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            ParseError::EntryCount {
                expected: 5,
                found: 4,
                ..
            }
        ));
        assert_eq!(err.to_string(), "line 6: expected 5 entries, found 4");

        let text = "%%MatrixMarket matrix coordinate real general\n3 3 1\n1 2 1\n2 3 1\n";
        let err = parse(text, ParseOptions::default()).unwrap_err();
        assert_eq!(err.line(), Some(4));
    }

    #[test]
    fn rejections_carry_line_numbers() {
        let cases = [
            ("%%MatrixMarket matrix array real general\n2 2\n", 1),
            ("%MatrixMarket matrix coordinate real general\n", 1),
            ("%%MatrixMarket matrix coordinate complex general\n", 1),
            ("%%MatrixMarket matrix coordinate real hermitian\n", 1),
            ("%%MatrixMarket matrix coordinate real general\n2 3 0\n", 2),
            ("%%MatrixMarket matrix coordinate real general\n2 2\n", 2),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 3 1\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 -1\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 x\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 inf\n", 3),
            ("%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 2 1.5\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n% only comments\n", 2),
        ];
        for (text, line) in cases {
            let err = parse(text, ParseOptions::default()).unwrap_err();
            assert_eq!(err.line(), Some(line), "{text:?} -> {err}");
        }
        assert_eq!(parse("", ParseOptions::default()).unwrap_err().line(), Some(1));
    }

    #[test]
    fn significant_digit_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (3.0, "3"),
            (2.5, "2.5"),
            (1.0 / 3.0, "0.333333"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (999999.5, "1e+06"),
            (10.0, "10"),
            (12.345678, "12.3457"),
        ];
        for (v, s) in cases {
            assert_eq!(format_significant(v), s, "{v}");
        }
    }

    #[test]
    fn distance_table() {
        let mut out = Vec::new();
        write_distances(&[0.0, 1.0, 3.0], &[None, Some(0), Some(1)], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 0 -\n1 1 0\n2 3 1\n");

        let mut out = Vec::new();
        write_distances(&[0.0, f64::INFINITY], &[None, None], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 0 -\n1 inf -\n");

        assert!(write_distances(&[0.0], &[], Vec::new()).is_err());
    }

    #[test]
    fn distance_table_round_trip() {
        let dist = vec![0.0, 1.5, f64::INFINITY, 12.25, 0.125];
        let pred = vec![None, Some(0), None, Some(1), Some(3)];
        let mut out = Vec::new();
        write_distances(&dist, &pred, &mut out).unwrap();
        let (d2, p2) = read_distances(out.as_slice()).unwrap();
        assert_eq!(d2, dist);
        assert_eq!(p2, pred);
    }
}
