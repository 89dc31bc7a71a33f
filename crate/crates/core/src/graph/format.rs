//! Line-oriented text encoding of a [`GraphStream`].
//!
//! ```text
//! n <declared_n> mode <edge|vertex>
//! e <u> <v>                 # edge-arrival event
//! v <id> [<back-neighbor>...]  # vertex-arrival event
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{materialize, GraphError, GraphStream, StreamEvent, StreamMode, VertexId};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: GraphError },
    #[error("missing header line `n <count> mode <edge|vertex>`")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Malformed {
        line,
        message: message.into(),
    }
}

fn parse_id(token: &str, line: usize) -> Result<VertexId, ParseError> {
    token
        .parse()
        .map_err(|_| malformed(line, format!("invalid vertex id `{token}`")))
}

fn parse_header(tokens: &[&str], line: usize) -> Result<(usize, StreamMode), ParseError> {
    match tokens {
        ["n", count, "mode", mode] => {
            let n = count
                .parse()
                .map_err(|_| malformed(line, format!("invalid vertex count `{count}`")))?;
            let mode = mode.parse().map_err(|msg: String| malformed(line, msg))?;
            Ok((n, mode))
        }
        _ => Err(malformed(line, "expected header `n <count> mode <edge|vertex>`")),
    }
}

/// Parses a stream and runs every check of [`materialize`], reporting the
/// offending line (1-based).
pub fn parse_stream<R: BufRead>(reader: R) -> Result<GraphStream, ParseError> {
    let mut header = None;
    let mut events = Vec::new();
    let mut lines_of_events = Vec::new();
    for (idx, text) in reader.lines().enumerate() {
        let text = text?;
        let line = idx + 1;
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let Some((_, mode)) = header else {
            header = Some(parse_header(&tokens, line)?);
            continue;
        };
        let event = match (tokens[0], mode) {
            ("e", StreamMode::Edge) => match tokens[1..] {
                [u, v] => StreamEvent::Edge(parse_id(u, line)?, parse_id(v, line)?),
                _ => return Err(malformed(line, "edge event needs exactly two ids")),
            },
            ("v", StreamMode::Vertex) => {
                if tokens.len() < 2 {
                    return Err(malformed(line, "vertex event needs an id"));
                }
                let v = parse_id(tokens[1], line)?;
                let back = tokens[2..]
                    .iter()
                    .map(|t| parse_id(t, line))
                    .collect::<Result<_, _>>()?;
                StreamEvent::Vertex { v, back }
            }
            ("e", StreamMode::Vertex) | ("v", StreamMode::Edge) => {
                return Err(malformed(
                    line,
                    format!("`{}` event in a {mode} stream", tokens[0]),
                ))
            }
            (tag, _) => return Err(malformed(line, format!("unknown event tag `{tag}`"))),
        };
        events.push(event);
        lines_of_events.push(line);
    }
    let (n, mode) = header.ok_or(ParseError::MissingHeader)?;
    let stream = GraphStream::new(mode, n, events);
    materialize(&stream).map_err(|source| {
        let event = match &source {
            GraphError::SelfLoop { event, .. }
            | GraphError::DuplicateEdge { event, .. }
            | GraphError::VertexOutOfRange { event, .. }
            | GraphError::ArrivalOrder { event, .. }
            | GraphError::RepeatedArrival { event, .. }
            | GraphError::ModeMismatch { event, .. } => *event,
            GraphError::OracleOutOfRange { .. } => 0,
        };
        ParseError::Invalid {
            line: lines_of_events.get(event).copied().unwrap_or(0),
            source,
        }
    })?;
    Ok(stream)
}

pub fn write_stream<W: Write>(mut w: W, stream: &GraphStream) -> io::Result<()> {
    writeln!(w, "n {} mode {}", stream.declared_n, stream.mode)?;
    for ev in &stream.events {
        match ev {
            StreamEvent::Edge(u, v) => writeln!(w, "e {u} {v}")?,
            StreamEvent::Vertex { v, back } => {
                write!(w, "v {v}")?;
                for u in back {
                    write!(w, " {u}")?;
                }
                writeln!(w)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<GraphStream, ParseError> {
        parse_stream(text.as_bytes())
    }

    #[test]
    fn round_trip_both_modes() {
        let text = "n 3 mode vertex\nv 0\nv 1 0\nv 2 0 1\n";
        let s = parse(text).unwrap();
        assert_eq!(s.events.len(), 3);
        let mut out = Vec::new();
        write_stream(&mut out, &s).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);

        let s = parse("# comment\nn 4 mode edge\n\ne 0 1\ne 3 2\n").unwrap();
        assert_eq!(s.events, vec![StreamEvent::Edge(0, 1), StreamEvent::Edge(3, 2)]);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let err = parse("n 3 mode edge\ne 0 1\ne 0 x\n").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 3, .. }), "{err}");

        let err = parse("n 3 mode edge\ne 0\n").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 2, .. }));

        let err = parse("n 3 mode vertex\nv 0\ne 0 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 3, .. }));

        let err = parse("n 3 mode vertex\n\nv 0\nv 2 1\n").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Invalid {
                    line: 4,
                    source: GraphError::ArrivalOrder { .. }
                }
            ),
            "{err}"
        );

        let err = parse("n 2 mode edge\ne 0 5\n").unwrap_err();
        assert!(matches!(err, ParseError::Invalid { line: 2, .. }));

        assert!(matches!(parse("e 0 1\n"), Err(ParseError::Malformed { line: 1, .. })));
        assert!(matches!(parse(""), Err(ParseError::MissingHeader)));
        assert!(matches!(
            parse("n 3 mode both\n"),
            Err(ParseError::Malformed { line: 1, .. })
        ));
    }
}
