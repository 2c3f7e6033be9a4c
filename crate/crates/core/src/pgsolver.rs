//! Reader and writer for the PGSolver vertex-priority text format.
//!
//! ```text
//! parity 2;
//! 0 1 1 1 "a";
//! 1 2 0 0;
//! ```
//!
//! Each vertex statement is `id priority owner successors [name];` with owner
//! `0` for Even and `1` for Odd and successors separated by commas. Vertex
//! priorities become edge priorities: every edge takes the priority of its
//! source. If any priority is `0`, all priorities are shifted up by two, which
//! preserves their order and parity.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::{Edge, GameGraph, ParityGame, Player, Priority};

struct Statement {
    line: usize,
    text: String,
}

/// Splits on `;`, ignoring separators inside double-quoted names.
fn statements(text: &str) -> Vec<Statement> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 1;
    let mut line = 1;
    let mut quoted = false;
    for ch in text.chars() {
        if current.trim().is_empty() {
            start_line = line;
        }
        match ch {
            '"' => {
                quoted = !quoted;
                current.push(ch);
            }
            ';' if !quoted => {
                out.push(Statement {
                    line: start_line,
                    text: std::mem::take(&mut current),
                });
            }
            '\n' => {
                line += 1;
                current.push(' ');
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push(Statement {
            line: start_line,
            text: current,
        });
    }
    out
}

fn parse_number<T: std::str::FromStr>(token: &str, what: &str, line: usize) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected {what}, found `{token}`"),
    })
}

struct Declared {
    priority: u64,
    owner: Player,
    successors: Vec<usize>,
}

pub fn parse_pgsolver(text: &str) -> Result<ParityGame> {
    let mut declared: Vec<Option<Declared>> = Vec::new();
    let mut header: Option<usize> = None;

    for stmt in statements(text) {
        let body = stmt.text.trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens[0] {
            "parity" => {
                if tokens.len() != 2 || header.is_some() {
                    return Err(Error::Parse {
                        line: stmt.line,
                        message: "malformed `parity` header".into(),
                    });
                }
                header = Some(parse_number(tokens[1], "vertex bound", stmt.line)?);
                continue;
            }
            "start" => continue,
            _ => {}
        }
        if header.is_none() {
            return Err(Error::Parse {
                line: stmt.line,
                message: "missing `parity N;` header".into(),
            });
        }
        if tokens.len() < 3 {
            return Err(Error::Parse {
                line: stmt.line,
                message: format!("malformed vertex line `{body}`"),
            });
        }
        let id: usize = parse_number(tokens[0], "vertex id", stmt.line)?;
        let priority: u64 = parse_number(tokens[1], "priority", stmt.line)?;
        let owner = match tokens[2] {
            "0" => Player::Even,
            "1" => Player::Odd,
            other => {
                return Err(Error::Parse {
                    line: stmt.line,
                    message: format!("owner must be 0 or 1, found `{other}`"),
                })
            }
        };
        let successors = match tokens.get(3) {
            Some(tok) if !tok.starts_with('"') => tok
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| parse_number(s, "successor id", stmt.line))
                .collect::<Result<Vec<usize>>>()?,
            _ => Vec::new(),
        };
        if tokens.len() > 5 || (tokens.len() == 5 && !tokens[4].starts_with('"')) {
            return Err(Error::Parse {
                line: stmt.line,
                message: format!("malformed vertex line `{body}`"),
            });
        }
        if successors.is_empty() {
            return Err(Error::NoOutgoingEdge(id));
        }
        if id >= declared.len() {
            declared.resize_with(id + 1, || None);
        }
        if declared[id].is_some() {
            return Err(Error::Parse {
                line: stmt.line,
                message: format!("vertex {id} declared twice"),
            });
        }
        declared[id] = Some(Declared {
            priority,
            owner,
            successors,
        });
    }

    if declared.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no vertices declared".into(),
        });
    }
    let n = declared.len();
    let mut vertices = Vec::with_capacity(n);
    for (id, d) in declared.into_iter().enumerate() {
        vertices.push(d.ok_or_else(|| Error::InvalidGame(format!("vertex {id} is never declared")))?);
    }

    let shift = if vertices.iter().any(|v| v.priority == 0) { 2 } else { 0 };
    let mut edges = Vec::new();
    for (id, v) in vertices.iter().enumerate() {
        let pri = Priority::try_from(v.priority + shift)
            .map_err(|_| Error::InvalidGame(format!("priority {} too large", v.priority)))?;
        for &s in &v.successors {
            if s >= n {
                return Err(Error::DanglingSuccessor {
                    vertex: id,
                    successor: s,
                });
            }
            edges.push(Edge::new(id, s, pri));
        }
    }
    let owner = vertices.iter().map(|v| v.owner).collect();
    ParityGame::from_graph(GameGraph::new(n, edges)?, owner)
}

/// Writes a game whose edges all carry their source's priority.
pub fn write_pgsolver(game: &ParityGame) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "parity {};", game.num_vertices() - 1).unwrap();
    for v in 0..game.num_vertices() {
        let edges = game.out_edges(v);
        let pri = edges[0].pri;
        if edges.iter().any(|e| e.pri != pri) {
            return Err(Error::InvalidGame(format!(
                "vertex {v} has out-edges of different priorities"
            )));
        }
        let succ: Vec<String> = edges.iter().map(|e| e.dst.to_string()).collect();
        writeln!(out, "{v} {pri} {} {};", game.owner(v).index(), succ.join(",")).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        let g = parse_pgsolver("parity 1; 0 2 0 0;").unwrap();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.owner(0), Player::Even);
        assert_eq!(g.edges(), &[Edge::new(0, 0, 2)]);
        assert_eq!(g.bound(), 2);
    }

    #[test]
    fn source_priority_goes_on_edges() {
        let g = parse_pgsolver("parity 2; 0 1 1 1; 1 2 0 0;").unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 1, 1), Edge::new(1, 0, 2)]);
        assert_eq!(g.owner(0), Player::Odd);
        assert_eq!(g.bound(), 2);
    }

    #[test]
    fn missing_successors() {
        let err = parse_pgsolver("parity 1; 0 2 0;").unwrap_err();
        assert_eq!(err.to_string(), "vertex 0 has no outgoing edge");
    }

    #[test]
    fn zero_priorities_shift_by_two() {
        let g = parse_pgsolver("parity 1;\n0 0 0 1;\n1 3 1 0,1;\n").unwrap();
        let pris: Vec<_> = g.edges().iter().map(|e| e.pri).collect();
        assert_eq!(pris, vec![2, 5, 5]);
        assert_eq!(g.bound(), 6);
    }

    #[test]
    fn names_and_start_are_accepted() {
        let g = parse_pgsolver("parity 1;\nstart 0;\n0 4 1 1 \"x;y\";\n1 3 0 0 \"b\";\n").unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.bound(), 4);
    }

    #[test]
    fn dangling_and_malformed() {
        assert!(matches!(
            parse_pgsolver("parity 1; 0 2 0 5;"),
            Err(Error::DanglingSuccessor { vertex: 0, successor: 5 })
        ));
        assert!(matches!(parse_pgsolver("parity 1; 0 x 0 0;"), Err(Error::Parse { .. })));
        assert!(matches!(parse_pgsolver("0 2 0 0;"), Err(Error::Parse { .. })));
        assert!(matches!(parse_pgsolver("parity 1; 0 2 7 0;"), Err(Error::Parse { .. })));
    }

    #[test]
    fn error_reports_line() {
        match parse_pgsolver("parity 1;\n0 2 0 1;\n1 z 0 0;\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn write_then_parse() {
        let text = "parity 2;\n0 1 1 1,2;\n1 2 0 0;\n2 3 0 2;\n";
        let g = parse_pgsolver(text).unwrap();
        assert_eq!(write_pgsolver(&g).unwrap(), text);
    }
}
