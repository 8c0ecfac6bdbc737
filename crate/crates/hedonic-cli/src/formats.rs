//! Plain-text file formats: game documents, partition files, and the
//! DIMACS-style quantified-formula format.
//!
//! Game and partition files treat `#` to end of line as a comment; formula
//! files use DIMACS `c` comment lines.  All parsers report errors with a
//! line and column, and serializers emit the canonical form that parsing
//! round-trips onto.

use std::fmt;

use hedonic_core::qsat::{Clause, Literal, QDnfInstance, Side};
use hedonic_core::reduction::ReductionArtifact;
use hedonic_core::{AgentId, GameKind, HedonicGame, Partition, Rational};

/// A parse failure with its position, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

fn error(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        message: message.into(),
    }
}

/// A game matrix plus the optional agent names carried by its document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameDocument {
    pub game: HedonicGame,
    pub names: Option<Vec<String>>,
}

impl GameDocument {
    pub fn bare(game: HedonicGame) -> Self {
        GameDocument { game, names: None }
    }

    pub fn named(game: HedonicGame, names: Vec<String>) -> Self {
        GameDocument {
            game,
            names: Some(names),
        }
    }
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

/// Whitespace-separated tokens with positions, `#` comments removed.
fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    for (line_index, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(cut) => &raw_line[..cut],
            None => raw_line,
        };
        let mut col = 0;
        for piece in line.split_whitespace() {
            // Columns measured in bytes; fine for the ASCII formats here.
            col = line[col..].find(piece).map(|at| col + at).unwrap_or(col);
            tokens.push(Token {
                text: piece,
                line: line_index + 1,
                col: col + 1,
            });
            col += piece.len();
        }
    }
    tokens
}

fn parse_rational(token: &Token<'_>) -> Result<Rational, ParseError> {
    let bad = || {
        error(
            token.line,
            token.col,
            format!("expected a rational like 3, -7 or 10/3, found {:?}", token.text),
        )
    };
    match token.text.split_once('/') {
        None => token.text.parse::<i128>().map(Rational::from_integer).map_err(|_| bad()),
        Some((numer, denom)) => {
            let numer: i128 = numer.parse().map_err(|_| bad())?;
            let denom: i128 = denom.parse().map_err(|_| bad())?;
            if denom <= 0 {
                return Err(error(
                    token.line,
                    token.col,
                    format!("denominator must be positive in {:?}", token.text),
                ));
            }
            Ok(Rational::new(numer, denom))
        }
    }
}

struct Cursor<'a> {
    tokens: Vec<Token<'a>>,
    at: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        let token = self.tokens.get(self.at).copied().ok_or_else(|| {
            let (line, col) = self
                .tokens
                .last()
                .map(|t| (t.line, t.col + t.text.len()))
                .unwrap_or((1, 1));
            error(line, col, format!("unexpected end of document, expected {what}"))
        })?;
        self.at += 1;
        Ok(token)
    }

    fn keyword(&mut self, word: &str) -> Result<Token<'a>, ParseError> {
        let token = self.next(&format!("keyword {word:?}"))?;
        if token.text != word {
            return Err(error(
                token.line,
                token.col,
                format!("expected keyword {word:?}, found {:?}", token.text),
            ));
        }
        Ok(token)
    }

    fn peek_is(&self, word: &str) -> bool {
        self.tokens.get(self.at).is_some_and(|t| t.text == word)
    }

    fn finished(&mut self) -> Result<(), ParseError> {
        if let Some(extra) = self.tokens.get(self.at) {
            return Err(error(
                extra.line,
                extra.col,
                format!("unexpected trailing token {:?}", extra.text),
            ));
        }
        Ok(())
    }
}

/// Reads a game document: `kind`, `agents`, optional `names`, then `values`
/// with the row-major matrix.
pub fn parse_game(text: &str) -> Result<GameDocument, ParseError> {
    let mut cursor = Cursor {
        tokens: tokenize(text),
        at: 0,
    };
    cursor.keyword("kind")?;
    let kind_token = cursor.next("game kind ashg or fhg")?;
    let kind = match kind_token.text {
        "ashg" => GameKind::AdditivelySeparable,
        "fhg" => GameKind::Fractional,
        other => {
            return Err(error(
                kind_token.line,
                kind_token.col,
                format!("unknown game kind {other:?}, expected ashg or fhg"),
            ))
        }
    };
    cursor.keyword("agents")?;
    let count_token = cursor.next("agent count")?;
    let n: usize = count_token.text.parse().map_err(|_| {
        error(
            count_token.line,
            count_token.col,
            format!("expected an agent count, found {:?}", count_token.text),
        )
    })?;
    if n == 0 {
        return Err(error(count_token.line, count_token.col, "agent count must be positive"));
    }
    let names = if cursor.peek_is("names") {
        cursor.keyword("names")?;
        let mut names = Vec::with_capacity(n);
        for _ in 0..n {
            names.push(cursor.next("an agent name")?.text.to_string());
        }
        Some(names)
    } else {
        None
    };
    let values_token = cursor.keyword("values")?;
    let mut values = Vec::with_capacity(n * n);
    for index in 0..n * n {
        let token = cursor.next(&format!(
            "value {} of {} (the matrix must be {n}x{n})",
            index + 1,
            n * n
        ))?;
        let value = parse_rational(&token)?;
        if index % n == index / n && value != Rational::from_integer(0) {
            return Err(error(
                token.line,
                token.col,
                format!("diagonal entry for agent {} must be 0", index / n),
            ));
        }
        values.push(value);
    }
    cursor.finished()?;
    let game = HedonicGame::new(kind, n, values).map_err(|core_error| {
        error(values_token.line, values_token.col, core_error.to_string())
    })?;
    Ok(GameDocument { game, names })
}

/// Canonical text form of a game document; `parse_game` round-trips it.
pub fn serialize_game(doc: &GameDocument) -> String {
    let game = &doc.game;
    let n = game.n_agents();
    let mut out = String::new();
    out.push_str("kind ");
    out.push_str(match game.kind() {
        GameKind::AdditivelySeparable => "ashg",
        GameKind::Fractional => "fhg",
    });
    out.push('\n');
    out.push_str(&format!("agents {n}\n"));
    if let Some(names) = &doc.names {
        out.push_str("names");
        for name in names {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
    }
    out.push_str("values\n");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| game.value(AgentId(i as u32), AgentId(j as u32)).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Reads a partition file: one block per line, agent indices separated by
/// whitespace.  The result is canonicalized.
pub fn parse_partition(text: &str, n_agents: usize) -> Result<Partition, ParseError> {
    let mut blocks: Vec<Vec<AgentId>> = Vec::new();
    let mut seen: Vec<Option<usize>> = vec![None; n_agents];
    let mut last_line = 0;
    for (line_index, raw_line) in text.lines().enumerate() {
        last_line = line_index + 1;
        let line = match raw_line.find('#') {
            Some(cut) => &raw_line[..cut],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let mut block = Vec::new();
        let mut col = 0;
        for piece in line.split_whitespace() {
            col = line[col..].find(piece).map(|at| col + at).unwrap_or(col);
            let position = (line_index + 1, col + 1);
            col += piece.len();
            let index: usize = piece.parse().map_err(|_| {
                error(position.0, position.1, format!("expected an agent index, found {piece:?}"))
            })?;
            if index >= n_agents {
                return Err(error(
                    position.0,
                    position.1,
                    format!("agent {index} out of range, the game has {n_agents} agents"),
                ));
            }
            if let Some(previous) = seen[index] {
                return Err(error(
                    position.0,
                    position.1,
                    format!("agent {index} already placed on line {previous}"),
                ));
            }
            seen[index] = Some(line_index + 1);
            block.push(AgentId(index as u32));
        }
        blocks.push(block);
    }
    if let Some(missing) = seen.iter().position(Option::is_none) {
        return Err(error(
            last_line.max(1),
            1,
            format!("agent {missing} does not appear in any block"),
        ));
    }
    Partition::from_blocks(n_agents, blocks)
        .map_err(|core_error| error(last_line.max(1), 1, core_error.to_string()))
}

/// Canonical text form of a partition; one block per line.
pub fn serialize_partition(partition: &Partition) -> String {
    let mut out = String::new();
    for block in partition.blocks() {
        let row: Vec<String> = block.iter().map(|agent| agent.0.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Reads the DIMACS-style formula format: `c` comment lines, a
/// `p qdnf <n> <m>` header, then `m` lines of three signed literals with
/// X variables `1..n` and Y variables `n+1..2n`.
pub fn parse_qdnf(text: &str) -> Result<QDnfInstance, ParseError> {
    let mut significant: Vec<(usize, &str)> = Vec::new();
    for (line_index, raw_line) in text.lines().enumerate() {
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed == "c" || trimmed.starts_with("c ") {
            continue;
        }
        significant.push((line_index + 1, trimmed));
    }
    let Some(&(header_line, header)) = significant.first() else {
        return Err(error(1, 1, "missing header line p qdnf <n> <m>"));
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "p" || fields[1] != "qdnf" {
        return Err(error(
            header_line,
            1,
            format!("expected header p qdnf <n> <m>, found {header:?}"),
        ));
    }
    let n: usize = fields[2]
        .parse()
        .map_err(|_| error(header_line, 1, format!("bad variable count {:?}", fields[2])))?;
    let m: usize = fields[3]
        .parse()
        .map_err(|_| error(header_line, 1, format!("bad clause count {:?}", fields[3])))?;
    let clause_lines = &significant[1..];
    if clause_lines.len() != m {
        return Err(error(
            clause_lines.last().map(|&(l, _)| l).unwrap_or(header_line),
            1,
            format!("header promises {m} clauses, found {}", clause_lines.len()),
        ));
    }
    let mut clauses = Vec::with_capacity(m);
    for &(line, content) in clause_lines {
        let numbers: Vec<&str> = content.split_whitespace().collect();
        if numbers.len() != 3 {
            return Err(error(
                line,
                1,
                format!("a clause needs exactly three literals, found {}", numbers.len()),
            ));
        }
        let mut literals = Vec::with_capacity(3);
        for token in numbers {
            let signed: i64 = token
                .parse()
                .map_err(|_| error(line, 1, format!("expected a signed literal, found {token:?}")))?;
            let magnitude = signed.unsigned_abs() as usize;
            if magnitude == 0 || magnitude > 2 * n {
                return Err(error(
                    line,
                    1,
                    format!("literal {signed} out of range, variables are 1..{}", 2 * n),
                ));
            }
            let (side, var) = if magnitude <= n {
                (Side::X, magnitude - 1)
            } else {
                (Side::Y, magnitude - n - 1)
            };
            literals.push(Literal::new(side, var, signed < 0));
        }
        let clause = Clause::new([literals[0], literals[1], literals[2]]).map_err(|core_error| {
            error(
                line,
                1,
                format!("a clause needs exactly three distinct literals: {core_error}"),
            )
        })?;
        clauses.push(clause);
    }
    QDnfInstance::new(n, clauses).map_err(|core_error| error(header_line, 1, core_error.to_string()))
}

/// Canonical text form of a formula; `parse_qdnf` round-trips it.
pub fn serialize_qdnf(instance: &QDnfInstance) -> String {
    let n = instance.n_vars();
    let mut out = format!("p qdnf {n} {}\n", instance.clause_count());
    for clause in instance.clauses() {
        let row: Vec<String> = clause
            .literals()
            .iter()
            .map(|literal| {
                let magnitude = match literal.side {
                    Side::X => literal.var + 1,
                    Side::Y => n + literal.var + 1,
                };
                if literal.negated {
                    format!("-{magnitude}")
                } else {
                    magnitude.to_string()
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// One `index label` line per agent of a compiled game.
pub fn serialize_roles(artifact: &ReductionArtifact) -> String {
    let mut out = String::new();
    for (index, role) in artifact.roles().iter().enumerate() {
        out.push_str(&format!("{index} {role}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use hedonic_core::gadgets::five_agent_noinstance;

    #[test]
    fn game_document_round_trips_canonically() {
        let doc = GameDocument::named(
            five_agent_noinstance(),
            ["t1", "t2", "t3", "b1", "b2"].map(String::from).to_vec(),
        );
        let text = serialize_game(&doc);
        let reparsed = parse_game(&text).unwrap();
        assert_eq!(reparsed, doc);
        assert_eq!(serialize_game(&reparsed), text);
    }

    #[test]
    fn game_parser_reads_comments_and_fractions() {
        let text = "# fixture\nkind fhg\nagents 2 # two of them\nvalues\n0 10/3\n-1/2 0\n";
        let doc = parse_game(text).unwrap();
        assert_eq!(doc.game.kind(), GameKind::Fractional);
        assert_eq!(*doc.game.value(AgentId(0), AgentId(1)), Rational::new(10, 3));
        assert_eq!(*doc.game.value(AgentId(1), AgentId(0)), Rational::new(-1, 2));
    }

    #[test]
    fn game_parser_rejects_short_matrices_with_position() {
        let text = "kind ashg\nagents 3\nvalues\n0 1 1\n1 0 1\n";
        let failure = parse_game(text).unwrap_err();
        assert!(failure.message.contains("unexpected end"), "{failure}");
        assert_eq!(failure.line, 5);
    }

    #[test]
    fn game_parser_rejects_nonzero_diagonal() {
        let text = "kind ashg\nagents 2\nvalues\n1 0\n0 0\n";
        let failure = parse_game(text).unwrap_err();
        assert!(failure.message.contains("diagonal"), "{failure}");
        assert_eq!((failure.line, failure.col), (4, 1));
    }

    #[test]
    fn partition_files_round_trip_and_canonicalize() {
        let partition = parse_partition("2 0 # a comment\n1 3\n", 4).unwrap();
        assert_eq!(partition.assignment(), &[0, 1, 0, 1]);
        assert_eq!(serialize_partition(&partition), "0 2\n1 3\n");
        assert_eq!(
            parse_partition(&serialize_partition(&partition), 4).unwrap(),
            partition
        );
    }

    #[test]
    fn partition_parser_reports_duplicates_and_gaps() {
        let duplicate = parse_partition("0 1\n1 2\n", 3).unwrap_err();
        assert!(duplicate.message.contains("already placed"), "{duplicate}");
        assert_eq!((duplicate.line, duplicate.col), (2, 1));
        let gap = parse_partition("0 1\n", 3).unwrap_err();
        assert!(gap.message.contains("agent 2"), "{gap}");
    }

    #[test]
    fn qdnf_literals_split_into_sides_by_offset() {
        let text = "c the running example\np qdnf 2 1\n1 3 -4\n";
        let instance = parse_qdnf(text).unwrap();
        assert_eq!(instance.n_vars(), 2);
        let clause = &instance.clauses()[0];
        assert_eq!(clause.literals()[0], Literal::new(Side::X, 0, false));
        assert_eq!(clause.literals()[1], Literal::new(Side::Y, 0, false));
        assert_eq!(clause.literals()[2], Literal::new(Side::Y, 1, true));
        assert_eq!(serialize_qdnf(&instance), "p qdnf 2 1\n1 3 -4\n");
    }

    #[test]
    fn qdnf_rejects_duplicate_literals_with_line() {
        let failure = parse_qdnf("p qdnf 2 1\n1 1 2\n").unwrap_err();
        assert!(failure.message.contains("distinct"), "{failure}");
        assert_eq!(failure.line, 2);
    }

    #[test]
    fn qdnf_rejects_wrong_clause_counts_and_ranges() {
        assert!(parse_qdnf("p qdnf 2 2\n1 2 3\n").unwrap_err().message.contains("promises"));
        assert!(parse_qdnf("p qdnf 2 1\n1 2 5\n").unwrap_err().message.contains("out of range"));
        assert!(parse_qdnf("p qdnf 2 1\n0 2 3\n").unwrap_err().message.contains("out of range"));
    }
}
