//! Map and scenario text formats.
//!
//! Map files carry a four-line header (`type octile`, `height H`, `width W`,
//! `map`) followed by `H` rows of exactly `W` cell characters. Scenario files
//! hold one problem per line: `start_x start_y goal_x goal_y optimal_cost`,
//! with the cost in deci-cost units (or `-` when unknown) and `#` comments.

use std::io::{self, BufRead, Write};

use super::{Coord, Cost, GridMap, Problem, MAX_CELLS};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {message}")]
    MalformedHeader { line: usize, message: String },
    #[error("line {line}: expected {expected} {what}, found {found}")]
    DimensionMismatch { line: usize, what: &'static str, expected: usize, found: usize },
    #[error("line {line}, column {column}: unknown cell character {ch:?}")]
    UnknownCell { line: usize, column: usize, ch: char },
    #[error("line {line}: malformed scenario entry: {message}")]
    MalformedProblem { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn cell_passable(ch: char) -> Option<bool> {
    match ch {
        '.' | 'G' | 'S' => Some(true),
        '@' | 'O' | 'T' | 'W' => Some(false),
        _ => None,
    }
}

/// Parses a map from its text form.
///
/// ```
/// use knn_lrta::grid::parse_map;
/// let text = "type octile\nheight 2\nwidth 3\nmap\n...\n.@.\n";
/// let map = parse_map(text.as_bytes()).unwrap();
/// assert_eq!((map.width(), map.height(), map.passable_count()), (3, 2, 5));
/// ```
pub fn parse_map<R: BufRead>(input: R) -> Result<GridMap, ParseError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = |expect: &str| -> Result<(usize, String), ParseError> {
        match lines.next() {
            Some((n, line)) => {
                let line = line?;
                let line = line.trim_end_matches('\r').trim().to_string();
                let mut parts = line.split_whitespace();
                if parts.next() != Some(expect) {
                    return Err(ParseError::MalformedHeader {
                        line: n,
                        message: format!("expected `{expect}`, found `{line}`"),
                    });
                }
                Ok((n, parts.collect::<Vec<_>>().join(" ")))
            }
            None => Err(ParseError::MalformedHeader { line: 0, message: format!("missing `{expect}` line") }),
        }
    };

    let (n, kind) = header("type")?;
    if kind != "octile" {
        return Err(ParseError::MalformedHeader { line: n, message: format!("unsupported map type `{kind}`") });
    }
    let parse_dim = |(n, v): (usize, String)| -> Result<usize, ParseError> {
        match v.parse::<usize>() {
            Ok(d) if d > 0 => Ok(d),
            _ => Err(ParseError::MalformedHeader { line: n, message: format!("bad dimension `{v}`") }),
        }
    };
    let height = parse_dim(header("height")?)?;
    let width = parse_dim(header("width")?)?;
    let (n, rest) = header("map")?;
    if !rest.is_empty() {
        return Err(ParseError::MalformedHeader { line: n, message: "trailing text after `map`".into() });
    }
    if (width as u64).saturating_mul(height as u64) > MAX_CELLS {
        return Err(ParseError::MalformedHeader { line: n, message: "map too large".into() });
    }

    let mut rows = Vec::with_capacity(height);
    for (n, line) in lines {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() && rows.len() >= height {
            continue;
        }
        if rows.len() == height {
            return Err(ParseError::DimensionMismatch { line: n, what: "rows", expected: height, found: height + 1 });
        }
        rows.push((n, line.to_string()));
    }
    if rows.len() != height {
        return Err(ParseError::DimensionMismatch {
            line: n + rows.len(),
            what: "rows",
            expected: height,
            found: rows.len(),
        });
    }
    let map = parse_rows(rows.iter().map(|(n, r)| (*n, r.as_str())), Some(width))?;
    Ok(map)
}

pub(super) fn parse_body<'a>(rows: impl Iterator<Item = &'a str>, first_line: usize) -> Result<GridMap, ParseError> {
    parse_rows(rows.enumerate().map(|(i, r)| (first_line + i + 1, r)), None)
}

fn parse_rows<'a>(rows: impl Iterator<Item = (usize, &'a str)>, width: Option<usize>) -> Result<GridMap, ParseError> {
    let mut cells = Vec::new();
    let mut width = width;
    let mut height = 0usize;
    for (n, row) in rows {
        let mut count = 0;
        for (col, ch) in row.chars().enumerate() {
            let p = cell_passable(ch).ok_or(ParseError::UnknownCell { line: n, column: col + 1, ch })?;
            cells.push(p);
            count += 1;
        }
        let w = *width.get_or_insert(count);
        if count != w {
            return Err(ParseError::DimensionMismatch { line: n, what: "columns", expected: w, found: count });
        }
        height += 1;
    }
    let width = width.unwrap_or(0);
    if width == 0 || height == 0 {
        return Err(ParseError::MalformedHeader { line: 0, message: "empty map body".into() });
    }
    Ok(GridMap::from_cells(width as u32, height as u32, cells))
}

/// Writes a map in the text format read by [`parse_map`], using `.` and `@`.
pub fn write_map<W: Write>(map: &GridMap, mut out: W) -> io::Result<()> {
    writeln!(out, "type octile\nheight {}\nwidth {}\nmap", map.height(), map.width())?;
    let mut row = String::with_capacity(map.width() as usize + 1);
    for y in 0..map.height() {
        row.clear();
        for x in 0..map.width() {
            row.push(if map.is_passable(Coord::new(x, y)) { '.' } else { '@' });
        }
        row.push('\n');
        out.write_all(row.as_bytes())?;
    }
    Ok(())
}

/// Parses a scenario file against the map it refers to. Every problem must
/// have distinct, passable endpoints.
pub fn parse_scenario<R: BufRead>(input: R, map: &GridMap) -> Result<Vec<Problem>, ParseError> {
    let mut problems = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let n = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| ParseError::MalformedProblem { line: n, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 && fields.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", fields.len())));
        }
        let mut nums = [0u32; 4];
        for (slot, f) in nums.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| bad(format!("bad coordinate `{f}`")))?;
        }
        let optimal_cost = match fields.get(4) {
            None | Some(&"-") => None,
            Some(f) => Some(Cost(f.parse().map_err(|_| bad(format!("bad cost `{f}`")))?)),
        };
        let start = Coord::new(nums[0], nums[1]);
        let goal = Coord::new(nums[2], nums[3]);
        for c in [start, goal] {
            if !map.is_passable(c) {
                return Err(bad(format!("{c} is not a passable cell")));
            }
        }
        if start == goal {
            return Err(bad("start equals goal".into()));
        }
        problems.push(Problem { start, goal, optimal_cost });
    }
    Ok(problems)
}

/// Writes problems in the scenario format read by [`parse_scenario`].
pub fn write_scenario<W: Write>(problems: &[Problem], mut out: W) -> io::Result<()> {
    writeln!(out, "# start_x start_y goal_x goal_y optimal_cost_decicost")?;
    for p in problems {
        match p.optimal_cost {
            Some(c) => writeln!(out, "{} {} {} {} {}", p.start.x, p.start.y, p.goal.x, p.goal.y, c.0)?,
            None => writeln!(out, "{} {} {} {} -", p.start.x, p.start.y, p.goal.x, p.goal.y)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_text(h: usize, w: usize, body: &[&str]) -> String {
        format!("type octile\nheight {h}\nwidth {w}\nmap\n{}\n", body.join("\n"))
    }

    #[test]
    fn open_three_by_three() {
        let map = parse_map(map_text(3, 3, &["...", "...", "..."]).as_bytes()).unwrap();
        assert_eq!((map.width(), map.height(), map.passable_count()), (3, 3, 9));
    }

    #[test]
    fn single_obstacle() {
        let map = parse_map(map_text(3, 3, &["...", ".@.", "..."]).as_bytes()).unwrap();
        assert_eq!(map.passable_count(), 8);
        assert!(!map.is_passable(Coord::new(1, 1)));
    }

    #[test]
    fn full_character_set() {
        let map = parse_map(map_text(1, 7, &[".GS@OTW"]).as_bytes()).unwrap();
        assert_eq!(map.passable_count(), 3);
    }

    #[test]
    fn crlf_line_endings() {
        let text = "type octile\r\nheight 2\r\nwidth 2\r\nmap\r\n..\r\n.@\r\n";
        let map = parse_map(text.as_bytes()).unwrap();
        assert_eq!(map.passable_count(), 3);
    }

    #[test]
    fn missing_row_is_dimension_mismatch() {
        let err = parse_map(map_text(4, 3, &["...", "...", "..."]).as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::DimensionMismatch { what: "rows", expected: 4, found: 3, .. }), "{err}");
    }

    #[test]
    fn extra_row_is_dimension_mismatch() {
        let err = parse_map(map_text(2, 3, &["...", "...", "..."]).as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::DimensionMismatch { what: "rows", .. }), "{err}");
    }

    #[test]
    fn short_row_names_its_line() {
        let err = parse_map(map_text(3, 3, &["...", "..", "..."]).as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::DimensionMismatch { line: 6, what: "columns", .. }), "{err}");
    }

    #[test]
    fn unknown_character_names_line_and_column() {
        let err = parse_map(map_text(2, 3, &["...", ".x."]).as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::UnknownCell { line: 6, column: 2, ch: 'x' }), "{err}");
    }

    #[test]
    fn malformed_headers() {
        for text in [
            "type grid\nheight 1\nwidth 1\nmap\n.\n",
            "type octile\nheigth 1\nwidth 1\nmap\n.\n",
            "type octile\nheight x\nwidth 1\nmap\n.\n",
            "type octile\nheight 1\nwidth 0\nmap\n.\n",
            "type octile\nheight 1\n",
        ] {
            let err = parse_map(text.as_bytes()).unwrap_err();
            assert!(matches!(err, ParseError::MalformedHeader { .. }), "{text:?} gave {err}");
        }
    }

    #[test]
    fn map_text_round_trip() {
        let map = GridMap::from_rows(&["..@.", "@...", "...."]).unwrap();
        let mut buf = Vec::new();
        write_map(&map, &mut buf).unwrap();
        assert_eq!(parse_map(buf.as_slice()).unwrap(), map);
    }

    #[test]
    fn scenario_parsing() {
        let map = GridMap::from_rows(&["....", ".@..", "...."]).unwrap();
        let text = "# comment\n0 0 3 2 34\n\n3 0 0 2 -\n";
        let problems = parse_scenario(text.as_bytes(), &map).unwrap();
        assert_eq!(problems.len(), 2);
        assert_eq!(problems[0].optimal_cost, Some(Cost(34)));
        assert_eq!(problems[1].optimal_cost, None);

        let mut buf = Vec::new();
        write_scenario(&problems, &mut buf).unwrap();
        assert_eq!(parse_scenario(buf.as_slice(), &map).unwrap(), problems);

        for bad in ["0 0 1 1 10\n", "0 0 0 0 0\n", "0 0 3\n", "0 0 3 2 x\n"] {
            assert!(parse_scenario(bad.as_bytes(), &map).is_err(), "{bad:?}");
        }
    }
}
