//! Parser for vertex-map files.
//!
//! Format: two lines, `L: a0->b0 a1->b1 …` then `R: …`, with 0-based
//! indices. Every source vertex must get exactly one image; images must be
//! injective per side and inside the target's side sizes.

use switchlab::{BipartiteGraph, SidedMap};

/// Parse and fully validate a map file against the given source and target
/// graphs. Error messages carry 1-based line/column positions for syntax
/// problems, and name the offending vertex for range and duplication
/// problems.
pub fn parse_map_file(
    text: &str,
    source: &BipartiteGraph,
    target: &BipartiteGraph,
) -> Result<SidedMap, String> {
    if text.trim().is_empty() {
        return Err("line 1, column 1: empty map file".into());
    }
    let mut lines = text.split('\n');
    let left_line = lines.next().unwrap_or("");
    let right_line = lines
        .next()
        .ok_or("line 2, column 1: missing 'R:' line")?;
    for (extra, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(format!(
                "line {}, column 1: unexpected content after the 'R:' line",
                extra + 3
            ));
        }
    }
    let left_pairs = parse_side_line(left_line, 1, 'L')?;
    let right_pairs = parse_side_line(right_line, 2, 'R')?;
    let left_map = place(&left_pairs, source.left_count(), "left")?;
    let right_map = place(&right_pairs, source.right_count(), "right")?;
    SidedMap::new(
        left_map,
        right_map,
        target.left_count(),
        target.right_count(),
    )
    .map_err(|e| e.to_string())
}

/// One line of the form `L: 0->1 1->0` (possibly with no pairs after the
/// prefix). Returns the raw (source, image) pairs in file order.
fn parse_side_line(line: &str, line_no: usize, tag: char) -> Result<Vec<(usize, usize)>, String> {
    let err = |col: usize, message: &str| {
        format!("line {}, column {}: {}", line_no, col, message)
    };
    let bytes = line.as_bytes();
    if bytes.first() != Some(&(tag as u8)) || bytes.get(1) != Some(&b':') {
        return Err(err(1, &format!("expected '{}:' prefix", tag)));
    }
    let mut pos = 2;
    let mut pairs = Vec::new();
    loop {
        while pos < bytes.len() && bytes[pos] == b' ' {
            pos += 1;
        }
        if pos == bytes.len() {
            return Ok(pairs);
        }
        let (from, next) = parse_index(bytes, pos, line_no)?;
        pos = next;
        if !(bytes.get(pos) == Some(&b'-') && bytes.get(pos + 1) == Some(&b'>')) {
            return Err(err(pos + 1, "expected '->' between source and image"));
        }
        pos += 2;
        let (to, next) = parse_index(bytes, pos, line_no)?;
        pos = next;
        if pos < bytes.len() && bytes[pos] != b' ' {
            return Err(err(pos + 1, "expected a space between assignments"));
        }
        pairs.push((from, to));
    }
}

/// A decimal index without leading zeros.
fn parse_index(bytes: &[u8], start: usize, line_no: usize) -> Result<(usize, usize), String> {
    let mut pos = start;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == start {
        return Err(format!(
            "line {}, column {}: expected a decimal vertex index",
            line_no,
            start + 1
        ));
    }
    let text = std::str::from_utf8(&bytes[start..pos]).expect("digits are ASCII");
    if text.len() > 1 && text.starts_with('0') {
        return Err(format!(
            "line {}, column {}: leading zeros are not allowed",
            line_no,
            start + 1
        ));
    }
    let value: usize = text.parse().map_err(|_| {
        format!(
            "line {}, column {}: vertex index too large",
            line_no,
            start + 1
        )
    })?;
    Ok((value, pos))
}

/// Turn raw (source, image) pairs into a total per-side assignment vector.
fn place(pairs: &[(usize, usize)], side_len: usize, side: &str) -> Result<Vec<usize>, String> {
    let mut slots: Vec<Option<usize>> = vec![None; side_len];
    for &(from, to) in pairs {
        if from >= side_len {
            return Err(format!(
                "{} source index {} out of range (side has {} vertices)",
                side, from, side_len
            ));
        }
        if slots[from].is_some() {
            return Err(format!("duplicate assignment for {} source {}", side, from));
        }
        slots[from] = Some(to);
    }
    slots
        .iter()
        .enumerate()
        .map(|(i, slot)| slot.ok_or_else(|| format!("no assignment for {} source {}", side, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(text: &str) -> BipartiteGraph {
        text.parse().unwrap()
    }

    #[test]
    fn parses_swap_left_map() {
        let g = grid("2 2\n10\n01\n");
        let f = parse_map_file("L: 0->1 1->0\nR: 0->0 1->1", &g, &g).unwrap();
        assert_eq!(f.left_map(), &[1, 0]);
        assert_eq!(f.right_map(), &[0, 1]);
    }

    #[test]
    fn accepts_trailing_newline_and_blank_tail() {
        let g = grid("1 1\n1\n");
        let f = parse_map_file("L: 0->0\nR: 0->0\n", &g, &g).unwrap();
        assert_eq!(f.left_map(), &[0]);
    }

    #[test]
    fn rejects_duplicate_target() {
        let g = grid("2 1\n1\n0\n");
        let err = parse_map_file("L: 0->0 1->0\nR: 0->0", &g, &g).unwrap_err();
        assert!(err.contains("duplicate"), "{}", err);
    }

    #[test]
    fn rejects_empty_file() {
        let g = grid("1 1\n1\n");
        let err = parse_map_file("", &g, &g).unwrap_err();
        assert!(err.starts_with("line 1, column 1"), "{}", err);
    }

    #[test]
    fn rejects_out_of_range_source_and_target() {
        let g = grid("2 2\n10\n01\n");
        let err = parse_map_file("L: 0->0 2->1\nR: 0->0 1->1", &g, &g).unwrap_err();
        assert!(err.contains("out of range"), "{}", err);
        let err = parse_map_file("L: 0->0 1->2\nR: 0->0 1->1", &g, &g).unwrap_err();
        assert!(err.contains("out of range"), "{}", err);
    }

    #[test]
    fn rejects_incomplete_coverage() {
        let g = grid("2 2\n10\n01\n");
        let err = parse_map_file("L: 0->0\nR: 0->0 1->1", &g, &g).unwrap_err();
        assert!(err.contains("no assignment for left source 1"), "{}", err);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let g = grid("1 1\n1\n");
        let err = parse_map_file("L 0->0\nR: 0->0", &g, &g).unwrap_err();
        assert!(err.starts_with("line 1, column 1"), "{}", err);
        let err = parse_map_file("L: 0=>0\nR: 0->0", &g, &g).unwrap_err();
        assert!(err.starts_with("line 1, column 5"), "{}", err);
        let err = parse_map_file("L: 0->0\nR: 0->0\nX", &g, &g).unwrap_err();
        assert!(err.starts_with("line 3, column 1"), "{}", err);
        let err = parse_map_file("L: 00->0\nR: 0->0", &g, &g).unwrap_err();
        assert!(err.contains("leading zeros"), "{}", err);
    }

    #[test]
    fn maps_between_different_shapes() {
        let g = grid("1 2\n10\n");
        let h = grid("2 2\n10\n01\n");
        let f = parse_map_file("L: 0->1\nR: 0->1 1->0", &g, &h).unwrap();
        assert_eq!(f.left_map(), &[1]);
        assert_eq!(f.right_map(), &[1, 0]);
    }
}
