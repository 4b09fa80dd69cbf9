//! Text grammars for words, free-group maps, integer matrices, and torus
//! elements. Every `Display` impl in this crate round-trips through its
//! parser here.
//!
//! Words are whitespace-separated tokens `g` or `g^E`: generators are the
//! letters `a`–`z` (uppercase for a single inverse letter) or `x1`, `x2`, …
//! beyond rank 26, and `1` is the identity. Maps read
//! `a -> a b^2 ; b -> b` with an optional `inv:` block; matrices read
//! `[[1,2],[0,1]]`; torus elements read `t^K | w`.

use crate::error::{Error, Result};
use crate::fnauto::FreeMap;
use crate::int::Int;
use crate::torus::{Torus, TorusElement};
use crate::words::Word;
use num_traits::Num;

/// 1-based line and column of a byte offset.
fn line_col(input: &str, offset: usize) -> (usize, usize) {
    let prefix = &input[..offset.min(input.len())];
    let line = 1 + prefix.matches('\n').count();
    let col = offset - prefix.rfind('\n').map(|p| p + 1).unwrap_or(0) + 1;
    (line, col)
}

fn parse_error(input: &str, offset: usize, msg: impl Into<String>) -> Error {
    let (line, col) = line_col(input, offset);
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

/// Whitespace-separated tokens with their byte offsets.
fn tokens(input: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (pos, ch) in input.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &input[s..pos]));
            }
        } else if start.is_none() {
            start = Some(pos);
        }
    }
    if let Some(s) = start {
        out.push((s, &input[s..]));
    }
    out
}

/// Parses a (possibly signed) decimal integer.
fn parse_int<T: Int>(input: &str, offset: usize, text: &str) -> Result<T> {
    let cleaned = text.strip_prefix('+').unwrap_or(text);
    <T as Num>::from_str_radix(cleaned, 10)
        .map_err(|_| parse_error(input, offset, format!("invalid integer '{text}'")))
}

/// One word token: `None` for the identity token `1`, otherwise the
/// generator index and exponent.
fn parse_word_token<T: Int>(
    input: &str,
    offset: usize,
    token: &str,
) -> Result<Option<(usize, T)>> {
    if token == "1" {
        return Ok(None);
    }
    let (head, exp_text) = match token.find('^') {
        Some(caret) => (&token[..caret], Some(&token[caret + 1..])),
        None => (token, None),
    };
    let mut exp: T = match exp_text {
        Some(text) => parse_int(input, offset, text)?,
        None => T::one(),
    };
    let mut chars = head.chars();
    let first = chars
        .next()
        .ok_or_else(|| parse_error(input, offset, "empty generator before '^'"))?;
    let rest = chars.as_str();
    let gen = if first == 'x' && !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
        let idx: usize = rest
            .parse()
            .map_err(|_| parse_error(input, offset, format!("invalid generator '{head}'")))?;
        if idx == 0 {
            return Err(parse_error(input, offset, "generator indices start at x1"));
        }
        idx - 1
    } else if rest.is_empty() && first.is_ascii_lowercase() {
        (first as u8 - b'a') as usize
    } else if rest.is_empty() && first.is_ascii_uppercase() {
        exp = -exp;
        (first.to_ascii_lowercase() as u8 - b'a') as usize
    } else {
        return Err(parse_error(
            input,
            offset,
            format!("invalid generator '{head}'"),
        ));
    };
    Ok(Some((gen, exp)))
}

/// Parses a word. With `rank = Some(n)`, generator indices must be below
/// `n`; with `None`, the rank is inferred as one past the largest index
/// (at least 1).
pub fn parse_word<T: Int>(rank: Option<usize>, input: &str) -> Result<Word<T>> {
    let mut pairs: Vec<(usize, usize, T)> = Vec::new();
    for (offset, token) in tokens(input) {
        if let Some((gen, exp)) = parse_word_token(input, offset, token)? {
            pairs.push((offset, gen, exp));
        }
    }
    let rank = match rank {
        Some(n) => {
            for (offset, gen, _) in &pairs {
                if *gen >= n {
                    return Err(parse_error(
                        input,
                        *offset,
                        format!("generator index {} out of range for rank {n}", gen + 1),
                    ));
                }
            }
            n
        }
        None => pairs.iter().map(|(_, g, _)| g + 1).max().unwrap_or(1),
    };
    Word::reduce(rank, pairs.into_iter().map(|(_, g, e)| (g, e)))
}

/// Splits `name -> word` and returns the generator index.
fn parse_map_entry<T: Int>(
    input: &str,
    offset: usize,
    entry: &str,
    rank: usize,
) -> Result<(usize, Word<T>)> {
    let arrow = entry
        .find("->")
        .ok_or_else(|| parse_error(input, offset, "map entry needs 'name -> word'"))?;
    let name_part = &entry[..arrow];
    let word_part = &entry[arrow + 2..];
    let name_tokens = tokens(name_part);
    let (name_offset, name) = match name_tokens.as_slice() {
        [(pos, tok)] => (offset + pos, *tok),
        _ => {
            return Err(parse_error(
                input,
                offset,
                "map entry needs a single generator name before '->'",
            ))
        }
    };
    let gen = match parse_word_token::<T>(input, name_offset, name)? {
        Some((g, e)) if e.is_one() => g,
        _ => {
            return Err(parse_error(
                input,
                name_offset,
                format!("'{name}' is not a plain generator name"),
            ))
        }
    };
    if gen >= rank {
        return Err(parse_error(
            input,
            name_offset,
            format!("generator '{name}' out of range for rank {rank}"),
        ));
    }
    // Word offsets are relative to the entry slice; shift single-line
    // errors to absolute positions.
    let word = parse_word(Some(rank), word_part).map_err(|e| match e {
        Error::Parse { line: 1, col, msg } => {
            parse_error(input, offset + arrow + 2 + (col - 1), msg)
        }
        other => other,
    })?;
    Ok((gen, word))
}

/// Parses a block of `;`-separated map entries into images indexed by
/// generator; every generator below `rank` must appear exactly once.
fn parse_map_block<T: Int>(
    input: &str,
    block_offset: usize,
    block: &str,
    rank: usize,
) -> Result<Vec<Word<T>>> {
    let mut images: Vec<Option<Word<T>>> = vec![None; rank];
    let mut offset = block_offset;
    for entry in block.split(';') {
        let (gen, word) = parse_map_entry(input, offset, entry, rank)?;
        if images[gen].replace(word).is_some() {
            return Err(parse_error(
                input,
                offset,
                format!("generator {} defined twice", gen + 1),
            ));
        }
        offset += entry.len() + 1;
    }
    images
        .into_iter()
        .enumerate()
        .map(|(g, w)| {
            w.ok_or_else(|| {
                parse_error(input, block_offset, format!("generator {} missing", g + 1))
            })
        })
        .collect()
}

/// Parses a free-group endomorphism `a -> w_a ; b -> w_b ; …`, with an
/// optional `inv: …` block that is verified and attached as the inverse.
///
/// The rank is the number of entries in the forward block.
pub fn parse_free_map<T: Int>(input: &str) -> Result<FreeMap<T>> {
    let (forward, inverse) = match input.find("inv:") {
        Some(pos) => {
            let head = input[..pos].trim_end();
            let head = head.strip_suffix(';').ok_or_else(|| {
                parse_error(input, pos, "expected ';' before the 'inv:' block")
            })?;
            (head, Some((pos + 4, &input[pos + 4..])))
        }
        None => (input, None),
    };
    if forward.trim().is_empty() {
        return Err(parse_error(input, 0, "empty map"));
    }
    let rank = forward.split(';').count();
    let images = parse_map_block(input, 0, forward, rank)?;
    let map = FreeMap::new(rank, images)?;
    match inverse {
        Some((offset, block)) => {
            let inverse_images = parse_map_block(input, offset, block, rank)?;
            map.with_inverse(inverse_images)
        }
        None => Ok(map),
    }
}

/// Parses a square integer matrix `[[1,2],[0,1]]` (whitespace allowed).
pub fn parse_matrix<T: Int>(input: &str) -> Result<crate::zmat::IntMatrix<T>> {
    let mut chars = input.char_indices().peekable();
    let skip_ws = |chars: &mut std::iter::Peekable<std::str::CharIndices>| {
        while matches!(chars.peek(), Some((_, c)) if c.is_whitespace()) {
            chars.next();
        }
    };
    let expect = |chars: &mut std::iter::Peekable<std::str::CharIndices>,
                  want: char|
     -> Result<()> {
        match chars.next() {
            Some((_, c)) if c == want => Ok(()),
            Some((pos, c)) => Err(parse_error(
                input,
                pos,
                format!("expected '{want}', found '{c}'"),
            )),
            None => Err(parse_error(
                input,
                input.len(),
                format!("expected '{want}', found end of input"),
            )),
        }
    };
    let read_int = |chars: &mut std::iter::Peekable<std::str::CharIndices>| -> Result<T> {
        let start = match chars.peek() {
            Some((pos, _)) => *pos,
            None => {
                return Err(parse_error(input, input.len(), "expected an integer"));
            }
        };
        let mut end = start;
        if matches!(chars.peek(), Some((_, '-')) | Some((_, '+'))) {
            let (pos, c) = chars.next().unwrap();
            end = pos + c.len_utf8();
        }
        while matches!(chars.peek(), Some((_, c)) if c.is_ascii_digit()) {
            let (pos, c) = chars.next().unwrap();
            end = pos + c.len_utf8();
        }
        if end == start || !input[start..end].bytes().any(|b| b.is_ascii_digit()) {
            return Err(parse_error(input, start, "expected an integer"));
        }
        parse_int(input, start, &input[start..end])
    };

    skip_ws(&mut chars);
    expect(&mut chars, '[')?;
    let mut rows: Vec<Vec<T>> = Vec::new();
    loop {
        skip_ws(&mut chars);
        expect(&mut chars, '[')?;
        let mut row = Vec::new();
        loop {
            skip_ws(&mut chars);
            row.push(read_int(&mut chars)?);
            skip_ws(&mut chars);
            match chars.next() {
                Some((_, ',')) => continue,
                Some((_, ']')) => break,
                Some((pos, c)) => {
                    return Err(parse_error(
                        input,
                        pos,
                        format!("expected ',' or ']', found '{c}'"),
                    ))
                }
                None => {
                    return Err(parse_error(input, input.len(), "unterminated row"));
                }
            }
        }
        rows.push(row);
        skip_ws(&mut chars);
        match chars.next() {
            Some((_, ',')) => continue,
            Some((_, ']')) => break,
            Some((pos, c)) => {
                return Err(parse_error(
                    input,
                    pos,
                    format!("expected ',' or ']', found '{c}'"),
                ))
            }
            None => {
                return Err(parse_error(input, input.len(), "unterminated matrix"));
            }
        }
    }
    skip_ws(&mut chars);
    if let Some((pos, c)) = chars.next() {
        return Err(parse_error(
            input,
            pos,
            format!("unexpected '{c}' after matrix"),
        ));
    }
    crate::zmat::IntMatrix::from_rows(rows)
}

/// Parses a torus element `t^K | w` (also `t | w`, a bare fiber word, or a
/// bare stable power `t^K` when `t` cannot name a fiber generator).
pub fn parse_torus_element<T: Int>(torus: &Torus<T>, input: &str) -> Result<TorusElement<T>> {
    let parse_stable = |offset: usize, token: &str| -> Result<Option<T>> {
        if token == "t" {
            return Ok(Some(T::one()));
        }
        if let Some(exp) = token.strip_prefix("t^") {
            return parse_int(input, offset, exp).map(Some);
        }
        Ok(None)
    };
    match input.find('|') {
        Some(pipe) => {
            let left = &input[..pipe];
            let right = &input[pipe + 1..];
            let k = match tokens(left).as_slice() {
                [(offset, token)] => parse_stable(*offset, token)?.ok_or_else(|| {
                    parse_error(input, *offset, "expected 't' or 't^K' before '|'")
                })?,
                _ => {
                    return Err(parse_error(
                        input,
                        0,
                        "expected a single 't' or 't^K' before '|'",
                    ))
                }
            };
            let word_text = right.trim();
            let word_offset = pipe + 1 + (right.len() - right.trim_start().len());
            let word = parse_word(Some(torus.rank()), word_text).map_err(|e| match e {
                Error::Parse { col, msg, line } if line == 1 => {
                    parse_error(input, word_offset + col - 1, msg)
                }
                other => other,
            })?;
            torus.element(k, word)
        }
        None => {
            // A single t-token is a stable power when unambiguous.
            if torus.rank() < 20 {
                if let [(offset, token)] = tokens(input).as_slice() {
                    if let Some(k) = parse_stable(*offset, token)? {
                        return torus.element(k, Word::identity(torus.rank()));
                    }
                }
            }
            torus.fiber_element(parse_word(Some(torus.rank()), input)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmat::IntMatrix;
    use num_bigint::BigInt;
    use num_traits::Zero;

    type W = Word<BigInt>;

    #[test]
    fn parses_words_and_round_trips() {
        let w: W = parse_word(Some(2), "a b^2 a^-1").unwrap();
        assert_eq!(w.to_string(), "a b^2 a^-1");
        let again: W = parse_word(Some(2), &w.to_string()).unwrap();
        assert_eq!(again, w);

        let id: W = parse_word(Some(2), "1").unwrap();
        assert!(id.is_identity());
        assert_eq!(id.to_string(), "1");

        // Reduction happens on parse.
        let w: W = parse_word(Some(2), "a a^-1 b b").unwrap();
        assert_eq!(w.to_string(), "b^2");

        // Uppercase shorthand for inverses.
        let w: W = parse_word(Some(2), "A B^2").unwrap();
        assert_eq!(w.to_string(), "a^-1 b^-2");

        // Explicit x-indexing beyond letters, and plain 'x' as letter 24.
        let w: W = parse_word(Some(30), "x1 x27^3").unwrap();
        assert_eq!(w.to_string(), "x1 x27^3");
        let w: W = parse_word(Some(26), "x^2").unwrap();
        assert_eq!(w.exponent_sum(23), BigInt::from(2));
    }

    #[test]
    fn infers_rank_when_unspecified() {
        let w: W = parse_word(None, "c b").unwrap();
        assert_eq!(w.rank(), 3);
        let id: W = parse_word(None, "1").unwrap();
        assert_eq!(id.rank(), 1);
    }

    #[test]
    fn reports_positions_in_word_errors() {
        let err = parse_word::<BigInt>(Some(2), "a q").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 1);
                assert_eq!(col, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_word::<BigInt>(Some(2), "a c").unwrap_err();
        match err {
            Error::Parse { col, msg, .. } => {
                assert_eq!(col, 3);
                assert!(msg.contains("out of range"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_word::<BigInt>(Some(2), "a\nb^x").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parses_free_maps() {
        let map: FreeMap<BigInt> = parse_free_map("a -> a b^2 ; b -> b").unwrap();
        assert_eq!(map.rank(), 2);
        assert_eq!(map.to_string(), "a -> a b^2 ; b -> b");
        assert!(!map.has_inverse());

        // Round-trip with an inverse block, which gets verified.
        let map: FreeMap<BigInt> =
            parse_free_map("a -> a b ; b -> b ; inv: a -> a b^-1 ; b -> b").unwrap();
        assert!(map.has_inverse());
        let again: FreeMap<BigInt> = parse_free_map(&map.to_string()).unwrap();
        assert_eq!(again, map);
        assert!(again.has_inverse());

        // Entries may come in any order.
        let map: FreeMap<BigInt> = parse_free_map("b -> a ; a -> b").unwrap();
        assert_eq!(map.image(0).to_string(), "b");
        assert_eq!(map.image(1).to_string(), "a");
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(matches!(
            parse_free_map::<BigInt>("a -> a ; a -> b"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_free_map::<BigInt>("a -> a c ; b -> b"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_free_map::<BigInt>("a -> a"),
            Ok(_)
        ));
        assert!(matches!(
            parse_free_map::<BigInt>("a => b"),
            Err(Error::Parse { .. })
        ));
        // A wrong inverse is rejected by verification, not parsing.
        assert!(matches!(
            parse_free_map::<BigInt>("a -> a b ; b -> b ; inv: a -> a b ; b -> b"),
            Err(Error::InverseFails(_))
        ));
    }

    #[test]
    fn parses_matrices() {
        let m: IntMatrix<BigInt> = parse_matrix("[[1,2],[0,1]]").unwrap();
        assert_eq!(m.to_string(), "[[1,2],[0,1]]");
        let m: IntMatrix<BigInt> = parse_matrix(" [ [ -1 , 0 ] , [ +7 , 1 ] ] ").unwrap();
        assert_eq!(m.to_string(), "[[-1,0],[7,1]]");
        let m: IntMatrix<BigInt> =
            parse_matrix("[[1,0,0],[0,1,0],[0,0,1]]").unwrap();
        assert!(m.is_identity());

        assert!(matches!(
            parse_matrix::<BigInt>("[[1,2],[0]]"),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            parse_matrix::<BigInt>("[[1,2],[0,1]] junk"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_matrix::<BigInt>("[[1,x],[0,1]]"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn parses_torus_elements() {
        let torus = Torus::new(FreeMap::<BigInt>::identity(2)).unwrap();
        let el = parse_torus_element(&torus, "t^-3 | a b^2").unwrap();
        assert_eq!(el.to_string(), "t^-3 | a b^2");
        let again = parse_torus_element(&torus, &el.to_string()).unwrap();
        assert_eq!(again, el);

        assert_eq!(
            parse_torus_element(&torus, "t | 1").unwrap(),
            torus.t()
        );
        assert_eq!(
            parse_torus_element(&torus, "t^2").unwrap(),
            torus.t().multiply(&torus.t()).unwrap()
        );
        let fiber = parse_torus_element(&torus, "a b").unwrap();
        assert!(fiber.t_exponent().is_zero());
        assert_eq!(fiber.tail().to_string(), "a b");

        assert!(matches!(
            parse_torus_element(&torus, "s^2 | a"),
            Err(Error::Parse { .. })
        ));
    }
}
