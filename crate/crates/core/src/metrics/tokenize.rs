//! The `13a` tokenizer (mteval-v13a as implemented by sacreBLEU).
//!
//! Rules, applied in order to the line padded with one space on each side:
//! 1. drop `<skipped>`, join `-\n` hyphenation, turn newlines into spaces,
//!    and unescape `&quot; &amp; &lt; &gt;`;
//! 2. surround ASCII symbols `{|}~ [\]^_` `` ` `` ` !"#$%& ()*+ :;<=>?@ /`
//!    with spaces;
//! 3. split `.` and `,` off a preceding non-digit;
//! 4. split `.` and `,` off a following non-digit;
//! 5. split `-` off a preceding digit;
//! 6. collapse whitespace.
//!
//! Rules 3–5 are left-to-right, non-overlapping two-character rewrites, the
//! same scan a regex substitution performs.

/// Whitespace as Python's `str.split()` sees it (Unicode whitespace plus
/// the ASCII separators U+001C..U+001F).
pub fn is_py_whitespace(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

fn is_symbol(c: char) -> bool {
    matches!(c,
        '{'..='~' | '['..='`' | ' '..='&' | '('..='+' | ':'..='@' | '/')
}

fn is_digit(c: char) -> bool {
    c.is_ascii_digit()
}

fn is_period_comma(c: char) -> bool {
    c == '.' || c == ','
}

/// Rewrites every non-overlapping `ab` with `first(a) && second(b)`.
fn pair_rule(
    chars: &[char],
    first: fn(char) -> bool,
    second: fn(char) -> bool,
    emit: fn(&mut Vec<char>, char, char),
) -> Vec<char> {
    let mut out = Vec::with_capacity(chars.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        if i + 1 < chars.len() && first(chars[i]) && second(chars[i + 1]) {
            emit(&mut out, chars[i], chars[i + 1]);
            i += 2;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

pub fn tokenize_13a(line: &str) -> Vec<String> {
    let mut s = line
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if s.contains('&') {
        s = s
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let mut chars = Vec::with_capacity(s.len() + 16);
    chars.push(' ');
    for c in s.chars() {
        if is_symbol(c) {
            chars.extend([' ', c, ' ']);
        } else {
            chars.push(c);
        }
    }
    chars.push(' ');

    let chars = pair_rule(
        &chars,
        |c| !is_digit(c),
        is_period_comma,
        |o, a, b| o.extend([a, ' ', b, ' ']),
    );
    let chars = pair_rule(
        &chars,
        is_period_comma,
        |c| !is_digit(c),
        |o, a, b| o.extend([' ', a, ' ', b]),
    );
    let chars = pair_rule(
        &chars,
        is_digit,
        |c| c == '-',
        |o, a, b| o.extend([a, ' ', b, ' ']),
    );

    let joined: String = chars.into_iter().collect();
    joined
        .split(is_py_whitespace)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_examples() {
        assert_eq!(tokenize_13a("Hello, world!"), ["Hello", ",", "world", "!"]);
        assert_eq!(tokenize_13a("2.5"), ["2.5"]);
        assert!(tokenize_13a("").is_empty());
    }

    #[test]
    fn adjacent_period_comma_not_both_split() {
        // the scan consumes "a." so "," stays attached to "b" in rule 3,
        // and rule 4 then splits it off
        assert_eq!(tokenize_13a("a.,b"), ["a", ".", ",", "b"]);
    }

    #[test]
    fn ascii_separator_is_whitespace() {
        assert_eq!(tokenize_13a("a\u{1f}b"), ["a", "b"]);
    }
}
