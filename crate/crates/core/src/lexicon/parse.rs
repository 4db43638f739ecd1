use super::LexiconError;

const DICT_MARKER: &str = "dictionary:";

/// Renders the dictionary-construction prompt. `english` is the English
/// sentence, `source` its translation in `language`.
pub fn build_dict_prompt(
    english: &str,
    source: &str,
    language: &str,
) -> Result<String, LexiconError> {
    let (english, source, language) = (english.trim(), source.trim(), language.trim());
    if english.is_empty() {
        return Err(LexiconError::EmptyInput {
            what: "English sentence",
        });
    }
    if source.is_empty() {
        return Err(LexiconError::EmptyInput {
            what: "source sentence",
        });
    }
    if language.is_empty() {
        return Err(LexiconError::EmptyInput {
            what: "language name",
        });
    }
    Ok(format!(
        "(1) Please provide the translation of the given English sentence into {language}, \
along with a word-for-word dictionary for each word.\n\
(2) The output format must be strictly followed:\n\
1. Start with `English:' followed by the English sentence.\n\
2. On the next line, start with `{language}:' followed by the {source} translation.\n\
3. On the next line, start with `dictionary:' followed by each word in the {language} sentence, \
annotated with its English meaning in parentheses, separated by spaces.\n\
(3) Now generate translations for the following sentence:\n\
English: {english}\n\
{language}: {source}\n\
dictionary:"
    ))
}

/// Renders `units` as a single `dictionary: w (g) ...` line.
pub fn render_dictionary_line<S: AsRef<str>, G: AsRef<str>>(units: &[(S, G)]) -> String {
    let mut out = String::from(DICT_MARKER);
    for (s, g) in units {
        out.push(' ');
        out.push_str(s.as_ref());
        out.push_str(" (");
        out.push_str(g.as_ref());
        out.push(')');
    }
    out
}

fn dictionary_payload(text: &str) -> Result<&str, LexiconError> {
    let lines: Vec<&str> = text.lines().collect();
    let (at, rest) = lines
        .iter()
        .enumerate()
        .rev()
        .find_map(|(i, line)| {
            let t = line.trim_start();
            let head = t.get(..DICT_MARKER.len())?;
            head.eq_ignore_ascii_case(DICT_MARKER)
                .then(|| (i, &t[DICT_MARKER.len()..]))
        })
        .ok_or(LexiconError::MissingMarker)?;
    if !rest.trim().is_empty() {
        return Ok(rest);
    }
    // payload put on the line after the marker
    Ok(lines[at + 1..]
        .iter()
        .copied()
        .find(|l| !l.trim().is_empty())
        .unwrap_or(""))
}

fn clean_surface(s: &str) -> &str {
    s.trim().trim_matches(|c: char| c == ',' || c == ';').trim()
}

/// Parses the `surface (gloss)` units after the last `dictionary:` line.
///
/// Glosses run to the matching `)` at depth zero, so they may contain
/// nested parentheses. Text after the last unit is ignored.
pub fn parse_dictionary_block(text: &str) -> Result<Vec<(String, String)>, LexiconError> {
    let payload = dictionary_payload(text)?;
    let chars: Vec<(usize, char)> = payload.char_indices().collect();
    let mut units = Vec::new();
    let mut depth = 0usize;
    let mut seg_start = 0usize;
    let mut open_at = 0usize;
    let mut surface = "";
    for (ci, &(bi, c)) in chars.iter().enumerate() {
        match c {
            '(' => {
                if depth == 0 {
                    surface = clean_surface(&payload[seg_start..bi]);
                    if surface.is_empty() {
                        return Err(LexiconError::EmptySurface { offset: ci });
                    }
                    open_at = ci;
                    seg_start = bi + 1;
                }
                depth += 1;
            }
            ')' => {
                if depth == 0 {
                    return Err(LexiconError::Unbalanced { offset: ci });
                }
                depth -= 1;
                if depth == 0 {
                    let gloss = payload[seg_start..bi].trim();
                    if gloss.is_empty() {
                        return Err(LexiconError::EmptyGloss { offset: open_at });
                    }
                    units.push((surface.to_string(), gloss.to_string()));
                    seg_start = bi + 1;
                }
            }
            _ => {}
        }
    }
    if depth > 0 {
        return Err(LexiconError::Unbalanced { offset: open_at });
    }
    if units.is_empty() {
        return Err(LexiconError::EmptyDictionary);
    }
    Ok(units)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn prompt_template() {
        let p = build_dict_prompt("The cat sat.", "Kucing itu duduk.", "Standard Malay").unwrap();
        assert!(p.starts_with(
            "(1) Please provide the translation of the given English sentence into Standard Malay,"
        ));
        assert!(p.contains("Start with `English:'"));
        assert!(p.contains("English: The cat sat.\nStandard Malay: Kucing itu duduk.\n"));
        assert!(p.ends_with("dictionary:"));
        assert!(matches!(
            build_dict_prompt("a", "b", " "),
            Err(LexiconError::EmptyInput {
                what: "language name"
            })
        ));
        assert!(build_dict_prompt("", "b", "Malay").is_err());
    }

    #[test]
    fn parses_units_with_multiword_gloss() {
        let got = parse_dictionary_block("dictionary: Kucing (cat) duduk (sat down)").unwrap();
        assert_eq!(got, pairs(&[("Kucing", "cat"), ("duduk", "sat down")]));
    }

    #[test]
    fn anchors_on_last_marker_line() {
        let text = "English: x\nStandard Malay: x\ndictionary: a (b)\nSorry, corrected:\ndictionary: x (y)";
        assert_eq!(parse_dictionary_block(text).unwrap(), pairs(&[("x", "y")]));
        let text = "dictionary:\n\nx (y) z (w)\n";
        assert_eq!(
            parse_dictionary_block(text).unwrap(),
            pairs(&[("x", "y"), ("z", "w")])
        );
        assert_eq!(
            parse_dictionary_block("Dictionary: x (y)").unwrap(),
            pairs(&[("x", "y")])
        );
    }

    #[test]
    fn nested_gloss_and_separators() {
        let got =
            parse_dictionary_block("dictionary: bank (bank (financial)), tepi (edge);").unwrap();
        assert_eq!(
            got,
            pairs(&[("bank", "bank (financial)"), ("tepi", "edge")])
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_dictionary_block("no marker"),
            Err(LexiconError::MissingMarker)
        ));
        assert!(matches!(
            parse_dictionary_block("dictionary: a (b"),
            Err(LexiconError::Unbalanced { offset: 3 })
        ));
        assert!(matches!(
            parse_dictionary_block("dictionary: a b) c"),
            Err(LexiconError::Unbalanced { offset: 4 })
        ));
        assert!(matches!(
            parse_dictionary_block("dictionary:   "),
            Err(LexiconError::EmptyDictionary)
        ));
        assert!(matches!(
            parse_dictionary_block("dictionary: (x)"),
            Err(LexiconError::EmptySurface { .. })
        ));
        assert!(matches!(
            parse_dictionary_block("dictionary: a ( )"),
            Err(LexiconError::EmptyGloss { .. })
        ));
    }

    #[test]
    fn render_then_parse() {
        let units = pairs(&[("New York", "New York"), ("tepi", "edge (of river)")]);
        let line = render_dictionary_line(&units);
        assert_eq!(
            line,
            "dictionary: New York (New York) tepi (edge (of river))"
        );
        assert_eq!(parse_dictionary_block(&line).unwrap(), units);
    }
}
