//! Reader for Praat's long-form ("ooTextFile") TextGrid files.

use thiserror::Error;

use super::PhoneInterval;

#[derive(Debug, Error, PartialEq)]
pub enum TextGridError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("TextGrid has no interval tiers")]
    MissingTiers,
    #[error("TextGrid is not valid UTF-8 or UTF-16: {0}")]
    Encoding(String),
}

#[derive(Debug)]
enum Entry {
    /// `key = value`
    Value(String, String),
    /// `key: size = n`
    Size(String, String),
    /// `key [i]:` or `key []:`
    Header(String),
    /// `tiers? <exists>` and friends
    Flag,
}

#[derive(Debug)]
struct Line {
    number: usize,
    entry: Entry,
}

fn syntax(line: usize, message: impl Into<String>) -> TextGridError {
    TextGridError::Syntax { line, message: message.into() }
}

/// Unescapes a Praat string literal, returning None when the closing quote is
/// missing.
fn unquote(raw: &str) -> Option<String> {
    let inner = raw.strip_prefix('"')?;
    let mut out = String::new();
    let mut chars = inner.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '"' {
            if chars.peek() == Some(&'"') {
                out.push('"');
                chars.next();
            } else {
                return chars.all(char::is_whitespace).then_some(out);
            }
        } else {
            out.push(c);
        }
    }
    None
}

fn tokenize(text: &str) -> Result<Vec<Line>, TextGridError> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((number, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.ends_with("<exists>") {
            out.push(Line { number, entry: Entry::Flag });
            continue;
        }
        if let Some((key, rest)) = line.split_once(": size =") {
            out.push(Line { number, entry: Entry::Size(key.trim().to_string(), rest.trim().to_string()) });
            continue;
        }
        if line.ends_with(':') {
            if let Some((key, _)) = line.split_once('[') {
                out.push(Line { number, entry: Entry::Header(key.trim().to_string()) });
                continue;
            }
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(syntax(number, format!("unrecognized line `{line}`")));
        };
        let mut value = value.trim().to_string();
        // string literals may span lines; keep reading until the quote closes
        if value.starts_with('"') {
            while unquote(&value).is_none() {
                match lines.next() {
                    Some((_, more)) => {
                        value.push('\n');
                        value.push_str(more.trim_end());
                    }
                    None => return Err(syntax(number, "unterminated string literal")),
                }
            }
        }
        out.push(Line { number, entry: Entry::Value(key.trim().to_string(), value) });
    }
    Ok(out)
}

struct Cursor {
    lines: Vec<Line>,
    at: usize,
    eof_line: usize,
}

impl Cursor {
    fn next(&mut self, expected: &str) -> Result<&Line, TextGridError> {
        let line = self
            .lines
            .get(self.at)
            .ok_or_else(|| syntax(self.eof_line, format!("unexpected end of file, expected {expected}")))?;
        self.at += 1;
        Ok(line)
    }

    fn value(&mut self, key: &str) -> Result<(usize, String), TextGridError> {
        let line = self.next(&format!("`{key} = ...`"))?;
        match &line.entry {
            Entry::Value(k, v) if k == key => Ok((line.number, v.clone())),
            other => Err(syntax(line.number, format!("expected `{key} = ...`, found {other:?}"))),
        }
    }

    fn number(&mut self, key: &str) -> Result<f64, TextGridError> {
        let (line, raw) = self.value(key)?;
        raw.parse().map_err(|_| syntax(line, format!("`{key}` is not a number: `{raw}`")))
    }

    fn string(&mut self, key: &str) -> Result<String, TextGridError> {
        let (line, raw) = self.value(key)?;
        unquote(&raw).ok_or_else(|| syntax(line, format!("`{key}` is not a quoted string")))
    }

    fn size(&mut self, key: &str) -> Result<usize, TextGridError> {
        let line = self.next(&format!("`{key}: size = ...`"))?;
        match &line.entry {
            Entry::Size(k, v) if k == key => {
                v.parse().map_err(|_| syntax(line.number, format!("bad size `{v}`")))
            }
            // the file-level count is written `size = n`
            Entry::Value(k, v) if k == "size" && key == "size" => {
                v.parse().map_err(|_| syntax(line.number, format!("bad size `{v}`")))
            }
            other => Err(syntax(line.number, format!("expected `{key}: size = ...`, found {other:?}"))),
        }
    }

    fn header(&mut self, key: &str) -> Result<(), TextGridError> {
        let line = self.next(&format!("`{key} [..]:`"))?;
        match &line.entry {
            Entry::Header(k) if k == key => Ok(()),
            other => Err(syntax(line.number, format!("expected `{key} [..]:`, found {other:?}"))),
        }
    }
}

/// Decodes raw file bytes (UTF-8, or UTF-16 with a byte-order mark) and parses them.
pub fn parse_textgrid_bytes(bytes: &[u8]) -> Result<Vec<PhoneInterval>, TextGridError> {
    parse_textgrid(&decode(bytes)?)
}

fn decode(bytes: &[u8]) -> Result<String, TextGridError> {
    let utf16 = |body: &[u8], big_endian: bool| {
        if body.len() % 2 != 0 {
            return Err(TextGridError::Encoding("odd byte count in UTF-16 text".into()));
        }
        let units: Vec<u16> = body
            .chunks_exact(2)
            .map(|p| if big_endian { u16::from_be_bytes([p[0], p[1]]) } else { u16::from_le_bytes([p[0], p[1]]) })
            .collect();
        String::from_utf16(&units).map_err(|e| TextGridError::Encoding(e.to_string()))
    };
    match bytes {
        [0xFF, 0xFE, rest @ ..] => utf16(rest, false),
        [0xFE, 0xFF, rest @ ..] => utf16(rest, true),
        [0xEF, 0xBB, 0xBF, rest @ ..] => {
            String::from_utf8(rest.to_vec()).map_err(|e| TextGridError::Encoding(e.to_string()))
        }
        _ => String::from_utf8(bytes.to_vec()).map_err(|e| TextGridError::Encoding(e.to_string())),
    }
}

/// Parses long-form TextGrid text and returns every labeled interval of every
/// interval tier, in file order. Intervals whose text is empty or whitespace
/// are dropped; point tiers are skipped.
pub fn parse_textgrid(text: &str) -> Result<Vec<PhoneInterval>, TextGridError> {
    let lines = tokenize(text)?;
    let eof_line = text.lines().count() + 1;
    let mut cur = Cursor { lines, at: 0, eof_line };

    let file_type = cur.string("File type")?;
    if file_type != "ooTextFile" {
        return Err(syntax(1, format!("unsupported file type `{file_type}`")));
    }
    let class = cur.string("Object class")?;
    if class != "TextGrid" {
        return Err(syntax(2, format!("object class `{class}` is not TextGrid")));
    }
    cur.number("xmin")?;
    cur.number("xmax")?;
    match cur.lines.get(cur.at) {
        Some(Line { entry: Entry::Flag, .. }) => cur.at += 1,
        Some(line) => return Err(syntax(line.number, "expected `tiers? <exists>`")),
        None => return Err(TextGridError::MissingTiers),
    }
    let tier_count = cur.size("size")?;
    if tier_count == 0 {
        return Err(TextGridError::MissingTiers);
    }
    cur.header("item")?;

    let mut intervals = Vec::new();
    let mut interval_tiers = 0;
    for _ in 0..tier_count {
        cur.header("item")?;
        let class_line = cur.lines.get(cur.at).map_or(cur.eof_line, |l| l.number);
        let class = cur.string("class")?;
        let name = cur.string("name")?;
        cur.number("xmin")?;
        cur.number("xmax")?;
        match class.as_str() {
            "IntervalTier" => {
                interval_tiers += 1;
                let count = cur.size("intervals")?;
                for _ in 0..count {
                    cur.header("intervals")?;
                    let start_s = cur.number("xmin")?;
                    let end_s = cur.number("xmax")?;
                    let text = cur.string("text")?;
                    let label = text.trim();
                    if !label.is_empty() {
                        intervals.push(PhoneInterval { label: label.to_string(), start_s, end_s, tier: name.clone() });
                    }
                }
            }
            "TextTier" => {
                let count = cur.size("points")?;
                for _ in 0..count {
                    cur.header("points")?;
                    let line = cur.next("`number = ...`")?;
                    if !matches!(&line.entry, Entry::Value(k, _) if k == "number" || k == "time") {
                        return Err(syntax(line.number, "expected point time"));
                    }
                    cur.string("mark")?;
                }
            }
            other => return Err(syntax(class_line, format!("unknown tier class `{other}`"))),
        }
    }
    if interval_tiers == 0 {
        return Err(TextGridError::MissingTiers);
    }
    Ok(intervals)
}

/// Writes intervals back out as a long-form TextGrid, one tier per distinct
/// tier name in order of first appearance.
pub fn write_textgrid(intervals: &[PhoneInterval], xmax: f64) -> String {
    let mut tiers: Vec<(&str, Vec<&PhoneInterval>)> = Vec::new();
    for interval in intervals {
        match tiers.iter_mut().find(|(name, _)| *name == interval.tier) {
            Some((_, list)) => list.push(interval),
            None => tiers.push((&interval.tier, vec![interval])),
        }
    }
    let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
    let mut out = String::new();
    out.push_str("File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n");
    out.push_str(&format!("xmin = 0 \nxmax = {xmax} \ntiers? <exists> \nsize = {} \nitem []: \n", tiers.len()));
    for (i, (name, list)) in tiers.iter().enumerate() {
        out.push_str(&format!("    item [{}]:\n", i + 1));
        out.push_str("        class = \"IntervalTier\" \n");
        out.push_str(&format!("        name = {} \n", quote(name)));
        out.push_str(&format!("        xmin = 0 \n        xmax = {xmax} \n"));
        out.push_str(&format!("        intervals: size = {} \n", list.len()));
        for (j, interval) in list.iter().enumerate() {
            out.push_str(&format!("        intervals [{}]:\n", j + 1));
            out.push_str(&format!("            xmin = {} \n", interval.start_s));
            out.push_str(&format!("            xmax = {} \n", interval.end_s));
            out.push_str(&format!("            text = {} \n", quote(&interval.label)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0 
xmax = 1 
tiers? <exists> 
size = 1 
item []: 
    item [1]:
        class = "IntervalTier" 
        name = "phones" 
        xmin = 0 
        xmax = 1 
        intervals: size = 3 
        intervals [1]:
            xmin = 0 
            xmax = 0.5 
            text = "" 
        intervals [2]:
            xmin = 0.5 
            xmax = 0.61 
            text = "m" 
        intervals [3]:
            xmin = 0.61 
            xmax = 1 
            text = "   " 
"#;

    #[test]
    fn minimal_phone_tier() {
        let intervals = parse_textgrid(MINIMAL).unwrap();
        assert_eq!(
            intervals,
            vec![PhoneInterval { label: "m".into(), start_s: 0.5, end_s: 0.61, tier: "phones".into() }]
        );
    }

    #[test]
    fn truncated_file_names_line() {
        let truncated: String = MINIMAL.lines().take(20).collect::<Vec<_>>().join("\n");
        match parse_textgrid(&truncated) {
            Err(TextGridError::Syntax { line, message }) => {
                assert_eq!(line, 21);
                assert!(message.contains("end of file"), "{message}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn bad_value_reports_its_line() {
        let broken = MINIMAL.replace("xmax = 0.61", "xmax = zero");
        assert!(matches!(parse_textgrid(&broken), Err(TextGridError::Syntax { line: 21, .. })));
    }

    #[test]
    fn no_tiers_is_missing_tiers() {
        let text = "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\nxmin = 0\nxmax = 1\ntiers? <exists>\nsize = 0\nitem []:\n";
        assert_eq!(parse_textgrid(text), Err(TextGridError::MissingTiers));
    }

    #[test]
    fn utf16_with_bom() {
        let mut bytes = vec![0xFF, 0xFE];
        for unit in MINIMAL.replace("\"m\"", "\"ŋ\"").encode_utf16() {
            bytes.extend_from_slice(&unit.to_le_bytes());
        }
        let intervals = parse_textgrid_bytes(&bytes).unwrap();
        assert_eq!(intervals[0].label, "ŋ");
    }

    #[test]
    fn escaped_quotes_and_point_tiers() {
        let intervals = vec![PhoneInterval { label: "say \"hi\"".into(), start_s: 0.0, end_s: 0.25, tier: "words".into() }];
        let mut text = write_textgrid(&intervals, 1.0);
        text = text.replace("size = 1 \nitem", "size = 2 \nitem");
        text.push_str(
            "    item [2]:\n        class = \"TextTier\"\n        name = \"marks\"\n        xmin = 0\n        xmax = 1\n        points: size = 1\n        points [1]:\n            number = 0.5\n            mark = \"x\"\n",
        );
        assert_eq!(parse_textgrid(&text).unwrap(), intervals);
    }

    #[test]
    fn round_trip_is_lossless() {
        let intervals = vec![
            PhoneInterval { label: "tʃ".into(), start_s: 0.1, end_s: 0.2345678901234567, tier: "phones".into() },
            PhoneInterval { label: "hello".into(), start_s: 0.0, end_s: 0.5, tier: "words".into() },
            PhoneInterval { label: "s".into(), start_s: 0.3, end_s: 0.4, tier: "phones".into() },
        ];
        let parsed = parse_textgrid(&write_textgrid(&intervals, 1.0)).unwrap();
        let mut expected = intervals.clone();
        expected.sort_by_key(|i| i.tier != "phones");
        assert_eq!(parsed, expected);
    }
}
