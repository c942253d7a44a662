//! deb822 paragraphs as they appear in `Packages` and dpkg `status` files.

use crate::error::Diagnostic;

/// One blank-line-delimited block of `Field: value` lines.
///
/// Multi-line values keep their continuation lines joined with `\n`, each
/// without the single leading space that marks it as a continuation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stanza {
    pub fields: Vec<(String, String)>,
    /// 1-based line of the first field.
    pub line: usize,
}

impl Stanza {
    /// Field lookup; names are case-insensitive.
    pub fn get(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

pub fn parse_paragraphs(text: &str) -> (Vec<Stanza>, Vec<Diagnostic>) {
    let mut stanzas = Vec::new();
    let mut diagnostics = Vec::new();
    let mut current = Stanza::default();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);

        if line.is_empty() {
            if !current.fields.is_empty() {
                stanzas.push(std::mem::take(&mut current));
            }
            continue;
        }

        if line.starts_with(' ') || line.starts_with('\t') {
            match current.fields.last_mut() {
                Some((_, value)) => {
                    value.push('\n');
                    value.push_str(&line[1..]);
                }
                None => diagnostics.push(Diagnostic::new(
                    Some(lineno),
                    "continuation line outside of a field",
                )),
            }
            continue;
        }

        if line.starts_with('#') {
            continue;
        }

        match line.split_once(':') {
            Some((name, value)) if !name.is_empty() && !name.contains(char::is_whitespace) => {
                if current.fields.is_empty() {
                    current.line = lineno;
                }
                current
                    .fields
                    .push((name.to_string(), value.trim().to_string()));
            }
            _ => diagnostics.push(Diagnostic::new(
                Some(lineno),
                format!("not a field line: {line:?}"),
            )),
        }
    }
    if !current.fields.is_empty() {
        stanzas.push(current);
    }
    (stanzas, diagnostics)
}

/// Writes stanzas back out in index form, one blank line between stanzas.
pub fn render(stanzas: &[Stanza]) -> String {
    let mut out = String::new();
    for (i, stanza) in stanzas.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (name, value) in &stanza.fields {
            let mut lines = value.split('\n');
            let first = lines.next().unwrap_or("");
            out.push_str(name);
            out.push(':');
            if !first.is_empty() {
                out.push(' ');
                out.push_str(first);
            }
            out.push('\n');
            for cont in lines {
                out.push(' ');
                out.push_str(cont);
                out.push('\n');
            }
        }
    }
    out
}
