use proptest::prelude::*;

use pk_forge::fixtures::{LOTO_TTL, RECIPE_TTL};
use pk_forge::io::{ntriples, parse_turtle, ParseDiagnostic};

/// Positions are 1-based and point inside the text, or one past the end of
/// the last line for end-of-input errors.
fn in_bounds(text: &str, d: &ParseDiagnostic) -> bool {
    let lines: Vec<&str> = text.split('\n').collect();
    d.line >= 1
        && d.line <= lines.len()
        && d.column >= 1
        && d.column <= lines[d.line - 1].chars().count() + 1
}

fn check(text: &str) -> Result<(), TestCaseError> {
    if let Err(diags) = parse_turtle(text) {
        prop_assert!(!diags.is_empty());
        for d in &diags {
            prop_assert!(in_bounds(text, d), "{d} out of bounds");
        }
    }
    if let Err(d) = ntriples::parse(text) {
        prop_assert!(in_bounds(text, &d), "{d} out of bounds");
    }
    Ok(())
}

fn fixture() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just(LOTO_TTL), Just(RECIPE_TTL)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn truncation_never_panics(text in fixture(), cut in 0usize..4096) {
        let mut end = cut.min(text.len());
        while !text.is_char_boundary(end) {
            end -= 1;
        }
        check(&text[..end])?;
    }

    #[test]
    fn byte_mutation_never_panics(
        text in fixture(),
        edits in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 1..6),
    ) {
        let mut bytes = text.as_bytes().to_vec();
        for (i, b) in edits {
            let i = i.index(bytes.len());
            bytes[i] = b;
        }
        let text = String::from_utf8_lossy(&bytes);
        check(&text)?;
    }

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        check(&text)?;
    }

    #[test]
    fn turtle_punctuation_soup(text in "[<>_:@\\[\\]().;,\"'#a-z0-9 \n^]{0,120}") {
        check(&text)?;
    }
}

#[test]
fn error_position_is_exact() {
    let text = "@prefix ex: <https://example.org/> .\nex:a ex:b ex:c ;\n  ex:d \"open .\n";
    let diags = parse_turtle(text).unwrap_err();
    // the line break that cuts the short string is the offending character
    assert_eq!((diags[0].line, diags[0].column), (3, 15));
    assert!(diags[0].message.contains("string literal"), "{}", diags[0]);
    let diags = parse_turtle("@prefix ex: <https://example.org/> .\nex:a ex:b \"x\\q\" .\n").unwrap_err();
    assert_eq!((diags[0].line, diags[0].column), (2, 13));
}
