//! Character classes shared by cleaning, tokenization and postprocessing.

use unicode_general_category::{get_general_category, GeneralCategory};

/// Unicode `White_Space`.
pub fn is_whitespace(c: char) -> bool {
    c.is_whitespace()
}

/// Unicode `Alphabetic` or a decimal digit (`Nd`).
pub fn is_word_char(c: char) -> bool {
    c.is_alphabetic() || get_general_category(c) == GeneralCategory::DecimalNumber
}

/// Any `P*` general category.
pub fn is_punctuation(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes() {
        assert!(is_whitespace('\u{00a0}'));
        assert!(is_whitespace('\u{3000}'));
        assert!(!is_whitespace('a'));
        assert!(is_word_char('é'));
        assert!(is_word_char('٣'));
        assert!(!is_word_char('½'));
        assert!(!is_word_char('_'));
        assert!(is_punctuation('_'));
        assert!(is_punctuation('«'));
        assert!(is_punctuation('!'));
        assert!(!is_punctuation('$'));
        assert!(!is_punctuation('+'));
    }
}
