//! Side-by-side rendering of gold and predicted spans: gold is underlined,
//! predictions are colored.

use std::fmt::Write as _;

use clap::ValueEnum;
use toxspan::OffsetSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Terminal,
    Html,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Style {
    gold: bool,
    pred: bool,
}

/// Splits `text` into maximal runs of equally styled characters.
fn runs(text: &str, gold: &OffsetSet, pred: &OffsetSet) -> Vec<(Style, String)> {
    let mut out: Vec<(Style, String)> = Vec::new();
    for (i, c) in text.chars().enumerate() {
        let style = Style { gold: gold.contains(i), pred: pred.contains(i) };
        match out.last_mut() {
            Some((s, run)) if *s == style => run.push(c),
            _ => out.push((style, c.to_string())),
        }
    }
    out
}

const UNDERLINE: &str = "\x1b[4m";
const RED: &str = "\x1b[31m";
const RESET: &str = "\x1b[0m";

pub fn render_terminal(text: &str, gold: &OffsetSet, pred: &OffsetSet) -> String {
    let mut out = String::new();
    for (style, run) in runs(text, gold, pred) {
        if style == Style::default() {
            out.push_str(&run);
            continue;
        }
        if style.gold {
            out.push_str(UNDERLINE);
        }
        if style.pred {
            out.push_str(RED);
        }
        out.push_str(&run);
        out.push_str(RESET);
    }
    out
}

fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn render_html(text: &str, gold: &OffsetSet, pred: &OffsetSet) -> String {
    let mut out = String::new();
    for (style, run) in runs(text, gold, pred) {
        let run = escape_html(&run);
        match (style.gold, style.pred) {
            (false, false) => out.push_str(&run),
            (true, false) => {
                let _ = write!(out, "<u class=\"gold\">{run}</u>");
            }
            (false, true) => {
                let _ = write!(out, "<span class=\"pred\">{run}</span>");
            }
            (true, true) => {
                let _ = write!(out, "<u class=\"gold\"><span class=\"pred\">{run}</span></u>");
            }
        }
    }
    out
}

pub const HTML_HEAD: &str = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<style>\n\
    .pred { color: #c0392b; font-weight: bold; }\n\
    u.gold { text-decoration: underline; }\n\
    p { white-space: pre-wrap; }\n\
    </style>\n</head>\n<body>\n";
pub const HTML_TAIL: &str = "</body>\n</html>\n";

/// One rendered document covering every comment.
pub fn render_document(format: Format, rows: &[(usize, &str, &OffsetSet, &OffsetSet)]) -> String {
    let mut out = String::new();
    if format == Format::Html {
        out.push_str(HTML_HEAD);
    }
    for &(id, text, gold, pred) in rows {
        match format {
            Format::Terminal => {
                let _ = writeln!(out, "{id}\t{}", render_terminal(text, gold, pred));
            }
            Format::Html => {
                let _ = writeln!(out, "<p id=\"c{id}\">{}</p>", render_html(text, gold, pred));
            }
        }
    }
    if format == Format::Html {
        out.push_str(HTML_TAIL);
    }
    out
}
