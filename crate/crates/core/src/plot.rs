//! Grouped boxplot rendering to standalone SVG.
//!
//! One box per (factor level, method) from the five-number summaries of
//! [`crate::experiments::summarize`]. Errors span several decades, so the
//! vertical axis is log10 with values clamped below at 1e-12. Output bytes
//! are a pure function of the summary rows.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{Factor, Method, SummaryRow};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 64.0;
const CLAMP: f64 = 1e-12;

fn method_color(method: Method) -> &'static str {
    match method {
        Method::Lmc => "#4c72b0",
        Method::Mala => "#dd8452",
        Method::TwfBaseline => "#55a868",
    }
}

/// Renders the summary as an SVG document and writes it to `out_path`.
pub fn render_boxplots(summary: &[SummaryRow], factor: Factor, out_path: &Path) -> Result<String> {
    let svg = boxplot_svg(summary, factor)?;
    std::fs::write(out_path, &svg)?;
    Ok(svg)
}

/// Pure renderer used by [`render_boxplots`].
pub fn boxplot_svg(summary: &[SummaryRow], factor: Factor) -> Result<String> {
    if summary.is_empty() {
        return Err(Error::InvalidConfig("cannot render an empty summary".into()));
    }
    let mut levels: Vec<f64> = Vec::new();
    let mut methods: Vec<Method> = Vec::new();
    for row in summary {
        if !levels.contains(&row.level) {
            levels.push(row.level);
        }
        if !methods.contains(&row.method) {
            methods.push(row.method);
        }
    }
    levels.sort_by(|a, b| a.total_cmp(b));

    // Log range over all drawable rows, padded to whole decades.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for row in summary.iter().filter(|r| r.n > 0) {
        lo = lo.min(row.min.max(CLAMP));
        hi = hi.max(row.max.max(CLAMP));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidConfig("summary has no finite errors to draw".into()));
    }
    let mut dec_lo = lo.log10().floor();
    let mut dec_hi = hi.log10().ceil();
    if dec_hi - dec_lo < 1.0 {
        dec_lo -= 1.0;
        dec_hi += 1.0;
    }

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let y_of = |v: f64| {
        let d = v.max(CLAMP).log10();
        MARGIN_TOP + plot_h * (dec_hi - d) / (dec_hi - dec_lo)
    };
    let group_w = plot_w / levels.len() as f64;
    let slot_w = group_w / (methods.len() as f64 + 1.0);
    let box_w = slot_w * 0.72;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

    // Axes.
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = MARGIN_TOP;
    let y1 = HEIGHT - MARGIN_BOTTOM;
    let _ = writeln!(
        s,
        "<line x1=\"{x0:.2}\" y1=\"{y1:.2}\" x2=\"{x1:.2}\" y2=\"{y1:.2}\" stroke=\"black\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\" stroke-width=\"1\"/>"
    );

    // Decade ticks and gridlines.
    let mut d = dec_lo;
    while d <= dec_hi + 1e-9 {
        let y = y_of(10f64.powf(d));
        let _ = writeln!(
            s,
            "<line x1=\"{x0:.2}\" y1=\"{y:.2}\" x2=\"{x1:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>"
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">1e{}</text>",
            x0 - 6.0,
            y + 4.0,
            d as i64
        );
        d += 1.0;
    }

    // Axis titles.
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 18.0,
        factor.name()
    );
    let _ = writeln!(
        s,
        "<text x=\"20\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 20 {:.2})\">mre</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    // Boxes, whiskers, medians.
    for (li, &level) in levels.iter().enumerate() {
        let gx = x0 + group_w * li as f64;
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>",
            gx + group_w / 2.0,
            y1 + 18.0,
            level
        );
        for (mi, &method) in methods.iter().enumerate() {
            let Some(row) = summary.iter().find(|r| r.level == level && r.method == method) else {
                continue;
            };
            let cx = gx + slot_w * (mi as f64 + 1.0);
            if row.n_diverged > 0 {
                let _ = writeln!(
                    s,
                    "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\" font-family=\"sans-serif\" fill=\"#c44e52\">{}+</text>",
                    cx,
                    y0 - 6.0,
                    row.n_diverged
                );
            }
            if row.n == 0 {
                continue;
            }
            let color = method_color(method);
            let (y_min, y_q25, y_med, y_q75, y_max) =
                (y_of(row.min), y_of(row.q25), y_of(row.median), y_of(row.q75), y_of(row.max));
            let bx = cx - box_w / 2.0;
            // Whiskers with caps.
            let _ = writeln!(
                s,
                "<line x1=\"{cx:.2}\" y1=\"{y_min:.2}\" x2=\"{cx:.2}\" y2=\"{y_q25:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>"
            );
            let _ = writeln!(
                s,
                "<line x1=\"{cx:.2}\" y1=\"{y_q75:.2}\" x2=\"{cx:.2}\" y2=\"{y_max:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>"
            );
            for yc in [y_min, y_max] {
                let _ = writeln!(
                    s,
                    "<line x1=\"{:.2}\" y1=\"{yc:.2}\" x2=\"{:.2}\" y2=\"{yc:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>",
                    cx - box_w / 4.0,
                    cx + box_w / 4.0
                );
            }
            let _ = writeln!(
                s,
                "<rect x=\"{bx:.2}\" y=\"{y_q75:.2}\" width=\"{box_w:.2}\" height=\"{:.2}\" fill=\"{color}\" fill-opacity=\"0.45\" stroke=\"{color}\" stroke-width=\"1\"/>",
                (y_q25 - y_q75).max(0.5)
            );
            let _ = writeln!(
                s,
                "<line x1=\"{bx:.2}\" y1=\"{y_med:.2}\" x2=\"{:.2}\" y2=\"{y_med:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
                bx + box_w
            );
        }
    }

    // Legend.
    for (mi, &method) in methods.iter().enumerate() {
        let lx = x1 - 130.0;
        let ly = y0 + 6.0 + 18.0 * mi as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{lx:.2}\" y=\"{ly:.2}\" width=\"12\" height=\"12\" fill=\"{}\" fill-opacity=\"0.45\" stroke=\"{}\"/>",
            method_color(method),
            method_color(method)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>",
            lx + 18.0,
            ly + 10.0,
            method.name()
        );
    }

    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(level: f64, method: Method, median: f64) -> SummaryRow {
        SummaryRow {
            level,
            method,
            n: 10,
            n_diverged: 0,
            min: median / 2.0,
            q25: median / 1.5,
            median,
            q75: median * 1.5,
            max: median * 2.0,
        }
    }

    /// Minimal well-formedness check: every opened tag closes in order.
    fn assert_well_formed_xml(doc: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = doc;
        while let Some(start) = rest.find('<') {
            let end = rest[start..].find('>').expect("unclosed angle bracket") + start;
            let tag = &rest[start + 1..end];
            rest = &rest[end + 1..];
            if tag.starts_with('?') || tag.starts_with('!') {
                continue;
            }
            if let Some(name) = tag.strip_prefix('/') {
                let open = stack.pop().unwrap_or_else(|| panic!("stray closing tag {name}"));
                assert_eq!(open, name, "mismatched tag");
            } else if !tag.ends_with('/') {
                let name: String = tag.split_whitespace().next().unwrap_or_default().to_string();
                stack.push(name);
            }
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    #[test]
    fn single_group_renders_one_box() {
        let summary = vec![row(100.0, Method::Lmc, 0.01)];
        let svg = boxplot_svg(&summary, Factor::SampleSize).unwrap();
        assert_eq!(svg.matches("<rect").count(), 1 + 1 + 1); // background + box + legend
        assert_well_formed_xml(&svg);
    }

    #[test]
    fn output_is_well_formed_and_labelled() {
        let summary = vec![
            row(100.0, Method::Lmc, 0.02),
            row(100.0, Method::Mala, 0.03),
            row(100.0, Method::TwfBaseline, 0.04),
            row(500.0, Method::Lmc, 0.005),
            row(500.0, Method::Mala, 0.006),
            row(500.0, Method::TwfBaseline, 0.009),
        ];
        let svg = boxplot_svg(&summary, Factor::SampleSize).unwrap();
        assert_well_formed_xml(&svg);
        assert!(svg.contains("sample_size"));
        assert!(svg.contains("twf-baseline"));
        assert!(svg.contains(">mre<"));
    }

    #[test]
    fn identical_summary_gives_identical_bytes() {
        let summary = vec![row(1.0, Method::Mala, 0.1), row(2.0, Method::Mala, 0.2)];
        let a = boxplot_svg(&summary, Factor::Noise).unwrap();
        let b = boxplot_svg(&summary, Factor::Noise).unwrap();
        assert_eq!(a.into_bytes(), b.into_bytes());
    }

    #[test]
    fn empty_summary_is_rejected() {
        assert!(boxplot_svg(&[], Factor::Noise).is_err());
    }

    #[test]
    fn diverged_groups_are_annotated_not_dropped() {
        let mut only_diverged = row(1.0, Method::Lmc, 0.1);
        only_diverged.n = 0;
        only_diverged.n_diverged = 10;
        let summary = vec![row(2.0, Method::Lmc, 0.1), only_diverged];
        let svg = boxplot_svg(&summary, Factor::Noise).unwrap();
        assert!(svg.contains("10+"));
        assert_well_formed_xml(&svg);
    }
}
