//! Standalone SVG line charts; no display server involved.

use std::fmt::Write as _;

use mlsm::environments::fit_loglog_slope;
use mlsm::error::{Error, Result};

pub struct Series {
    pub label: String,
    /// `(x, y)` points in data coordinates.
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Renders cumulative-regret lines; in log-log mode both axes are log10 and
/// every series gets a fitted slope in its legend entry. Returns the SVG text
/// and the fitted slopes.
pub fn render(
    series: &[Series],
    x_label: &str,
    y_label: &str,
    loglog: bool,
) -> Result<(String, Vec<Option<f64>>)> {
    if series.is_empty() {
        return Err(Error::Config("nothing to plot".into()));
    }
    let mut slopes = Vec::with_capacity(series.len());
    let mut transformed: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for s in series {
        let slope = if loglog {
            fit_loglog_slope(&s.points).ok()
        } else {
            None
        };
        slopes.push(slope);
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| !loglog || (*x > 0.0 && *y > 0.0))
            .map(|&(x, y)| {
                if loglog {
                    (x.log10(), y.log10())
                } else {
                    (x, y)
                }
            })
            .collect();
        if pts.is_empty() {
            return Err(Error::Config(format!(
                "series `{}` has no positive points for log-log axes",
                s.label
            )));
        }
        let label = match slope {
            Some(sl) => format!("{} (slope {:.3})", s.label, sl),
            None => s.label.clone(),
        };
        transformed.push((label, pts));
    }

    let (mut xmin, mut xmax, mut ymin, mut ymax) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (_, pts) in &transformed {
        for &(x, y) in pts {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if xmax <= xmin {
        xmax = xmin + 1.0;
    }
    if ymax <= ymin {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * (WIDTH - MARGIN_L - MARGIN_R);
    let sy = |y: f64| HEIGHT - MARGIN_B - (y - ymin) / (ymax - ymin) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        "<!-- series: {}; axes: {}{} vs {}{} -->",
        transformed.len(),
        if loglog { "log10 " } else { "" },
        x_label,
        if loglog { "log10 " } else { "" },
        y_label
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    // Axes.
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#,
        x0 = MARGIN_L,
        x1 = WIDTH - MARGIN_R,
        y0 = MARGIN_T,
        y1 = HEIGHT - MARGIN_B,
    );
    // Ticks: five per axis.
    for k in 0..=4 {
        let fx = xmin + (xmax - xmin) * k as f64 / 4.0;
        let fy = ymin + (ymax - ymin) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(fx),
            HEIGHT - MARGIN_B + 18.0,
            format_tick(fx, loglog)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN_L - 6.0,
            sy(fy) + 4.0,
            format_tick(fy, loglog)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{}" x2="{:.1}" y2="{}" stroke="#dddddd"/>"##,
            sx(fx),
            MARGIN_T,
            sx(fx),
            HEIGHT - MARGIN_B
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">{}</text>"#,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        xml_escape(y_label)
    );
    // Lines.
    for (i, (label, pts)) in transformed.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for (k, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(
                path,
                "{}{:.2},{:.2} ",
                if k == 0 { "M" } else { "L" },
                sx(x),
                sy(y)
            );
        }
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.4"/>"#,
            path.trim_end()
        );
        let ly = MARGIN_T + 16.0 * i as f64 + 4.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="3" fill="{color}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            MARGIN_L + 10.0,
            ly,
            MARGIN_L + 26.0,
            ly + 5.0,
            xml_escape(label)
        );
    }
    svg.push_str("</svg>\n");
    Ok((svg, slopes))
}

fn format_tick(v: f64, loglog: bool) -> String {
    if loglog {
        format!("1e{v:.1}")
    } else if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_basic_chart() {
        let series = vec![Series {
            label: "run".into(),
            points: (1..=100).map(|t| (t as f64, (t as f64).powf(0.7))).collect(),
        }];
        let (svg, slopes) = render(&series, "round", "regret", false).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("</svg>"));
        assert_eq!(slopes, vec![None]);
    }

    #[test]
    fn loglog_annotates_slope() {
        let series = vec![Series {
            label: "sweep".into(),
            points: (8..=14).map(|k| {
                let t = (1u64 << k) as f64;
                (t, 2.0 * t.powf(0.66))
            }).collect(),
        }];
        let (svg, slopes) = render(&series, "T", "final regret", true).unwrap();
        assert!((slopes[0].unwrap() - 0.66).abs() < 1e-9);
        assert!(svg.contains("slope 0.660"));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(render(&[], "x", "y", false).is_err());
    }
}
