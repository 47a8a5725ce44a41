//! Heatmaps of pairwise matrices and 2D annotator scatter plots as plain
//! SVG 1.1 (`rect`, `circle`, `line`, `text`, with `title` tooltips).
//!
//! Output is a pure function of the inputs. Numbers are printed with fixed
//! precision so identical inputs give identical bytes.

use std::fmt::Write;

use tendeval_core::rng::CounterRng;
use tendeval_core::{AgreementClusters, Embedding2D, MaskedMatrix};

const CELL: f64 = 28.0;
const CHAR_W: f64 = 7.0;
const INVALID_FILL: &str = "#bdbdbd";
const HATCH: &str = "#b2182b";
const LOW: [f64; 3] = [247.0, 251.0, 255.0];
const HIGH: [f64; 3] = [8.0, 48.0, 107.0];

/// Tableau 10; cluster ids wrap around.
pub const CLUSTER_PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("labels cover {labels} annotators but the matrix has {size}")]
    LabelCount { labels: usize, size: usize },
    #[error("embedding and clusters list different annotators")]
    AnnotatorMismatch,
}

/// Sequential color for a value, linear over `[0, 1]` from near-white to
/// dark blue. Values outside the range are clamped.
pub fn sequential_color(v: f64) -> String {
    let t = v.clamp(0.0, 1.0);
    let c: Vec<u8> = (0..3).map(|k| (LOW[k] + t * (HIGH[k] - LOW[k])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="11">"##
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="#ffffff"/>"##);
}

/// M×M grid of `m` with annotator ids on both axes.
///
/// Invalid cells (including the diagonal) are gray. Negative values are
/// colored as 0 and hatched; every cell's tooltip carries the raw value.
pub fn heatmap_svg(m: &MaskedMatrix, labels: &[String], title: &str) -> Result<String, RenderError> {
    let n = m.size();
    if labels.len() != n {
        return Err(RenderError::LabelCount { labels: labels.len(), size: n });
    }
    let label_w = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0) as f64 * CHAR_W + 10.0;
    let (x0, y0) = (label_w + 10.0, label_w + 34.0);
    let grid = n as f64 * CELL;
    let bar_x = x0 + grid + 24.0;
    let width = bar_x + 70.0;
    let height = (y0 + grid + 20.0).max(y0 + 200.0);

    let mut out = String::new();
    header(&mut out, width, height);
    let _ = writeln!(out, r##"<text x="{:.1}" y="18" font-size="14">{}</text>"##, 10.0, escape(title));

    for (k, label) in labels.iter().enumerate() {
        let c = k as f64 * CELL + CELL / 2.0;
        let _ = writeln!(
            out,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="end" dominant-baseline="middle">{}</text>"##,
            x0 - 6.0,
            y0 + c,
            escape(label)
        );
        let (tx, ty) = (x0 + c, y0 - 6.0);
        let _ = writeln!(
            out,
            r##"<text x="{tx:.1}" y="{ty:.1}" transform="rotate(-90 {tx:.1} {ty:.1})" dominant-baseline="middle">{}</text>"##,
            escape(label)
        );
    }

    for i in 0..n {
        for j in 0..n {
            let (x, y) = (x0 + j as f64 * CELL, y0 + i as f64 * CELL);
            let pair = format!("{} / {}", escape(&labels[i]), escape(&labels[j]));
            match m.get(i, j) {
                Some(v) => {
                    let _ = writeln!(
                        out,
                        r##"<rect x="{x:.1}" y="{y:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="{}" stroke="#ffffff"><title>{pair}: {v}</title></rect>"##,
                        sequential_color(v)
                    );
                    if v < 0.0 {
                        hatch(&mut out, x, y, CELL);
                    }
                }
                None => {
                    let _ = writeln!(
                        out,
                        r##"<rect x="{x:.1}" y="{y:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="{INVALID_FILL}" stroke="#ffffff"><title>{pair}: invalid</title></rect>"##
                    );
                }
            }
        }
    }

    color_bar(&mut out, bar_x, y0);
    out.push_str("</svg>\n");
    Ok(out)
}

fn hatch(out: &mut String, x: f64, y: f64, size: f64) {
    for k in 1..4 {
        let o = size * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{HATCH}" stroke-width="1"/>"##,
            x,
            y + o,
            x + o,
            y
        );
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{HATCH}" stroke-width="1"/>"##,
            x + o,
            y + size,
            x + size,
            y + o
        );
    }
}

fn color_bar(out: &mut String, x: f64, y: f64) {
    const STEPS: usize = 20;
    const H: f64 = 120.0;
    let step = H / STEPS as f64;
    for k in 0..STEPS {
        let v = 1.0 - (k as f64 + 0.5) / STEPS as f64;
        let _ = writeln!(
            out,
            r##"<rect x="{x:.1}" y="{:.1}" width="14.0" height="{step:.1}" fill="{}"/>"##,
            y + k as f64 * step,
            sequential_color(v)
        );
    }
    for (v, label) in [(1.0, "1"), (0.5, "0.5"), (0.0, "0")] {
        let ty = y + (1.0 - v) * H;
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{ty:.1}" x2="{:.1}" y2="{ty:.1}" stroke="#000000"/>"##,
            x + 14.0,
            x + 18.0
        );
        let _ = writeln!(out, r##"<text x="{:.1}" y="{ty:.1}" dominant-baseline="middle">{label}</text>"##, x + 20.0);
    }
    let y_neg = y + H + 12.0;
    let _ = writeln!(
        out,
        r##"<rect x="{x:.1}" y="{y_neg:.1}" width="14.0" height="14.0" fill="{}"/>"##,
        sequential_color(0.0)
    );
    hatch(out, x, y_neg, 14.0);
    let _ =
        writeln!(out, r##"<text x="{:.1}" y="{:.1}" dominant-baseline="middle">&lt; 0</text>"##, x + 20.0, y_neg + 7.0);
    let y_na = y_neg + 22.0;
    let _ = writeln!(out, r##"<rect x="{x:.1}" y="{y_na:.1}" width="14.0" height="14.0" fill="{INVALID_FILL}"/>"##);
    let _ = writeln!(out, r##"<text x="{:.1}" y="{:.1}" dominant-baseline="middle">n/a</text>"##, x + 20.0, y_na + 7.0);
}

const PLOT: f64 = 420.0;
const MARGIN: f64 = 50.0;
const JITTER_PX: f64 = 9.0;

/// One labeled point per annotator, colored by agreement cluster, on
/// equal-scaled axes.
///
/// Points that land on an earlier point are nudged by a fixed pixel
/// distance in a direction derived from the annotator id.
pub fn scatter_svg(e: &Embedding2D, clusters: &AgreementClusters, title: &str) -> Result<String, RenderError> {
    if e.annotators != clusters.annotators || e.coords.len() != e.annotators.len() {
        return Err(RenderError::AnnotatorMismatch);
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &e.coords {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    if e.coords.is_empty() {
        lo = [0.0; 2];
        hi = [0.0; 2];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let span = if span > 0.0 { span } else { 1.0 };
    let scale = PLOT / (span * 1.1);
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let centre = MARGIN + PLOT / 2.0;
    let px = |x: f64| centre + (x - mid[0]) * scale;
    let py = |y: f64| centre - (y - mid[1]) * scale;

    let legend_x = MARGIN * 2.0 + PLOT;
    let width = legend_x + 90.0;
    let height = MARGIN * 2.0 + PLOT;
    let mut out = String::new();
    header(&mut out, width, height);
    let _ = writeln!(out, r##"<text x="{MARGIN:.1}" y="24" font-size="14">{}</text>"##, escape(title));
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN:.1}" y="{MARGIN:.1}" width="{PLOT:.1}" height="{PLOT:.1}" fill="none" stroke="#000000"/>"##
    );
    let (edge_lo, edge_hi) = (MARGIN, MARGIN + PLOT);
    let (zx, zy) = (px(0.0), py(0.0));
    if (edge_lo..=edge_hi).contains(&zx) {
        let _ = writeln!(
            out,
            r##"<line x1="{zx:.1}" y1="{edge_lo:.1}" x2="{zx:.1}" y2="{edge_hi:.1}" stroke="#cccccc"/>"##
        );
    }
    if (edge_lo..=edge_hi).contains(&zy) {
        let _ = writeln!(
            out,
            r##"<line x1="{edge_lo:.1}" y1="{zy:.1}" x2="{edge_hi:.1}" y2="{zy:.1}" stroke="#cccccc"/>"##
        );
    }

    let mut placed: Vec<(f64, f64)> = Vec::with_capacity(e.coords.len());
    for (k, p) in e.coords.iter().enumerate() {
        let (mut x, mut y) = (px(p[0]), py(p[1]));
        if placed.iter().any(|&(a, b)| (a - x).abs() < 0.5 && (b - y).abs() < 0.5) {
            let mut rng = CounterRng::new(0, &format!("jitter/{}", e.annotators[k]));
            let angle = std::f64::consts::TAU * rng.next_f64();
            x += JITTER_PX * angle.cos();
            y += JITTER_PX * angle.sin();
        }
        placed.push((x, y));
    }

    for (k, &(x, y)) in placed.iter().enumerate() {
        let id = escape(&e.annotators[k]);
        let c = clusters.assignment[k];
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{}" stroke="#000000" stroke-width="0.5"><title>{id} (cluster {c}): {}, {}</title></circle>"##,
            CLUSTER_PALETTE[c % CLUSTER_PALETTE.len()],
            e.coords[k][0],
            e.coords[k][1]
        );
        let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}">{id}</text>"##, x + 7.0, y - 7.0);
    }

    for c in 0..clusters.cluster_count() {
        let y = MARGIN + 10.0 + c as f64 * 18.0;
        let _ = writeln!(
            out,
            r##"<circle cx="{:.1}" cy="{y:.1}" r="5" fill="{}"/>"##,
            legend_x,
            CLUSTER_PALETTE[c % CLUSTER_PALETTE.len()]
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.1}" y="{y:.1}" dominant-baseline="middle">cluster {c}</text>"##,
            legend_x + 10.0
        );
    }
    let _ = writeln!(
        out,
        r##"<text x="{MARGIN:.1}" y="{:.1}">stress {:.4}, threshold {}</text>"##,
        height - 16.0,
        e.stress,
        clusters.threshold
    );
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|k| format!("a{k}")).collect()
    }

    fn cell_fills(svg: &str) -> Vec<&str> {
        svg.lines()
            .filter(|l| l.starts_with("<rect") && l.contains("<title>"))
            .map(|l| {
                let s = l.find("fill=\"").unwrap() + 6;
                &l[s..s + 7]
            })
            .collect()
    }

    #[test]
    fn color_map_endpoints() {
        assert_eq!(sequential_color(0.0), "#f7fbff");
        assert_eq!(sequential_color(1.0), "#08306b");
        assert_eq!(sequential_color(-0.4), "#f7fbff");
        assert_eq!(sequential_color(7.0), "#08306b");
    }

    #[test]
    fn all_ones_is_uniformly_darkest() {
        let m = MaskedMatrix::from_fn(4, |_, _| 1.0);
        let svg = heatmap_svg(&m, &ids(4), "t").unwrap();
        let fills = cell_fills(&svg);
        assert_eq!(fills.len(), 16);
        for (k, f) in fills.iter().enumerate() {
            let expected = if k / 4 == k % 4 { INVALID_FILL } else { "#08306b" };
            assert_eq!(*f, expected);
        }
    }

    #[test]
    fn masked_cells_gray_and_negatives_hatched() {
        let mut m = MaskedMatrix::from_fn(3, |i, j| if (i, j) == (0, 1) { -0.25 } else { 0.5 });
        m.invalidate(1, 2);
        let svg = heatmap_svg(&m, &ids(3), "t").unwrap();
        let fills = cell_fills(&svg);
        assert_eq!(fills.iter().filter(|f| **f == INVALID_FILL).count(), 5);
        assert_eq!(fills[1], "#f7fbff");
        assert!(svg.contains("a0 / a1: -0.25</title>"));
        // two negative cells, six hatch lines each, plus the legend swatch
        assert_eq!(svg.matches(HATCH).count(), 18);
    }

    #[test]
    fn label_count_checked() {
        let m = MaskedMatrix::new(3);
        assert_eq!(heatmap_svg(&m, &ids(2), "t"), Err(RenderError::LabelCount { labels: 2, size: 3 }));
    }

    #[test]
    fn ids_are_escaped() {
        let m = MaskedMatrix::from_fn(2, |_, _| 0.5);
        let svg = heatmap_svg(&m, &["<a&b>".into(), "c".into()], "q\"").unwrap();
        assert!(svg.contains("&lt;a&amp;b&gt;"));
        assert!(!svg.contains("<a&b>"));
    }

    fn embedding(coords: Vec<[f64; 2]>) -> Embedding2D {
        Embedding2D {
            annotators: ids(coords.len()),
            coords,
            eigenvalues: [1.0, 1.0],
            stress: 0.0,
            floored_negative_eigenvalue: false,
            imputed: Vec::new(),
        }
    }

    fn clusters(assignment: Vec<usize>) -> AgreementClusters {
        AgreementClusters { threshold: 0.6, annotators: ids(assignment.len()), assignment }
    }

    fn circle_centres(svg: &str) -> Vec<(f64, f64)> {
        svg.lines()
            .filter(|l| l.starts_with("<circle") && l.contains("<title>"))
            .map(|l| {
                let num = |key: &str| -> f64 {
                    let s = l.find(key).unwrap() + key.len();
                    let e = s + l[s..].find('"').unwrap();
                    l[s..e].parse().unwrap()
                };
                (num("cx=\""), num("cy=\""))
            })
            .collect()
    }

    #[test]
    fn single_cluster_single_color() {
        let e = embedding(vec![[0.0, 0.0], [1.0, 0.5], [-1.0, 0.2]]);
        let svg = scatter_svg(&e, &clusters(vec![0, 0, 0]), "t").unwrap();
        let colored = svg.lines().filter(|l| l.starts_with("<circle") && l.contains("<title>"));
        assert!(colored.clone().count() == 3 && colored.into_iter().all(|l| l.contains(CLUSTER_PALETTE[0])));
    }

    #[test]
    fn axes_equal_scaled() {
        let e = embedding(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]);
        let c = circle_centres(&scatter_svg(&e, &clusters(vec![0, 1, 2]), "t").unwrap());
        let dx = c[1].0 - c[0].0;
        let dy = c[0].1 - c[2].1;
        // centres are printed to 0.01 px, so the error is at most 0.03
        assert!((dx - 2.0 * dy).abs() < 0.05, "{dx} {dy}");
    }

    #[test]
    fn coincident_points_jittered_deterministically() {
        let e = embedding(vec![[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]]);
        let cl = clusters(vec![0, 0, 1]);
        let svg = scatter_svg(&e, &cl, "t").unwrap();
        let c = circle_centres(&svg);
        let d = ((c[0].0 - c[1].0).powi(2) + (c[0].1 - c[1].1).powi(2)).sqrt();
        assert!((d - JITTER_PX).abs() < 0.02, "{d}");
        assert_eq!(svg, scatter_svg(&e, &cl, "t").unwrap());
    }

    #[test]
    fn scatter_rejects_mismatched_clusters() {
        let e = embedding(vec![[0.0, 0.0], [1.0, 1.0]]);
        let mut cl = clusters(vec![0, 0]);
        cl.annotators[1] = "zz".into();
        assert_eq!(scatter_svg(&e, &cl, "t"), Err(RenderError::AnnotatorMismatch));
    }
}
