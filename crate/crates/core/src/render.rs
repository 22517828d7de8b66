//! SVG 1.1 rendering of polygon layouts.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{self, Point};
use crate::hypergraph::Hypergraph;
use crate::layout::Layout;

const PALETTE: [&str; 20] = [
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
    "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f", "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderStyle {
    pub l0: f64,
    /// Output width in user units; height follows the aspect ratio.
    pub width: f64,
    pub fill_opacity: f64,
    pub vertex_radius: f64,
    pub labels: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            l0: 1.0,
            width: 800.0,
            fill_opacity: 0.35,
            vertex_radius: 0.06,
            labels: false,
        }
    }
}

/// Palette colour of hyperedge `e`, picked by a fixed integer hash of its id.
pub fn color(e: u32) -> &'static str {
    let mut z = (e as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    PALETTE[(z % PALETTE.len() as u64) as usize]
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Screen coordinates: y grows downwards.
fn flip(p: Point) -> Point {
    Point::new(p.x, -p.y)
}

/// Outline of one hyperedge: hull polygon, two-arc lens, or water drop.
fn outline(pts: &[Point], style: &RenderStyle) -> String {
    let mut d = String::new();
    let r = 0.25 * style.l0;
    match pts.len() {
        1 => {
            let c = pts[0];
            let tip = c + Point::new(0.0, -2.0 * r);
            let s = 0.5 * 3f64.sqrt() * r;
            let (p1, p2) = (c + Point::new(s, -0.5 * r), c + Point::new(-s, -0.5 * r));
            write!(
                d,
                "M {:.4} {:.4} L {:.4} {:.4} A {r:.4} {r:.4} 0 1 1 {:.4} {:.4} Z",
                tip.x, tip.y, p1.x, p1.y, p2.x, p2.y
            )
            .unwrap();
        }
        2 => {
            let (p, q) = (pts[0], pts[1]);
            let chord = p.dist(q);
            let sagitta = 0.1 * style.l0;
            if chord < 1e-12 {
                write!(
                    d,
                    "M {:.4} {:.4} m {s:.4} 0 a {s:.4} {s:.4} 0 1 1 {:.4} 0 a {s:.4} {s:.4} 0 1 1 {:.4} 0 Z",
                    p.x,
                    p.y,
                    -2.0 * sagitta,
                    2.0 * sagitta,
                    s = sagitta
                )
                .unwrap();
            } else {
                let radius = (chord * chord / 4.0 + sagitta * sagitta) / (2.0 * sagitta);
                write!(
                    d,
                    "M {:.4} {:.4} A {radius:.4} {radius:.4} 0 0 1 {:.4} {:.4} A {radius:.4} {radius:.4} 0 0 1 {:.4} {:.4} Z",
                    p.x, p.y, q.x, q.y, p.x, p.y
                )
                .unwrap();
            }
        }
        _ => {
            let hull = geometry::convex_hull(pts);
            for (i, p) in hull.iter().enumerate() {
                write!(d, "{}{:.4} {:.4} ", if i == 0 { "M " } else { "L " }, p.x, p.y).unwrap();
            }
            d.push('Z');
        }
    }
    d
}

/// Bounding box of everything drawn for `layout`, in screen coordinates.
fn extent(layout: &Layout, style: &RenderStyle) -> Option<(Point, Point)> {
    let (lo, hi) = layout_box(&layout.positions)?;
    let pad = 0.5 * style.l0 + style.vertex_radius;
    Some((lo - Point::new(pad, pad), hi + Point::new(pad, pad)))
}

fn layout_box(positions: &std::collections::BTreeMap<u32, Point>) -> Option<(Point, Point)> {
    let mut it = positions.values().map(|&p| flip(p));
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), p| {
        (Point::new(lo.x.min(p.x), lo.y.min(p.y)), Point::new(hi.x.max(p.x), hi.y.max(p.y)))
    }))
}

fn draw(out: &mut String, h: &Hypergraph, layout: &Layout, style: &RenderStyle, class: &str) -> Result<()> {
    writeln!(out, "<g class=\"{class}\">").unwrap();
    for e in h.hyperedges() {
        let pts: Vec<Point> = layout.member_points(h, e)?.into_iter().map(flip).collect();
        let c = color(e.index);
        writeln!(
            out,
            "<path id=\"{class}-{e}\" d=\"{}\" fill=\"{c}\" fill-opacity=\"{:.4}\" stroke=\"{c}\" stroke-width=\"{:.4}\"><title>{}</title></path>",
            outline(&pts, style),
            style.fill_opacity,
            0.02 * style.l0,
            escape(&h.display_name(e)),
        )
        .unwrap();
    }
    for v in h.vertices() {
        let p = flip(layout.positions[&v.index]);
        writeln!(
            out,
            "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"{:.4}\" fill=\"#222222\"/>",
            p.x, p.y, style.vertex_radius
        )
        .unwrap();
        if style.labels {
            writeln!(
                out,
                "<text x=\"{:.4}\" y=\"{:.4}\" font-size=\"{:.4}\" fill=\"#222222\">{}</text>",
                p.x + 1.5 * style.vertex_radius,
                p.y - 1.5 * style.vertex_radius,
                0.3 * style.l0,
                escape(&h.display_name(v)),
            )
            .unwrap();
        }
    }
    out.push_str("</g>\n");
    Ok(())
}

/// Renders `layout` of `h`. When the layout carries dual positions the dual
/// hypergraph is drawn to the right of the primal one.
pub fn render_svg(h: &Hypergraph, layout: &Layout, style: &RenderStyle) -> Result<String> {
    layout.check_covers(h)?;
    let dual = match &layout.dual_positions {
        Some(d) => Some((
            h.dual()?,
            Layout {
                scale_index: layout.scale_index,
                positions: d.clone(),
                dual_positions: Some(layout.positions.clone()),
            },
        )),
        None => None,
    };
    let empty = (Point::default(), Point::default());
    let (lo, mut hi) = extent(layout, style).unwrap_or(empty);
    let mut shift = None;
    if let Some((_, dl)) = &dual {
        let (dlo, dhi) = extent(dl, style).unwrap_or(empty);
        let dx = hi.x + style.l0 - dlo.x;
        let dy = lo.y - dlo.y;
        shift = Some(Point::new(dx, dy));
        hi = Point::new(dhi.x + dx, hi.y.max(dhi.y + dy));
    }
    let size = hi - lo;
    let margin = 0.05 * size.x.max(size.y).max(style.l0);
    let (x0, y0) = (lo.x - margin, lo.y - margin);
    let (w, ht) = (size.x + 2.0 * margin, size.y + 2.0 * margin);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.4}\" height=\"{:.4}\" viewBox=\"{x0:.4} {y0:.4} {w:.4} {ht:.4}\">",
        style.width,
        style.width * ht / w,
    )
    .unwrap();
    draw(&mut out, h, layout, style, "primal")?;
    if let (Some((hd, dl)), Some(s)) = (&dual, shift) {
        writeln!(out, "<g transform=\"translate({:.4} {:.4})\">", s.x, s.y).unwrap();
        draw(&mut out, hd, dl, style, "dual")?;
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn layout(points: &[(f64, f64)]) -> Layout {
        Layout {
            scale_index: 0,
            positions: points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| (i as u32, Point::new(x, y)))
                .collect(),
            dual_positions: None,
        }
    }

    #[test]
    fn triangle_structure() {
        let h = Hypergraph::build(&[("t", vec!["a", "b", "c"])]).unwrap();
        let svg = render_svg(&h, &layout(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]), &RenderStyle::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
        let d = svg.split(" d=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(d.matches(['M', 'L']).count(), 3);
        assert!(d.ends_with('Z'));
    }

    #[test]
    fn identical_input_gives_identical_bytes() {
        let h = Hypergraph::build(&[("t", vec!["a", "b", "c"]), ("d", vec!["c", "d"]), ("m", vec!["d"])]).unwrap();
        let l = layout(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8), (2.0, 1.0)]);
        let style = RenderStyle {
            labels: true,
            ..Default::default()
        };
        assert_eq!(render_svg(&h, &l, &style).unwrap(), render_svg(&h, &l, &style).unwrap());
    }

    /// The drop is the circle of radius L0/4 around the vertex plus a tip,
    /// so the vertex dot sits inside it.
    #[test]
    fn monogon_drop_contains_its_vertex() {
        let h = Hypergraph::build(&[("m", vec!["a"])]).unwrap();
        let svg = render_svg(&h, &layout(&[(3.0, -2.0)]), &RenderStyle::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        let d = svg.split(" d=\"").nth(1).unwrap().split('"').next().unwrap();
        let nums: Vec<f64> = d
            .split(|c: char| c.is_ascii_alphabetic() || c.is_whitespace())
            .filter_map(|t| t.parse().ok())
            .collect();
        let (tip, p1) = (Point::new(nums[0], nums[1]), Point::new(nums[2], nums[3]));
        let v = Point::new(3.0, 2.0);
        assert!((tip.dist(v) - 0.5).abs() < 1e-4);
        assert!((p1.dist(v) - 0.25).abs() < 1e-4);
        assert!(d.contains("A 0.2500 0.2500 0 1 1"));
    }

    #[test]
    fn digon_is_a_lens() {
        let h = Hypergraph::build(&[("d", vec!["a", "b"])]).unwrap();
        let svg = render_svg(&h, &layout(&[(0.0, 0.0), (1.0, 0.0)]), &RenderStyle::default()).unwrap();
        let d = svg.split(" d=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(d.matches('A').count(), 2);
        // r = (c²/4 + s²) / 2s with c = 1, s = 0.1
        assert!(d.contains("A 1.3000 1.3000"));
    }

    #[test]
    fn dual_is_drawn_beside_the_primal() {
        let h = Hypergraph::build(&[("x", vec!["a", "b", "c"]), ("y", vec!["c", "d"])]).unwrap();
        let mut l = layout(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8), (2.0, 0.0)]);
        l.dual_positions = Some(BTreeMap::from([(0, Point::new(0.5, 0.3)), (1, Point::new(1.5, 0.2))]));
        let svg = render_svg(&h, &l, &RenderStyle::default()).unwrap();
        assert!(svg.contains("class=\"dual\""));
        assert_eq!(svg.matches("<circle").count(), 6);
        assert_eq!(svg.matches("<path").count(), 6);
    }

    #[test]
    fn colours_are_stable() {
        assert_eq!(color(0), color(0));
        let distinct: std::collections::BTreeSet<&str> = (0..200).map(color).collect();
        assert_eq!(distinct.len(), 20);
    }
}
