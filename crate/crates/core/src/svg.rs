//! Minimal SVG plotting: log-log polyline charts for sweep output and a
//! flat renderer for ball covers on the disk. No drawing dependencies, so
//! the bytes are deterministic.

use std::fs;
use std::path::Path;

use crate::covering::BallSelection;
use crate::error::{Error, Result};
use crate::grid::BallGrid;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn fmt(v: f64) -> String {
    format!("{:.2}", v)
}

/// One named series for [`plot_loglog`].
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Log-log polyline chart. Points with a nonpositive coordinate are
/// rejected, since they have no place on logarithmic axes.
pub fn plot_loglog(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> Result<()> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in s.points {
            if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
                return Err(Error::Param(format!(
                    "log-log plot needs positive finite data, got ({x}, {y})"
                )));
            }
            xs.push(x.ln());
            ys.push(y.ln());
        }
    }
    if xs.is_empty() {
        return Err(Error::Param("nothing to plot".into()));
    }
    let pad = |lo: f64, hi: f64| {
        let span = (hi - lo).max(1e-12);
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    let (x0, x1) = pad(xs.iter().copied().fold(f64::MAX, f64::min), xs.iter().copied().fold(f64::MIN, f64::max));
    let (y0, y1) = pad(ys.iter().copied().fold(f64::MAX, f64::min), ys.iter().copied().fold(f64::MIN, f64::max));
    let sx = |x: f64| MARGIN + (x.ln() - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y.ln() - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n<rect x=\"{m}\" y=\"{m}\" width=\"{iw}\" height=\"{ih}\" fill=\"none\" stroke=\"#333\"/>\n",
        m = MARGIN,
        iw = W - 2.0 * MARGIN,
        ih = H - 2.0 * MARGIN
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"15\">{}</text>\n",
        W / 2.0,
        escape(title)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
        W / 2.0,
        H - 15.0,
        escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        H / 2.0,
        H / 2.0,
        escape(y_label)
    ));
    for (si, s) in series.iter().enumerate() {
        let color = colors[si % colors.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(sx(x)), fmt(sy(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        for &(x, y) in s.points {
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{color}\"/>\n",
                fmt(sx(x)),
                fmt(sy(y))
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            W - MARGIN - 150.0,
            MARGIN + 18.0 + 16.0 * si as f64,
            escape(s.label)
        ));
    }
    svg.push_str("</svg>\n");
    write_file(path, &svg)
}

/// Flat picture of a disk-grid ball cover: the unit circle, the level set
/// nodes, and the selected balls with their 5x dilations.
pub fn plot_cover(
    path: &Path,
    title: &str,
    grid: &BallGrid,
    level_nodes: &[usize],
    balls: &[BallSelection],
) -> Result<()> {
    if grid.n() != 2 {
        return Err(Error::Param("cover plots are 2-D only".into()));
    }
    let side = H;
    let pad = 30.0;
    let scale = (side - 2.0 * pad) / 2.0;
    let sx = |x: f64| side / 2.0 + x * scale;
    let sy = |y: f64| side / 2.0 - y * scale;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side}\" height=\"{side}\" viewBox=\"0 0 {side} {side}\">\n<rect width=\"{side}\" height=\"{side}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">{}</text>\n",
        side / 2.0,
        escape(title)
    ));
    svg.push_str(&format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        fmt(sx(0.0)),
        fmt(sy(0.0)),
        fmt(scale)
    ));
    for &idx in level_nodes {
        let x = grid.coords(idx);
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"1.6\" height=\"1.6\" fill=\"#bbbbbb\"/>\n",
            fmt(sx(x[0]) - 0.8),
            fmt(sy(x[1]) - 0.8)
        ));
    }
    for b in balls {
        let c = grid.coords(b.center);
        svg.push_str(&format!(
            "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r5}\" fill=\"none\" stroke=\"#2ca02c\" stroke-dasharray=\"3 3\"/>\n<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n",
            cx = fmt(sx(c[0])),
            cy = fmt(sy(c[1])),
            r = fmt(b.rho * scale),
            r5 = fmt(5.0 * b.rho * scale)
        ));
    }
    svg.push_str("</svg>\n");
    write_file(path, &svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, content)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_rejects_nonpositive_points() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.svg");
        let bad = [(1.0, 0.0)];
        let err = plot_loglog(&p, "t", "x", "y", &[Series { label: "s", points: &bad }]);
        assert!(err.is_err());
        assert!(!p.exists());
    }

    #[test]
    fn loglog_bytes_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let pts = [(0.1, 2.0), (1.0, 4.0), (10.0, 8.5)];
        let series = [Series { label: "ratio <a>", points: &pts }];
        let p1 = dir.path().join("a.svg");
        let p2 = dir.path().join("b.svg");
        plot_loglog(&p1, "sweep", "t", "R(t)", &series).unwrap();
        plot_loglog(&p2, "sweep", "t", "R(t)", &series).unwrap();
        let a = std::fs::read(&p1).unwrap();
        assert_eq!(a, std::fs::read(&p2).unwrap());
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("polyline"));
        assert!(text.contains("ratio &lt;a&gt;"));
    }

    #[test]
    fn cover_plot_writes_balls() {
        let dir = tempfile::tempdir().unwrap();
        let grid = BallGrid::new(2, 65).unwrap();
        let origin = grid.origin();
        let balls =
            vec![BallSelection { center: origin, rho: 0.1, j_value: 1.0 }];
        let p = dir.path().join("cover.svg");
        plot_cover(&p, "cover", &grid, &[origin], &balls).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.matches("<circle").count(), 3);
    }
}
