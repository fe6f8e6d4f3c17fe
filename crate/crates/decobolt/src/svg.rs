//! Minimal SVG line plots: axes, ticks, up to a handful of series.
//! Enough to eyeball a kernel curve or a diffraction pattern without
//! pulling in a plotting stack.

/// One polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Log-scale the y axis (values must be positive; zeros are clamped).
    pub log_y: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            title: String::new(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_y: false,
            width: 800,
            height: 500,
        }
    }
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// Renders the series as a standalone SVG document.
pub fn line_plot(series: &[Series], options: &PlotOptions) -> String {
    let w = options.width as f64;
    let h = options.height as f64;
    let floor = 1e-300;

    let map_y = |y: f64| if options.log_y { y.max(floor).log10() } else { y };
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(map_y(y));
            y_max = y_max.max(map_y(y));
        }
    }
    if !(x_min < x_max) {
        x_max = x_min + 1.0;
    }
    if !(y_min < y_max) {
        y_max = y_min + 1.0;
    }

    let px = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * (w - MARGIN_LEFT - MARGIN_RIGHT);
    let py = |y: f64| h - MARGIN_BOTTOM - (y - y_min) / (y_max - y_min) * (h - MARGIN_TOP - MARGIN_BOTTOM);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\" font-family=\"monospace\" font-size=\"12\">\n",
        options.width, options.height, options.width, options.height
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        options.width, options.height
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\">{}</text>\n",
        w / 2.0,
        escape(&options.title)
    ));

    // Axes.
    out.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_LEFT,
        h - MARGIN_BOTTOM,
        w - MARGIN_RIGHT,
        h - MARGIN_BOTTOM
    ));
    out.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT, h - MARGIN_BOTTOM
    ));

    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x_min + t * (x_max - x_min);
        let yv = y_min + t * (y_max - y_min);
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            px(xv),
            h - MARGIN_BOTTOM + 16.0,
            tick_label(xv)
        ));
        let y_text = if options.log_y { format!("1e{:.1}", yv) } else { tick_label(yv) };
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 6.0,
            py(yv) + 4.0,
            y_text
        ));
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#cccccc\"/>\n",
            MARGIN_LEFT,
            py(yv),
            w - MARGIN_RIGHT,
            py(yv)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        w / 2.0,
        h - 12.0,
        escape(&options.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        h / 2.0,
        h / 2.0,
        escape(&options.y_label)
    ));

    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let mut path = String::new();
        for &(x, y) in &s.points {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            path.push_str(&format!("{:.2},{:.2} ", px(x), py(map_y(y))));
        }
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.trim_end()
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{}</text>\n",
            w - MARGIN_RIGHT - 160.0,
            MARGIN_TOP + 16.0 * idx as f64,
            escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-2 && v.abs() < 1e4 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_contains_series_and_is_deterministic() {
        let series = vec![
            Series { label: "baseline".into(), points: vec![(0.0, 1.0), (1.0, 2.0), (2.0, 0.5)] },
            Series { label: "decohered".into(), points: vec![(0.0, 0.9), (1.0, 1.5), (2.0, 0.4)] },
        ];
        let opts = PlotOptions { title: "pattern".into(), ..Default::default() };
        let a = line_plot(&series, &opts);
        let b = line_plot(&series, &opts);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("polyline"));
        assert!(a.contains("baseline"));
        assert!(a.contains("decohered"));
    }

    #[test]
    fn log_scale_clamps_zeros() {
        let series =
            vec![Series { label: "k".into(), points: vec![(1.0, 0.0), (2.0, 1e-5), (3.0, 1.0)] }];
        let opts = PlotOptions { log_y: true, ..Default::default() };
        let svg = line_plot(&series, &opts);
        assert!(svg.contains("polyline"));
    }
}
