//! Minimal hand-rolled SVG charts: axes, line/scatter series, vertical
//! markers. These are verification artifacts, not publication graphics.

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Draw a polyline through the points; otherwise draw markers.
    pub line: bool,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

pub fn chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series<'_>],
    vlines: &[(f64, &str)],
) -> String {
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    for &(x, _) in vlines {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
    }
    if !(x_min < x_max) {
        x_max = x_min + 1.0;
    }
    if !(y_min < y_max) {
        y_max = y_min + 1.0;
    }
    let pad_y = 0.05 * (y_max - y_min);
    let (y_min, y_max) = (y_min - pad_y, y_max + pad_y);

    let px = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));

    // axes
    s.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = WIDTH - MARGIN_R,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B
    ));
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{:.3}</text>\n",
            px(fx),
            HEIGHT - MARGIN_B + 18.0,
            fx
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{:.4}</text>\n",
            MARGIN_L - 6.0,
            py(fy) + 4.0,
            fy
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        x_label
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        y_label
    ));

    for &(x, label) in vlines {
        s.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{t}\" x2=\"{x0}\" y2=\"{b}\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n",
            x0 = px(x),
            t = MARGIN_T,
            b = HEIGHT - MARGIN_B
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">{}</text>\n",
            px(x),
            MARGIN_T - 6.0,
            label
        ));
    }

    for (idx, sr) in series.iter().enumerate() {
        if sr.line {
            let pts: Vec<String> =
                sr.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            s.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                sr.color,
                pts.join(" ")
            ));
        } else {
            for &(x, y) in &sr.points {
                s.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.6\" fill=\"{}\"/>\n",
                    px(x),
                    py(y),
                    sr.color
                ));
            }
        }
        // legend
        let ly = MARGIN_T + 16.0 * idx as f64 + 8.0;
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            WIDTH - MARGIN_R - 130.0,
            ly,
            sr.color
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            WIDTH - MARGIN_R - 115.0,
            ly + 9.0,
            sr.label
        ));
    }
    s.push_str("</svg>\n");
    s
}
