use std::fmt::Write as _;

use super::{aggregate, Algo, SweepRecord};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_Y: f64 = 50.0;
/// Relative errors are clamped here so exact estimates stay on a log axis.
const ERROR_FLOOR: f64 = 1e-4;

fn color(algo: Algo) -> &'static str {
    match algo {
        Algo::MassApprox => "#1f77b4",
        Algo::FullMassApprox => "#d62728",
        Algo::ReturnTime => "#2ca02c",
    }
}

struct LogAxis {
    lo: f64,
    hi: f64,
}

impl LogAxis {
    fn spanning(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v.log10());
            hi = hi.max(v.log10());
        }
        let (lo, hi) = (lo.floor(), hi.ceil());
        Self { lo, hi: if hi > lo { hi } else { lo + 1.0 } }
    }

    fn frac(&self, v: f64) -> f64 {
        (v.log10() - self.lo) / (self.hi - self.lo)
    }

    fn decades(&self) -> impl Iterator<Item = i32> {
        (self.lo as i32)..=(self.hi as i32)
    }
}

/// Log-log chart of mean relative error against mean total calls, one
/// series per algorithm, aggregated per walk length.
pub fn render_svg(records: &[SweepRecord]) -> String {
    let series: Vec<(Algo, Vec<(f64, f64)>)> = Algo::ALL
        .iter()
        .map(|&a| (a, aggregate(records, a).into_iter().map(|(_, c, e)| (c.max(1.0), e.max(ERROR_FLOOR))).collect::<Vec<_>>()))
        .filter(|(_, pts)| !pts.is_empty())
        .collect();
    let all = || series.iter().flat_map(|(_, p)| p.iter().copied());
    let xa = LogAxis::spanning(all().map(|p| p.0));
    let ya = LogAxis::spanning(all().map(|p| p.1).chain([ERROR_FLOOR.max(1e-3), 1.0]));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |x: f64| MARGIN_LEFT + xa.frac(x) * plot_w;
    let py = |y: f64| MARGIN_Y + (1.0 - ya.frac(y)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (MARGIN_LEFT, MARGIN_LEFT + plot_w, MARGIN_Y, MARGIN_Y + plot_h);
    let _ = writeln!(s, r#"<g id="axes" stroke="black" fill="none"><rect x="{x0}" y="{y0}" width="{plot_w}" height="{plot_h}"/></g>"#);
    let _ = writeln!(s, r#"<g id="ticks" fill="black">"#);
    for d in xa.decades() {
        let x = px(10f64.powi(d));
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#, y1 + 20.0);
    }
    for d in ya.decades() {
        let y = py(10f64.powi(d));
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text id="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">total step + probe calls</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text id="y-label" transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">relative error</text>"#,
        (y0 + y1) / 2.0
    );

    for (i, (algo, pts)) in series.iter().enumerate() {
        let c = color(*algo);
        let _ = writeln!(s, r#"<g id="series-{algo}" class="series" stroke="{c}" fill="{c}">"#);
        if pts.len() > 1 {
            let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke-width="2" points="{}"/>"#, coords.join(" "));
        }
        for &(x, y) in pts {
            let _ = writeln!(s, r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3"/>"#, px(x), py(y));
        }
        let ly = y0 + 16.0 + 20.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke-width="2"/>"#, x1 + 12.0, x1 + 36.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" stroke="none">{algo}</text>"#, x1 + 42.0, ly + 4.0);
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}
