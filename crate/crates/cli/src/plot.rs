//! Tiny raster plotter for the sweep summary: axes with ticks, one polyline
//! per series, square markers. No text; the numbers live in the table.

use jigi::Image;

pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    pub gray: f64,
    pub filled_markers: bool,
}

struct Canvas {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Canvas {
    fn new(width: usize, height: usize) -> Self {
        Canvas {
            width,
            height,
            pixels: vec![1.0; width * height],
        }
    }

    fn set(&mut self, x: i64, y: i64, v: f64) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.pixels[y as usize * self.width + x as usize] = v;
        }
    }

    // Bresenham
    fn line(&mut self, (x0, y0): (i64, i64), (x1, y1): (i64, i64), v: f64) {
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            self.set(x, y, v);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    fn marker(&mut self, (cx, cy): (i64, i64), v: f64, filled: bool) {
        for dy in -3..=3i64 {
            for dx in -3..=3i64 {
                if filled || dx.abs() == 3 || dy.abs() == 3 {
                    self.set(cx + dx, cy + dy, v);
                }
            }
        }
    }
}

fn span(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { 0.08 * (hi - lo) } else { 1.0 };
    Some((lo - pad, hi + pad))
}

/// Renders `series` onto a `width × height` canvas (gray levels in `[0, 1]`,
/// white background). Non-finite points are skipped.
pub fn render(series: &[Series], width: usize, height: usize) -> Image {
    let mut canvas = Canvas::new(width, height);
    let (left, right, top, bottom) = (40i64, width as i64 - 16, 16i64, height as i64 - 32);
    canvas.line((left, top), (left, bottom), 0.0);
    canvas.line((left, bottom), (right, bottom), 0.0);

    let all = || series.iter().flat_map(|s| s.points.iter());
    let x_span = span(all().map(|p| p.0));
    let y_span = span(all().map(|p| p.1).filter(|v| v.is_finite()));
    let (Some((x0, x1)), Some((y0, y1))) = (x_span, y_span) else {
        return Image::new(height, width, canvas.pixels).expect("canvas is finite");
    };
    let to_px = |(x, y): (f64, f64)| {
        let px = left as f64 + (x - x0) / (x1 - x0) * (right - left) as f64;
        let py = bottom as f64 - (y - y0) / (y1 - y0) * (bottom - top) as f64;
        (px.round() as i64, py.round() as i64)
    };

    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (tx, _) = to_px((x0 + t * (x1 - x0), y0));
        canvas.line((tx, bottom), (tx, bottom + 5), 0.0);
        let (_, ty) = to_px((x0, y0 + t * (y1 - y0)));
        canvas.line((left - 5, ty), (left, ty), 0.0);
    }

    for s in series {
        let pts: Vec<(i64, i64)> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&p| to_px(p))
            .collect();
        for w in pts.windows(2) {
            canvas.line(w[0], w[1], s.gray);
        }
        for &p in &pts {
            canvas.marker(p, s.gray, s.filled_markers);
        }
    }
    Image::new(height, width, canvas.pixels).expect("canvas is finite")
}
