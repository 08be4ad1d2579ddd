//! Peak-shape statistics of vertex heatmaps: axis-aligned full widths at
//! half maximum, half-maximum support area, and a scale-normalized
//! sharpness (negative Laplacian of the Gaussian-smoothed patch).

use crate::raster::Heatmap;
use crate::Point64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakShape {
    pub fwhm_x: f64,
    pub fwhm_y: f64,
    pub area_at_half: usize,
    pub sharpness: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PeakShapeWarnings {
    /// Peaks whose patch ran past the image border and was zero-padded.
    pub zero_padded: usize,
    /// Peaks skipped because the center response was zero.
    pub skipped_zero_center: usize,
}

/// Per-peak shape statistics over K x K patches (K odd) normalized to
/// center value 1. Peaks with zero center response are skipped.
pub fn peak_shape(
    hm: &Heatmap,
    peaks: &[Point64],
    k: usize,
    sigma_smooth: f64,
) -> (Vec<PeakShape>, PeakShapeWarnings) {
    assert!(k % 2 == 1, "patch size must be odd");
    let half = (k / 2) as i64;
    let mut shapes = Vec::new();
    let mut warn = PeakShapeWarnings::default();
    for p in peaks {
        let (cx, cy) = (p.x.floor() as i64, p.y.floor() as i64);
        let mut patch = vec![0.0f64; k * k];
        let mut padded = false;
        for dy in -half..=half {
            for dx in -half..=half {
                let (x, y) = (cx + dx, cy + dy);
                if x < 0 || y < 0 || x >= hm.width as i64 || y >= hm.height as i64 {
                    padded = true;
                    continue;
                }
                patch[((dy + half) * k as i64 + dx + half) as usize] =
                    hm.get(x as u32, y as u32) as f64;
            }
        }
        if padded {
            warn.zero_padded += 1;
        }
        let center = patch[(half * k as i64 + half) as usize];
        if center == 0.0 {
            warn.skipped_zero_center += 1;
            continue;
        }
        for v in &mut patch {
            *v /= center;
        }
        let row: Vec<f64> = (0..k).map(|i| patch[half as usize * k + i]).collect();
        let col: Vec<f64> = (0..k).map(|j| patch[j * k + half as usize]).collect();
        shapes.push(PeakShape {
            fwhm_x: fwhm_1d(&row, half as usize),
            fwhm_y: fwhm_1d(&col, half as usize),
            area_at_half: area_at_half(&patch, k, half as usize),
            sharpness: sharpness(&patch, k, half as usize, sigma_smooth),
        });
    }
    (shapes, warn)
}

/// Distance between the two 0.5-crossings of a 1D profile around index
/// `c`, by linear interpolation. A side that never drops below 0.5
/// contributes its full extent to the profile edge.
fn fwhm_1d(p: &[f64], c: usize) -> f64 {
    let right = {
        let mut x = (p.len() - 1 - c) as f64;
        for i in c..p.len() - 1 {
            if p[i] >= 0.5 && p[i + 1] < 0.5 {
                x = (i - c) as f64 + (p[i] - 0.5) / (p[i] - p[i + 1]);
                break;
            }
        }
        x
    };
    let left = {
        let mut x = c as f64;
        for i in (1..=c).rev() {
            if p[i] >= 0.5 && p[i - 1] < 0.5 {
                x = (c - i) as f64 + (p[i] - 0.5) / (p[i] - p[i - 1]);
                break;
            }
        }
        x
    };
    left + right
}

/// Size of the 8-connected >= 0.5 component containing the patch center.
fn area_at_half(patch: &[f64], k: usize, c: usize) -> usize {
    let mut visited = vec![false; k * k];
    let start = c * k + c;
    if patch[start] < 0.5 {
        return 0;
    }
    let mut stack = vec![start];
    visited[start] = true;
    let mut count = 0;
    while let Some(i) = stack.pop() {
        count += 1;
        let (x, y) = ((i % k) as i64, (i / k) as i64);
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= k as i64 || ny >= k as i64 {
                    continue;
                }
                let j = (ny * k as i64 + nx) as usize;
                if !visited[j] && patch[j] >= 0.5 {
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}

/// max(0, -sigma^2 * Laplacian) of the Gaussian-smoothed patch at the
/// center (5-point stencil).
fn sharpness(patch: &[f64], k: usize, c: usize, sigma: f64) -> f64 {
    let smoothed = gaussian_smooth(patch, k, sigma);
    let at = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= k as i64 || y >= k as i64 {
            0.0
        } else {
            smoothed[(y * k as i64 + x) as usize]
        }
    };
    let (cx, cy) = (c as i64, c as i64);
    let lap = at(cx + 1, cy) + at(cx - 1, cy) + at(cx, cy + 1) + at(cx, cy - 1)
        - 4.0 * at(cx, cy);
    (-sigma * sigma * lap).max(0.0)
}

/// Separable Gaussian blur; near the patch edge the kernel is
/// renormalized to the in-bounds mass so constant patches stay constant.
fn gaussian_smooth(patch: &[f64], k: usize, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return patch.to_vec();
    }
    let r = (3.0 * sigma).ceil() as i64;
    let kernel: Vec<f64> = (-r..=r)
        .map(|i| (-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let pass = |src: &[f64], horizontal: bool| -> Vec<f64> {
        let mut out = vec![0.0; k * k];
        for y in 0..k as i64 {
            for x in 0..k as i64 {
                let mut s = 0.0;
                let mut mass = 0.0;
                for (i, kv) in kernel.iter().enumerate() {
                    let off = i as i64 - r;
                    let (sx, sy) = if horizontal { (x + off, y) } else { (x, y + off) };
                    if sx >= 0 && sx < k as i64 && sy >= 0 && sy < k as i64 {
                        s += kv * src[(sy * k as i64 + sx) as usize];
                        mass += kv;
                    }
                }
                out[(y * k as i64 + x) as usize] = s / mass;
            }
        }
        out
    };
    pass(&pass(patch, true), false)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// W x H heatmap holding one Gaussian of spread sigma at (cx, cy)
    /// cell coordinates.
    fn gaussian_map(w: u32, h: u32, cx: f64, cy: f64, sigma: f64) -> Heatmap {
        let mut vals = Vec::with_capacity((w * h) as usize);
        for y in 0..h {
            for x in 0..w {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                vals.push((-d2 / (2.0 * sigma * sigma)).exp() as f32);
            }
        }
        Heatmap::new(w, h, vals)
    }

    #[test]
    fn gaussian_fwhm_matches_analytic() {
        let sigma = 1.5;
        let hm = gaussian_map(21, 21, 10.0, 10.0, sigma);
        let (shapes, warn) =
            peak_shape(&hm, &[Point64::new(10.5, 10.5)], 11, 1.0);
        assert_eq!(shapes.len(), 1);
        assert_eq!(warn.zero_padded, 0);
        let analytic = 2.0 * (2.0_f64 * std::f64::consts::LN_2).sqrt() * sigma;
        assert!((shapes[0].fwhm_x - analytic).abs() < 0.1, "{}", shapes[0].fwhm_x);
        assert!((shapes[0].fwhm_y - analytic).abs() < 0.1);
        // Half-maximum support: cells within ~1.77 px of the center.
        assert!((shapes[0].area_at_half as i64 - 9).unsigned_abs() <= 2);
        assert!(shapes[0].sharpness > 0.0);
    }

    #[test]
    fn flat_plateau_sharpness_zero() {
        let hm = Heatmap::new(9, 9, vec![0.8; 81]);
        let (shapes, _) = peak_shape(&hm, &[Point64::new(4.5, 4.5)], 5, 1.0);
        assert_eq!(shapes[0].sharpness, 0.0);
        // Plateau never crosses 0.5: FWHM spans the whole patch.
        assert_eq!(shapes[0].fwhm_x, 4.0);
        assert_eq!(shapes[0].area_at_half, 25);
    }

    #[test]
    fn zero_center_skipped() {
        let hm = Heatmap::zeros(9, 9);
        let (shapes, warn) = peak_shape(&hm, &[Point64::new(4.5, 4.5)], 5, 1.0);
        assert!(shapes.is_empty());
        assert_eq!(warn.skipped_zero_center, 1);
    }

    #[test]
    fn border_peak_flagged_zero_padded() {
        let hm = gaussian_map(9, 9, 1.0, 1.0, 1.0);
        let (shapes, warn) = peak_shape(&hm, &[Point64::new(1.5, 1.5)], 7, 1.0);
        assert_eq!(shapes.len(), 1);
        assert_eq!(warn.zero_padded, 1);
    }

    #[test]
    fn narrower_gaussian_is_sharper() {
        let wide = gaussian_map(21, 21, 10.0, 10.0, 3.0);
        let tight = gaussian_map(21, 21, 10.0, 10.0, 1.0);
        let p = [Point64::new(10.5, 10.5)];
        let (sw, _) = peak_shape(&wide, &p, 11, 1.0);
        let (st, _) = peak_shape(&tight, &p, 11, 1.0);
        assert!(st[0].sharpness > sw[0].sharpness);
        assert!(st[0].fwhm_x < sw[0].fwhm_x);
        assert!(st[0].area_at_half < sw[0].area_at_half);
    }
}
