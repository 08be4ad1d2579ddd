//! Mask-level metrics: region IoU and boundary IoU.

use crate::raster::LabelMask;

/// IoU of the class-binary masks. Returns `(iou, vacuous)`; a class
/// absent from both masks scores 1.0 with the vacuous flag set.
pub fn region_iou(pred: &LabelMask, gt: &LabelMask, class: u16) -> (f64, bool) {
    assert_eq!((pred.width, pred.height), (gt.width, gt.height));
    let mut inter = 0u64;
    let mut union = 0u64;
    for (&p, &g) in pred.labels.iter().zip(&gt.labels) {
        let (p, g) = (p == class, g == class);
        inter += (p && g) as u64;
        union += (p || g) as u64;
    }
    if union == 0 {
        (1.0, true)
    } else {
        (inter as f64 / union as f64, false)
    }
}

/// Boundary IoU: region IoU restricted to the band of pixels within
/// `band` (Euclidean) of the ground-truth class boundary.
pub fn boundary_iou(pred: &LabelMask, gt: &LabelMask, class: u16, band: f64) -> (f64, bool) {
    assert_eq!((pred.width, pred.height), (gt.width, gt.height));
    let (w, h) = (gt.width as usize, gt.height as usize);
    let gt_bin = gt.class_binary(class);
    let boundary = boundary_pixels(&gt_bin, w, h);
    if boundary.iter().all(|&b| !b) {
        // No boundary: vacuous unless exactly one mask has the class.
        let any = pred.labels.iter().any(|&v| v == class)
            || gt.labels.iter().any(|&v| v == class);
        if !any {
            return (1.0, true);
        }
    }
    let dist_sq = squared_edt(&boundary, w, h);
    let band_sq = band * band;
    let pred_bin = pred.class_binary(class);
    let mut inter = 0u64;
    let mut union = 0u64;
    for i in 0..w * h {
        if dist_sq[i] as f64 <= band_sq {
            let (p, g) = (pred_bin[i], gt_bin[i]);
            inter += (p && g) as u64;
            union += (p || g) as u64;
        }
    }
    if union == 0 {
        (1.0, true)
    } else {
        (inter as f64 / union as f64, false)
    }
}

/// Pixels adjacent (4-connectivity) to a pixel of the opposite value.
pub fn boundary_pixels(bin: &[bool], w: usize, h: usize) -> Vec<bool> {
    let mut out = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let v = bin[y * w + x];
            let differs = (x > 0 && bin[y * w + x - 1] != v)
                || (x + 1 < w && bin[y * w + x + 1] != v)
                || (y > 0 && bin[(y - 1) * w + x] != v)
                || (y + 1 < h && bin[(y + 1) * w + x] != v);
            out[y * w + x] = differs;
        }
    }
    out
}

/// Exact squared Euclidean distance transform (two-pass, per-dimension
/// lower envelope) from the `true` seed pixels.
pub fn squared_edt(seed: &[bool], w: usize, h: usize) -> Vec<i64> {
    const INF: i64 = i64::MAX / 4;
    let mut d = vec![INF; w * h];
    for i in 0..w * h {
        if seed[i] {
            d[i] = 0;
        }
    }
    // Columns.
    let mut col = vec![0i64; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = d[y * w + x];
        }
        let out = edt_1d(&col);
        for y in 0..h {
            d[y * w + x] = out[y];
        }
    }
    // Rows.
    let mut row = vec![0i64; w];
    for y in 0..h {
        row.copy_from_slice(&d[y * w..(y + 1) * w]);
        let out = edt_1d(&row);
        d[y * w..(y + 1) * w].copy_from_slice(&out);
    }
    d
}

fn edt_1d(f: &[i64]) -> Vec<i64> {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0f64; n + 1];
    let mut out = vec![0i64; n];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let sq = |q: usize| (q * q) as i64;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = (f[q] + sq(q) - f[p] - sq(p)) as f64 / (2 * (q - p)) as f64;
            if s <= z[k] {
                if k == 0 {
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as i64 - p as i64;
        out[q] = dq * dq + f[p];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_masks_iou_one() {
        let m = LabelMask::new(4, 4, (0..16).map(|i| (i % 2) as u16).collect(), 2);
        assert_eq!(region_iou(&m, &m, 1), (1.0, false));
        assert_eq!(boundary_iou(&m, &m, 1, 2.0).0, 1.0);
    }

    #[test]
    fn disjoint_same_area_zero() {
        let a = LabelMask::new(4, 1, vec![1, 1, 0, 0], 2);
        let b = LabelMask::new(4, 1, vec![0, 0, 1, 1], 2);
        assert_eq!(region_iou(&a, &b, 1).0, 0.0);
    }

    #[test]
    fn half_overlap_is_one_third() {
        // Equal squares overlapping by half: |∩|/|∪| = A/2 / (3A/2).
        let a = LabelMask::new(4, 2, vec![1, 1, 0, 0, 1, 1, 0, 0], 2);
        let b = LabelMask::new(4, 2, vec![0, 1, 1, 0, 0, 1, 1, 0], 2);
        assert!((region_iou(&a, &b, 1).0 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn vacuous_class_flagged() {
        let m = LabelMask::new(2, 2, vec![0; 4], 3);
        assert_eq!(region_iou(&m, &m, 2), (1.0, true));
    }

    #[test]
    fn edt_matches_brute_force() {
        let (w, h) = (9, 7);
        let mut seed = vec![false; w * h];
        seed[2 * w + 3] = true;
        seed[5 * w + 7] = true;
        let d = squared_edt(&seed, w, h);
        for y in 0..h {
            for x in 0..w {
                let brute = [(3i64, 2i64), (7, 5)]
                    .iter()
                    .map(|&(sx, sy)| {
                        (x as i64 - sx).pow(2) + (y as i64 - sy).pow(2)
                    })
                    .min()
                    .unwrap();
                assert_eq!(d[y * w + x], brute);
            }
        }
    }
}
