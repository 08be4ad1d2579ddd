//! Raster inputs: multi-class label masks and vertex heatmaps.
//!
//! Masks are 8-bit single-channel PGM (P5) or grayscale PNG; heatmaps are
//! grayscale PFM ("Pf", little-endian, scale -1.0, rows normalized to
//! top-down on load).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::RasterError;

/// W×H grid of class labels, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u16>,
    pub num_classes: u16,
}

impl LabelMask {
    pub fn new(width: u32, height: u32, labels: Vec<u16>, num_classes: u16) -> Self {
        assert!(width >= 1 && height >= 1);
        assert_eq!(labels.len(), (width * height) as usize);
        assert!(
            labels.iter().all(|&v| v < num_classes),
            "every cell value must be < num_classes"
        );
        LabelMask { width, height, labels, num_classes }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.labels[(y * self.width + x) as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: u16) {
        self.labels[(y * self.width + x) as usize] = v;
    }

    /// Binary mask of one class (1 = foreground).
    pub fn class_binary(&self, class: u16) -> Vec<bool> {
        self.labels.iter().map(|&v| v == class).collect()
    }
}

/// W×H grid of floats in [0, 1], row-major, top-down.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub width: u32,
    pub height: u32,
    pub values: Vec<f32>,
}

impl Heatmap {
    pub fn new(width: u32, height: u32, values: Vec<f32>) -> Self {
        assert!(width >= 1 && height >= 1);
        assert_eq!(values.len(), (width * height) as usize);
        Heatmap { width, height, values }
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        Heatmap::new(width, height, vec![0.0; (width * height) as usize])
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.values[(y * self.width + x) as usize]
    }
}

/// Load a mask from PGM (P5) or grayscale PNG. `num_classes` defaults to
/// `1 + max cell value` unless overridden.
pub fn load_mask(path: &Path, num_classes: Option<u16>) -> Result<LabelMask, RasterError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let (width, height, data) = match ext.as_str() {
        "pgm" => {
            let bytes = fs::read(path)?;
            decode_pgm(&bytes)?
        }
        "png" => {
            let img = image::open(path).map_err(|e| RasterError::Decode(e.to_string()))?;
            let gray = img.into_luma8();
            let (w, h) = (gray.width(), gray.height());
            (w, h, gray.into_raw())
        }
        other => return Err(RasterError::UnsupportedFormat(other.to_string())),
    };
    let labels: Vec<u16> = data.iter().map(|&b| b as u16).collect();
    let max = labels.iter().copied().max().unwrap_or(0);
    let c = match num_classes {
        Some(c) => {
            if let Some(idx) = labels.iter().position(|&v| v >= c) {
                return Err(RasterError::LabelOutOfRange {
                    value: labels[idx],
                    index: idx,
                    num_classes: c,
                });
            }
            c
        }
        None => max + 1,
    };
    Ok(LabelMask::new(width, height, labels, c))
}

/// Write a mask as binary PGM (P5). Bit-exact round trip with
/// [`load_mask`] for label values < 256.
pub fn save_mask(mask: &LabelMask, path: &Path) -> Result<(), RasterError> {
    assert!(mask.labels.iter().all(|&v| v < 256), "PGM is 8-bit");
    let mut out = Vec::with_capacity(mask.labels.len() + 32);
    write!(out, "P5\n{} {}\n255\n", mask.width, mask.height)?;
    out.extend(mask.labels.iter().map(|&v| v as u8));
    fs::write(path, out)?;
    Ok(())
}

fn decode_pgm(bytes: &[u8]) -> Result<(u32, u32, Vec<u8>), RasterError> {
    let mut pos = 0usize;
    let magic = read_token(bytes, &mut pos).ok_or(RasterError::UnexpectedEof)?;
    if magic != b"P5" {
        return Err(RasterError::MalformedHeader(format!(
            "expected P5, got {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let mut dims = [0u32; 3];
    for d in dims.iter_mut() {
        let tok = read_token(bytes, &mut pos).ok_or(RasterError::UnexpectedEof)?;
        *d = std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| RasterError::MalformedHeader("non-numeric dimension".into()))?;
    }
    let (w, h, maxval) = (dims[0], dims[1], dims[2]);
    if w == 0 || h == 0 {
        return Err(RasterError::MalformedHeader("zero dimension".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(RasterError::MalformedHeader(format!(
            "maxval {maxval} out of 8-bit range"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let n = (w as usize) * (h as usize);
    if bytes.len() < pos + n {
        return Err(RasterError::UnexpectedEof);
    }
    Ok((w, h, bytes[pos..pos + n].to_vec()))
}

fn read_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    // Skip whitespace and '#' comments.
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

/// Load a grayscale PFM heatmap. Values are clamped to [0, 1]; the
/// returned counter reports how many cells were clamped.
pub fn load_heatmap(path: &Path) -> Result<(Heatmap, usize), RasterError> {
    let bytes = fs::read(path)?;
    let mut pos = 0usize;
    let magic = read_token(&bytes, &mut pos).ok_or(RasterError::UnexpectedEof)?;
    if magic != b"Pf" {
        return Err(RasterError::BadPfmMagic(
            String::from_utf8_lossy(magic).into_owned(),
        ));
    }
    let mut dims = [0u32; 2];
    for d in dims.iter_mut() {
        let tok = read_token(&bytes, &mut pos).ok_or(RasterError::UnexpectedEof)?;
        *d = std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| RasterError::MalformedHeader("non-numeric dimension".into()))?;
    }
    let (w, h) = (dims[0], dims[1]);
    let scale_tok = read_token(&bytes, &mut pos).ok_or(RasterError::UnexpectedEof)?;
    let scale: f32 = std::str::from_utf8(scale_tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| RasterError::MalformedHeader("bad scale".into()))?;
    let little_endian = scale < 0.0;
    pos += 1;
    let n = (w as usize) * (h as usize);
    if bytes.len() < pos + n * 4 {
        return Err(RasterError::UnexpectedEof);
    }
    let mut raw = Vec::with_capacity(n);
    for i in 0..n {
        let b: [u8; 4] = bytes[pos + i * 4..pos + i * 4 + 4].try_into().unwrap();
        let v = if little_endian {
            f32::from_le_bytes(b)
        } else {
            f32::from_be_bytes(b)
        };
        if !v.is_finite() {
            return Err(RasterError::NonFiniteValue(i));
        }
        raw.push(v);
    }
    // PFM stores rows bottom-to-top; normalize to top-down.
    let mut values = vec![0.0f32; n];
    for row in 0..h as usize {
        let src = (h as usize - 1 - row) * w as usize;
        values[row * w as usize..(row + 1) * w as usize]
            .copy_from_slice(&raw[src..src + w as usize]);
    }
    let mut clamped = 0usize;
    for v in values.iter_mut() {
        let c = v.clamp(0.0, 1.0);
        if c != *v {
            clamped += 1;
            *v = c;
        }
    }
    Ok((Heatmap::new(w, h, values), clamped))
}

/// Write a grayscale PFM (little-endian, scale -1.0, rows bottom-up).
pub fn save_heatmap(hm: &Heatmap, path: &Path) -> Result<(), RasterError> {
    let mut out = Vec::with_capacity(hm.values.len() * 4 + 32);
    write!(out, "Pf\n{} {}\n-1.0\n", hm.width, hm.height)?;
    for row in (0..hm.height as usize).rev() {
        for x in 0..hm.width as usize {
            out.extend_from_slice(&hm.values[row * hm.width as usize + x].to_le_bytes());
        }
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("acpv-raster-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn pgm_2x2_direct_decode() {
        let p = tmp("a.pgm");
        fs::write(&p, b"P5\n2 2\n255\n\x00\x01\x00\x01").unwrap();
        let m = load_mask(&p, None).unwrap();
        assert_eq!(m, LabelMask::new(2, 2, vec![0, 1, 0, 1], 2));
    }

    #[test]
    fn all_zero_mask_single_class() {
        let p = tmp("b.pgm");
        let mut bytes = b"P5\n4 4\n255\n".to_vec();
        bytes.extend([0u8; 16]);
        fs::write(&p, bytes).unwrap();
        let m = load_mask(&p, None).unwrap();
        assert_eq!(m.num_classes, 1);
    }

    #[test]
    fn truncated_pgm_is_eof() {
        let p = tmp("c.pgm");
        fs::write(&p, b"P5\n2 2\n255\n\x00\x01").unwrap();
        match load_mask(&p, None) {
            Err(RasterError::UnexpectedEof) => {}
            other => panic!("expected UnexpectedEof, got {other:?}"),
        }
    }

    #[test]
    fn mask_round_trip_bit_exact() {
        let p = tmp("d.pgm");
        let m = LabelMask::new(3, 2, vec![0, 1, 2, 3, 4, 0], 5);
        save_mask(&m, &p).unwrap();
        assert_eq!(load_mask(&p, Some(5)).unwrap(), m);
    }

    #[test]
    fn pfm_single_value() {
        let p = tmp("e.pfm");
        let mut bytes = b"Pf\n1 1\n-1.0\n".to_vec();
        bytes.extend(0.5f32.to_le_bytes());
        fs::write(&p, bytes).unwrap();
        let (hm, clamped) = load_heatmap(&p).unwrap();
        assert_eq!(hm, Heatmap::new(1, 1, vec![0.5]));
        assert_eq!(clamped, 0);
    }

    #[test]
    fn pfm_clamps_out_of_range() {
        let p = tmp("f.pfm");
        let mut bytes = b"Pf\n1 1\n-1.0\n".to_vec();
        bytes.extend(1.7f32.to_le_bytes());
        fs::write(&p, bytes).unwrap();
        let (hm, clamped) = load_heatmap(&p).unwrap();
        assert_eq!(hm.values[0], 1.0);
        assert_eq!(clamped, 1);
    }

    #[test]
    fn pfm_color_magic_rejected() {
        let p = tmp("g.pfm");
        let mut bytes = b"PF\n1 1\n-1.0\n".to_vec();
        bytes.extend([0u8; 12]);
        fs::write(&p, bytes).unwrap();
        match load_heatmap(&p) {
            Err(RasterError::BadPfmMagic(m)) => assert_eq!(m, "PF"),
            other => panic!("expected BadPfmMagic, got {other:?}"),
        }
    }

    #[test]
    fn pfm_nan_rejected() {
        let p = tmp("h.pfm");
        let mut bytes = b"Pf\n1 1\n-1.0\n".to_vec();
        bytes.extend(f32::NAN.to_le_bytes());
        fs::write(&p, bytes).unwrap();
        assert!(matches!(load_heatmap(&p), Err(RasterError::NonFiniteValue(0))));
    }

    #[test]
    fn heatmap_round_trip() {
        let p = tmp("i.pfm");
        let hm = Heatmap::new(3, 2, vec![0.0, 0.25, 0.5, 0.75, 1.0, 0.125]);
        save_heatmap(&hm, &p).unwrap();
        assert_eq!(load_heatmap(&p).unwrap().0, hm);
    }
}
