//! PNG rendering and raw grid files.

use std::io::Cursor;

use super::Spectrogram;
use crate::annotate::BBox;
use crate::error::{Error, Result};

/// Leading bytes of a raw grid file.
pub const GRID_MAGIC: [u8; 4] = *b"RSG1";

/// 8-bit pixels, `dim_f` rows by `dim_t` columns, row 0 at the highest
/// frequency. Pixel value is `round(255 * grid)`.
pub fn pixels(spec: &Spectrogram) -> Vec<u8> {
    grid_pixels(&spec.grid, spec.dim_t, spec.dim_f)
}

fn grid_pixels(grid: &[f64], dim_t: usize, dim_f: usize) -> Vec<u8> {
    let mut px = vec![0u8; dim_t * dim_f];
    for row in 0..dim_f {
        let f = dim_f - 1 - row;
        for t in 0..dim_t {
            let v = grid[t * dim_f + f].clamp(0.0, 1.0);
            px[row * dim_t + t] = (255.0 * v).round() as u8;
        }
    }
    px
}

/// Grayscale PNG with fixed encoder settings so output bytes are stable.
pub fn encode_png(px: &[u8], width: usize, height: usize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Balanced);
        enc.set_filter(png::Filter::Adaptive);
        let mut writer = enc.write_header().map_err(|e| Error::Png(e.to_string()))?;
        writer
            .write_image_data(px)
            .map_err(|e| Error::Png(e.to_string()))?;
    }
    Ok(out)
}

/// Decodes an 8-bit grayscale PNG into `(width, height, pixels)`.
pub fn decode_png(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| Error::Png(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Png("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(|e| Error::Png(e.to_string()))?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Png(format!(
            "expected 8-bit grayscale, got {:?} {:?}",
            info.color_type, info.bit_depth
        )));
    }
    buf.truncate(info.buffer_size());
    Ok((info.width as usize, info.height as usize, buf))
}

pub fn render(spec: &Spectrogram) -> Result<Vec<u8>> {
    encode_png(&pixels(spec), spec.dim_t, spec.dim_f)
}

/// Draws one-pixel white outlines for `boxes` (normalized image coordinates).
pub fn burn_boxes(px: &mut [u8], width: usize, height: usize, boxes: &[BBox]) {
    let to_px = |v: f64, n: usize| ((v * n as f64).floor() as isize).clamp(0, n as isize - 1) as usize;
    for b in boxes {
        let (x0, y0, x1, y1) = b.corners();
        let (c0, c1) = (to_px(x0, width), to_px(x1, width));
        let (r0, r1) = (to_px(y0, height), to_px(y1, height));
        for c in c0..=c1 {
            px[r0 * width + c] = 255;
            px[r1 * width + c] = 255;
        }
        for r in r0..=r1 {
            px[r * width + c0] = 255;
            px[r * width + c1] = 255;
        }
    }
}

pub fn render_with_boxes(spec: &Spectrogram, boxes: &[BBox]) -> Result<Vec<u8>> {
    let mut px = pixels(spec);
    burn_boxes(&mut px, spec.dim_t, spec.dim_f, boxes);
    encode_png(&px, spec.dim_t, spec.dim_f)
}

/// Raw grid file: 16-byte header (magic, dim_t, dim_f, preset id as LE u32)
/// followed by the grid as row-major LE `f32`, time-major.
pub fn write_grid(spec: &Spectrogram) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + spec.grid.len() * 4);
    out.extend_from_slice(&GRID_MAGIC);
    out.extend_from_slice(&(spec.dim_t as u32).to_le_bytes());
    out.extend_from_slice(&(spec.dim_f as u32).to_le_bytes());
    out.extend_from_slice(&spec.preset.id().to_le_bytes());
    for v in &spec.grid {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

/// Parsed raw grid file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawGrid {
    pub dim_t: usize,
    pub dim_f: usize,
    pub preset_id: u32,
    pub grid: Vec<f64>,
}

impl RawGrid {
    pub fn pixels(&self) -> Vec<u8> {
        grid_pixels(&self.grid, self.dim_t, self.dim_f)
    }
}

pub fn read_grid(bytes: &[u8]) -> Result<RawGrid> {
    if bytes.len() < 16 || bytes[..4] != GRID_MAGIC {
        return Err(Error::domain("not a raw grid file (bad magic)"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let (dim_t, dim_f, preset_id) = (word(4) as usize, word(8) as usize, word(12));
    let body = &bytes[16..];
    if body.len() != dim_t * dim_f * 4 {
        return Err(Error::domain(format!(
            "raw grid body has {} bytes, header implies {}",
            body.len(),
            dim_t * dim_f * 4
        )));
    }
    let grid = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok(RawGrid { dim_t, dim_f, preset_id, grid })
}
