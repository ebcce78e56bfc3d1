//! Cell selection and capacity arithmetic.
//!
//! The cover splits into A×A pixel cells scanned in raster order. A cell is
//! homogeneous when, per channel, no LSB-masked pixel deviates from the
//! cell's masked mean by more than the tolerance. Masking the embedding
//! bits out of the test makes selection invariant under embedding, so the
//! extractor re-derives the same cell list from the stego image alone.
//!
//! Of the selected cells, 80% carry payload bits and the rest carry
//! Reed-Solomon parity.

use image::RgbImage;

use crate::StegoError;

pub const DATA_BYTES_PER_BLOCK: usize = 204;
pub const PARITY_BYTES_PER_BLOCK: usize = 51;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbedConfig {
    /// Cell edge in pixels, 1..=8.
    pub cell_size: u8,
    /// Homogeneity tolerance in intensity steps.
    pub tolerance: u8,
    /// LSBs per channel carrying the pattern; only 1 is supported.
    pub lsb_bits: u8,
}

impl EmbedConfig {
    pub fn new(cell_size: u8) -> Result<Self, StegoError> {
        Self {
            cell_size,
            tolerance: 8,
            lsb_bits: 1,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, StegoError> {
        if !(1..=8).contains(&self.cell_size) {
            return Err(StegoError::InvalidConfig(format!(
                "cell size {} outside 1..=8",
                self.cell_size
            )));
        }
        if self.lsb_bits != 1 {
            return Err(StegoError::InvalidConfig(
                "only 1 LSB per channel is supported".into(),
            ));
        }
        Ok(self)
    }

    pub(crate) fn mask(&self) -> u8 {
        !1u8
    }
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            cell_size: 4,
            tolerance: 8,
            lsb_bits: 1,
        }
    }
}

/// Top-left pixel coordinates of the selected cells, raster order. Partial
/// cells at the right and bottom edges never qualify.
pub fn select_cells(img: &RgbImage, cfg: &EmbedConfig) -> Vec<(u32, u32)> {
    let a = u32::from(cfg.cell_size);
    let mask = cfg.mask();
    let tolerance = f64::from(cfg.tolerance);
    let (cols, rows) = (img.width() / a, img.height() / a);
    let mut cells = Vec::new();
    for row in 0..rows {
        'cell: for col in 0..cols {
            let (x0, y0) = (col * a, row * a);
            for channel in 0..3 {
                let mut sum = 0u32;
                let mut min = u8::MAX;
                let mut max = 0u8;
                for dy in 0..a {
                    for dx in 0..a {
                        let v = img.get_pixel(x0 + dx, y0 + dy).0[channel] & mask;
                        sum += u32::from(v);
                        min = min.min(v);
                        max = max.max(v);
                    }
                }
                let mean = f64::from(sum) / f64::from(a * a);
                let dev = (f64::from(max) - mean).max(mean - f64::from(min));
                if dev > tolerance {
                    continue 'cell;
                }
            }
            cells.push((x0, y0));
        }
    }
    cells
}

/// Parity bytes required to protect `data_bytes` at the fixed 4:5 rate.
pub(crate) fn parity_bytes_for(data_bytes: usize) -> usize {
    let full = data_bytes / DATA_BYTES_PER_BLOCK;
    let rem = data_bytes % DATA_BYTES_PER_BLOCK;
    full * PARITY_BYTES_PER_BLOCK + rem.div_ceil(4)
}

/// Usable data bytes (length header included) given a selected cell count:
/// 80% of the cells rounded down to whole bytes, lowered until the parity
/// also fits the remaining cells.
pub(crate) fn data_capacity(cell_count: usize) -> usize {
    let data_bits = cell_count * 4 / 5;
    let mut capacity = data_bits / 8;
    while capacity > 0 && (capacity + parity_bytes_for(capacity)) * 8 > cell_count {
        capacity -= 1;
    }
    capacity
}

/// Bytes of payload-plus-header the image can carry at this configuration.
pub fn capacity_bytes(img: &RgbImage, cfg: &EmbedConfig) -> usize {
    data_capacity(select_cells(img, cfg).len())
}

/// Smallest-capacity entry that fits the payload with its length header.
pub fn choose_cover<T>(
    payload_len: usize,
    library: &[(T, usize)],
) -> Result<&T, StegoError> {
    library
        .iter()
        .filter(|(_, cap)| *cap >= payload_len + 4)
        .min_by_key(|(_, cap)| *cap)
        .map(|(item, _)| item)
        .ok_or(StegoError::NoSuitableCover {
            needed: payload_len + 4,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    pub(crate) fn flat(width: u32, height: u32, value: u8) -> RgbImage {
        RgbImage::from_pixel(width, height, Rgb([value, value, value]))
    }

    #[test]
    fn uniform_image_selects_every_cell() {
        let img = flat(64, 64, 120);
        for a in [1u8, 2, 4, 8] {
            let cfg = EmbedConfig::new(a).unwrap();
            let cells = select_cells(&img, &cfg);
            assert_eq!(cells.len(), (64 / a as usize).pow(2));
        }
    }

    #[test]
    fn checkerboard_selects_nothing_at_two_by_two() {
        let mut img = RgbImage::new(32, 32);
        for (x, y, p) in img.enumerate_pixels_mut() {
            let v = if (x + y) % 2 == 0 { 0 } else { 255 };
            *p = Rgb([v, v, v]);
        }
        let cfg = EmbedConfig::new(2).unwrap();
        assert!(select_cells(&img, &cfg).is_empty());
        // single-pixel cells are trivially homogeneous
        let cfg1 = EmbedConfig::new(1).unwrap();
        assert_eq!(select_cells(&img, &cfg1).len(), 32 * 32);
    }

    #[test]
    fn lsb_flips_never_change_selection() {
        let mut img = flat(24, 24, 77);
        let cfg = EmbedConfig::new(4).unwrap();
        let before = select_cells(&img, &cfg);
        for p in img.pixels_mut() {
            p.0[0] ^= 1;
            p.0[2] ^= 1;
        }
        assert_eq!(select_cells(&img, &cfg), before);
    }

    #[test]
    fn reference_capacity_points() {
        let img = flat(1024, 1024, 200);
        let expect = [(1u8, 104_857usize), (2, 26_214), (4, 6_553), (8, 1_638)];
        for (a, want) in expect {
            let cfg = EmbedConfig::new(a).unwrap();
            assert_eq!(capacity_bytes(&img, &cfg), want, "cell size {a}");
        }
    }

    #[test]
    fn zero_cells_zero_capacity() {
        assert_eq!(data_capacity(0), 0);
        let mut img = RgbImage::new(8, 8);
        for (x, y, p) in img.enumerate_pixels_mut() {
            let v = if (x + y) % 2 == 0 { 0 } else { 255 };
            *p = Rgb([v, v, v]);
        }
        let cfg = EmbedConfig::new(8).unwrap();
        assert_eq!(capacity_bytes(&img, &cfg), 0);
    }

    #[test]
    fn parity_stays_within_cell_budget() {
        for cells in [0usize, 1, 7, 8, 100, 1024, 65_536, 262_144, 1_048_576] {
            let d = data_capacity(cells);
            if d > 0 {
                assert!((d + parity_bytes_for(d)) * 8 <= cells, "cells={cells}");
            }
        }
    }

    #[test]
    fn choose_cover_picks_smallest_fit() {
        let lib = vec![("small", 1_638), ("mid", 6_553), ("large", 26_214)];
        assert_eq!(*choose_cover(4_000, &lib).unwrap(), "mid");
        assert_eq!(*choose_cover(8_400, &lib).unwrap(), "large");
        assert_eq!(*choose_cover(100, &lib).unwrap(), "small");
        assert!(matches!(
            choose_cover(200_000, &lib),
            Err(StegoError::NoSuitableCover { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(EmbedConfig::new(0).is_err());
        assert!(EmbedConfig::new(9).is_err());
        let bad = EmbedConfig {
            cell_size: 2,
            tolerance: 8,
            lsb_bits: 2,
        };
        assert!(bad.validated().is_err());
    }
}
