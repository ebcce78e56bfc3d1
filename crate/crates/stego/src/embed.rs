//! Payload embedding and extraction.
//!
//! The payload is framed as a little-endian u32 length plus the bytes,
//! zero-padded to the image's data capacity so the geometry depends only on
//! the cover and the configuration. The frame splits into Reed-Solomon
//! blocks (204 data / 51 parity, shortened tail); data bits then parity
//! bits are written one per selected cell, most significant bit first. A
//! "1" sets every masked LSB in the cell, a "0" clears them; reading takes
//! the majority of the cell's LSBs, so partial in-cell damage does not even
//! reach the decoder.

use image::RgbImage;

use crate::cell::{
    data_capacity, parity_bytes_for, select_cells, EmbedConfig, DATA_BYTES_PER_BLOCK,
    PARITY_BYTES_PER_BLOCK,
};
use crate::rs;
use crate::StegoError;

struct Geometry {
    cells: Vec<(u32, u32)>,
    data_bytes: usize,
    parity_bytes: usize,
}

fn geometry(img: &RgbImage, cfg: &EmbedConfig) -> Geometry {
    let cells = select_cells(img, cfg);
    let data_bytes = data_capacity(cells.len());
    let parity_bytes = parity_bytes_for(data_bytes);
    Geometry {
        cells,
        data_bytes,
        parity_bytes,
    }
}

fn write_cell(img: &mut RgbImage, cfg: &EmbedConfig, cell: (u32, u32), bit: bool) {
    let a = u32::from(cfg.cell_size);
    for dy in 0..a {
        for dx in 0..a {
            let p = img.get_pixel_mut(cell.0 + dx, cell.1 + dy);
            for channel in &mut p.0 {
                *channel = (*channel & cfg.mask()) | u8::from(bit);
            }
        }
    }
}

fn read_cell(img: &RgbImage, cfg: &EmbedConfig, cell: (u32, u32)) -> bool {
    let a = u32::from(cfg.cell_size);
    let mut ones = 0u32;
    for dy in 0..a {
        for dx in 0..a {
            let p = img.get_pixel(cell.0 + dx, cell.1 + dy);
            for channel in &p.0 {
                ones += u32::from(channel & 1);
            }
        }
    }
    // strict majority toward 1; a tie reads as 0
    2 * ones > 3 * a * a
}

fn rs_blocks(data_len: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    // (data offset, data len, parity len) per block
    let full = data_len / DATA_BYTES_PER_BLOCK;
    let rem = data_len % DATA_BYTES_PER_BLOCK;
    (0..full)
        .map(|i| {
            (
                i * DATA_BYTES_PER_BLOCK,
                DATA_BYTES_PER_BLOCK,
                PARITY_BYTES_PER_BLOCK,
            )
        })
        .chain((rem > 0).then_some((full * DATA_BYTES_PER_BLOCK, rem, rem.div_ceil(4))))
}

/// Hide `payload` in a copy of the cover. Only the LSBs of pixels inside
/// selected cells change.
pub fn embed(img: &RgbImage, payload: &[u8], cfg: &EmbedConfig) -> Result<RgbImage, StegoError> {
    let geo = geometry(img, cfg);
    let needed = payload.len() + 4;
    if needed > geo.data_bytes {
        return Err(StegoError::CapacityExceeded {
            needed,
            available: geo.data_bytes,
        });
    }

    let mut frame = Vec::with_capacity(geo.data_bytes);
    frame.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    frame.extend_from_slice(payload);
    frame.resize(geo.data_bytes, 0);

    let mut parity = Vec::with_capacity(geo.parity_bytes);
    for (off, len, plen) in rs_blocks(geo.data_bytes) {
        parity.extend(rs::encode(&frame[off..off + len], plen));
    }
    debug_assert_eq!(parity.len(), geo.parity_bytes);

    let mut out = img.clone();
    let stream = frame.iter().chain(parity.iter());
    let mut cell_iter = geo.cells.iter();
    for byte in stream {
        for bit_pos in (0..8).rev() {
            let cell = cell_iter.next().expect("capacity accounting covers the stream");
            write_cell(&mut out, cfg, *cell, (byte >> bit_pos) & 1 == 1);
        }
    }
    Ok(out)
}

/// Recover the payload from a stego image; needs nothing but the image and
/// the configuration.
pub fn extract(img: &RgbImage, cfg: &EmbedConfig) -> Result<Vec<u8>, StegoError> {
    let geo = geometry(img, cfg);
    if geo.data_bytes < 4 {
        return Err(StegoError::Extraction("image carries no capacity".into()));
    }
    let total = geo.data_bytes + geo.parity_bytes;
    let mut bytes = vec![0u8; total];
    for (i, byte) in bytes.iter_mut().enumerate() {
        for bit_pos in 0..8 {
            let cell = geo.cells[i * 8 + bit_pos];
            if read_cell(img, cfg, cell) {
                *byte |= 1 << (7 - bit_pos);
            }
        }
    }
    let (frame, parity) = bytes.split_at_mut(geo.data_bytes);

    let mut parity_off = 0;
    for (off, len, plen) in rs_blocks(geo.data_bytes) {
        let mut block = Vec::with_capacity(len + plen);
        block.extend_from_slice(&frame[off..off + len]);
        block.extend_from_slice(&parity[parity_off..parity_off + plen]);
        rs::correct(&mut block, plen).map_err(|e| StegoError::Extraction(e.to_string()))?;
        frame[off..off + len].copy_from_slice(&block[..len]);
        parity_off += plen;
    }

    let len = u32::from_le_bytes(frame[..4].try_into().unwrap()) as usize;
    if len > geo.data_bytes - 4 {
        return Err(StegoError::Extraction(format!(
            "implausible length header {len} for capacity {}",
            geo.data_bytes - 4
        )));
    }
    Ok(frame[4..4 + len].to_vec())
}
