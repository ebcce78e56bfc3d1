//! Robust, oblivious image steganography: homogeneous-cell LSB patterns
//! with Reed-Solomon parity at a fixed 4:5 rate.

pub mod cell;
pub mod embed;
pub mod gf256;
pub mod io;
pub mod rs;

use thiserror::Error;

pub use cell::{capacity_bytes, choose_cover, select_cells, EmbedConfig};
pub use embed::{embed, extract};
pub use image::RgbImage;

#[derive(Debug, Error)]
pub enum StegoError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("payload needs {needed} bytes but the cover offers {available}")]
    CapacityExceeded { needed: usize, available: usize },
    #[error("extraction failed: {0}")]
    Extraction(String),
    #[error("no cover image fits a {needed}-byte frame")]
    NoSuitableCover { needed: usize },
    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
