//! Lossless PNG cover handling.

use std::path::Path;

use image::RgbImage;

use crate::StegoError;

pub fn load_png(path: &Path) -> Result<RgbImage, StegoError> {
    let img = image::open(path).map_err(StegoError::Image)?;
    Ok(img.to_rgb8())
}

pub fn save_png(img: &RgbImage, path: &Path) -> Result<(), StegoError> {
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(StegoError::Image)
}

/// A synthetic fully homogeneous cover: every cell qualifies at any cell
/// size, giving the maximum capacity for its dimensions.
pub fn flat_cover(width: u32, height: u32, rgb: [u8; 3]) -> RgbImage {
    RgbImage::from_pixel(width, height, image::Rgb(rgb))
}
