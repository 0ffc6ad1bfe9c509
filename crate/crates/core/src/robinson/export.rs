use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, GrayImage, ImageEncoder, Luma, Rgb, RgbImage};

use super::tiler::RobinsonTiling;
use crate::error::Result;
use crate::symbolic::Sym;

fn to_pnm(raw: &[u8], width: u32, height: u32, rgb: bool) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let (subtype, color) = if rgb {
        (
            PnmSubtype::Pixmap(SampleEncoding::Binary),
            ExtendedColorType::Rgb8,
        )
    } else {
        (
            PnmSubtype::Graymap(SampleEncoding::Binary),
            ExtendedColorType::L8,
        )
    };
    PnmEncoder::new(&mut out)
        .with_subtype(subtype)
        .write_image(raw, width, height, color)?;
    Ok(out)
}

/// Binary PGM with one gray level per tile id (top image row = top tiling row).
pub fn tiling_pgm(tiling: &RobinsonTiling, letters: usize) -> Result<Vec<u8>> {
    let top = letters.saturating_sub(1).max(1) as u32;
    let img = GrayImage::from_fn(tiling.width as u32, tiling.height as u32, |x, y| {
        let s = tiling.get(x as usize, tiling.height - 1 - y as usize) as u32;
        Luma([(s.min(top) * 255 / top) as u8])
    });
    to_pnm(img.as_raw(), img.width(), img.height(), false)
}

/// Binary PPM: cross cells red, other cells in gray by tile id.
pub fn cross_highlight_ppm(
    tiling: &RobinsonTiling,
    crosses: &[Sym],
    letters: usize,
) -> Result<Vec<u8>> {
    let top = letters.saturating_sub(1).max(1) as u32;
    let img = RgbImage::from_fn(tiling.width as u32, tiling.height as u32, |x, y| {
        let s = tiling.get(x as usize, tiling.height - 1 - y as usize);
        if crosses.contains(&s) {
            Rgb([220, 30, 30])
        } else {
            let g = (64 + (s as u32).min(top) * 160 / top) as u8;
            Rgb([g, g, g])
        }
    });
    to_pnm(img.as_raw(), img.width(), img.height(), true)
}
