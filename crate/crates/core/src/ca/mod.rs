//! One-dimensional cellular automata: local rules, space-time diagrams,
//! trace counts, row maps of deterministic 2D specs and the bit-splitting
//! construction.

pub mod count;
pub mod rule;
pub mod split;

pub use count::{ca_column_count, ColumnCount};
pub use rule::{
    ca_from_sft, identity_rule, shift_rule, xor_ca, CaRule, Row, RowMode, RuleDocument,
    SpaceTimeBlock, MAX_TABLE, UNDEFINED,
};
pub use split::{split_construction, split_count_identity, split_rule, SplitIdentity, SplitSpec};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};

use crate::error::Result;

/// Binary PGM of a space-time block, first row on top. Cells outside a
/// shrunk row are black; letters spread over the gray levels 32..=255.
pub fn space_time_pgm(block: &SpaceTimeBlock, letters: usize) -> Result<Vec<u8>> {
    let (w, h) = (block.width(), block.rows.len());
    let top = letters.saturating_sub(1).max(1);
    let mut raw = Vec::with_capacity(w * h);
    for t in 0..h {
        for x in 0..w {
            raw.push(
                block
                    .get(x, t)
                    .map_or(0, |s| (32 + (s as usize).min(top) * 223 / top) as u8),
            );
        }
    }
    let mut out = Vec::new();
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&raw, w as u32, h as u32, ExtendedColorType::L8)?;
    Ok(out)
}
