//! Bit-interleaved (Z-order) indices for voxels and voxel pairs.
//!
//! Axis convention: the coordinate with the highest array index owns bit 0, so
//! `[0, 0, 1]` encodes to `0b001` and `[0, 1, 0]` to `0b010`. Each axis of a
//! [`MortonCode3`] has 21 bits. A [`MortonCode6`] interleaves two 3D codes
//! (source bits on even positions, destination bits on odd positions) and is
//! limited to 10 bits per original axis so the result fits one 64-bit word.
//!
//! Additions are done with the masked-carry trick: every non-axis bit of the
//! left operand is forced to one so carries ripple across the gaps between the
//! bits of a single axis. A carry out of the word means that axis overflowed.

use std::fmt;

use crate::error::{Error, Result};

/// Bits available per axis in a [`MortonCode3`].
pub const AXIS_BITS_3: u32 = 21;
/// Bits available per original axis in a [`MortonCode6`].
pub const AXIS_BITS_6: u32 = 10;

/// Largest per-axis index a [`MortonCode3`] can hold.
pub const MAX_AXIS_3: u32 = (1 << AXIS_BITS_3) - 1;
/// Largest per-axis index usable when edge codes are required.
pub const MAX_AXIS_6: u32 = (1 << AXIS_BITS_6) - 1;

const fn periodic_mask(offset: u32, period: u32, limit: u32) -> u64 {
    let mut mask = 0u64;
    let mut bit = offset;
    while bit < limit {
        mask |= 1 << bit;
        bit += period;
    }
    mask
}

/// Bit masks of the three axes, indexed by coordinate position.
pub const AXIS_MASKS_3: [u64; 3] = [
    periodic_mask(2, 3, 63),
    periodic_mask(1, 3, 63),
    periodic_mask(0, 3, 63),
];

/// Bit masks of the six interleaved axes of an edge code, lowest bit first.
pub const AXIS_MASKS_6: [u64; 6] = [
    periodic_mask(0, 6, 60),
    periodic_mask(1, 6, 60),
    periodic_mask(2, 6, 60),
    periodic_mask(3, 6, 60),
    periodic_mask(4, 6, 60),
    periodic_mask(5, 6, 60),
];

const CODE3_BITS_FOR_6: u64 = (1 << (3 * AXIS_BITS_6)) - 1;

#[inline]
fn spread3(v: u64) -> u64 {
    let mut x = v & 0x1f_ffff;
    x = (x | (x << 32)) & 0x001f_0000_0000_ffff;
    x = (x | (x << 16)) & 0x001f_0000_ff00_00ff;
    x = (x | (x << 8)) & 0x100f_00f0_0f00_f00f;
    x = (x | (x << 4)) & 0x10c3_0c30_c30c_30c3;
    x = (x | (x << 2)) & 0x1249_2492_4924_9249;
    x
}

#[inline]
fn compact3(v: u64) -> u64 {
    let mut x = v & 0x1249_2492_4924_9249;
    x = (x | (x >> 2)) & 0x10c3_0c30_c30c_30c3;
    x = (x | (x >> 4)) & 0x100f_00f0_0f00_f00f;
    x = (x | (x >> 8)) & 0x001f_0000_ff00_00ff;
    x = (x | (x >> 16)) & 0x001f_0000_0000_ffff;
    x = (x | (x >> 32)) & 0x1f_ffff;
    x
}

#[inline]
fn spread2(v: u64) -> u64 {
    let mut x = v & 0xffff_ffff;
    x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
    x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

#[inline]
fn compact2(v: u64) -> u64 {
    let mut x = v & 0x5555_5555_5555_5555;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x >> 4)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x >> 8)) & 0x0000_ffff_0000_ffff;
    x = (x | (x >> 16)) & 0x0000_0000_ffff_ffff;
    x
}

/// Interleave two 32-bit values: `a` on even bits, `b` on odd bits.
pub fn encode2(a: u32, b: u32) -> u64 {
    spread2(a as u64) | (spread2(b as u64) << 1)
}

/// Inverse of [`encode2`].
pub fn decode2(code: u64) -> (u32, u32) {
    (compact2(code) as u32, compact2(code >> 1) as u32)
}

/// Masked-carry addition restricted to `masks`; `None` when any axis overflows.
#[inline]
fn masked_add(a: u64, b: u64, masks: &[u64]) -> Option<u64> {
    let mut sum = 0;
    for &m in masks {
        let (s, carry) = (a | !m).overflowing_add(b & m);
        if carry {
            return None;
        }
        sum |= s & m;
    }
    Some(sum)
}

/// Masked-borrow subtraction restricted to `masks`; `None` when any axis underflows.
#[inline]
fn masked_sub(a: u64, b: u64, masks: &[u64]) -> Option<u64> {
    let mut diff = 0;
    for &m in masks {
        let (d, borrow) = (a & m).overflowing_sub(b & m);
        if borrow {
            return None;
        }
        diff |= d & m;
    }
    Some(diff)
}

/// Morton index of a voxel (ioxel) in the first octant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MortonCode3(u64);

impl MortonCode3 {
    /// Wraps raw bits. Bit 63 is never produced by [`encode3`]; it is rejected here.
    pub fn from_bits(bits: u64) -> Result<Self> {
        if bits >> 63 != 0 {
            return Err(Error::Range(format!(
                "bit 63 set in 3D Morton code {bits:#x}"
            )));
        }
        Ok(Self(bits))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn decode(self) -> [u32; 3] {
        decode3(self)
    }

    /// True when every axis fits the 10-bit limit required for edge codes.
    pub fn fits_edge_range(self) -> bool {
        self.0 <= CODE3_BITS_FOR_6
    }
}

impl fmt::Display for MortonCode3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Morton index of an ordered voxel pair (an edge of the voxel graph).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MortonCode6(u64);

impl MortonCode6 {
    pub fn from_bits(bits: u64) -> Result<Self> {
        if bits >> 60 != 0 {
            return Err(Error::Range(format!(
                "6D Morton code {bits:#x} exceeds 60 bits"
            )));
        }
        Ok(Self(bits))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn source(self) -> MortonCode3 {
        deinterleave2(self).0
    }

    pub fn destination(self) -> MortonCode3 {
        deinterleave2(self).1
    }
}

impl fmt::Display for MortonCode6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Encode a nonnegative index triple.
pub fn encode3(rho: [u32; 3]) -> Result<MortonCode3> {
    if let Some(c) = rho.iter().find(|&&c| c > MAX_AXIS_3) {
        return Err(Error::Range(format!(
            "index component {c} exceeds the {AXIS_BITS_3}-bit axis range"
        )));
    }
    Ok(MortonCode3(
        (spread3(rho[0] as u64) << 2) | (spread3(rho[1] as u64) << 1) | spread3(rho[2] as u64),
    ))
}

pub fn decode3(code: MortonCode3) -> [u32; 3] {
    let b = code.0;
    [
        compact3(b >> 2) as u32,
        compact3(b >> 1) as u32,
        compact3(b) as u32,
    ]
}

/// Pair two voxel codes into an edge code.
pub fn interleave2(src: MortonCode3, dst: MortonCode3) -> Result<MortonCode6> {
    if !src.fits_edge_range() || !dst.fits_edge_range() {
        return Err(Error::Range(format!(
            "voxel codes {src} / {dst} exceed the {AXIS_BITS_6}-bit per-axis edge range"
        )));
    }
    Ok(MortonCode6(encode2(src.0 as u32, dst.0 as u32)))
}

pub fn deinterleave2(edge: MortonCode6) -> (MortonCode3, MortonCode3) {
    let (s, d) = decode2(edge.0);
    (MortonCode3(s as u64), MortonCode3(d as u64))
}

/// Per-axis sum of two voxel codes without decoding.
pub fn morton_sum3(a: MortonCode3, b: MortonCode3) -> Result<MortonCode3> {
    masked_add(a.0, b.0, &AXIS_MASKS_3)
        .map(MortonCode3)
        .ok_or_else(|| Error::Range(format!("per-axis overflow adding {a} + {b}")))
}

/// Per-axis sum of two edge codes without decoding.
pub fn morton_sum6(a: MortonCode6, b: MortonCode6) -> Result<MortonCode6> {
    masked_add(a.0, b.0, &AXIS_MASKS_6)
        .map(MortonCode6)
        .ok_or_else(|| Error::Range(format!("per-axis overflow adding edge codes {a} + {b}")))
}

/// Signed relative offset in Morton form.
///
/// Positive and negative parts are kept in separate codes so that a signed
/// delta is applied as one masked addition followed by one masked subtraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MortonOffset3 {
    pub plus: MortonCode3,
    pub minus: MortonCode3,
}

impl MortonOffset3 {
    pub fn from_delta(delta: [i32; 3]) -> Result<Self> {
        let plus = delta.map(|d| d.max(0).unsigned_abs());
        let minus = delta.map(|d| d.min(0).unsigned_abs());
        Ok(Self {
            plus: encode3(plus)?,
            minus: encode3(minus)?,
        })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.minus.0 == 0
    }

    pub fn apply(&self, code: MortonCode3) -> Option<MortonCode3> {
        let added = masked_add(code.0, self.plus.0, &AXIS_MASKS_3)?;
        masked_sub(added, self.minus.0, &AXIS_MASKS_3).map(MortonCode3)
    }
}

/// Signed offset of an ordered voxel pair in edge-code form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MortonOffset6 {
    pub plus: MortonCode6,
    pub minus: MortonCode6,
}

impl MortonOffset6 {
    pub fn from_pair(src: &MortonOffset3, dst: &MortonOffset3) -> Result<Self> {
        Ok(Self {
            plus: interleave2(src.plus, dst.plus)?,
            minus: interleave2(src.minus, dst.minus)?,
        })
    }

    pub fn apply(&self, code: MortonCode6) -> Option<MortonCode6> {
        let added = masked_add(code.0, self.plus.0, &AXIS_MASKS_6)?;
        masked_sub(added, self.minus.0, &AXIS_MASKS_6).map(MortonCode6)
    }
}
