//! Row-major run-length encoding: alternating run lengths starting with a
//! run of zeros (possibly of length 0).

use super::mask::BinaryMask;
use crate::error::{Error, Result};

pub fn rle_encode(mask: &BinaryMask) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u64;
    for &b in mask.bits() {
        if b == current {
            len += 1;
        } else {
            runs.push(len);
            current = b;
            len = 1;
        }
    }
    runs.push(len);
    runs
}

pub fn rle_decode(runs: &[u64], width: usize, height: usize) -> Result<BinaryMask> {
    let total: u64 = runs.iter().sum();
    if total != (width * height) as u64 {
        return Err(Error::format(
            "rle",
            format!("runs sum to {total}, expected {}", width * height),
        ));
    }
    let mut bits = Vec::with_capacity(width * height);
    for (i, &run) in runs.iter().enumerate() {
        bits.extend(std::iter::repeat_n(i % 2 == 1, run as usize));
    }
    BinaryMask::from_bits(width, height, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn starts_with_zero_run() {
        let m = BinaryMask::from_bits(4, 1, vec![true, true, false, true]).unwrap();
        assert_eq!(rle_encode(&m), vec![0, 2, 1, 1]);
        assert_eq!(rle_encode(&BinaryMask::new(2, 2)), vec![4]);
    }

    #[test]
    fn decode_checks_total() {
        assert!(rle_decode(&[1, 2], 2, 2).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let m = BinaryMask::from_fn(w, h, |x, y| {
                (seed.rotate_left((x * 7 + y * 13) as u32 % 64) & 1) == 1
            });
            let runs = rle_encode(&m);
            prop_assert_eq!(runs.iter().sum::<u64>(), (w * h) as u64);
            prop_assert_eq!(rle_decode(&runs, w, h).unwrap(), m);
        }
    }
}
