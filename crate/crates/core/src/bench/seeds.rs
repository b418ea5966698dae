/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the ChaCha8 stream for one instance, derived from the experiment
/// seed, the cell index and the instance index.
pub fn substream_seed(seed: u64, cell: u64, instance: u64) -> u64 {
    mix(mix(mix(seed) ^ cell) ^ instance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_differ() {
        let a = substream_seed(1, 0, 0);
        assert_ne!(a, substream_seed(1, 0, 1));
        assert_ne!(a, substream_seed(1, 1, 0));
        assert_ne!(a, substream_seed(2, 0, 0));
        assert_eq!(a, substream_seed(1, 0, 0));
    }
}
