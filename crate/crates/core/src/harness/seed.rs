//! Counter-based RNG stream derivation. Every (instance, group, round) gets
//! its own seed, so evaluation order and worker count never change results.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a hash of an instance id.
pub fn instance_key(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn stream_seed(master: u64, instance: u64, group: u64, round: u64) -> u64 {
    [instance, group, round]
        .into_iter()
        .fold(splitmix64(master), |acc, part| {
            splitmix64(acc ^ splitmix64(part))
        })
}
