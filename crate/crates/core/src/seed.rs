//! Master-seed fan-out.
//!
//! Every randomized stage derives its own sub-seed from the master seed, a
//! stage label and an index. The derivation is a fixed integer hash, so
//! reordering stages or running clusters concurrently never changes which
//! stream a stage sees.

/// splitmix64 finalizer; stable on every platform.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the sub-seed for stage `label` / `index` from `master`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the label, folded with master and index.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    splitmix64(master ^ h ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}
