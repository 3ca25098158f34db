use sha2::{Digest, Sha256};

/// Derives a stage seed from a master seed, a stage label and an index.
///
/// Each stage hashes its own label, so changing how many samples one stage
/// draws leaves the seeds of every other stage untouched.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
