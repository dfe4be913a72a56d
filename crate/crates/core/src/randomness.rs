//! Keyed hash to `(0, 1)` and counter-based fresh exponential draws.
//!
//! Both are built on SipHash-1-3 keyed with the 128-bit seed. Domain tags
//! keep the oracle hash, the fresh stream and seed derivation from ever
//! evaluating the PRF on the same message.

use std::hash::Hasher;

use siphasher::sip::SipHasher13;

const TAG_ORACLE: u8 = 0x01;
const TAG_ORACLE_WORDS: u8 = 0x02;
const TAG_FRESH: u8 = 0x03;
const TAG_DERIVE: u8 = 0x04;
const TAG_RECORD: u8 = 0x05;

/// Smallest value `hash_unit` returns.
pub const UNIT_MIN: f64 = 8.673_617_379_884_035e-19; // 2^-60
/// Largest value `hash_unit` returns. `1 - 2^-60` is not representable, so the
/// upper clamp is the largest double below one.
pub const UNIT_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

fn sip(seed: u128) -> SipHasher13 {
    SipHasher13::new_with_keys(seed as u64, (seed >> 64) as u64)
}

#[inline]
fn to_unit(bits: u64) -> f64 {
    let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    u.clamp(UNIT_MIN, UNIT_MAX)
}

/// Random-oracle stand-in `H : u64 -> (0, 1)`, namespaced by `salt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OracleHash {
    pub seed: u128,
    pub salt: u32,
}

impl OracleHash {
    pub fn new(seed: u128, salt: u32) -> Self {
        OracleHash { seed, salt }
    }

    /// Same seed, different namespace.
    pub fn with_salt(self, salt: u32) -> Self {
        OracleHash { salt, ..self }
    }

    pub fn hash_bits(&self, key: u64) -> u64 {
        let mut h = sip(self.seed);
        h.write_u8(TAG_ORACLE);
        h.write_u32(self.salt);
        h.write_u64(key);
        h.finish()
    }

    /// Hash of a word sequence, e.g. an edge `(u, v)` or a hyperedge.
    pub fn hash_words_bits(&self, words: &[u64]) -> u64 {
        let mut h = sip(self.seed);
        h.write_u8(TAG_ORACLE_WORDS);
        h.write_u32(self.salt);
        h.write_u64(words.len() as u64);
        for &w in words {
            h.write_u64(w);
        }
        h.finish()
    }
}

/// `H(key)` in `[2^-60, 1 - 2^-53]`, 53 bits of resolution.
pub fn hash_unit(h: &OracleHash, key: u64) -> f64 {
    to_unit(h.hash_bits(key))
}

/// `H(words)` for multi-word identifiers.
pub fn hash_unit_words(h: &OracleHash, words: &[u64]) -> f64 {
    to_unit(h.hash_words_bits(words))
}

/// Counter-based source of i.i.d. uniforms and `Exp(1)` variates.
///
/// `stream` selects an independent sequence under one seed, so shards can
/// draw without coordination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreshSource {
    seed: u128,
    stream: u64,
    counter: u64,
}

impl FreshSource {
    pub fn new(seed: u128) -> Self {
        FreshSource::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u128, stream: u64) -> Self {
        FreshSource {
            seed,
            stream,
            counter: 0,
        }
    }

    /// Resumes a stream at `counter`, e.g. for a shard that owns the draws
    /// from that index on.
    pub fn starting_at(seed: u128, stream: u64, counter: u64) -> Self {
        FreshSource {
            seed,
            stream,
            counter,
        }
    }

    /// Source whose draws are a function of the update record itself, not
    /// of its position in the stream.
    pub fn for_record(seed: u128, key: u64, delta: f64, occurrence: u64) -> Self {
        let mut h = sip(seed);
        h.write_u8(TAG_RECORD);
        h.write_u64(key);
        h.write_u64(delta.to_bits());
        h.write_u64(occurrence);
        FreshSource::with_stream(seed, h.finish())
    }

    pub fn seed(&self) -> u128 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_uniform(&mut self) -> f64 {
        let mut h = sip(self.seed);
        h.write_u8(TAG_FRESH);
        h.write_u64(self.stream);
        h.write_u64(self.counter);
        self.counter += 1;
        to_unit(h.finish())
    }
}

/// `-ln U` for the next uniform `U`.
pub fn fresh_exp(s: &mut FreshSource) -> f64 {
    -s.next_uniform().ln()
}

/// Independent child seed, used for repetitions and per-gate hashes.
pub fn derive_seed(base: u128, index: u64) -> u128 {
    let mut lo = sip(base);
    lo.write_u8(TAG_DERIVE);
    lo.write_u64(index);
    lo.write_u8(0);
    let mut hi = sip(base);
    hi.write_u8(TAG_DERIVE);
    hi.write_u64(index);
    hi.write_u8(1);
    (lo.finish() as u128) | ((hi.finish() as u128) << 64)
}

/// Maps a textual key to a 64-bit identifier (fixed, seed-independent).
pub fn key_from_str(s: &str) -> u64 {
    let mut h = SipHasher13::new_with_keys(0, 0);
    h.write(s.as_bytes());
    h.finish()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid seed {0:?}: expected 1 to 32 hex digits, optional 0x prefix")]
pub struct SeedParseError(pub String);

/// Parses a hex seed such as `0xdeadbeef` or `00ff`.
pub fn parse_seed_hex(s: &str) -> Result<u128, SeedParseError> {
    let t = s.trim();
    let digits = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t);
    if digits.is_empty() || digits.len() > 32 {
        return Err(SeedParseError(s.to_string()));
    }
    u128::from_str_radix(digits, 16).map_err(|_| SeedParseError(s.to_string()))
}
