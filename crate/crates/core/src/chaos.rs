//! Chaotic pseudorandom sources for the cipher: the logistic and Henon maps,
//! plus derivation of block permutations and the 11-bit keystream units that
//! drive AC-coefficient encryption.
//!
//! Both maps iterate in plain `f64` with a single fixed evaluation order, so
//! identical keys reproduce identical streams bit for bit across runs.

use std::fmt::Write as _;

use thiserror::Error;

/// Iterations discarded before a map is considered settled into its attractor.
pub const DEFAULT_BURN_IN: u32 = 1000;

/// Bits per encryption minimal unit.
pub const ECU_BITS: usize = 11;
/// ECUs per group; one group serves the 63 AC positions of one block.
pub const ECUS_PER_GROUP: usize = 63;
/// Bits consumed per ECU group.
pub const GROUP_BITS: usize = ECU_BITS * ECUS_PER_GROUP;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("logistic parameter mu={0} outside chaotic range (3.6, 4.0]")]
    MuOutOfRange(f64),
    #[error("logistic initial state x0={0} outside (0, 1)")]
    LogisticSeedOutOfRange(f64),
    #[error("henon parameter a={0} outside chaotic range (1.05, 1.8)")]
    HenonAOutOfRange(f64),
    #[error("henon parameter b={0} is not 0.3")]
    HenonBNotFixed(f64),
    #[error("logistic orbit collapsed to a fixed point at iteration {0}")]
    DegenerateOrbit(u64),
    #[error("henon orbit diverged at iteration {0}")]
    DivergentOrbit(u64),
    #[error("chaotic sequence exhausted: needed {needed}, {remaining} remaining")]
    InsufficientSequence { needed: usize, remaining: usize },
    #[error("key file: {0}")]
    InvalidKeyFile(String),
}

/// Parameters of the logistic map `x_{n+1} = mu * x_n * (1 - x_n)`.
///
/// `mu = 4.0` is admitted (the fully chaotic endpoint) so that seeds which
/// collapse onto the absorbing fixed point remain constructible for the
/// degenerate-orbit error path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub mu: f64,
    pub x0: f64,
    pub burn_in: u32,
}

impl LogisticParams {
    pub fn new(mu: f64, x0: f64) -> Result<Self, ChaosError> {
        Self::with_burn_in(mu, x0, DEFAULT_BURN_IN)
    }

    /// Validates ranges and probes the orbit through `burn_in` iterations,
    /// rejecting seeds that collapse to exactly 0 or 1 on the way.
    pub fn with_burn_in(mu: f64, x0: f64, burn_in: u32) -> Result<Self, ChaosError> {
        if !(mu > 3.6 && mu <= 4.0) {
            return Err(ChaosError::MuOutOfRange(mu));
        }
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(ChaosError::LogisticSeedOutOfRange(x0));
        }
        let params = Self { mu, x0, burn_in };
        // Probe: the generator constructor runs the burn-in with the same checks.
        LogisticGen::new(&params)?;
        Ok(params)
    }
}

/// Parameters of the Henon map `x_{n+1} = 1 - a*x_n^2 + y_n`, `y_{n+1} = b*x_n`.
///
/// `b` is pinned to 0.3; `a` is the keyed control parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HenonParams {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub y0: f64,
    pub burn_in: u32,
}

impl HenonParams {
    pub const B: f64 = 0.3;

    pub fn new(a: f64, x0: f64, y0: f64) -> Result<Self, ChaosError> {
        Self::with_burn_in(a, x0, y0, DEFAULT_BURN_IN)
    }

    /// Validates ranges and probes the orbit through `burn_in` iterations.
    /// Seeds whose transient leaves |x| < 2, |y| < 1 are rejected as divergent.
    pub fn with_burn_in(a: f64, x0: f64, y0: f64, burn_in: u32) -> Result<Self, ChaosError> {
        if !(a > 1.05 && a < 1.8) {
            return Err(ChaosError::HenonAOutOfRange(a));
        }
        let params = Self { a, b: Self::B, x0, y0, burn_in };
        HenonGen::new(&params)?;
        Ok(params)
    }
}

/// The two-part key: `k1` drives the logistic map (block permutations),
/// `k2` drives the Henon map (the AC keystream).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncryptionKey {
    pub logistic: LogisticParams,
    pub henon: HenonParams,
}

impl EncryptionKey {
    pub fn new(logistic: LogisticParams, henon: HenonParams) -> Self {
        Self { logistic, henon }
    }

    /// Builds a key from the five raw components, applying default burn-in.
    pub fn from_components(
        mu: f64,
        logistic_x0: f64,
        henon_a: f64,
        henon_x0: f64,
        henon_y0: f64,
    ) -> Result<Self, ChaosError> {
        Ok(Self {
            logistic: LogisticParams::new(mu, logistic_x0)?,
            henon: HenonParams::new(henon_a, henon_x0, henon_y0)?,
        })
    }

    /// Parses the five-line key file: mu, logistic_x0, henon_a, henon_x0,
    /// henon_y0, one decimal literal per line.
    pub fn from_key_file(text: &str) -> Result<Self, ChaosError> {
        let mut vals = [0f64; 5];
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        for (i, slot) in vals.iter_mut().enumerate() {
            let line = lines
                .next()
                .ok_or_else(|| ChaosError::InvalidKeyFile(format!("missing line {}", i + 1)))?;
            *slot = line.trim().parse::<f64>().map_err(|e| {
                ChaosError::InvalidKeyFile(format!("line {}: {e}: {line:?}", i + 1))
            })?;
        }
        if lines.next().is_some() {
            return Err(ChaosError::InvalidKeyFile("more than 5 lines".into()));
        }
        Self::from_components(vals[0], vals[1], vals[2], vals[3], vals[4])
    }

    /// Serializes to the five-line key file format. Rust's shortest-roundtrip
    /// float formatting guarantees the parse recovers identical bits.
    pub fn to_key_file(&self) -> String {
        let mut out = String::new();
        for v in [
            self.logistic.mu,
            self.logistic.x0,
            self.henon.a,
            self.henon.x0,
            self.henon.y0,
        ] {
            writeln!(out, "{v}").unwrap();
        }
        out
    }
}

/// Stateful logistic-map iterator. Construction runs the burn-in.
#[derive(Debug, Clone)]
pub struct LogisticGen {
    mu: f64,
    x: f64,
    steps: u64,
}

impl LogisticGen {
    pub fn new(params: &LogisticParams) -> Result<Self, ChaosError> {
        let mut gen = Self { mu: params.mu, x: params.x0, steps: 0 };
        for _ in 0..params.burn_in {
            gen.next_value()?;
        }
        Ok(gen)
    }

    /// Advances one step and returns the new state in (0, 1).
    pub fn next_value(&mut self) -> Result<f64, ChaosError> {
        self.x = self.mu * self.x * (1.0 - self.x);
        self.steps += 1;
        if self.x <= 0.0 || self.x >= 1.0 {
            return Err(ChaosError::DegenerateOrbit(self.steps));
        }
        Ok(self.x)
    }

    pub fn take_sequence(&mut self, n: usize) -> Result<ChaosSequence, ChaosError> {
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(self.next_value()?);
        }
        Ok(ChaosSequence::new(values))
    }
}

/// Stateful Henon-map iterator yielding x-coordinates. Construction runs the
/// burn-in with the tighter attractor bound; generation rejects |x| >= 10.
#[derive(Debug, Clone)]
pub struct HenonGen {
    a: f64,
    b: f64,
    x: f64,
    y: f64,
    steps: u64,
}

impl HenonGen {
    pub fn new(params: &HenonParams) -> Result<Self, ChaosError> {
        let mut gen = Self { a: params.a, b: params.b, x: params.x0, y: params.y0, steps: 0 };
        for _ in 0..params.burn_in {
            gen.step()?;
            if gen.x.abs() >= 2.0 || gen.y.abs() >= 1.0 {
                return Err(ChaosError::DivergentOrbit(gen.steps));
            }
        }
        Ok(gen)
    }

    fn step(&mut self) -> Result<f64, ChaosError> {
        let x_next = 1.0 - self.a * self.x * self.x + self.y;
        self.y = self.b * self.x;
        self.x = x_next;
        self.steps += 1;
        if self.x.abs() >= 10.0 {
            return Err(ChaosError::DivergentOrbit(self.steps));
        }
        Ok(self.x)
    }

    pub fn next_value(&mut self) -> Result<f64, ChaosError> {
        self.step()
    }

    pub fn take_sequence(&mut self, n: usize) -> Result<ChaosSequence, ChaosError> {
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(self.next_value()?);
        }
        Ok(ChaosSequence::new(values))
    }

    /// Draws `n_bits` keystream bits, one per map iteration.
    pub fn take_bits(&mut self, n_bits: usize) -> Result<Vec<u8>, ChaosError> {
        let mut bits = Vec::with_capacity(n_bits);
        for _ in 0..n_bits {
            bits.push(bit_from_value(self.next_value()?));
        }
        Ok(bits)
    }
}

/// A materialized run of chaotic values with a consumption cursor.
#[derive(Debug, Clone)]
pub struct ChaosSequence {
    values: Vec<f64>,
    cursor: usize,
}

impl ChaosSequence {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, cursor: 0 }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn remaining(&self) -> usize {
        self.values.len() - self.cursor
    }

    /// Consumes the next `k` values.
    pub fn take(&mut self, k: usize) -> Result<&[f64], ChaosError> {
        if self.remaining() < k {
            return Err(ChaosError::InsufficientSequence {
                needed: k,
                remaining: self.remaining(),
            });
        }
        let start = self.cursor;
        self.cursor += k;
        Ok(&self.values[start..self.cursor])
    }
}

/// The `n` logistic values following the burn-in, each in (0, 1).
pub fn logistic_sequence(params: &LogisticParams, n: usize) -> Result<ChaosSequence, ChaosError> {
    LogisticGen::new(params)?.take_sequence(n)
}

/// The `n` Henon x-coordinates following the burn-in.
pub fn henon_sequence(params: &HenonParams, n: usize) -> Result<ChaosSequence, ChaosError> {
    HenonGen::new(params)?.take_sequence(n)
}

/// Consumes `k` values and returns the argsort permutation `pi` with
/// `seq[pi[0]] <= seq[pi[1]] <= ...`. Ties keep index order (stable sort),
/// so the result is always a bijection on `0..k`.
pub fn derive_permutation(seq: &mut ChaosSequence, k: usize) -> Result<Vec<usize>, ChaosError> {
    let vals = seq.take(k)?;
    let mut perm: Vec<usize> = (0..k).collect();
    perm.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    Ok(perm)
}

/// One keystream bit per chaotic value: the parity of `floor(|x| * 1e6)`.
/// Quantizes the real to a single balanced bit; the raw attractor values are
/// not confined to [0, 1], so plain rounding would give a biased 3-symbol
/// stream.
pub fn bit_from_value(x: f64) -> u8 {
    ((x.abs() * 1e6).floor() as u64 & 1) as u8
}

/// Consumes `n_bits` values from the sequence and quantizes each to one bit.
pub fn bits_from_henon(seq: &mut ChaosSequence, n_bits: usize) -> Result<Vec<u8>, ChaosError> {
    let vals = seq.take(n_bits)?;
    Ok(vals.iter().map(|&v| bit_from_value(v)).collect())
}

/// One 11-bit encryption minimal unit. Bit 1 (the first stream bit) flips the
/// coefficient sign; bits 2..=l mask the magnitude bits below the leading
/// category bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ecu(u16);

impl Ecu {
    /// Packs 11 stream bits, first bit ending up in the most significant
    /// position of the 11-bit field.
    pub fn from_bits(bits: &[u8]) -> Self {
        debug_assert_eq!(bits.len(), ECU_BITS);
        let mut raw = 0u16;
        for &b in bits {
            raw = (raw << 1) | u16::from(b & 1);
        }
        Self(raw)
    }

    pub fn from_raw(raw: u16) -> Self {
        debug_assert!(raw < 1 << ECU_BITS);
        Self(raw)
    }

    pub fn raw(self) -> u16 {
        self.0
    }

    /// The first `k` bits as an integer (first bit most significant).
    pub fn prefix(self, k: usize) -> u16 {
        debug_assert!(k >= 1 && k <= ECU_BITS);
        self.0 >> (ECU_BITS - k)
    }

    /// Bit 1 of the unit, used for the sign flip.
    pub fn sign_bit(self) -> u8 {
        (self.0 >> (ECU_BITS - 1)) as u8 & 1
    }

    /// Bits 2..=l as an (l-1)-bit XOR mask for the magnitude bits below the
    /// leading category bit. Zero for l = 1.
    pub fn magnitude_mask(self, l: u32) -> u32 {
        debug_assert!(l >= 1 && l as usize <= ECU_BITS - 1);
        (u32::from(self.0) >> (ECU_BITS as u32 - l)) & ((1 << (l - 1)) - 1)
    }
}

/// The grouped keystream: one group of 63 ECUs per 8x8 block, one ECU per AC
/// zigzag position.
#[derive(Debug, Clone)]
pub struct EcuStream {
    groups: Vec<[u16; ECUS_PER_GROUP]>,
}

impl EcuStream {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// The ECU for (group, index), both zero-based.
    pub fn ecu(&self, group: usize, index: usize) -> Option<Ecu> {
        self.groups.get(group).map(|g| Ecu(g[index]))
    }

    pub fn group(&self, group: usize) -> Option<&[u16; ECUS_PER_GROUP]> {
        self.groups.get(group)
    }
}

/// Slices a bitstream into 11-bit ECUs grouped 63 per block. The caller
/// supplies a whole number of groups.
pub fn make_ecus(bits: &[u8]) -> EcuStream {
    assert_eq!(
        bits.len() % GROUP_BITS,
        0,
        "bit count {} is not a multiple of {GROUP_BITS}",
        bits.len()
    );
    let groups = bits
        .chunks_exact(GROUP_BITS)
        .map(|group_bits| {
            let mut group = [0u16; ECUS_PER_GROUP];
            for (slot, ecu_bits) in group.iter_mut().zip(group_bits.chunks_exact(ECU_BITS)) {
                *slot = Ecu::from_bits(ecu_bits).raw();
            }
            group
        })
        .collect();
    EcuStream { groups }
}
