//! 176-bit hashed fingerprints: circular (ECFP, FCFP) and linear paths.

mod circular;
mod classes;
mod path;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::FingerprintError;
use crate::graph::MolGraph;

pub use circular::{ecfp_identifiers, fcfp_identifiers};
pub use classes::{feature_classes, FEATURE_CLASS_NAMES};
pub use path::path_identifiers;

pub const FP_BITS: usize = 176;
const WORDS: usize = FP_BITS.div_ceil(64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FingerprintKind {
    Ecfp,
    Fcfp,
    Path,
}

impl FingerprintKind {
    pub const ALL: [FingerprintKind; 3] = [FingerprintKind::Ecfp, FingerprintKind::Fcfp, FingerprintKind::Path];

    pub fn name(self) -> &'static str {
        match self {
            FingerprintKind::Ecfp => "ECFP",
            FingerprintKind::Fcfp => "FCFP",
            FingerprintKind::Path => "PATH",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }

    /// Allowed radius (circular) or maximum path length (PATH).
    pub fn param_range(self) -> (u8, u8) {
        match self {
            FingerprintKind::Ecfp => (0, 4),
            FingerprintKind::Fcfp => (0, 6),
            FingerprintKind::Path => (1, 7),
        }
    }

    /// Parameter used when the caller does not pick one.
    pub fn default_param(self) -> u8 {
        match self {
            FingerprintKind::Ecfp => 2,
            FingerprintKind::Fcfp => 3,
            FingerprintKind::Path => 7,
        }
    }
}

/// Folded bit vector together with the settings that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    kind: FingerprintKind,
    param: u8,
    words: [u64; WORDS],
}

impl Fingerprint {
    pub fn empty(kind: FingerprintKind, param: u8) -> Self {
        Fingerprint { kind, param, words: [0; WORDS] }
    }

    /// Sets bit `id mod 176` for every identifier.
    pub fn fold(kind: FingerprintKind, param: u8, ids: &BTreeSet<u64>) -> Self {
        let mut fp = Self::empty(kind, param);
        for &id in ids {
            fp.set((id % FP_BITS as u64) as usize);
        }
        fp
    }

    pub fn kind(&self) -> FingerprintKind {
        self.kind
    }

    pub fn param(&self) -> u8 {
        self.param
    }

    pub fn set(&mut self, bit: usize) {
        assert!(bit < FP_BITS);
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        bit < FP_BITS && self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..FP_BITS).map(|i| self.get(i)).collect()
    }

    /// 44 hex digits; byte `k` holds bits `8k..8k+8`, lowest bit first.
    pub fn to_hex(&self) -> String {
        let mut bytes = [0u8; FP_BITS / 8];
        for i in (0..FP_BITS).filter(|&i| self.get(i)) {
            bytes[i / 8] |= 1 << (i % 8);
        }
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(kind: FingerprintKind, param: u8, hex: &str) -> Result<Self, FingerprintError> {
        let bad = || FingerprintError::BadHex(hex.to_string());
        if hex.len() != FP_BITS / 4 || !hex.is_ascii() {
            return Err(bad());
        }
        let mut fp = Self::empty(kind, param);
        for k in 0..FP_BITS / 8 {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16).map_err(|_| bad())?;
            for j in 0..8 {
                if byte >> j & 1 == 1 {
                    fp.set(8 * k + j);
                }
            }
        }
        Ok(fp)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind.name(), self.param)
    }
}

fn check_param(kind: FingerprintKind, param: u8) -> Result<(), FingerprintError> {
    let (lo, hi) = kind.param_range();
    if (lo..=hi).contains(&param) {
        Ok(())
    } else {
        Err(FingerprintError::BadParameter(param as usize))
    }
}

/// Identifier set before folding.
pub fn identifiers(g: &MolGraph, kind: FingerprintKind, param: u8) -> Result<BTreeSet<u64>, FingerprintError> {
    check_param(kind, param)?;
    Ok(match kind {
        FingerprintKind::Ecfp => ecfp_identifiers(g, param),
        FingerprintKind::Fcfp => fcfp_identifiers(g, param),
        FingerprintKind::Path => path_identifiers(g, param),
    })
}

pub fn fingerprint(g: &MolGraph, kind: FingerprintKind, param: u8) -> Result<Fingerprint, FingerprintError> {
    Ok(Fingerprint::fold(kind, param, &identifiers(g, kind, param)?))
}

pub fn ecfp(g: &MolGraph, radius: u8) -> Result<Fingerprint, FingerprintError> {
    fingerprint(g, FingerprintKind::Ecfp, radius)
}

pub fn fcfp(g: &MolGraph, radius: u8) -> Result<Fingerprint, FingerprintError> {
    fingerprint(g, FingerprintKind::Fcfp, radius)
}

pub fn path_fp(g: &MolGraph, max_len: u8) -> Result<Fingerprint, FingerprintError> {
    fingerprint(g, FingerprintKind::Path, max_len)
}

/// |a ∧ b| / |a ∨ b|, and 1 when both are empty.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.kind != b.kind || a.param != b.param {
        return Err(FingerprintError::KindMismatch(a.label(), b.label()));
    }
    let (mut both, mut either) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        both += (x & y).count_ones();
        either += (x | y).count_ones();
    }
    Ok(if either == 0 { 1.0 } else { both as f64 / either as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_smiles;

    fn fp_from_bits(bits: &[usize]) -> Fingerprint {
        let mut f = Fingerprint::empty(FingerprintKind::Ecfp, 2);
        bits.iter().for_each(|&b| f.set(b));
        f
    }

    #[test]
    fn tanimoto_toy_vectors() {
        // 1100 vs 1010
        let t = tanimoto(&fp_from_bits(&[0, 1]), &fp_from_bits(&[0, 2])).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(tanimoto(&fp_from_bits(&[3]), &fp_from_bits(&[4])).unwrap(), 0.0);
        assert_eq!(tanimoto(&fp_from_bits(&[]), &fp_from_bits(&[])).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_settings_are_rejected() {
        let a = Fingerprint::empty(FingerprintKind::Ecfp, 2);
        let b = Fingerprint::empty(FingerprintKind::Ecfp, 3);
        let c = Fingerprint::empty(FingerprintKind::Path, 2);
        assert!(matches!(tanimoto(&a, &b), Err(FingerprintError::KindMismatch(..))));
        assert!(tanimoto(&a, &c).is_err());
    }

    #[test]
    fn hex_roundtrip_and_layout() {
        let f = fp_from_bits(&[0, 9, 175]);
        let h = f.to_hex();
        assert_eq!(h.len(), 44);
        assert!(h.starts_with("0102"));
        assert!(h.ends_with("80"));
        assert_eq!(Fingerprint::from_hex(FingerprintKind::Ecfp, 2, &h).unwrap(), f);
        assert!(Fingerprint::from_hex(FingerprintKind::Ecfp, 2, "zz").is_err());
    }

    #[test]
    fn parameter_ranges() {
        let g = parse_smiles("CCO").unwrap();
        assert!(ecfp(&g, 4).is_ok());
        assert!(matches!(ecfp(&g, 5), Err(FingerprintError::BadParameter(5))));
        assert!(fcfp(&g, 6).is_ok());
        assert!(fcfp(&g, 7).is_err());
        assert!(path_fp(&g, 0).is_err());
        assert!(path_fp(&g, 8).is_err());
    }

    #[test]
    fn fold_sets_exactly_the_residues() {
        let ids: BTreeSet<u64> = [5, 181, 1000, u64::MAX].into_iter().collect();
        let f = Fingerprint::fold(FingerprintKind::Path, 7, &ids);
        let want: BTreeSet<usize> = ids.iter().map(|&i| (i % 176) as usize).collect();
        let got: BTreeSet<usize> = (0..FP_BITS).filter(|&i| f.get(i)).collect();
        assert_eq!(got, want);
    }
}
