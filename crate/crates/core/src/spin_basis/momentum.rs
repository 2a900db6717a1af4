use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{enumerate_orbits, Orbit, SpinConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionClass {
    Unclassified,
    /// The reflected orbit is the orbit itself.
    Invariant,
    /// The reflected orbit is another state of the same basis.
    Paired {
        partner: usize,
    },
}

/// `|a>_k = t^{-1/2} sum_{j<t} e^{2 pi i k j / N} T^j |a>` for an orbit of period `t`.
///
/// With this phase convention `T |a>_k = e^{-2 pi i k / N} |a>_k`.
#[derive(Debug, Clone)]
pub struct MomentumBasisState {
    pub orbit: Orbit,
    pub inversion: InversionClass,
    /// `s` such that the canonical representative of `S a` equals `T^s (S a)`.
    pub reflection_shift: usize,
}

impl MomentumBasisState {
    pub fn representative(&self) -> SpinConfig {
        self.orbit.representative
    }

    pub fn period(&self) -> usize {
        self.orbit.period
    }

    pub fn up_count(&self) -> usize {
        self.orbit.up_count()
    }

    pub fn normalization(&self) -> f64 {
        (self.orbit.period as f64).sqrt().recip()
    }

    pub fn is_invariant(&self) -> bool {
        self.inversion == InversionClass::Invariant
    }
}

/// Ordered basis of one momentum sector; states sorted by `(n, representative)`.
#[derive(Debug, Clone)]
pub struct MomentumBasis {
    sites: usize,
    momentum: usize,
    states: Vec<MomentumBasisState>,
    index: HashMap<u32, usize>,
}

impl MomentumBasis {
    pub fn new(sites: usize, momentum: usize) -> Result<Self> {
        let orbits = enumerate_orbits(sites)?;
        Self::from_orbits(sites, momentum, &orbits)
    }

    /// Build from a precomputed orbit list (shared between momenta).
    pub fn from_orbits(sites: usize, momentum: usize, orbits: &[Orbit]) -> Result<Self> {
        if momentum >= sites {
            return Err(Error::Momentum { momentum, sites });
        }
        let mut states: Vec<_> = orbits
            .iter()
            .filter(|o| (momentum * o.period).is_multiple_of(sites))
            .map(|&orbit| MomentumBasisState {
                orbit,
                inversion: InversionClass::Unclassified,
                reflection_shift: 0,
            })
            .collect();
        states.sort_by_key(|s| (s.up_count(), s.representative().bits()));
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.representative().bits(), i))
            .collect();
        let basis = Self {
            sites,
            momentum,
            states,
            index,
        };
        Ok(classify_inversion(basis))
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn momentum(&self) -> usize {
        self.momentum
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[MomentumBasisState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &MomentumBasisState {
        &self.states[index]
    }

    /// `k = 0` or `k = N/2`: the sector maps onto itself under inversion.
    pub fn is_self_conjugate(&self) -> bool {
        (2 * self.momentum).is_multiple_of(self.sites)
    }

    pub fn index_of(&self, representative: SpinConfig) -> Option<usize> {
        self.index.get(&representative.bits()).copied()
    }

    /// Basis index of the orbit containing `config` and the shift `s` with
    /// `rep = T^s config`; `None` when the orbit is not admissible at this momentum.
    pub fn locate(&self, config: SpinConfig) -> Option<(usize, usize)> {
        let (rep, shift) = config.canonical();
        self.index_of(rep).map(|i| (i, shift))
    }

    /// Phase in `S |a>_k = phase * |partner>_{N-k}`.
    pub fn inversion_phase(&self, index: usize) -> Complex64 {
        let s = self.states[index].reflection_shift;
        let angle = -2.0 * PI * ((self.momentum * s) % self.sites) as f64 / self.sites as f64;
        Complex64::from_polar(1.0, angle)
    }

    /// Index of the inversion image (the state itself when invariant).
    pub fn inversion_partner(&self, index: usize) -> usize {
        match self.states[index].inversion {
            InversionClass::Paired { partner } => partner,
            _ => index,
        }
    }

    pub fn invariant_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_invariant()).count()
    }

    pub fn counts(&self) -> SectorCounts {
        let mut nu_tot = vec![0; self.sites + 1];
        let mut nu_inv = vec![0; self.sites + 1];
        for s in &self.states {
            nu_tot[s.up_count()] += 1;
            if s.is_invariant() {
                nu_inv[s.up_count()] += 1;
            }
        }
        SectorCounts {
            sites: self.sites,
            momentum: self.momentum,
            nu_tot,
            nu_inv,
        }
    }

    pub fn records(&self) -> impl Iterator<Item = BasisRecord> + '_ {
        self.states.iter().map(move |s| BasisRecord {
            repr: s.representative().bits(),
            period: s.period(),
            k: self.momentum,
            n: s.up_count(),
            inv_class: match s.inversion {
                InversionClass::Invariant => "invariant",
                InversionClass::Paired { .. } => "paired",
                InversionClass::Unclassified => "unclassified",
            }
            .to_string(),
            partner_index: match s.inversion {
                InversionClass::Paired { partner } => Some(partner),
                _ => None,
            },
        })
    }

    /// One JSON object per state and line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for record in self.records() {
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Mark every state as invariant or pair it with its reflected partner.
pub fn classify_inversion(mut basis: MomentumBasis) -> MomentumBasis {
    for i in 0..basis.states.len() {
        let rep = basis.states[i].representative();
        let (image, shift) = rep.reflect().canonical();
        let inversion = if image == rep {
            InversionClass::Invariant
        } else {
            let partner = basis
                .index_of(image)
                .expect("reflection preserves the period, so the image is admissible");
            InversionClass::Paired { partner }
        };
        let state = &mut basis.states[i];
        state.inversion = inversion;
        state.reflection_shift = shift;
    }
    basis
}

/// Bases for every momentum `0..N`, sharing one orbit enumeration.
pub fn momentum_bases(sites: usize) -> Result<Vec<MomentumBasis>> {
    let orbits = enumerate_orbits(sites)?;
    (0..sites)
        .map(|k| MomentumBasis::from_orbits(sites, k, &orbits))
        .collect()
}

/// Line format of the basis dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub repr: u32,
    pub period: usize,
    pub k: usize,
    pub n: usize,
    pub inv_class: String,
    pub partner_index: Option<usize>,
}

/// Per-up-count state counts `nu_tot(n)` and `nu_inv(n)` of one sector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorCounts {
    pub sites: usize,
    pub momentum: usize,
    pub nu_tot: Vec<u64>,
    pub nu_inv: Vec<u64>,
}

impl SectorCounts {
    pub fn total(&self) -> u64 {
        self.nu_tot.iter().sum()
    }

    pub fn invariant(&self) -> u64 {
        self.nu_inv.iter().sum()
    }

    /// Uniform invariant fraction `N_inv / N_tot`.
    pub fn delta(&self) -> f64 {
        self.invariant() as f64 / self.total() as f64
    }

    pub fn is_self_conjugate(&self) -> bool {
        (2 * self.momentum).is_multiple_of(self.sites)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_basis::{invariant_counts, sector_dimension};

    #[test]
    fn five_site_invariant_example() {
        let basis = MomentumBasis::new(5, 0).unwrap();
        let c: SpinConfig = "00011".parse().unwrap();
        let (i, _) = basis.locate(c).unwrap();
        assert!(basis.state(i).is_invariant());
        // 00101 reflects to 10100 = T^2 00101, also invariant; 5 sites has no pairs at n=2
        assert_eq!(basis.counts().nu_inv[2], 2);
    }

    #[test]
    fn seventeen_site_invariant_total() {
        let basis = MomentumBasis::new(17, 0).unwrap();
        assert_eq!(basis.dim(), 7712);
        assert_eq!(basis.invariant_count(), 512);
        let counts = basis.counts();
        assert_eq!(counts.nu_inv[4], 28);
        assert!((counts.delta() - 512.0 / 7712.0).abs() < 1e-15);
    }

    #[test]
    fn six_site_invariants_match_brute_force() {
        let basis = MomentumBasis::new(6, 0).unwrap();
        let brute = (0u32..64)
            .map(|b| SpinConfig::new(b, 6).unwrap())
            .filter(|c| c.canonical().0 == *c)
            .filter(|c| {
                let members: Vec<_> = (0..6).map(|j| c.translate(j)).collect();
                members.contains(&c.reflect())
            })
            .count();
        assert_eq!(basis.invariant_count(), brute);
    }

    #[test]
    fn pairing_is_an_involution() {
        for sites in [6, 7, 8, 12] {
            for basis in momentum_bases(sites).unwrap() {
                for i in 0..basis.dim() {
                    if let InversionClass::Paired { partner } = basis.state(i).inversion {
                        assert_ne!(partner, i);
                        assert_eq!(basis.state(partner).inversion, InversionClass::Paired { partner: i });
                        assert_eq!(basis.state(partner).up_count(), basis.state(i).up_count());
                    }
                    assert_ne!(basis.state(i).inversion, InversionClass::Unclassified);
                }
            }
        }
    }

    #[test]
    fn exhaustive_over_momenta() {
        for sites in 2..=12 {
            let bases = momentum_bases(sites).unwrap();
            let total: usize = bases.iter().map(|b| b.dim()).sum();
            assert_eq!(total, 1 << sites);
            for b in &bases {
                assert_eq!(b.dim() as u64, sector_dimension(sites, b.momentum()).unwrap());
                assert_eq!(b.counts().total(), b.dim() as u64);
                assert_eq!(b.counts().invariant(), b.invariant_count() as u64);
            }
        }
    }

    #[test]
    fn odd_ring_invariant_counts_per_up_number() {
        for sites in (3..=15).step_by(2) {
            let counts = MomentumBasis::new(sites, 0).unwrap().counts();
            for n in 0..=sites {
                assert_eq!(counts.nu_inv[n], invariant_counts(sites, n).unwrap().value);
            }
        }
    }

    #[test]
    fn inversion_phase_trivial_at_zero_momentum() {
        let basis = MomentumBasis::new(8, 0).unwrap();
        for i in 0..basis.dim() {
            assert!((basis.inversion_phase(i) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let half = MomentumBasis::new(8, 4).unwrap();
        for i in 0..half.dim() {
            let phase = half.inversion_phase(i);
            assert!(phase.im.abs() < 1e-12 && (phase.re.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn jsonl_dump() {
        let basis = MomentumBasis::new(4, 0).unwrap();
        let mut out = Vec::new();
        basis.write_jsonl(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(
            lines[0],
            r#"{"repr":0,"period":1,"k":0,"n":0,"inv_class":"invariant","partner_index":null}"#
        );
        let parsed: BasisRecord = serde_json::from_str(lines[3]).unwrap();
        assert_eq!(parsed.n, 2);
    }
}
