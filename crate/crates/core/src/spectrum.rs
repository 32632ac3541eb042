//! Momentum analysis: from wavefunctions to diffraction-order populations,
//! plus metrics for comparing spectra from different methods.

use std::collections::BTreeMap;

use rustfft::FftPlanner;
use thiserror::Error;

use crate::analytic::{AnalyticSpectrum, Method};
use crate::grid::GridSpec;
use crate::propagator::Wavefunction;

/// Where a spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Numeric,
    PlainRn,
    ModifiedRn,
}

impl From<Method> for Source {
    fn from(method: Method) -> Self {
        match method {
            Method::PlainRn => Source::PlainRn,
            Method::ModifiedRn => Source::ModifiedRn,
        }
    }
}

/// Probability mass per momentum-grid mode, in transform index order.
#[derive(Debug, Clone)]
pub struct MomentumDistribution {
    pub grid: GridSpec,
    pub mass: Vec<f64>,
    pub total: f64,
}

impl MomentumDistribution {
    pub fn momentum_at(&self, j: usize) -> f64 {
        self.grid.momentum_at(j)
    }
}

/// Transform the state and square it, normalized so the masses sum to the
/// state norm.
pub fn momentum_distribution(psi: &Wavefunction) -> MomentumDistribution {
    let n = psi.grid.n();
    let mut buf = psi.amplitudes.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = psi.grid.dz() / n as f64;
    let mass: Vec<f64> = buf.iter().map(|a| a.norm_sqr() * scale).collect();
    let total = mass.iter().sum();
    MomentumDistribution { grid: psi.grid, mass, total }
}

/// Populations of the diffraction orders `p0 + 2m`, `|m| ≤ m_max`, plus the
/// residual mass outside every order window.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffractionSpectrum {
    pub source: Source,
    pub p0: f64,
    pub populations: BTreeMap<i64, f64>,
    pub off_comb: f64,
}

impl DiffractionSpectrum {
    pub fn population(&self, m: i64) -> f64 {
        self.populations.get(&m).copied().unwrap_or(0.0)
    }

    pub fn m_max(&self) -> i64 {
        self.populations.keys().next_back().copied().unwrap_or(0)
    }

    /// Σ populations + off_comb; equals the analyzed state's norm.
    pub fn total(&self) -> f64 {
        self.populations.values().sum::<f64>() + self.off_comb
    }

    /// Reinterpret a closed-form spectrum for comparison and serialization.
    /// The plain expansion's truncation remainder plays the role of off-comb
    /// mass; the modified expansion has no sum rule, so nothing is folded in.
    pub fn from_analytic(spectrum: &AnalyticSpectrum) -> Self {
        let off_comb = match spectrum.method {
            Method::PlainRn => (1.0 - spectrum.total).max(0.0),
            Method::ModifiedRn => 0.0,
        };
        Self {
            source: spectrum.method.into(),
            p0: spectrum.p0,
            populations: spectrum.populations.clone(),
            off_comb,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error(
        "order window |m| <= {m_max} spans momenta [{low:.1}, {high:.1}], \
         outside the grid range +-{p_max:.1}"
    )]
    WindowExceedsGrid { m_max: usize, low: f64, high: f64, p_max: f64 },
    #[error("cannot compare spectra with different initial momenta ({0} vs {1})")]
    MomentumMismatch(f64, f64),
}

/// Sum the distribution over the windows `(p0 + 2m - 1, p0 + 2m + 1]`.
///
/// The windows tile momentum space completely (half the order spacing on
/// each side), so `Σ populations + off_comb` reproduces the distribution
/// total exactly.
pub fn bin_orders(
    dist: &MomentumDistribution,
    p0: f64,
    m_max: usize,
) -> Result<DiffractionSpectrum, SpectrumError> {
    let p_max = dist.grid.p_max();
    let high = p0 + (2 * m_max + 1) as f64;
    let low = p0 - (2 * m_max + 1) as f64;
    if high > p_max || low < -p_max {
        return Err(SpectrumError::WindowExceedsGrid { m_max, low, high, p_max });
    }
    let mut populations: BTreeMap<i64, f64> =
        (-(m_max as i64)..=m_max as i64).map(|m| (m, 0.0)).collect();
    let mut off_comb = 0.0;
    for (j, mass) in dist.mass.iter().enumerate() {
        let d = (dist.momentum_at(j) - p0) / 2.0;
        let m = (d - 0.5).ceil() as i64;
        match populations.get_mut(&m) {
            Some(p) => *p += mass,
            None => off_comb += mass,
        }
    }
    Ok(DiffractionSpectrum { source: Source::Numeric, p0, populations, off_comb })
}

/// Pointwise difference metrics between two spectra over their common order
/// range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonMetrics {
    pub rms: f64,
    /// Half the L1 distance; coincides with total-variation distance for
    /// normalized spectra.
    pub tvd: f64,
    pub max_abs: f64,
    pub m_range: (i64, i64),
}

pub fn compare(
    a: &DiffractionSpectrum,
    b: &DiffractionSpectrum,
) -> Result<ComparisonMetrics, SpectrumError> {
    if a.p0 != b.p0 {
        return Err(SpectrumError::MomentumMismatch(a.p0, b.p0));
    }
    let m_max = a.m_max().min(b.m_max());
    let mut sum_sq = 0.0;
    let mut sum_abs = 0.0;
    let mut max_abs = 0.0f64;
    for m in -m_max..=m_max {
        let d = a.population(m) - b.population(m);
        sum_sq += d * d;
        sum_abs += d.abs();
        max_abs = max_abs.max(d.abs());
    }
    let count = (2 * m_max + 1) as f64;
    Ok(ComparisonMetrics {
        rms: (sum_sq / count).sqrt(),
        tvd: sum_abs / 2.0,
        max_abs,
        m_range: (-m_max, m_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::raman_nath_spectrum;
    use crate::params::SimParams;
    use crate::propagator::init_wavepacket;
    use approx::assert_abs_diff_eq;

    fn packet_distribution(p0: f64) -> MomentumDistribution {
        let grid = GridSpec::new(16, 64, 5.0).unwrap();
        momentum_distribution(&init_wavepacket(&grid, p0))
    }

    #[test]
    fn packet_density_is_narrow_gaussian() {
        let dist = packet_distribution(3.0);
        assert_abs_diff_eq!(dist.total, 1.0, epsilon = 1e-12);
        let mean: f64 =
            (0..dist.mass.len()).map(|j| dist.momentum_at(j) * dist.mass[j]).sum();
        assert_abs_diff_eq!(mean, 3.0, epsilon = 1e-9);
        let var: f64 = (0..dist.mass.len())
            .map(|j| {
                let d = dist.momentum_at(j) - 3.0;
                d * d * dist.mass[j]
            })
            .sum();
        // rms spread of the density is 1/(σ√2)
        assert_abs_diff_eq!(var.sqrt(), 1.0 / (5.0 * 2.0f64.sqrt()), epsilon = 5e-3);
    }

    #[test]
    fn displaced_packet_has_identical_density() {
        let grid = GridSpec::new(16, 64, 5.0).unwrap();
        let psi = init_wavepacket(&grid, 2.0);
        let mut rolled = psi.clone();
        rolled.amplitudes.rotate_right(37);
        let a = momentum_distribution(&psi);
        let b = momentum_distribution(&rolled);
        let worst = a
            .mass
            .iter()
            .zip(&b.mass)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-13, "worst difference {worst:.3e}");
    }

    #[test]
    fn pure_packet_bins_to_central_order() {
        let spectrum = bin_orders(&packet_distribution(2.0), 2.0, 10).unwrap();
        // a few 1e-12 of tail mass leaks past |p - p0| = 1 into the side teeth
        assert_abs_diff_eq!(spectrum.population(0), 1.0, epsilon = 5e-11);
        assert!(spectrum.off_comb < 1e-12);
        assert_abs_diff_eq!(spectrum.total(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn misaligned_momentum_splits_between_bins() {
        // Packet at p = 1 sits on the edge between the m = 0 and m = 1
        // windows of the p0 = 0 comb. The mass splits between the two; the
        // grid point exactly on the edge belongs to the lower window, so the
        // split is uneven by one sample (~0.35 here).
        let spectrum = bin_orders(&packet_distribution(1.0), 0.0, 10).unwrap();
        assert!((0.3..0.7).contains(&spectrum.population(0)));
        assert!((0.3..0.7).contains(&spectrum.population(1)));
        assert_abs_diff_eq!(
            spectrum.population(0) + spectrum.population(1),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn oversized_window_rejected() {
        let dist = packet_distribution(0.0);
        let err = bin_orders(&dist, 0.0, 40).unwrap_err();
        assert!(matches!(err, SpectrumError::WindowExceedsGrid { .. }));
        assert!(bin_orders(&dist, 100.0, 1).is_err());
    }

    #[test]
    fn mass_is_conserved_by_binning() {
        let dist = packet_distribution(1.0);
        for m_max in [0, 3, 31] {
            let spectrum = bin_orders(&dist, 1.0, m_max).unwrap();
            assert_abs_diff_eq!(spectrum.total(), dist.total, epsilon = 1e-14);
        }
    }

    #[test]
    fn compare_identity_and_symmetry() {
        let params = SimParams::gaussian(3.5, 0.2, 1.0).unwrap();
        let a = DiffractionSpectrum::from_analytic(&raman_nath_spectrum(&params, 50).unwrap());
        let b = bin_orders(&packet_distribution(1.0), 1.0, 10).unwrap();
        let self_metrics = compare(&a, &a).unwrap();
        assert_eq!(self_metrics.rms, 0.0);
        assert_eq!(self_metrics.tvd, 0.0);
        assert_eq!(self_metrics.max_abs, 0.0);
        let ab = compare(&a, &b).unwrap();
        let ba = compare(&b, &a).unwrap();
        assert_eq!(ab.rms, ba.rms);
        assert_eq!(ab.tvd, ba.tvd);
        assert_eq!(ab.max_abs, ba.max_abs);
        assert_eq!(ab.m_range, (-10, 10));
        assert!(ab.tvd <= 1.0);
    }

    #[test]
    fn compare_requires_matching_momentum() {
        let a = bin_orders(&packet_distribution(0.0), 0.0, 5).unwrap();
        let b = bin_orders(&packet_distribution(2.0), 2.0, 5).unwrap();
        assert_eq!(compare(&a, &b), Err(SpectrumError::MomentumMismatch(0.0, 2.0)));
    }
}
