use std::collections::HashMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{canonical_sign, ortho_structure, RaySet};
use crate::context::alignment::{sample_actual_triad, sample_direction, AlignmentDistribution};
use crate::context::valuation::{splitmix64, ValuationStrategy, ValuationSummary};
use crate::error::{Error, Result};
use crate::matrix::{operator_norm, Ket};
use crate::measure::{illegal_element, index_bits, is_legal_combination, JointScheme};
use crate::spin1::{orthonormality_defect, Triad, UnitVector3};
use crate::tolerance;

const TRIAL_STREAM: u64 = 0x7472_6961_6c73;
const DIRECTION_STREAM: u64 = 0x6469_7265_6374;

/// Seed for item `index` of a named stream derived from `base`.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(stream)).wrapping_add(index))
}

fn direction_key(n: UnitVector3) -> u64 {
    canonical_sign(n).to_array().iter().fold(DIRECTION_STREAM, |h, c| splitmix64(h ^ c.to_bits()))
}

/// Monte Carlo estimate of a probability with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub p: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_counts(hits: usize, samples: usize) -> Self {
        let p = hits as f64 / samples as f64;
        Estimate { p, std_error: (p * (1.0 - p) / samples as f64).sqrt(), samples }
    }
}

/// `p(n)`: probability that the valuation of the actual direction of an
/// analyzer aimed at `n` is 1.
///
/// The sample stream is derived from the distribution seed and the ray
/// through `n`, so repeated calls for the same ray share one estimate.
pub fn estimate_p(f: &ValuationStrategy, n: UnitVector3, d: &AlignmentDistribution, samples: usize) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(d.seed, direction_key(n), 0));
    let hits = (0..samples).filter(|_| f.evaluate(sample_direction(n, d, &mut rng)) == 1).count();
    Ok(Estimate::from_counts(hits, samples))
}

/// Induced valuation `f̃(n) = 1` iff `p(n) ≥ 0.5`.
pub fn induced_value(p: f64) -> u8 {
    u8::from(p >= 0.5)
}

pub fn induced_valuation(
    f: &ValuationStrategy,
    n: UnitVector3,
    d: &AlignmentDistribution,
    samples: usize,
) -> Result<(u8, Estimate)> {
    let e = estimate_p(f, n, d, samples)?;
    Ok((induced_value(e.p), e))
}

/// Probability that three independent bits with `P(bit_r = 1) = q_r` form
/// an illegal combination.
pub fn hidden_illegal_probability(q: [f64; 3]) -> f64 {
    (0..8)
        .map(index_bits)
        .filter(|bits| !is_legal_combination(*bits))
        .map(|bits| (0..3).map(|r| if bits[r] == 1 { q[r] } else { 1.0 - q[r] }).product::<f64>())
        .sum()
}

/// Probability that the actual value agrees with the induced value `v`.
pub fn match_probability(q: f64, v: u8) -> f64 {
    if v == 1 {
        q
    } else {
        1.0 - q
    }
}

/// A triad whose induced values form an illegal combination.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IllegalTriad {
    /// Ray indices of the axes; `None` for an axis added to complete an
    /// orthogonal pair.
    pub rays: [Option<usize>; 3],
    pub labels: [String; 3],
    pub triad: Triad,
    pub values: [u8; 3],
    pub estimates: [Estimate; 3],
}

impl IllegalTriad {
    pub fn combination(&self) -> String {
        self.values.iter().map(|v| char::from(b'0' + v)).collect()
    }
}

/// Scans the complete orthogonal triads of `rays` in order and returns the
/// first one whose induced values are illegal. If none is, orthogonal pairs
/// induced `(0, 0)` are completed to a triad by their cross product, which is
/// illegal whatever the third value. `None` means the induced valuation is a
/// legal colouring of the set.
pub fn find_illegal_triad(
    f: &ValuationStrategy,
    d: &AlignmentDistribution,
    rays: &RaySet,
    samples: usize,
) -> Result<Option<IllegalTriad>> {
    let os = ortho_structure(rays, tolerance::ORTHOGONAL);
    let mut cache: HashMap<usize, Estimate> = HashMap::new();
    let mut estimate = |i: usize| -> Result<Estimate> {
        if let Some(e) = cache.get(&i) {
            return Ok(*e);
        }
        let e = estimate_p(f, rays.ray(i), d, samples)?;
        cache.insert(i, e);
        Ok(e)
    };
    for t in &os.triads {
        let estimates = [estimate(t[0])?, estimate(t[1])?, estimate(t[2])?];
        let values = estimates.map(|e| induced_value(e.p));
        if !is_legal_combination(values) {
            let [a, b, c] = t.map(|i| rays.ray(i));
            return Ok(Some(IllegalTriad {
                rays: t.map(Some),
                labels: t.map(|i| rays.label(i).to_string()),
                triad: Triad::oriented(a, b, c),
                values,
                estimates,
            }));
        }
    }
    for &(i, j) in &os.pairs {
        let (ei, ej) = (estimate(i)?, estimate(j)?);
        if induced_value(ei.p) == 0 && induced_value(ej.p) == 0 {
            let c = rays.ray(i).cross(rays.ray(j));
            let third = UnitVector3::normalize(c[0], c[1], c[2])?;
            let ek = estimate_p(f, third, d, samples)?;
            let estimates = [ei, ej, ek];
            return Ok(Some(IllegalTriad {
                rays: [Some(i), Some(j), None],
                labels: [rays.label(i).to_string(), rays.label(j).to_string(), format!("{i}×{j}")],
                triad: Triad::oriented(rays.ray(i), rays.ray(j), third),
                values: estimates.map(|e| induced_value(e.p)),
                estimates,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub trials: usize,
    /// Samples per axis for the `p(e_r)` estimates.
    pub samples: usize,
    pub scheme: JointScheme,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { trials: 10_000, samples: 20_000, scheme: JointScheme::Sequential }
    }
}

/// One trial: a sampled actual triad, the valuation of its axes, and the
/// quantum illegal-outcome mass for the state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    /// Angle between each actual axis and its target, radians.
    pub dev1: f64,
    pub dev2: f64,
    pub dev3: f64,
    pub defect: f64,
    pub f1: u8,
    pub f2: u8,
    pub f3: u8,
    pub illegal: u8,
    pub quantum_illegal: f64,
    pub quantum_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub target: [[f64; 3]; 3],
    pub sigma: f64,
    pub mode: &'static str,
    pub scheme: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub samples: usize,
    pub valuation: ValuationSummary,
    /// State amplitudes as `[re, im]`.
    pub state: Vec<[f64; 2]>,
    pub p: [f64; 3],
    pub p_std_error: [f64; 3],
    pub induced: [u8; 3],
    pub induced_combination: String,
    pub induced_illegal: bool,
    pub match_probabilities: [f64; 3],
    pub hidden_illegal_exact: f64,
    pub hidden_illegal_empirical: f64,
    pub hidden_illegal_std_error: f64,
    pub quantum_illegal_mean: f64,
    pub quantum_illegal_max: f64,
    pub quantum_bound_mean: f64,
    pub quantum_bound_max: f64,
    pub gap: f64,
}

impl ExperimentSummary {
    /// Whether every axis value matches its induced value with probability
    /// at least one half.
    pub fn matches_at_least_half(&self) -> bool {
        self.match_probabilities.iter().all(|&m| m >= 0.5)
    }

    /// `|empirical - exact|` in units of the binomial standard error of the
    /// exact value; 0 when both agree exactly.
    pub fn empirical_deviation_in_se(&self) -> f64 {
        let p = self.hidden_illegal_exact;
        let se = (p * (1.0 - p) / self.trials as f64).sqrt();
        let diff = (self.hidden_illegal_empirical - p).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / se
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub summary: ExperimentSummary,
    pub rows: Vec<TrialRow>,
}

impl ExperimentReport {
    pub fn write_rows_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}

/// Hidden-variable versus quantum illegal-combination statistics for
/// analyzers aimed at `target`.
///
/// Each trial draws an actual triad from `d` with its own derived seed,
/// evaluates `f` on the three actual axes, and builds the joint measurement
/// POVM of the actual triad to get `Σ_{α illegal} ⟨ψ|E_α|ψ⟩` and the
/// state-independent bound `‖Σ_{α illegal} E_α‖`. The exact hidden illegal
/// probability enumerates the eight combinations from the per-axis
/// probabilities `q_r = p(e_r)` assuming independence.
pub fn contextuality_experiment(
    target: &Triad,
    f: &ValuationStrategy,
    d: &AlignmentDistribution,
    psi: &Ket,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if psi.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: psi.dim() });
    }
    psi.ensure_normalized()?;

    let estimates = [
        estimate_p(f, target.axis(0), d, cfg.samples)?,
        estimate_p(f, target.axis(1), d, cfg.samples)?,
        estimate_p(f, target.axis(2), d, cfg.samples)?,
    ];
    let q = estimates.map(|e| e.p);
    let induced = q.map(induced_value);

    let rows: Vec<TrialRow> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(trial, target, f, d, psi, cfg.scheme))
        .collect::<Result<_>>()?;

    let n = rows.len() as f64;
    let illegal_count = rows.iter().filter(|r| r.illegal == 1).count();
    let empirical = Estimate::from_counts(illegal_count, rows.len());
    let quantum_illegal_mean = rows.iter().map(|r| r.quantum_illegal).sum::<f64>() / n;
    let quantum_illegal_max = rows.iter().map(|r| r.quantum_illegal).fold(f64::NEG_INFINITY, f64::max);
    let quantum_bound_mean = rows.iter().map(|r| r.quantum_bound).sum::<f64>() / n;
    let quantum_bound_max = rows.iter().map(|r| r.quantum_bound).fold(f64::NEG_INFINITY, f64::max);
    let hidden_exact = hidden_illegal_probability(q);

    let summary = ExperimentSummary {
        target: target.axes().map(|e| e.to_array()),
        sigma: d.sigma,
        mode: d.kind.name(),
        scheme: cfg.scheme.name(),
        seed: d.seed,
        trials: cfg.trials,
        samples: cfg.samples,
        valuation: f.describe(),
        state: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        p: q,
        p_std_error: estimates.map(|e| e.std_error),
        induced,
        induced_combination: induced.iter().map(|v| char::from(b'0' + v)).collect(),
        induced_illegal: !is_legal_combination(induced),
        match_probabilities: [0, 1, 2].map(|r| match_probability(q[r], induced[r])),
        hidden_illegal_exact: hidden_exact,
        hidden_illegal_empirical: empirical.p,
        hidden_illegal_std_error: empirical.std_error,
        quantum_illegal_mean,
        quantum_illegal_max,
        quantum_bound_mean,
        quantum_bound_max,
        gap: hidden_exact - quantum_illegal_mean,
    };
    Ok(ExperimentReport { summary, rows })
}

fn run_trial(
    trial: usize,
    target: &Triad,
    f: &ValuationStrategy,
    d: &AlignmentDistribution,
    psi: &Ket,
    scheme: JointScheme,
) -> Result<TrialRow> {
    let seed = derive_seed(d.seed, TRIAL_STREAM, trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let actual = sample_actual_triad(target, d, &mut rng);
    let values = actual.axes().map(|e| f.evaluate(e));
    let e_illegal = illegal_element(&scheme.model(&actual).povm());
    let dev = [0, 1, 2].map(|r| actual.axis(r).angle_to(target.axis(r)));
    Ok(TrialRow {
        trial,
        seed,
        dev1: dev[0],
        dev2: dev[1],
        dev3: dev[2],
        defect: orthonormality_defect(&actual),
        f1: values[0],
        f2: values[1],
        f3: values[2],
        illegal: u8::from(!is_legal_combination(values)),
        quantum_illegal: e_illegal.expectation(psi),
        quantum_bound: operator_norm(&e_illegal)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::peres_rays;

    fn uniform_state() -> Ket {
        Ket::from_real(&[1.0, 1.0, 1.0]).normalized()
    }

    #[test]
    fn constant_valuations() {
        let d = AlignmentDistribution::independent(0.01, 3).unwrap();
        let n = UnitVector3::normalize(1.0, 2.0, 3.0).unwrap();
        assert_eq!(estimate_p(&ValuationStrategy::Constant(1), n, &d, 500).unwrap().p, 1.0);
        assert_eq!(estimate_p(&ValuationStrategy::Constant(0), n, &d, 500).unwrap().p, 0.0);
        assert_eq!(induced_valuation(&ValuationStrategy::Constant(1), n, &d, 10).unwrap().0, 1);
        assert!(estimate_p(&ValuationStrategy::Constant(1), n, &d, 0).is_err());
    }

    #[test]
    fn hemisphere_estimate_near_one() {
        let d = AlignmentDistribution::independent(0.01, 3).unwrap();
        let n = UnitVector3::normalize(-1.0, 0.5, 0.2).unwrap();
        let e = estimate_p(&ValuationStrategy::Hemisphere { axis: n }, n, &d, 2000).unwrap();
        assert!(e.p >= 0.99);
    }

    #[test]
    fn tie_goes_to_one() {
        assert_eq!(induced_value(0.5), 1);
        assert_eq!(induced_value(0.5 - 1e-12), 0);
    }

    #[test]
    fn point_mass_limit_reproduces_f() {
        let f = ValuationStrategy::default();
        let d = AlignmentDistribution::independent(1e-9, 0).unwrap();
        for r in peres_rays().rays() {
            assert_eq!(induced_valuation(&f, *r, &d, 50).unwrap().0, f.evaluate(*r));
        }
    }

    #[test]
    fn estimates_are_shared_per_ray() {
        let f = ValuationStrategy::EquatorialBand { axis: UnitVector3::Z, half_width: 0.005 };
        let d = AlignmentDistribution::independent(0.01, 8).unwrap();
        let a = estimate_p(&f, UnitVector3::X, &d, 300).unwrap();
        let b = estimate_p(&f, -UnitVector3::X, &d, 300).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn illegal_triad_cases() {
        let d = AlignmentDistribution::independent(0.01, 1).unwrap();
        let peres = peres_rays();
        let found = find_illegal_triad(&ValuationStrategy::Constant(1), &d, &peres, 100).unwrap().unwrap();
        assert_eq!(found.combination(), "111");

        let found = find_illegal_triad(&ValuationStrategy::default(), &d, &peres, 2000).unwrap().unwrap();
        assert!(!is_legal_combination(found.values));

        let canonical = RaySet::from_vectors(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let legal = ValuationStrategy::nearest_ray(canonical.clone(), vec![1, 0, 1]).unwrap();
        let tiny = AlignmentDistribution::independent(1e-6, 1).unwrap();
        assert_eq!(find_illegal_triad(&legal, &tiny, &canonical, 200).unwrap(), None);
    }

    #[test]
    fn every_deterministic_valuation_fails_on_peres() {
        let d = AlignmentDistribution::independent(1e-9, 0).unwrap();
        let peres = peres_rays();
        for seed in 0..20 {
            let f = ValuationStrategy::SeededRandom { seed, cells: 7 };
            assert!(find_illegal_triad(&f, &d, &peres, 20).unwrap().is_some(), "seed {seed}");
        }
        let band = ValuationStrategy::EquatorialBand { axis: UnitVector3::Z, half_width: 0.3 };
        assert!(find_illegal_triad(&band, &d, &peres, 20).unwrap().is_some());
    }

    #[test]
    fn hidden_probability_enumeration() {
        assert!((hidden_illegal_probability([0.5; 3]) - 0.625).abs() <= 1e-15);
        assert_eq!(hidden_illegal_probability([1.0, 1.0, 0.0]), 0.0);
        assert_eq!(hidden_illegal_probability([1.0, 1.0, 1.0]), 1.0);
        // Three axes each matching an all-ones induced triad with probability
        // one half is the worst case.
        let q = 0.6;
        let p = hidden_illegal_probability([q, q, q]);
        assert!(p >= 0.5);
    }

    #[test]
    fn experiment_is_reproducible_and_consistent() {
        let d = AlignmentDistribution::independent(0.01, 7).unwrap();
        let f = ValuationStrategy::default();
        let found = find_illegal_triad(&f, &d, &peres_rays(), 2000).unwrap().unwrap();
        let cfg = ExperimentConfig { trials: 400, samples: 2000, scheme: JointScheme::Sequential };
        let a = contextuality_experiment(&found.triad, &f, &d, &uniform_state(), &cfg).unwrap();
        let b = contextuality_experiment(&found.triad, &f, &d, &uniform_state(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 400);
        let s = &a.summary;
        assert!(s.induced_illegal);
        assert!(s.hidden_illegal_exact >= 0.5);
        assert!(s.quantum_illegal_mean <= 1e-3);
        assert!(s.quantum_illegal_max <= s.quantum_bound_max + 1e-12);
        assert!(s.gap >= 0.4);
        assert!(s.empirical_deviation_in_se() <= 4.0);
    }

    #[test]
    fn correlated_mode_has_no_quantum_illegal_mass() {
        let d = AlignmentDistribution::correlated(0.05, 2).unwrap();
        let f = ValuationStrategy::default();
        let cfg = ExperimentConfig { trials: 200, samples: 200, scheme: JointScheme::Sequential };
        let r = contextuality_experiment(&Triad::canonical(), &f, &d, &uniform_state(), &cfg).unwrap();
        assert!(r.rows.iter().all(|row| row.quantum_bound <= 1e-10 && row.defect <= 1e-12));
    }

    #[test]
    fn rejects_bad_input() {
        let d = AlignmentDistribution::independent(0.01, 7).unwrap();
        let f = ValuationStrategy::Constant(1);
        let cfg = ExperimentConfig { trials: 1, samples: 1, scheme: JointScheme::Sequential };
        let bad = Ket::from_real(&[1.0, 1.0, 0.0]);
        assert!(matches!(
            contextuality_experiment(&Triad::canonical(), &f, &d, &bad, &cfg),
            Err(Error::NotNormalized { .. })
        ));
        let cfg = ExperimentConfig { trials: 0, ..cfg };
        assert!(contextuality_experiment(&Triad::canonical(), &f, &d, &uniform_state(), &cfg).is_err());
    }

    #[test]
    fn rows_csv_roundtrip() {
        let d = AlignmentDistribution::independent(0.02, 5).unwrap();
        let cfg = ExperimentConfig { trials: 20, samples: 50, scheme: JointScheme::Sequential };
        let r = contextuality_experiment(&Triad::canonical(), &ValuationStrategy::default(), &d, &uniform_state(), &cfg)
            .unwrap();
        let mut buf = Vec::new();
        r.write_rows_csv(&mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(&buf[..]);
        let back: Vec<TrialRow> = rd.deserialize().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(back, r.rows);
    }
}
