//! Random and named problem instances.
//!
//! Random instances follow an LTE-like grid: `n_rb` resource blocks per
//! sub-frame, `n_sf` sub-frames per frame and `n_frames` frames, so
//! `T = n_frames * n_sf`. Interference is Erdős–Rényi with the given edge
//! density; each BS splits `⌊load_fraction * N_RB * T⌋` RBs among the MVNOs
//! by a uniformly random composition.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RsepError};
use crate::model::{Allocation, Instance};
use crate::reduction::plan_aggregation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub m: usize,
    pub b: usize,
    #[serde(default = "default_n_rb")]
    pub n_rb: usize,
    #[serde(default = "default_n_sf")]
    pub n_sf: usize,
    #[serde(default = "default_n_frames")]
    pub n_frames: usize,
    #[serde(default = "default_density")]
    pub adjacency_density: f64,
    #[serde(default = "default_load")]
    pub load_fraction: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub force_aggregable_k: Option<usize>,
}

fn default_n_rb() -> usize {
    6
}
fn default_n_sf() -> usize {
    10
}
fn default_n_frames() -> usize {
    1
}
fn default_density() -> f64 {
    0.5
}
fn default_load() -> f64 {
    1.0
}

impl ScenarioSpec {
    pub fn new(m: usize, b: usize) -> Self {
        ScenarioSpec {
            m,
            b,
            n_rb: default_n_rb(),
            n_sf: default_n_sf(),
            n_frames: default_n_frames(),
            adjacency_density: default_density(),
            load_fraction: default_load(),
            seed: 0,
            force_aggregable_k: None,
        }
    }

    pub fn num_slots(&self) -> usize {
        self.n_frames * self.n_sf
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(RsepError::InvalidParameter(msg.to_string()));
        if self.m == 0 || self.b == 0 || self.n_rb == 0 || self.n_sf == 0 || self.n_frames == 0 {
            return bad("m, b, n_rb, n_sf and n_frames must be positive");
        }
        if !(0.0..=1.0).contains(&self.adjacency_density) {
            return bad("adjacency_density must lie in [0, 1]");
        }
        if !(self.load_fraction > 0.0 && self.load_fraction <= 1.0) {
            return bad("load_fraction must lie in (0, 1]");
        }
        if let Some(k) = self.force_aggregable_k {
            if k == 0 {
                return bad("force_aggregable_k must be positive");
            }
            if !self.num_slots().is_multiple_of(k) && !self.n_rb.is_multiple_of(k) {
                return Err(RsepError::InvalidParameter(format!(
                    "force_aggregable_k = {k} divides neither T = {} nor N_RB = {}",
                    self.num_slots(),
                    self.n_rb
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Deterministic in `spec` (including its seed).
pub fn generate(spec: &ScenarioSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let nb = spec.b;
    let mut adjacency = vec![vec![0u8; nb]; nb];
    for b in 0..nb {
        for c in b + 1..nb {
            if rng.random_bool(spec.adjacency_density) {
                adjacency[b][c] = 1;
                adjacency[c][b] = 1;
            }
        }
    }
    let z = spec.n_rb * spec.num_slots();
    let per_bs = (spec.load_fraction * z as f64).floor() as u64;
    let mut profile = vec![vec![0u64; nb]; spec.m];
    for b in 0..nb {
        for (m, part) in random_composition(&mut rng, per_bs, spec.m).into_iter().enumerate() {
            profile[m][b] = match spec.force_aggregable_k {
                Some(k) => part - part % k as u64,
                None => part,
            };
        }
    }
    Instance::new(spec.m, nb, spec.n_rb, spec.num_slots(), adjacency, profile)
}

/// Uniform weak composition of `total` into `parts` non-negative integers
/// (stars and bars).
fn random_composition(rng: &mut ChaCha8Rng, total: u64, parts: usize) -> Vec<u64> {
    if parts == 1 {
        return vec![total];
    }
    let slots = total as usize + parts - 1;
    let mut bars: Vec<usize> = sample(rng, slots, parts - 1).into_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0usize;
    for &bar in &bars {
        out.push((bar - prev) as u64);
        prev = bar + 1;
    }
    out.push((slots - prev) as u64);
    out
}

pub const SCENARIO_NAMES: [&str; 2] = ["fig1", "appendix_shape"];

/// Named instances: `fig1` (two interfering BSs, a 4×4 grid, three MVNOs
/// with quotas 4/8/4 on both) and `appendix_shape` (four mutually
/// interfering BSs, five MVNOs, a 2×4 grid, seeded quotas whose GCD is 2).
pub fn fixed_scenario(name: &str) -> Result<Instance> {
    match name {
        "fig1" => Instance::new(
            3,
            2,
            4,
            4,
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![4, 4], vec![8, 8], vec![4, 4]],
        ),
        "appendix_shape" => {
            let mut spec = ScenarioSpec {
                m: 5,
                b: 4,
                n_rb: 2,
                n_sf: 4,
                n_frames: 1,
                adjacency_density: 1.0,
                load_fraction: 1.0,
                seed: 2019,
                force_aggregable_k: Some(2),
            };
            loop {
                let inst = generate(&spec)?;
                if plan_aggregation(&inst).is_some_and(|p| p.k == 2) {
                    return Ok(inst);
                }
                spec.seed += 1;
            }
        }
        other => Err(RsepError::UnknownScenario(other.to_string())),
    }
}

/// The `fig1` allocation where both BSs fill RBs in the same MVNO order:
/// every RB is linked.
pub fn fig1_aligned() -> Allocation {
    let row: Vec<Option<usize>> = [0usize; 4]
        .into_iter()
        .chain([1; 8])
        .chain([2; 4])
        .map(Some)
        .collect();
    Allocation::from_rows(&[row.clone(), row]).expect("rectangular")
}

/// A `fig1` allocation whose BSs disagree on 12 of the 16 RBs.
pub fn fig1_misaligned() -> Allocation {
    let first: Vec<Option<usize>> = [0usize; 4].into_iter().chain([1; 8]).chain([2; 4]).map(Some).collect();
    let second: Vec<Option<usize>> = [2usize; 4].into_iter().chain([0; 4]).chain([1; 8]).map(Some).collect();
    Allocation::from_rows(&[first, second]).expect("rectangular")
}
