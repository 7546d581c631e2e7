use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::model::{validate, NetworkInstance, RawInstance, RawLine, RawNode};

/// Random feeder parameters. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub min_lines: usize,
    pub max_lines: usize,
    pub switch_probability: f64,
    pub repair_time: (u32, u32),
    pub weight: (u32, u32),
    pub crews: Vec<usize>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 1,
            min_lines: 1,
            max_lines: 8,
            switch_probability: 0.4,
            repair_time: (1, 10),
            weight: (1, 10),
            crews: vec![2, 3],
        }
    }
}

impl GenParams {
    pub fn check(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidParams(m.to_string()));
        if self.min_lines == 0 || self.min_lines > self.max_lines {
            return bad("line range must satisfy 1 <= min <= max");
        }
        if !(0.0..=1.0).contains(&self.switch_probability) {
            return bad("switch probability must lie in [0, 1]");
        }
        if self.repair_time.0 > self.repair_time.1 || self.weight.0 > self.weight.1 {
            return bad("empty repair-time or weight range");
        }
        if self.crews.is_empty() || self.crews.contains(&0) {
            return bad("crew counts must be positive");
        }
        Ok(())
    }
}

/// Instance `index` of the family defined by `params`; each index draws from
/// its own ChaCha stream of `params.seed`.
///
/// The tree grows by random-parent attachment: node 1 hangs off the root and
/// node `k ≥ 2` picks a parent uniformly among nodes `1..k`, so the root has a
/// single feeder line. That head line is never a switch; every other line is
/// one with probability `switch_probability`. If every drawn weight is zero
/// the last node gets weight 1 so the instance stays valid.
pub fn generate_indexed(params: &GenParams, index: u64) -> NetworkInstance {
    params.check().expect("generator parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(index);

    let n_lines = rng.gen_range(params.min_lines..=params.max_lines);
    let width = n_lines.to_string().len();
    let node_id = |k: usize| format!("n{k:0width$}");
    let mut nodes = vec![RawNode { id: node_id(0), weight: 0.0 }];
    let mut lines = Vec::with_capacity(n_lines);
    for k in 1..=n_lines {
        let parent = if k == 1 { 0 } else { rng.gen_range(1..k) };
        let is_switch = k > 1 && rng.gen_bool(params.switch_probability);
        let repair_time = rng.gen_range(params.repair_time.0..=params.repair_time.1) as f64;
        let weight = rng.gen_range(params.weight.0..=params.weight.1) as f64;
        nodes.push(RawNode { id: node_id(k), weight });
        lines.push(RawLine {
            id: format!("l{k:0width$}"),
            from: node_id(parent),
            to: node_id(k),
            repair_time,
            is_switch,
        });
    }
    if nodes.iter().all(|n| n.weight == 0.0) {
        nodes.last_mut().expect("at least one line").weight = 1.0;
    }
    let raw = RawInstance { root: node_id(0), crews: params.crews[0], nodes, lines };
    validate(&raw).expect("generated trees are valid by construction")
}

pub fn generate_random(params: &GenParams) -> NetworkInstance {
    generate_indexed(params, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::io::instance_json;
    use crate::model::Problem;

    #[test]
    fn same_seed_same_bytes() {
        let params = GenParams { seed: 1, min_lines: 4, max_lines: 4, ..GenParams::default() };
        let a = instance_json(&generate_random(&params));
        let b = instance_json(&generate_random(&params));
        assert_eq!(a, b);
        assert_eq!(generate_random(&params).num_lines(), 4);
    }

    #[test]
    fn streams_differ() {
        let params = GenParams::default();
        let a: Vec<_> = (0..8).map(|i| instance_json(&generate_indexed(&params, i))).collect();
        assert!(a.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn switch_probability_extremes() {
        for seed in 0..20 {
            let none = GenParams { seed, switch_probability: 0.0, ..GenParams::default() };
            assert_eq!(Problem::new(generate_random(&none)).islands.len(), 1);

            let all = GenParams { seed, switch_probability: 1.0, ..GenParams::default() };
            let p = Problem::new(generate_random(&all));
            assert_eq!(p.islands.len(), p.num_lines());
        }
    }

    #[test]
    fn zero_weight_range_still_valid() {
        let params = GenParams { weight: (0, 0), ..GenParams::default() };
        let inst = generate_random(&params);
        assert!(inst.nodes().iter().any(|n| n.weight > 0.0));
    }

    #[test]
    fn bad_params_rejected() {
        assert!(GenParams { min_lines: 0, ..GenParams::default() }.check().is_err());
        assert!(GenParams { switch_probability: 1.5, ..GenParams::default() }.check().is_err());
        assert!(GenParams { crews: vec![], ..GenParams::default() }.check().is_err());
    }
}
