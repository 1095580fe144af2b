//! Seeded random instances for every utility class.
//!
//! The random source is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`, so a spec always yields the same instance.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{classify, ClassTag};
use crate::error::{Error, Result};
use crate::instance::{Instance, Kind};
use crate::scalar::Scalar;

/// Class parameters. Unset fields fall back to the defaults of [`GenParams::default`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    /// Fixed ratio `b / a` for the common-pair bivalued classes.
    pub p: Option<i64>,
    /// Range of per-agent ratios, and of `p` when it is not fixed.
    pub p_range: RangeInclusive<i64>,
    /// Range of the small magnitude `a`.
    pub a_range: RangeInclusive<i64>,
    /// Number of tiers (weakly lexicographic) or chain length (factored).
    pub tiers: Option<usize>,
    /// Largest magnitude for general additive values.
    pub max_value: i64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            p: None,
            p_range: 2..=5,
            a_range: 1..=1,
            tiers: None,
            max_value: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub class: ClassTag,
    pub kind: Kind,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub params: GenParams,
}

impl GenSpec {
    pub fn new(class: ClassTag, kind: Kind, n: usize, m: usize, seed: u64) -> Self {
        GenSpec {
            class,
            kind,
            n,
            m,
            seed,
            params: GenParams::default(),
        }
    }

    pub fn with_p(mut self, p: i64) -> Self {
        self.params.p = Some(p);
        self
    }

    pub fn with_tiers(mut self, tiers: usize) -> Self {
        self.params.tiers = Some(tiers);
        self
    }

    fn validate(&self) -> Result<()> {
        let infeasible = |msg: String| Err(Error::InfeasibleSpec(msg));
        if self.n == 0 {
            return infeasible("at least one agent is required".into());
        }
        let GenParams {
            p,
            p_range,
            a_range,
            tiers,
            max_value,
        } = &self.params;
        if let Some(p) = p {
            if *p < 2 {
                return infeasible(format!("ratio p = {p} must be at least 2"));
            }
        }
        if p_range.is_empty() || *p_range.start() < 2 {
            return infeasible(format!("ratio range {p_range:?} must be nonempty and start at 2 or more"));
        }
        if a_range.is_empty() || *a_range.start() < 1 {
            return infeasible(format!("range {a_range:?} for the small value must be nonempty and positive"));
        }
        if *max_value < 1 {
            return infeasible(format!("max value {max_value} must be positive"));
        }
        if let Some(k) = tiers {
            if *k == 0 {
                return infeasible("tier count must be positive".into());
            }
            if self.class == ClassTag::WeaklyLexicographic && self.m > 0 && *k > self.m {
                return infeasible(format!("{k} tiers cannot be filled with {} items", self.m));
            }
        }
        Ok(())
    }
}

fn checked(value: Option<i64>) -> Result<i64> {
    value.ok_or(Error::Overflow("generating tier magnitudes"))
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    spec: &'a GenSpec,
}

impl Gen<'_> {
    fn ratio(&mut self) -> i64 {
        self.rng.gen_range(self.spec.params.p_range.clone())
    }

    fn small(&mut self) -> i64 {
        self.rng.gen_range(self.spec.params.a_range.clone())
    }

    fn pick_row(&mut self, a: i64, b: i64) -> Vec<i64> {
        (0..self.spec.m)
            .map(|_| if self.rng.gen_bool(0.5) { a } else { b })
            .collect()
    }

    fn rows(&mut self) -> Result<Vec<Vec<i64>>> {
        let (n, m) = (self.spec.n, self.spec.m);
        let rows = match self.spec.class {
            ClassTag::Binary => (0..n)
                .map(|_| (0..m).map(|_| i64::from(self.rng.gen_bool(0.5))).collect())
                .collect(),
            ClassTag::Bivalued => {
                let a = self.small();
                let b = match self.spec.params.p {
                    Some(p) => a * p,
                    None => a + self.rng.gen_range(1..=a * (self.spec.params.p_range.end() - 1)),
                };
                (0..n).map(|_| self.pick_row(a, b)).collect()
            }
            ClassTag::FactoredBivalued => {
                let a = self.small();
                let p = self.spec.params.p.unwrap_or_else(|| self.ratio());
                (0..n).map(|_| self.pick_row(a, a * p)).collect()
            }
            ClassTag::PersonalizedBivalued => (0..n)
                .map(|_| {
                    let a = self.small();
                    let b = a + self.rng.gen_range(1..=a * (self.spec.params.p_range.end() - 1));
                    self.pick_row(a, b)
                })
                .collect(),
            ClassTag::FactoredPersonalizedBivalued => (0..n)
                .map(|_| {
                    let a = self.small();
                    let p = self.ratio();
                    self.pick_row(a, a * p)
                })
                .collect(),
            ClassTag::Factored => (0..n).map(|_| self.factored_row()).collect::<Result<_>>()?,
            ClassTag::WeaklyLexicographic => (0..n).map(|_| self.wolex_row()).collect::<Result<_>>()?,
            ClassTag::GeneralAdditive => (0..n)
                .map(|_| {
                    (0..m)
                        .map(|_| self.rng.gen_range(1..=self.spec.params.max_value))
                        .collect()
                })
                .collect(),
        };
        Ok(rows)
    }

    fn factored_row(&mut self) -> Result<Vec<i64>> {
        let len = match self.spec.params.tiers {
            Some(k) => k,
            None => self.rng.gen_range(1..=3),
        };
        let mut chain = vec![self.small()];
        for _ in 1..len {
            let step = self.ratio();
            chain.push(checked(chain[chain.len() - 1].checked_mul(step))?);
        }
        Ok((0..self.spec.m)
            .map(|_| *chain.choose(&mut self.rng).expect("chain is nonempty"))
            .collect())
    }

    fn wolex_row(&mut self) -> Result<Vec<i64>> {
        let m = self.spec.m;
        if m == 0 {
            return Ok(Vec::new());
        }
        let k = match self.spec.params.tiers {
            Some(k) => k,
            None => self.rng.gen_range(1..=m.min(4)),
        };
        // one item per tier first so no tier is empty, the rest at random
        let mut items: Vec<usize> = (0..m).collect();
        items.shuffle(&mut self.rng);
        let mut tier_of = vec![0; m];
        for (t, &r) in items.iter().enumerate() {
            tier_of[r] = if t < k { t } else { self.rng.gen_range(0..k) };
        }
        let mut sizes = vec![0i64; k];
        for &t in &tier_of {
            sizes[t] += 1;
        }
        // tier 0 is the bottom tier
        let mut magnitude = vec![0i64; k];
        let mut lower = 0i64;
        for t in 0..k {
            magnitude[t] = checked(lower.checked_add(self.rng.gen_range(1..=3)))?;
            lower = checked(magnitude[t].checked_mul(sizes[t]).and_then(|s| s.checked_add(lower)))?;
        }
        Ok(tier_of.iter().map(|&t| magnitude[t]).collect())
    }
}

/// A random instance of the requested class, reproducible from `spec.seed`.
pub fn generate<S: Scalar>(spec: &GenSpec) -> Result<Instance<S>> {
    spec.validate()?;
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        spec,
    };
    let sign = match spec.kind {
        Kind::Goods => 1,
        Kind::Chores => -1,
    };
    let rows = gen
        .rows()?
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| S::from_i64(sign * v).expect("generated values fit the scalar"))
                .collect()
        })
        .collect();
    let inst = Instance::new(spec.kind, rows)?;
    if !classify(&inst).contains(spec.class) {
        return Err(Error::Invariant(format!(
            "generated instance is not {}",
            spec.class
        )));
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::wolex_tiers;
    use crate::io::instance_to_json;

    #[test]
    fn same_seed_same_instance() {
        let spec = GenSpec::new(ClassTag::Bivalued, Kind::Chores, 3, 6, 1).with_p(2);
        let x: Instance<i64> = generate(&spec).unwrap();
        let y: Instance<i64> = generate(&spec).unwrap();
        assert_eq!(instance_to_json(&x).to_string(), instance_to_json(&y).to_string());
        assert!(x.rows().iter().flatten().all(|&v| v == -1 || v == -2));
    }

    #[test]
    fn every_class_classifies() {
        for class in ClassTag::ALL {
            for kind in [Kind::Goods, Kind::Chores] {
                for seed in 0..20 {
                    let spec = GenSpec::new(class, kind, 3, 7, seed);
                    let inst: Instance<i64> = generate(&spec).unwrap();
                    assert!(classify(&inst).contains(class), "{class} {kind:?} {seed}");
                }
            }
        }
    }

    #[test]
    fn wolex_tiers_dominate_lower_tiers() {
        for seed in 0..50 {
            let spec = GenSpec::new(ClassTag::WeaklyLexicographic, Kind::Goods, 2, 9, seed).with_tiers(4);
            let inst: Instance<i64> = generate(&spec).unwrap();
            for row in inst.rows() {
                let tiers = wolex_tiers(row).unwrap();
                assert_eq!(tiers.len(), 4);
                for (t, tier) in tiers.iter().enumerate() {
                    let below: i64 = tiers[t + 1..]
                        .iter()
                        .map(|u| u.magnitude * u.items.len() as i64)
                        .sum();
                    assert!(tier.magnitude > below);
                }
            }
        }
    }

    #[test]
    fn infeasible_specs() {
        let too_many_tiers = GenSpec::new(ClassTag::WeaklyLexicographic, Kind::Goods, 2, 3, 0).with_tiers(4);
        assert!(matches!(generate::<i64>(&too_many_tiers), Err(Error::InfeasibleSpec(_))));
        let bad_p = GenSpec::new(ClassTag::FactoredBivalued, Kind::Goods, 2, 3, 0).with_p(1);
        assert!(matches!(generate::<i64>(&bad_p), Err(Error::InfeasibleSpec(_))));
        let no_agents = GenSpec::new(ClassTag::Binary, Kind::Goods, 0, 3, 0);
        assert!(matches!(generate::<i64>(&no_agents), Err(Error::InfeasibleSpec(_))));
    }
}
