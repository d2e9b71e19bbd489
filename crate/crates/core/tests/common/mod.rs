#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use epdm_core::{ChannelKey, ReactionSpec, RuleError, RuleSet, SpecieId};
use proptest::prelude::*;

/// Rule set backed by a table keyed on the sorted token pair. Tokens outside
/// the alphabet are rejected, so the universe is exactly `alphabet`.
#[derive(Debug, Clone)]
pub struct TableRules {
    pub alphabet: Vec<SpecieId>,
    pub table: HashMap<(SpecieId, SpecieId), Vec<ReactionSpec>>,
}

fn sorted_pair(a: &SpecieId, b: &SpecieId) -> (SpecieId, SpecieId) {
    if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) }
}

impl TableRules {
    pub fn new(alphabet: usize) -> Self {
        TableRules { alphabet: (0..alphabet).map(|i| SpecieId::new(format!("S{i}"))).collect(), table: HashMap::new() }
    }

    pub fn add(&mut self, a: &SpecieId, b: &SpecieId, spec: ReactionSpec) {
        self.table.entry(sorted_pair(a, b)).or_default().push(spec);
    }
}

impl RuleSet for TableRules {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        for s in [a, b] {
            if !s.is_void() && !self.alphabet.contains(s) {
                return Err(RuleError::UnknownSpecie(s.to_string()));
            }
        }
        Ok(self.table.get(&sorted_pair(a, b)).cloned().unwrap_or_default())
    }
}

/// Random rules over `S0..S{alphabet-1}`. Every unordered pair (void pairs
/// included) gets up to two reactions with up to two product species.
/// Products may consume or create anything in the alphabet.
pub fn table_rules(alphabet: usize) -> impl Strategy<Value = TableRules> {
    let void = SpecieId::void();
    let ids: Vec<SpecieId> = std::iter::once(void).chain((0..alphabet).map(|i| SpecieId::new(format!("S{i}")))).collect();
    let mut pairs = Vec::new();
    for i in 0..ids.len() {
        for j in i..ids.len() {
            pairs.push((ids[i].clone(), ids[j].clone()));
        }
    }
    let reaction = (0.01f64..2.0, prop::collection::vec((0..alphabet, 1u32..3), 0..3));
    prop::collection::vec(prop::collection::vec(reaction, 0..3), pairs.len()).prop_map(move |per_pair| {
        let mut rules = TableRules::new(alphabet);
        for ((a, b), reactions) in pairs.iter().zip(per_pair) {
            for (rate, products) in reactions {
                let products = products.into_iter().map(|(s, m)| (SpecieId::new(format!("S{s}")), m));
                rules.add(a, b, ReactionSpec::new(rate, products));
            }
        }
        rules
    })
}

/// Sums propensities per channel and drops zeros so two engines can be
/// compared regardless of iteration order.
pub fn positive_channels(channels: impl IntoIterator<Item = (ChannelKey, f64)>) -> BTreeMap<ChannelKey, f64> {
    let mut out: BTreeMap<ChannelKey, f64> = BTreeMap::new();
    for (k, a) in channels {
        *out.entry(k).or_default() += a;
    }
    out.retain(|_, a| *a > 0.0);
    out
}

pub fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs())
}
