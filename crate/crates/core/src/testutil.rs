use std::collections::BTreeMap;

use proptest::prelude::*;

use crate::network::{Network, Reaction};

/// Random valid networks with species renamed in first-appearance order, so
/// printing and re-parsing preserves indices. `reversible` forces every
/// reaction's direction when set.
pub fn arb_network(
    max_species: usize,
    max_reactions: usize,
    reversible: Option<bool>,
) -> impl Strategy<Value = Network> {
    let side = proptest::collection::btree_map(0..max_species, 1u32..4, 0..3);
    proptest::collection::vec((side.clone(), side, any::<bool>()), 1..=max_reactions).prop_filter_map(
        "valid network",
        move |rs| {
            let mut order: Vec<usize> = Vec::new();
            let mut reactions = Vec::new();
            for (l, r, rev) in rs {
                let r: BTreeMap<usize, u32> = r.into_iter().filter(|(k, _)| !l.contains_key(k)).collect();
                if l.is_empty() && r.is_empty() {
                    return None;
                }
                for k in l.keys().chain(r.keys()) {
                    if !order.contains(k) {
                        order.push(*k);
                    }
                }
                reactions.push((l, r, reversible.unwrap_or(rev)));
            }
            let pos = |k: &usize| order.iter().position(|o| o == k).unwrap();
            let reactions = reactions
                .into_iter()
                .map(|(l, r, reversible)| Reaction {
                    left: l.iter().map(|(k, v)| (pos(k), *v)).collect(),
                    right: r.iter().map(|(k, v)| (pos(k), *v)).collect(),
                    reversible,
                })
                .collect();
            let names = (0..order.len()).map(|i| format!("X{i}")).collect();
            Network::new(names, reactions).ok()
        },
    )
}
