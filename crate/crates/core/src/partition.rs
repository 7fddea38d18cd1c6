//! Determine-and-partition: the units with maximal facet participation,
//! grouped by the exact set of facets they span.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::facets::FacetSet;

/// DMU index → ids of the facets it spans. Units spanning no facet are absent.
pub type MembershipMap = BTreeMap<usize, BTreeSet<usize>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobustGroup {
    /// G_p: the shared facet ids.
    pub facets: Vec<usize>,
    /// S*_p: DMU indices, ascending.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobustPartition {
    pub membership: MembershipMap,
    pub maxcount: usize,
    /// S*, ascending.
    pub robust: Vec<usize>,
    /// Ordered by their facet-id lists.
    pub groups: Vec<RobustGroup>,
    /// Facet-spanning units below maxcount, with their counts.
    pub below_max: Vec<(usize, usize)>,
}

impl RobustPartition {
    pub fn count(&self, dmu: usize) -> usize {
        self.membership.get(&dmu).map_or(0, BTreeSet::len)
    }

    /// Number of groups H.
    pub fn h(&self) -> usize {
        self.groups.len()
    }
}

pub fn membership_map(facets: &FacetSet) -> MembershipMap {
    let mut map = MembershipMap::new();
    for f in facets.iter() {
        for &d in &f.members {
            map.entry(d).or_default().insert(f.id);
        }
    }
    map
}

pub fn partition_robust(facets: &FacetSet) -> Result<RobustPartition> {
    if facets.is_empty() {
        return Err(Error::NoFacets);
    }
    let membership = membership_map(facets);
    let maxcount = membership.values().map(BTreeSet::len).max().unwrap_or(0);
    let robust: Vec<usize> = membership
        .iter()
        .filter(|(_, k)| k.len() == maxcount)
        .map(|(&d, _)| d)
        .collect();
    let below_max = membership
        .iter()
        .filter(|(_, k)| k.len() < maxcount)
        .map(|(&d, k)| (d, k.len()))
        .collect();

    let mut by_key: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for &d in &robust {
        let key: Vec<usize> = membership[&d].iter().copied().collect();
        by_key.entry(key).or_default().push(d);
    }
    let groups = by_key
        .into_iter()
        .map(|(facets, members)| RobustGroup { facets, members })
        .collect();

    Ok(RobustPartition {
        membership,
        maxcount,
        robust,
        groups,
        below_max,
    })
}
