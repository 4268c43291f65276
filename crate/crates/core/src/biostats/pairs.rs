use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcher::{PairList, PairRecord};

fn identity_groups<S: AsRef<str>>(identities: &[S]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = Vec::with_capacity(identities.len());
    for (i, id) in identities.iter().enumerate() {
        let g = *index.entry(id.as_ref()).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
        group_of.push(g);
    }
    (group_of, groups)
}

/// For every print (in input order) draws `per_print` distinct partners with
/// a different identity, uniformly without replacement; when fewer exist all
/// of them are used. `identities[i]` is the identity label of print `i`.
pub fn sample_imposter_pairs<S: AsRef<str>>(identities: &[S], per_print: usize, seed: u64) -> Result<PairList> {
    let (group_of, groups) = identity_groups(identities);
    if groups.len() < 2 {
        return Err(Error::NoNonMatedPartners);
    }
    let n = identities.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for p in 0..n {
        let same = &groups[group_of[p]];
        let available = n - same.len();
        let mut picks: Vec<usize> = if per_print >= available {
            (0..available).collect()
        } else {
            rand::seq::index::sample(&mut rng, available, per_print).into_vec()
        };
        picks.sort_unstable();
        for r in picks {
            // r-th index that is not a mate of p
            let mut q = r;
            for &s in same {
                if s <= q {
                    q += 1;
                } else {
                    break;
                }
            }
            records.push(PairRecord { probe: p as u32, gallery: q as u32 });
        }
    }
    Ok(PairList { records })
}

/// Every unordered pair of prints sharing an identity.
pub fn all_genuine_pairs<S: AsRef<str>>(identities: &[S]) -> PairList {
    let (_, groups) = identity_groups(identities);
    let mut records = Vec::new();
    for g in &groups {
        for (k, &a) in g.iter().enumerate() {
            for &b in &g[k + 1..] {
                records.push(PairRecord { probe: a as u32, gallery: b as u32 });
            }
        }
    }
    PairList { records }
}
