//! Edge-list generators. Every generator returns canonical undirected edges
//! (`u < v`, sorted, no duplicates, no self-loops) and is a pure function of
//! its parameters and seed.

use rand::seq::index;
use rand::RngExt;

use super::Topology;
use crate::seed::seeded_rng as rng;
use crate::{Error, Result};

pub const DEFAULT_KADEMLIA_BUCKET: usize = 2;

/// `⌈log₂ n⌉` for `n >= 1`.
fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

fn canonical(edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = edges
        .into_iter()
        .filter(|(u, v)| u != v)
        .map(|(u, v)| (u.min(v), u.max(v)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn require_nodes(name: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::input(format!(
            "{name} needs at least {min} nodes, got {n}"
        )));
    }
    Ok(())
}

/// Koorde-style de Bruijn graph: arcs `x → 2x mod n` and `x → 2x+1 mod n`.
pub fn gen_debruijn(n: usize) -> Result<Vec<(usize, usize)>> {
    require_nodes("de Bruijn", n, 2)?;
    Ok(canonical(
        (0..n).flat_map(|x| [(x, (2 * x) % n), (x, (2 * x + 1) % n)]),
    ))
}

/// Chord ring with fingers `i → i + 2^j mod n` for `j = 1..⌈log₂ n⌉-1`.
pub fn gen_chord(n: usize) -> Result<Vec<(usize, usize)>> {
    require_nodes("Chord", n, 2)?;
    let fingers = ceil_log2(n).saturating_sub(1);
    Ok(canonical((0..n).flat_map(|i| {
        std::iter::once((i, (i + 1) % n)).chain((1..=fingers).map(move |j| (i, (i + (1 << j)) % n)))
    })))
}

/// Kademlia routing tables over random `⌈log₂ n⌉+1`-bit identifiers. For
/// every bucket `i`, each node links to up to `bucket_size` nodes drawn
/// uniformly among those at XOR distance in `[2^i, 2^(i+1))`.
pub fn gen_kademlia(n: usize, bucket_size: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    require_nodes("Kademlia", n, 2)?;
    if bucket_size == 0 {
        return Err(Error::input("Kademlia bucket size must be at least 1"));
    }
    let bits = ceil_log2(n) + 1;
    let mut rng = rng(seed);
    let ids: Vec<u64> = index::sample(&mut rng, 1usize << bits, n)
        .into_iter()
        .map(|v| v as u64)
        .collect();

    // Nodes sorted by id, so each bucket is a contiguous id range.
    let mut by_id: Vec<(u64, usize)> = ids.iter().copied().zip(0..).collect();
    by_id.sort_unstable();

    let mut edges = Vec::new();
    for (node, &id) in ids.iter().enumerate() {
        for i in 0..bits {
            let lo = ((id ^ (1 << i)) >> i) << i;
            let hi = lo + (1 << i);
            let start = by_id.partition_point(|&(x, _)| x < lo);
            let end = by_id.partition_point(|&(x, _)| x < hi);
            let candidates = &by_id[start..end];
            if candidates.len() <= bucket_size {
                edges.extend(candidates.iter().map(|&(_, v)| (node, v)));
            } else {
                edges.extend(
                    index::sample(&mut rng, candidates.len(), bucket_size)
                        .into_iter()
                        .map(|k| (node, candidates[k].1)),
                );
            }
        }
    }
    Ok(canonical(edges))
}

/// Ring plus one long-range finger per node whose ring distance `d` is drawn
/// with probability proportional to `1/d` (`2 <= d <= n/2`), direction uniform.
pub fn gen_leet_chord(n: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    require_nodes("LEET-Chord", n, 3)?;
    let mut rng = rng(seed);
    let max_d = n / 2;
    let mut cumulative = Vec::with_capacity(max_d.saturating_sub(1));
    let mut total = 0.0;
    for d in 2..=max_d {
        total += 1.0 / d as f64;
        cumulative.push(total);
    }

    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    if !cumulative.is_empty() {
        for i in 0..n {
            let u: f64 = rng.random::<f64>() * total;
            let k = cumulative
                .partition_point(|&c| c <= u)
                .min(cumulative.len() - 1);
            let d = k + 2;
            let target = if rng.random::<bool>() {
                (i + d) % n
            } else {
                (i + n - d) % n
            };
            edges.push((i, target));
        }
    }
    Ok(canonical(edges))
}

/// Preferential-attachment background graph. Starts from a clique on
/// `links + 1` nodes, `links = ⌊avg_degree/2⌋`; each later node attaches to
/// `links` distinct existing nodes chosen with probability proportional to
/// degree.
pub fn gen_background(n: usize, avg_degree: f64, seed: u64) -> Result<Vec<(usize, usize)>> {
    require_nodes("background", n, 10)?;
    if avg_degree.is_nan() || avg_degree < 2.0 {
        return Err(Error::input(format!(
            "average degree must be >= 2, got {avg_degree}"
        )));
    }
    let links = (avg_degree / 2.0).floor() as usize;
    if links + 1 >= n {
        return Err(Error::input(format!(
            "average degree {avg_degree} too large for {n} nodes"
        )));
    }
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(n * links);
    // Each edge endpoint appears once, so uniform draws are degree-proportional.
    let mut endpoints = Vec::with_capacity(2 * n * links);
    for u in 0..=links {
        for v in u + 1..=links {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut chosen = Vec::with_capacity(links);
    for v in links + 1..n {
        chosen.clear();
        while chosen.len() < links {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Ok(canonical(edges))
}

/// Generates the botnet edge list for `topology` on `n` nodes.
pub fn gen_topology(
    topology: Topology,
    n: usize,
    kademlia_bucket: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>> {
    match topology {
        Topology::DeBruijn => gen_debruijn(n),
        Topology::Chord => gen_chord(n),
        Topology::Kademlia => gen_kademlia(n, kademlia_bucket, seed),
        Topology::LeetChord => gen_leet_chord(n, seed),
        Topology::None => Ok(Vec::new()),
    }
}
