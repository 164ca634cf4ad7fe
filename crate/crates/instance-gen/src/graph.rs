use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// An Erdős–Rényi random graph: each unordered pair is an edge independently
/// with probability `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErGraph {
    pub n: usize,
    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub edges: Vec<(usize, usize)>,
    pub seed: u64,
}

impl ErGraph {
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

/// Samples an Erdős–Rényi graph deterministically from the seed.
pub fn gen_er_graph(n: usize, p: f64, seed: u64) -> ErGraph {
    assert!(n >= 2, "need at least two nodes");
    assert!((0.0..1.0).contains(&p) || p < 1.0 + 1e-12, "p must be in (0,1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    ErGraph { n, edges, seed }
}

/// Splitmix64-style mixing used to derive independent sub-seeds from a master
/// seed. Stable across platforms.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
