//! Deterministic sampling helpers. All randomness in the crate flows from a
//! single 64-bit seed expanded by the counter-based ChaCha8 stream cipher,
//! so every experiment is reproducible from its seed alone.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::one_body::Point;
use crate::symbasis::PointCloud;

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn uniform_point(rng: &mut ChaCha8Rng, d: usize) -> Point {
    let coords: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    Point::new(coords).expect("uniform sample lies in the domain")
}

pub(crate) fn uniform_cloud(rng: &mut ChaCha8Rng, d: usize, n: usize) -> PointCloud {
    PointCloud::new((0..n).map(|_| uniform_point(rng, d)).collect())
        .expect("nonempty cloud of valid points")
}

pub(crate) fn uniform_clouds(d: usize, n: usize, count: usize, seed: u64) -> Vec<PointCloud> {
    let mut rng = rng_from_seed(seed);
    (0..count).map(|_| uniform_cloud(&mut rng, d, n)).collect()
}
