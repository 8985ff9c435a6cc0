use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded train/test partition. The test part holds `round(n * fraction)`
/// items; both parts keep the input order.
pub fn train_test_split<T: Clone>(items: &[T], test_fraction: f64, seed: u64) -> (Vec<T>, Vec<T>) {
    let fraction = test_fraction.clamp(0.0, 1.0);
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = (items.len() as f64 * fraction).round() as usize;
    let mut is_test = vec![false; items.len()];
    for &i in &order[..n_test] {
        is_test[i] = true;
    }
    let mut train = Vec::with_capacity(items.len() - n_test);
    let mut test = Vec::with_capacity(n_test);
    for (item, &t) in items.iter().zip(&is_test) {
        if t {
            test.push(item.clone());
        } else {
            train.push(item.clone());
        }
    }
    (train, test)
}
