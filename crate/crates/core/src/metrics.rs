//! Agreement between labelings.

use crate::graph::Labeling;

fn choose2(x: u64) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index of two labelings of the same nodes. Invariant under
/// relabeling either side; 1 for identical partitions.
pub fn adjusted_rand_index(a: &Labeling, b: &Labeling) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must cover the same nodes");
    let n = a.len() as u64;
    let (ka, kb) = (a.k(), b.k());
    let mut table = vec![0u64; ka * kb];
    for (x, y) in a.iter().zip(b.iter()) {
        table[x * kb + y] += 1;
    }
    let rows = (0..ka).map(|x| (0..kb).map(|y| table[x * kb + y]).sum::<u64>());
    let cols = (0..kb).map(|y| (0..ka).map(|x| table[x * kb + y]).sum::<u64>());
    let index: f64 = table.iter().map(|&c| choose2(c)).sum();
    let sum_a: f64 = rows.map(choose2).sum();
    let sum_b: f64 = cols.map(choose2).sum();
    let total = choose2(n);
    if total == 0.0 {
        return 1.0;
    }
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_up_to_relabeling() {
        let a = Labeling::new(3, vec![0, 0, 1, 1, 2, 2]).unwrap();
        let b = Labeling::new(3, vec![2, 2, 0, 0, 1, 1]).unwrap();
        assert!((adjusted_rand_index(&a, &b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reference_values() {
        // reference values from scikit-learn's adjusted_rand_score
        let a = Labeling::new(3, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]).unwrap();
        let b = Labeling::new(3, vec![0, 0, 1, 1, 2, 2, 2, 0, 1]).unwrap();
        assert!((adjusted_rand_index(&a, &b) + 1.0 / 27.0).abs() < 1e-15);
        assert!((adjusted_rand_index(&b, &a) + 1.0 / 27.0).abs() < 1e-15);
        let a = Labeling::new(2, vec![0, 0, 1, 1]).unwrap();
        let b = Labeling::new(2, vec![0, 1, 0, 1]).unwrap();
        assert!((adjusted_rand_index(&a, &b) + 0.5).abs() < 1e-15);
    }
}
