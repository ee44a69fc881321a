//! Nearest-centroid classification with cross-validation, and a
//! between/within cluster separation ratio.

use gcurkit::DenseMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

/// Per-class centroids and per-feature scales fitted on a subset of rows.
#[derive(Clone, Debug)]
pub struct NearestCentroid {
    centroids: Vec<Vec<f64>>,
    scale: Vec<f64>,
}

impl NearestCentroid {
    /// Fits on rows `train` of `x`. Features are scaled by the pooled
    /// within-class standard deviation; classes absent from `train` never win.
    pub fn fit(x: &DenseMatrix, labels: &[usize], classes: usize, train: &[usize]) -> Self {
        let d = x.cols();
        let mut sums = vec![vec![0.0; d]; classes];
        let mut counts = vec![0usize; classes];
        for &i in train {
            counts[labels[i]] += 1;
            for j in 0..d {
                sums[labels[i]][j] += x[(i, j)];
            }
        }
        let centroids: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .map(|(s, &c)| {
                if c == 0 {
                    vec![f64::NAN; d]
                } else {
                    s.into_iter().map(|v| v / c as f64).collect()
                }
            })
            .collect();
        let present = counts.iter().filter(|&&c| c > 0).count();
        let dof = train.len().saturating_sub(present).max(1) as f64;
        let scale = (0..d)
            .map(|j| {
                let ss: f64 = train
                    .iter()
                    .map(|&i| (x[(i, j)] - centroids[labels[i]][j]).powi(2))
                    .sum();
                let s = (ss / dof).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        NearestCentroid { centroids, scale }
    }

    /// Class of the nearest centroid in scaled coordinates; ties go to the lower class.
    pub fn predict(&self, row: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (c, centroid) in self.centroids.iter().enumerate() {
            if centroid.iter().any(|v| v.is_nan()) {
                continue;
            }
            let dist: f64 = row
                .iter()
                .zip(centroid)
                .zip(&self.scale)
                .map(|((x, m), s)| ((x - m) / s).powi(2))
                .sum();
            if dist < best.0 {
                best = (dist, c);
            }
        }
        best.1
    }
}

/// Fraction of rows misclassified under `folds`-fold cross-validation, with
/// folds cut from a random permutation of the rows.
pub fn cv_error<R: Rng + ?Sized>(x: &DenseMatrix, labels: &[usize], folds: usize, rng: &mut R) -> f64 {
    let n = x.rows();
    assert_eq!(labels.len(), n, "one label per row");
    assert!(folds >= 2 && folds <= n, "need 2 <= folds <= rows");
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut wrong = 0usize;
    for f in 0..folds {
        let (lo, hi) = (f * n / folds, (f + 1) * n / folds);
        let test = &order[lo..hi];
        let train: Vec<usize> = order[..lo].iter().chain(&order[hi..]).copied().collect();
        let model = NearestCentroid::fit(x, labels, classes, &train);
        wrong += test.iter().filter(|&&i| model.predict(&x.row(i)) != labels[i]).count();
    }
    wrong as f64 / n as f64
}

/// Mean distance between class centroids over mean distance of points to
/// their own centroid.
pub fn separation(x: &DenseMatrix, labels: &[usize]) -> f64 {
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let all: Vec<usize> = (0..x.rows()).collect();
    let centroids = NearestCentroid::fit(x, labels, classes, &all).centroids;
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut between = 0.0;
    let mut pairs = 0usize;
    for a in 0..classes {
        for b in a + 1..classes {
            between += dist(&centroids[a], &centroids[b]);
            pairs += 1;
        }
    }
    let within = all.iter().map(|&i| dist(&x.row(i), &centroids[labels[i]])).sum::<f64>() / x.rows() as f64;
    (between / pairs.max(1) as f64) / within
}

#[cfg(test)]
mod tests {
    use super::*;
    use gcurkit::synth::{gaussian, stream_rng};

    fn clusters(offset: f64) -> (DenseMatrix, Vec<usize>) {
        let mut rng = stream_rng(1, 0);
        let mut x = gaussian(80, 2, &mut rng);
        let labels: Vec<usize> = (0..80).map(|i| i / 20).collect();
        for (i, &g) in labels.iter().enumerate() {
            x[(i, 0)] += offset * (g % 2) as f64;
            x[(i, 1)] += offset * (g / 2) as f64;
        }
        (x, labels)
    }

    #[test]
    fn separated_clusters_are_learned() {
        let (x, labels) = clusters(20.0);
        assert_eq!(cv_error(&x, &labels, 10, &mut stream_rng(2, 0)), 0.0);
        assert!(separation(&x, &labels) > 10.0);
    }

    #[test]
    fn overlapping_clusters_are_near_chance() {
        let (x, labels) = clusters(0.0);
        let e = cv_error(&x, &labels, 10, &mut stream_rng(2, 0));
        assert!(e > 0.5, "{e}");
        assert!(separation(&x, &labels) < 0.5);
    }

    #[test]
    fn scaling_ignores_feature_units() {
        let (x, labels) = clusters(3.0);
        let stretched = x.scale_cols(&[1e4, 1e-4]);
        let a = cv_error(&x, &labels, 10, &mut stream_rng(5, 0));
        let b = cv_error(&stretched, &labels, 10, &mut stream_rng(5, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn one_point_per_class() {
        let x = DenseMatrix::from_rows(&[[0.0], [10.0]]).unwrap();
        let m = NearestCentroid::fit(&x, &[0, 1], 2, &[0, 1]);
        assert_eq!(m.predict(&[1.0]), 0);
        assert_eq!(m.predict(&[9.0]), 1);
    }
}
