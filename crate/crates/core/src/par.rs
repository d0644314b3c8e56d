//! Sample-grid evaluation, data-parallel when the `parallel` feature is on.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How per-sample work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// `n` equally spaced points covering `[lo, hi]`, endpoints included.
pub fn sample_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Applies `f` to every sample; output order always matches input order.
pub fn map_samples<T, F>(samples: &[f64], exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => samples.par_iter().map(|&s| f(s)).collect(),
        _ => samples.iter().map(|&s| f(s)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_endpoints() {
        let g = sample_grid(-2.0, 2.0, 5);
        assert_eq!(g, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(sample_grid(0.0, 1.0, 1), vec![0.0]);
        assert!(sample_grid(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn both_paths_agree() {
        let g = sample_grid(0.0, 3.0, 1000);
        let a = map_samples(&g, Execution::Sequential, |s| s.sinh());
        let b = map_samples(&g, Execution::Parallel, |s| s.sinh());
        assert_eq!(a, b);
    }
}
