//! Gauss-Legendre rules on arbitrary intervals and composite panels.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights of a quadrature rule on a fixed interval.
#[derive(Clone, Debug, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    fn extend(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

/// `n`-point Gauss-Legendre rule mapped to `[a, b]`, nodes ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule {
    let n = NonZeroUsize::new(n).expect("quadrature order must be positive");
    let gl = GaussLegendre::new(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut pairs: Vec<(f64, f64)> = gl
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// `panels` equal-width panels on `[a, b]`, each carrying an `n`-point rule.
pub fn composite(n: usize, a: f64, b: f64, panels: usize) -> Rule {
    let h = (b - a) / panels as f64;
    let mut rule = Rule::default();
    for p in 0..panels {
        let lo = a + h * p as f64;
        let hi = if p + 1 == panels { b } else { lo + h };
        rule.extend(gauss_legendre(n, lo, hi));
    }
    rule
}

/// Union of intervals, sorted and merged where they overlap.
pub fn merge_intervals(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (a, b) in intervals {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        let r = gauss_legendre(5, 0.0, 2.0);
        // degree 9 is exact for 5 nodes
        assert_abs_diff_eq!(r.integrate(|x| x.powi(9)), 2f64.powi(10) / 10.0, epsilon = 1e-11);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn composite_gaussian_integral() {
        let r = composite(15, -8.0, 8.0, 4);
        let v = r.integrate(|x| (-x * x).exp());
        assert_abs_diff_eq!(v, std::f64::consts::PI.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn merge_overlapping() {
        let m = merge_intervals(vec![(2.0, 4.0), (-1.0, 1.0), (0.5, 2.5), (6.0, 7.0)]);
        assert_eq!(m, vec![(-1.0, 4.0), (6.0, 7.0)]);
    }
}
