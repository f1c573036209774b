//! Rank and linear correlation: AP correlation (τ_AP), Kendall's τ, Pearson's r.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Two total orders over the same item set.
///
/// Stores, for each position of the candidate ordering, the position of the
/// same item in the reference ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPair {
    ref_pos: Vec<usize>,
}

impl RankPair {
    pub fn new<T: Eq + Hash>(reference: &[T], candidate: &[T]) -> Result<Self> {
        if reference.len() != candidate.len() {
            return Err(Error::ItemSetMismatch);
        }
        if reference.len() < 2 {
            return Err(Error::TooFewItems(reference.len()));
        }
        let mut pos: HashMap<&T, usize> = HashMap::with_capacity(reference.len());
        for (i, item) in reference.iter().enumerate() {
            if pos.insert(item, i).is_some() {
                return Err(Error::ItemSetMismatch);
            }
        }
        let mut seen = vec![false; reference.len()];
        let mut ref_pos = Vec::with_capacity(candidate.len());
        for item in candidate {
            let p = *pos.get(item).ok_or(Error::ItemSetMismatch)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::ItemSetMismatch);
            }
            ref_pos.push(p);
        }
        Ok(Self { ref_pos })
    }

    pub fn len(&self) -> usize {
        self.ref_pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ref_pos.is_empty()
    }

    /// The same pair with the roles of reference and candidate exchanged.
    pub fn swapped(&self) -> Self {
        let mut inv = vec![0; self.ref_pos.len()];
        for (cand, &r) in self.ref_pos.iter().enumerate() {
            inv[r] = cand;
        }
        Self { ref_pos: inv }
    }

    /// Per candidate position, how many items placed above it in the
    /// candidate are also above it in the reference.
    fn agreements_above(&self) -> Vec<usize> {
        let mut fenwick = Fenwick::new(self.ref_pos.len());
        self.ref_pos
            .iter()
            .map(|&r| {
                let c = fenwick.prefix(r);
                fenwick.add(r);
                c
            })
            .collect()
    }
}

struct Fenwick {
    tree: Vec<usize>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, idx: usize) {
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted indices strictly below `idx`.
    fn prefix(&self, idx: usize) -> usize {
        let mut i = idx;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Which side(s) of a pair τ_AP iterates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauApMode {
    /// Candidate positions are walked, the reference is ground truth.
    #[default]
    Asymmetric,
    /// Mean of both directions.
    Symmetric,
}

/// AP correlation of the candidate ordering against the reference.
///
/// `τ_AP = 2/(N-1) · Σ_{i=2..N} C(i)/(i-1) − 1`, with `C(i)` the number of
/// items above candidate position `i` that the reference also ranks above
/// the item at `i`. Runs in O(N log N).
pub fn tau_ap(pair: &RankPair) -> f64 {
    let n = pair.len();
    let c = pair.agreements_above();
    let sum: f64 = (1..n).map(|i| c[i] as f64 / i as f64).sum();
    2.0 * sum / (n - 1) as f64 - 1.0
}

pub fn tau_ap_with_mode(pair: &RankPair, mode: TauApMode) -> f64 {
    match mode {
        TauApMode::Asymmetric => tau_ap(pair),
        TauApMode::Symmetric => 0.5 * (tau_ap(pair) + tau_ap(&pair.swapped())),
    }
}

/// Kendall's τ-a: concordant minus discordant pairs over all pairs.
pub fn kendall_tau(pair: &RankPair) -> f64 {
    let n = pair.len();
    let concordant: usize = pair.agreements_above().iter().sum();
    let total = n * (n - 1) / 2;
    let discordant = total - concordant;
    (concordant as f64 - discordant as f64) / total as f64
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewItems(xs.len()));
    }
    // Welford-style co-moment update
    let (mut mx, mut my) = (0.0f64, 0.0f64);
    let (mut sxx, mut syy, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
    for (k, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let n = (k + 1) as f64;
        let dx = x - mx;
        let dy = y - my;
        mx += dx / n;
        my += dy / n;
        sxx += dx * (x - mx);
        syy += dy * (y - my);
        sxy += dx * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(reference: &[u32], candidate: &[u32]) -> RankPair {
        RankPair::new(reference, candidate).unwrap()
    }

    #[test]
    fn identity_and_reversal() {
        let r: Vec<u32> = (0..10).collect();
        let rev: Vec<u32> = r.iter().rev().copied().collect();
        assert_eq!(tau_ap(&pair(&r, &r)), 1.0);
        assert_eq!(tau_ap(&pair(&r, &rev)), -1.0);
        assert_eq!(kendall_tau(&pair(&r, &r)), 1.0);
        assert_eq!(kendall_tau(&pair(&r, &rev)), -1.0);
    }

    #[test]
    fn swap_at_top() {
        // reference [A,B,C], candidate [B,A,C]: C(2)=0, C(3)=2
        let r = ["A", "B", "C"];
        let c = ["B", "A", "C"];
        assert_eq!(tau_ap(&RankPair::new(&r, &c).unwrap()), 0.0);
        assert!((kendall_tau(&RankPair::new(&r, &c).unwrap()) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_mode_is_mean_of_directions() {
        let r = [0u32, 1, 2, 3, 4];
        let c = [1u32, 3, 0, 2, 4];
        let p = pair(&r, &c);
        let q = pair(&c, &r);
        assert_eq!(p.swapped(), q);
        let sym = tau_ap_with_mode(&p, TauApMode::Symmetric);
        assert!((sym - 0.5 * (tau_ap(&p) + tau_ap(&q))).abs() < 1e-15);
    }

    #[test]
    fn top_weighted() {
        let r: Vec<u32> = (0..20).collect();
        let mut top = r.clone();
        top.swap(0, 1);
        let mut bottom = r.clone();
        bottom.swap(18, 19);
        assert!(tau_ap(&pair(&r, &top)) < tau_ap(&pair(&r, &bottom)));
        assert_eq!(
            kendall_tau(&pair(&r, &top)),
            kendall_tau(&pair(&r, &bottom))
        );
    }

    #[test]
    fn invalid_pairs() {
        assert!(matches!(
            RankPair::new(&[1], &[1]),
            Err(Error::TooFewItems(1))
        ));
        assert!(matches!(
            RankPair::new(&[1, 2], &[1, 3]),
            Err(Error::ItemSetMismatch)
        ));
        assert!(matches!(
            RankPair::new(&[1, 2], &[1, 1]),
            Err(Error::ItemSetMismatch)
        ));
        assert!(matches!(
            RankPair::new(&[1, 2], &[1, 2, 3]),
            Err(Error::ItemSetMismatch)
        ));
    }

    #[test]
    fn pearson_basics() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        assert!((pearson(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(pearson(&xs, &[1.0; 10]), Err(Error::ZeroVariance)));
        assert!(matches!(
            pearson(&xs, &xs[..3]),
            Err(Error::LengthMismatch(10, 3))
        ));
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(Error::TooFewItems(1))
        ));
    }

    fn kendall_oracle(r: &[usize], c: &[usize]) -> f64 {
        let pos_r: HashMap<usize, usize> = r.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let pos_c: HashMap<usize, usize> = c.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let (mut conc, mut disc) = (0i64, 0i64);
        for a in 0..r.len() {
            for b in a + 1..r.len() {
                let (x, y) = (r[a], r[b]);
                if (pos_c[&x] < pos_c[&y]) == (pos_r[&x] < pos_r[&y]) {
                    conc += 1;
                } else {
                    disc += 1;
                }
            }
        }
        (conc - disc) as f64 / (conc + disc) as f64
    }

    fn two_pass_pearson(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        cov / (vx * vy).sqrt()
    }

    proptest! {
        #[test]
        fn kendall_matches_pair_oracle(perm in (2usize..=50).prop_flat_map(|n| {
            (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })) {
            let (r, c) = perm;
            let p = RankPair::new(&r, &c).unwrap();
            prop_assert_eq!(kendall_tau(&p), kendall_oracle(&r, &c));
            let q = RankPair::new(&c, &r).unwrap();
            prop_assert_eq!(kendall_tau(&p), kendall_tau(&q));
        }

        #[test]
        fn tau_ap_extremes(perm in (2usize..=200).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())) {
            let rev: Vec<usize> = perm.iter().rev().copied().collect();
            prop_assert_eq!(tau_ap(&RankPair::new(&perm, &perm).unwrap()), 1.0);
            prop_assert_eq!(tau_ap(&RankPair::new(&perm, &rev).unwrap()), -1.0);
        }

        #[test]
        fn pearson_matches_two_pass(pts in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 100)) {
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let r = pearson(&xs, &ys).unwrap();
            prop_assert!((r - two_pass_pearson(&xs, &ys)).abs() < 1e-10);
        }
    }
}
