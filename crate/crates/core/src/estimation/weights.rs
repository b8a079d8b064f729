use crate::choice::ChoiceObservation;
use crate::error::{Error, Result};
use crate::ranking::{check_same_n, Ranking};

/// Pairwise evidence `w[i][j]` that item `i` is preferred to item `j`.
///
/// The central-ranking MLE minimizes `Σ_{i ≻ j} w[j][i]`, the total weight of
/// evidence the ranking contradicts.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            w: vec![0.0; n * n],
        }
    }

    /// Builds from rows; the diagonal must be zero and entries finite and non-negative.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut out = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            check_same_n(n, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Precondition(format!(
                        "weight w[{i}][{j}] = {v} is not a finite non-negative number"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::Precondition(format!("non-zero diagonal at {i}")));
                }
                out.w[i * n + j] = v;
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert_ne!(i, j);
        self.w[i * self.n + j] += v;
    }

    /// `Σ_{(i, j): i ≻_π j} w[j][i]`.
    pub fn objective(&self, pi: &Ranking) -> f64 {
        let order = pi.order();
        let mut total = 0.0;
        for (a, &i) in order.iter().enumerate() {
            for &j in &order[a + 1..] {
                total += self.get(j, i);
            }
        }
        total
    }

    pub fn merge(&mut self, other: &WeightMatrix) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.w.iter_mut().zip(&other.w) {
            *a += b;
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.w.chunks(self.n.max(1)).map(<[f64]>::to_vec).take(self.n).collect()
    }
}

/// `w_ij = #{t : {i, j} ⊆ S_t, x_t = i}` for single-choice data.
pub fn accumulate_weights_k1(n: usize, data: &[ChoiceObservation]) -> Result<WeightMatrix> {
    if let Some(obs) = data.iter().find(|o| o.k() != 1) {
        return Err(Error::Precondition(format!(
            "observation with k = {} given to the single-choice accumulator",
            obs.k()
        )));
    }
    let mut w = WeightMatrix::zeros(n);
    for obs in data {
        check_same_n(n, obs.n())?;
        let x = obs.response().items()[0];
        for &j in obs.display().items() {
            if j != x {
                w.add(x, j, 1.0);
            }
        }
    }
    Ok(w)
}

/// Weights for ranked responses: each adjacent listed pair `(x_h, x_{h+1})`
/// adds `|S| - h` to `w[x_h][x_{h+1}]`, and the last listed item gains 1
/// over every unlisted member of the display.
pub fn accumulate_weights_topk(n: usize, data: &[ChoiceObservation]) -> Result<WeightMatrix> {
    accumulate_weights_weighted(n, data, None)
}

/// [`accumulate_weights_topk`] with a per-observation multiplier.
pub fn accumulate_weights_weighted(
    n: usize,
    data: &[ChoiceObservation],
    multipliers: Option<&[f64]>,
) -> Result<WeightMatrix> {
    if let Some(m) = multipliers {
        check_same_n(data.len(), m.len())?;
    }
    let mut w = WeightMatrix::zeros(n);
    let mut listed = vec![false; n];
    for (t, obs) in data.iter().enumerate() {
        check_same_n(n, obs.n())?;
        let c = multipliers.map_or(1.0, |m| m[t]);
        if c == 0.0 {
            continue;
        }
        let items = obs.response().items();
        let size = obs.display().len();
        for (h, pair) in items.windows(2).enumerate() {
            w.add(pair[0], pair[1], c * (size - h - 1) as f64);
        }
        for &x in items {
            listed[x] = true;
        }
        let last = items[items.len() - 1];
        for &j in obs.display().items() {
            if !listed[j] {
                w.add(last, j, c);
            }
        }
        for &x in items {
            listed[x] = false;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{DisplaySet, TopKList};

    #[test]
    fn empty_data_gives_zeros() {
        let w = accumulate_weights_k1(4, &[]).unwrap();
        assert_eq!(w, WeightMatrix::zeros(4));
    }

    #[test]
    fn single_choice_counts() {
        let s = DisplaySet::from_one_indexed(&[1, 2, 3], 4).unwrap();
        let obs = ChoiceObservation::single(s, 0).unwrap();
        let w = accumulate_weights_k1(4, &[obs.clone()]).unwrap();
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(0, 2), 1.0);
        let total: f64 = w.rows().iter().flatten().sum();
        assert_eq!(total, 2.0);
        assert_eq!(accumulate_weights_topk(4, &[obs]).unwrap(), w);
    }

    #[test]
    fn ranked_example() {
        let s = DisplaySet::from_one_indexed(&[1, 2, 3, 4, 5], 6).unwrap();
        let pi = TopKList::from_one_indexed(&[3, 1, 2], 6).unwrap();
        let w = accumulate_weights_topk(6, &[ChoiceObservation::new(s, pi).unwrap()]).unwrap();
        let mut expected = vec![vec![0.0; 6]; 6];
        expected[2][0] = 4.0;
        expected[0][1] = 3.0;
        expected[1][3] = 1.0;
        expected[1][4] = 1.0;
        assert_eq!(w.rows(), expected);
    }

    #[test]
    fn rejects_ranked_data_in_k1_accumulator() {
        let obs = ChoiceObservation::new(
            DisplaySet::full(3),
            TopKList::new(vec![0, 1], 3).unwrap(),
        )
        .unwrap();
        assert!(accumulate_weights_k1(3, &[obs]).is_err());
    }

    #[test]
    fn from_rows_validates() {
        assert!(WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_ok());
        assert!(WeightMatrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(WeightMatrix::from_rows(&[vec![0.0, -1.0], vec![2.0, 0.0]]).is_err());
        assert!(WeightMatrix::from_rows(&[vec![0.0, 1.0]]).is_err());
    }
}
