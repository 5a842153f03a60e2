//! Multilayer perceptron surrogate for the robustness tests.

mod adam;
mod matrix;
mod mlp;
mod train;

use alloc::vec;
use alloc::vec::Vec;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use matrix::Matrix;
pub use mlp::{gradient_check, LabelKind, LayerShape, MlpModel, ModelMeta};
pub use train::{split_rows, train, EpochRecord, TrainConfig, TrainOutput};

use crate::features::FeatureLayout;
use crate::par::map_indexed;
use crate::{Error, Result};

impl MlpModel {
    /// Predictions for a matrix of raw (unscaled) feature rows.
    pub fn predict_batch(&self, features: &Matrix) -> Result<Matrix> {
        let mut x = features.clone();
        for i in 0..x.rows() {
            self.scaler.apply_in_place(x.row_mut(i))?;
        }
        self.forward_batch(&x)
    }
}

/// Test-set accuracy in label units.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Mean absolute error per output.
    pub mae: Vec<f64>,
    /// Standard deviation of the absolute error per output.
    pub error_sd: Vec<f64>,
    /// Mean absolute error over all (row, output) pairs.
    pub overall_mae: f64,
    /// Share of (row, output) pairs with absolute error ≤ 1 and ≤ 5.
    pub within_1: f64,
    pub within_5: f64,
    pub rows: usize,
}

/// Scores predictions against labels.
pub fn score(pred: &Matrix, truth: &Matrix) -> Result<EvalReport> {
    if pred.rows() != truth.rows() || pred.cols() != truth.cols() {
        return Err(Error::DimensionMismatch { expected: truth.data().len(), got: pred.data().len() });
    }
    if truth.rows() == 0 {
        return Err(Error::Empty("test set"));
    }
    let (rows, cols) = (truth.rows(), truth.cols());
    let mut sum = vec![0.0; cols];
    let mut sq = vec![0.0; cols];
    let (mut w1, mut w5) = (0usize, 0usize);
    for r in 0..rows {
        for c in 0..cols {
            let e = libm::fabs(pred.row(r)[c] - truth.row(r)[c]);
            sum[c] += e;
            sq[c] += e * e;
            w1 += usize::from(e <= 1.0);
            w5 += usize::from(e <= 5.0);
        }
    }
    let n = rows as f64;
    let mae: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let error_sd = mae.iter().zip(&sq).map(|(m, s)| libm::sqrt((s / n - m * m).max(0.0))).collect();
    let pairs = (rows * cols) as f64;
    Ok(EvalReport {
        overall_mae: sum.iter().sum::<f64>() / pairs,
        mae,
        error_sd,
        within_1: w1 as f64 / pairs,
        within_5: w5 as f64 / pairs,
        rows,
    })
}

/// Accuracy of `model` on raw test features and labels.
pub fn evaluate(model: &MlpModel, features: &Matrix, labels: &Matrix) -> Result<EvalReport> {
    score(&model.predict_batch(features)?, labels)
}

/// Mean over the input nodes of each feature group of the summed absolute
/// first-layer weights. Inputs that are constant in training carry no
/// information and count as 0. `groups[i]` names the group (1-based) of
/// input `i`.
pub fn importance_by_group(model: &MlpModel, groups: &[usize], group_count: usize) -> Result<Vec<f64>> {
    if groups.len() != model.inputs() {
        return Err(Error::DimensionMismatch { expected: model.inputs(), got: groups.len() });
    }
    let first = model.layers()[0];
    let w = &model.params()[first.weights()];
    let mut total = vec![0.0; group_count];
    let mut count = vec![0usize; group_count];
    for (i, &g) in groups.iter().enumerate() {
        let mass = if model.scaler.std[i] > 0.0 {
            w[i * first.outputs..(i + 1) * first.outputs].iter().map(|v| libm::fabs(*v)).sum()
        } else {
            0.0
        };
        total[g - 1] += mass;
        count[g - 1] += 1;
    }
    Ok(total.iter().zip(&count).map(|(t, &c)| if c > 0 { t / c as f64 } else { 0.0 }).collect())
}

/// Importance of the nine key features.
pub fn feature_importance(model: &MlpModel, layout: &FeatureLayout) -> Result<[f64; 9]> {
    let v = importance_by_group(model, &layout.group_of_indices(), FeatureLayout::GROUPS)?;
    let mut out = [0.0; 9];
    out.copy_from_slice(&v);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationResult {
    /// Removed feature group; `None` for the full model.
    pub removed: Option<usize>,
    pub report: EvalReport,
}

/// Retrains once per entry of `removals` with that feature group's columns
/// dropped and scores each model on the test split. Retrainings are
/// independent and may run in parallel.
pub fn leave_one_out_study(
    train_x: &Matrix,
    train_y: &Matrix,
    test_x: &Matrix,
    test_y: &Matrix,
    layout: &FeatureLayout,
    config: &TrainConfig,
    removals: &[Option<usize>],
) -> Result<Vec<AblationResult>> {
    if train_x.cols() != layout.len() || test_x.cols() != layout.len() {
        return Err(Error::DimensionMismatch { expected: layout.len(), got: train_x.cols() });
    }
    let groups = layout.group_of_indices();
    map_indexed(removals.len(), |k| {
        let removed = removals[k];
        let keep: Vec<usize> = (0..groups.len()).filter(|&i| Some(groups[i]) != removed).collect();
        let out = train(&train_x.select_cols(&keep), train_y, config)?;
        let report = evaluate(&out.model, &test_x.select_cols(&keep), test_y)?;
        Ok(AblationResult { removed, report })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureCaps, Scaler};

    #[test]
    fn score_examples() {
        let truth = Matrix::from_rows(&[vec![0.0], vec![10.0]]).unwrap();
        let r = score(&truth, &truth).unwrap();
        assert_eq!((r.overall_mae, r.within_1, r.within_5), (0.0, 1.0, 1.0));
        let constant = Matrix::from_rows(&[vec![5.0], vec![5.0]]).unwrap();
        let r = score(&constant, &truth).unwrap();
        assert_eq!(r.mae, vec![5.0]);
        assert_eq!(r.error_sd, vec![0.0]);
        assert_eq!((r.within_1, r.within_5), (0.0, 1.0));
    }

    #[test]
    fn importance_of_equal_and_constant_inputs() {
        let layout = FeatureLayout::new(
            1,
            1,
            FeatureCaps { traveltime_max: 1, transfers_max: 0, turnaround_max: 1 },
        );
        assert_eq!(layout.len(), 9);
        let mut m = MlpModel::new(&[9, 3, 4], 0).unwrap();
        let w = m.layers()[0].weights();
        m.params_mut()[w].iter_mut().for_each(|v| *v = -0.5);
        m.scaler = Scaler::identity(9);
        assert_eq!(feature_importance(&m, &layout).unwrap(), [1.5; 9]);
        m.scaler.std[layout.range(8).start] = 0.0;
        assert_eq!(feature_importance(&m, &layout).unwrap()[7], 0.0);
    }
}
