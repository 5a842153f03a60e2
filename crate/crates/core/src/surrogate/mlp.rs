use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::matrix::{gemm, Matrix};
use crate::features::{FeatureCaps, Scaler};
use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// What the model was trained to predict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelKind {
    #[default]
    Normalized,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelMeta {
    pub dataset_id: String,
    pub caps: FeatureCaps,
    pub seed: u64,
    pub epochs: usize,
    pub labels: LabelKind,
    /// Column maxima the labels were normalized against.
    pub reference: Option<[f64; 4]>,
}

/// Offsets of one dense layer inside the flat parameter vector. Weights are
/// stored `inputs × outputs`, row-major, followed by the biases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerShape {
    pub inputs: usize,
    pub outputs: usize,
    pub offset: usize,
}

impl LayerShape {
    pub fn weights(&self) -> core::ops::Range<usize> {
        self.offset..self.offset + self.inputs * self.outputs
    }

    pub fn biases(&self) -> core::ops::Range<usize> {
        let w = self.weights().end;
        w..w + self.outputs
    }
}

/// Fully connected network with rectifier hidden layers and a linear
/// output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<LayerShape>,
    params: Vec<f64>,
    pub scaler: Scaler,
    pub meta: ModelMeta,
}

fn shapes(sizes: &[usize]) -> Result<Vec<LayerShape>> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::InvalidConfig("need at least two layer sizes, all >= 1".into()));
    }
    let mut offset = 0;
    Ok(sizes
        .windows(2)
        .map(|w| {
            let l = LayerShape { inputs: w[0], outputs: w[1], offset };
            offset += w[0] * w[1] + w[1];
            l
        })
        .collect())
}

impl MlpModel {
    /// He-uniform weights, zero biases, identity scaler.
    pub fn new(sizes: &[usize], seed: u64) -> Result<Self> {
        let layers = shapes(sizes)?;
        let total = layers.last().unwrap().biases().end;
        let mut params = vec![0.0; total];
        let mut rng = rng_from_seed(seed);
        for l in &layers {
            let bound = libm::sqrt(6.0 / l.inputs as f64);
            for p in &mut params[l.weights()] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(MlpModel {
            layers,
            params,
            scaler: Scaler::identity(sizes[0]),
            meta: ModelMeta { seed, ..Default::default() },
        })
    }

    pub fn from_parts(sizes: &[usize], params: Vec<f64>, scaler: Scaler, meta: ModelMeta) -> Result<Self> {
        let layers = shapes(sizes)?;
        let total = layers.last().unwrap().biases().end;
        if params.len() != total {
            return Err(Error::DimensionMismatch { expected: total, got: params.len() });
        }
        if scaler.dim() != sizes[0] {
            return Err(Error::DimensionMismatch { expected: sizes[0], got: scaler.dim() });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidConfig("model parameters must be finite".into()));
        }
        Ok(MlpModel { layers, params, scaler, meta })
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].inputs];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn layers(&self) -> &[LayerShape] {
        &self.layers
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn outputs(&self) -> usize {
        self.layers.last().unwrap().outputs
    }

    /// Activations of every layer for a batch of already scaled inputs;
    /// element 0 is the input itself.
    fn activations(&self, x: &Matrix) -> Result<Vec<Matrix>> {
        if x.cols() != self.inputs() {
            return Err(Error::DimensionMismatch { expected: self.inputs(), got: x.cols() });
        }
        let rows = x.rows();
        let mut acts = vec![x.clone()];
        for (i, l) in self.layers.iter().enumerate() {
            let b = &self.params[l.biases()];
            let mut z = Vec::with_capacity(rows * l.outputs);
            for _ in 0..rows {
                z.extend_from_slice(b);
            }
            gemm(rows, l.inputs, l.outputs, acts[i].data(), false, &self.params[l.weights()], false, 1.0, &mut z);
            if i + 1 < self.layers.len() {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(Matrix::new(rows, l.outputs, z)?);
        }
        Ok(acts)
    }

    /// Outputs for a batch of scaled inputs.
    pub fn forward_batch(&self, x: &Matrix) -> Result<Matrix> {
        Ok(self.activations(x)?.pop().unwrap())
    }

    /// Outputs for one scaled input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = Matrix::new(1, x.len(), x.to_vec())?;
        Ok(self.forward_batch(&m)?.data().to_vec())
    }

    /// Scales raw features with the attached scaler, then runs `forward`.
    pub fn predict(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.forward(&self.scaler.apply(features)?)
    }

    /// Mean squared error over rows and outputs, and its gradient with
    /// respect to the flat parameter vector.
    pub fn loss_and_grad(&self, x: &Matrix, y: &Matrix) -> Result<(f64, Vec<f64>)> {
        if x.rows() == 0 {
            return Err(Error::Empty("batch"));
        }
        if y.rows() != x.rows() || y.cols() != self.outputs() {
            return Err(Error::DimensionMismatch {
                expected: x.rows() * self.outputs(),
                got: y.data().len(),
            });
        }
        let acts = self.activations(x)?;
        let rows = x.rows();
        let scale = 1.0 / (rows * self.outputs()) as f64;
        let mut loss = 0.0;
        let mut delta: Vec<f64> = acts
            .last()
            .unwrap()
            .data()
            .iter()
            .zip(y.data())
            .map(|(p, t)| {
                let e = p - t;
                loss += e * e;
                2.0 * e * scale
            })
            .collect();
        let mut grad = vec![0.0; self.params.len()];
        for (i, l) in self.layers.iter().enumerate().rev() {
            let input = acts[i].data();
            gemm(l.inputs, rows, l.outputs, input, true, &delta, false, 0.0, &mut grad[l.weights()]);
            let gb = &mut grad[l.biases()];
            for d in delta.chunks_exact(l.outputs) {
                gb.iter_mut().zip(d).for_each(|(g, d)| *g += d);
            }
            if i > 0 {
                let mut prev = vec![0.0; rows * l.inputs];
                gemm(rows, l.outputs, l.inputs, &delta, false, &self.params[l.weights()], true, 0.0, &mut prev);
                // rectifier derivative: active units have positive output
                for (p, a) in prev.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
        Ok((loss * scale, grad))
    }

    /// Mean squared error without gradients.
    pub fn loss(&self, x: &Matrix, y: &Matrix) -> Result<f64> {
        let out = self.forward_batch(x)?;
        if out.data().len() != y.data().len() {
            return Err(Error::DimensionMismatch { expected: out.data().len(), got: y.data().len() });
        }
        let sum: f64 = out.data().iter().zip(y.data()).map(|(p, t)| (p - t) * (p - t)).sum();
        Ok(sum / out.data().len().max(1) as f64)
    }
}

/// Central finite-difference check of every parameter: analytic and numeric
/// gradients must agree within `rel` relative or `abs` absolute error.
/// Returns the first offending parameter.
pub fn gradient_check(model: &MlpModel, x: &Matrix, y: &Matrix, h: f64, rel: f64, abs: f64) -> Result<Option<usize>> {
    let (_, grad) = model.loss_and_grad(x, y)?;
    let mut m = model.clone();
    for (i, &g) in grad.iter().enumerate() {
        let p = m.params[i];
        m.params[i] = p + h;
        let up = m.loss(x, y)?;
        m.params[i] = p - h;
        let down = m.loss(x, y)?;
        m.params[i] = p;
        let fd = (up - down) / (2.0 * h);
        let err = libm::fabs(fd - g);
        if err > abs && err > rel * libm::fmax(libm::fabs(fd), libm::fabs(g)) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

    #[test]
    fn zero_weights_output_biases() {
        let mut m = MlpModel::new(&[3, 4, 2], 1).unwrap();
        m.params.iter_mut().for_each(|p| *p = 0.0);
        let out_b = m.layers[1].biases();
        m.params[out_b].copy_from_slice(&[1.5, -2.0]);
        assert_eq!(m.forward(&[1.0, 2.0, 3.0]).unwrap(), vec![1.5, -2.0]);
    }

    #[test]
    fn rectifier_kills_negative_input() {
        let m = MlpModel::from_parts(&[1, 1, 1], vec![1.0, 0.0, 1.0, 0.0], Scaler::identity(1), ModelMeta::default())
            .unwrap();
        assert_eq!(m.forward(&[-3.0]).unwrap(), vec![0.0]);
        assert_eq!(m.forward(&[2.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn hand_evaluated_two_layer_network() {
        // w1 (inputs × outputs) = [[1, 2], [-1, 0.5]], b1 = [0, 1]
        // w2 = [[3], [-2]], b2 = [0.5]
        let params = vec![1.0, 2.0, -1.0, 0.5, 0.0, 1.0, 3.0, -2.0, 0.5];
        let m = MlpModel::from_parts(&[2, 2, 1], params, Scaler::identity(2), ModelMeta::default()).unwrap();
        // x = [1, 2]: h = relu([1 - 2, 2 + 1 + 1]) = [0, 4]; out = -8 + 0.5
        assert_eq!(m.forward(&[1.0, 2.0]).unwrap(), vec![-7.5]);
        assert!(matches!(m.forward(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn single_linear_unit_gradient() {
        let m = MlpModel::from_parts(&[1, 1], vec![2.0, 0.0], Scaler::identity(1), ModelMeta::default()).unwrap();
        let x = Matrix::new(1, 1, vec![1.0]).unwrap();
        let y = Matrix::new(1, 1, vec![0.0]).unwrap();
        let (loss, grad) = m.loss_and_grad(&x, &y).unwrap();
        assert_eq!(loss, 4.0);
        assert_eq!(grad, vec![4.0, 4.0]);
    }

    #[test]
    fn perfect_prediction_has_zero_loss_and_gradient() {
        let m = MlpModel::new(&[3, 5, 2], 3).unwrap();
        let x = Matrix::from_rows(&[vec![0.1, 0.2, 0.3], vec![-1.0, 0.0, 2.0]]).unwrap();
        let y = m.forward_batch(&x).unwrap();
        let (loss, grad) = m.loss_and_grad(&x, &y).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
        assert!(matches!(
            m.loss_and_grad(&Matrix::zeros(0, 3), &Matrix::zeros(0, 2)),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn batch_matches_single_rows() {
        let m = MlpModel::new(&[4, 6, 6, 3], 9).unwrap();
        let rows = [vec![0.5, -1.0, 2.0, 0.0], vec![1.0, 1.0, -1.0, 3.0]];
        let batch = m.forward_batch(&Matrix::from_rows(&rows).unwrap()).unwrap();
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(batch.row(i), m.forward(r).unwrap().as_slice());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gradients_match_finite_differences(
            seed in any::<u64>(),
            depth in 0usize..3,
            width in 1usize..8,
            inputs in 1usize..5,
            outputs in 1usize..4,
            rows in 1usize..5,
        ) {
            let mut sizes = vec![inputs];
            sizes.extend(core::iter::repeat(width).take(depth));
            sizes.push(outputs);
            let mut m = MlpModel::new(&sizes, seed).unwrap();
            let mut rng = rng_from_seed(seed ^ 1);
            for l in m.layers.clone() {
                for b in &mut m.params[l.biases()] {
                    *b = rng.random_range(-0.5..0.5);
                }
            }
            let x: Vec<f64> = (0..rows * inputs).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..rows * outputs).map(|_| rng.random_range(-2.0..2.0)).collect();
            let x = Matrix::new(rows, inputs, x).unwrap();
            let y = Matrix::new(rows, outputs, y).unwrap();
            prop_assert_eq!(gradient_check(&m, &x, &y, 1e-5, 1e-4, 1e-6).unwrap(), None);
        }

        #[test]
        fn piecewise_linear_between_close_points(seed in any::<u64>(), t in 0.0f64..1.0) {
            let m = MlpModel::new(&[3, 6, 6, 2], seed).unwrap();
            let a = [0.3, -0.2, 0.9];
            let b = [0.3 + 1e-7, -0.2, 0.9 - 1e-7];
            let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + t * (y - x)).collect();
            let (fa, fb, fm) = (m.forward(&a).unwrap(), m.forward(&b).unwrap(), m.forward(&mid).unwrap());
            for k in 0..2 {
                prop_assert!((fm[k] - (fa[k] + t * (fb[k] - fa[k]))).abs() < 1e-9);
            }
        }
    }
}
