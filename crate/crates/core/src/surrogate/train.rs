use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::adam::{adam_step, AdamConfig, AdamState};
use super::matrix::Matrix;
use super::mlp::MlpModel;
use crate::features::Scaler;
use crate::rng::{mix, rng_from_seed};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub depth: usize,
    pub width: usize,
    pub phase1_epochs: usize,
    pub phase1_batch: usize,
    pub phase2_max_epochs: usize,
    pub phase2_batch: usize,
    /// Phase 2 stops after this many epochs without a new best training loss.
    pub patience: usize,
    pub validation_fraction: f64,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            depth: 5,
            width: 128,
            phase1_epochs: 150,
            phase1_batch: 100,
            phase2_max_epochs: 1000,
            phase2_batch: 300,
            patience: 20,
            validation_fraction: 0.11,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::InvalidConfig("validation fraction must lie in (0, 1)".into()));
        }
        if self.width == 0 || self.phase1_batch == 0 || self.phase2_batch == 0 {
            return Err(Error::InvalidConfig("width and batch sizes must be >= 1".into()));
        }
        if !(self.adam.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning rate must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based, counted across both phases.
    pub epoch: usize,
    pub phase: u8,
    /// Mean mini-batch loss during the epoch.
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub model: MlpModel,
    pub history: Vec<EpochRecord>,
    pub train_rows: Vec<usize>,
    pub val_rows: Vec<usize>,
}

/// Seeded permutation split: the first `round(fraction · n)` shuffled rows
/// (at least one, at most `n − 1`) form the second part, both in ascending
/// order.
pub fn split_rows(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from_seed(seed));
    let k = ((n as f64 * fraction + 0.5) as usize).clamp(1.min(n), n.saturating_sub(1).max(1.min(n)));
    let mut held = idx[..k].to_vec();
    let mut rest = idx[k..].to_vec();
    held.sort_unstable();
    rest.sort_unstable();
    (rest, held)
}

fn run_epoch(
    model: &mut MlpModel,
    x: &Matrix,
    y: &Matrix,
    order: &mut [usize],
    batch: usize,
    state: &mut AdamState,
    cfg: &TrainConfig,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<f64> {
    order.shuffle(rng);
    let batch = batch.min(order.len());
    let mut total = 0.0;
    for chunk in order.chunks(batch) {
        let (loss, grad) = model.loss_and_grad(&x.select_rows(chunk), &y.select_rows(chunk))?;
        total += loss * chunk.len() as f64;
        adam_step(model.params_mut(), &grad, state, &cfg.adam);
    }
    Ok(total / order.len() as f64)
}

/// Two-phase mini-batch training on raw features `x` and labels `y`.
///
/// A seeded fraction of rows is held out for validation; the scaler is fit
/// on the remaining rows. Phase 1 runs a fixed number of epochs, phase 2
/// restarts the optimizer with larger batches and stops early on a training
/// loss plateau.
pub fn train(x: &Matrix, y: &Matrix, cfg: &TrainConfig) -> Result<TrainOutput> {
    cfg.validate()?;
    if x.rows() != y.rows() {
        return Err(Error::DimensionMismatch { expected: x.rows(), got: y.rows() });
    }
    if x.rows() < 10 {
        return Err(Error::InvalidDataset("training needs at least 10 rows".into()));
    }
    if x.data().iter().chain(y.data()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidDataset("training data must be finite".into()));
    }
    let (train_rows, val_rows) = split_rows(x.rows(), cfg.validation_fraction, mix(cfg.seed, 0));
    let rows: Vec<&[f64]> = train_rows.iter().map(|&i| x.row(i)).collect();
    let scaler = Scaler::fit(&rows)?;
    let scale = |m: Matrix| -> Result<Matrix> {
        let mut m = m;
        for i in 0..m.rows() {
            scaler.apply_in_place(m.row_mut(i))?;
        }
        Ok(m)
    };
    let tx = scale(x.select_rows(&train_rows))?;
    let ty = y.select_rows(&train_rows);
    let vx = scale(x.select_rows(&val_rows))?;
    let vy = y.select_rows(&val_rows);

    let mut sizes = vec![x.cols()];
    sizes.extend(core::iter::repeat(cfg.width).take(cfg.depth));
    sizes.push(y.cols());
    let mut model = MlpModel::new(&sizes, mix(cfg.seed, 1))?;
    model.scaler = scaler.clone();
    model.meta.seed = cfg.seed;

    let mut rng = rng_from_seed(mix(cfg.seed, 2));
    let mut order: Vec<usize> = (0..tx.rows()).collect();
    let mut history = Vec::new();
    let mut record = |model: &MlpModel, phase: u8, train_loss: f64| -> Result<()> {
        let epoch = history.len() + 1;
        if !train_loss.is_finite() {
            return Err(Error::Diverged { epoch, loss: train_loss });
        }
        let val_loss = model.loss(&vx, &vy)?;
        history.push(EpochRecord { epoch, phase, train_loss, val_loss });
        Ok(())
    };

    let mut state = AdamState::new(model.params().len());
    for _ in 0..cfg.phase1_epochs {
        let loss = run_epoch(&mut model, &tx, &ty, &mut order, cfg.phase1_batch, &mut state, cfg, &mut rng)?;
        record(&model, 1, loss)?;
    }
    let mut state = AdamState::new(model.params().len());
    let mut best = f64::INFINITY;
    let mut stale = 0;
    for _ in 0..cfg.phase2_max_epochs {
        let loss = run_epoch(&mut model, &tx, &ty, &mut order, cfg.phase2_batch, &mut state, cfg, &mut rng)?;
        record(&model, 2, loss)?;
        if loss < best {
            best = loss;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    model.meta.epochs = history.len();
    Ok(TrainOutput { model, history, train_rows, val_rows })
}
