//! Fast-gradient perturbations of the embedded sequence.
//!
//! Given `g = ∇ₜ log p(y | t; θ)`, the perturbation is `z = -ε g / ‖g‖₂`
//! with the norm taken over the whole L×d matrix. Embeddings are used as
//! learned, without normalization.

use super::TrainError;
use crate::corpus::Label;
use crate::matrix::Matrix;
use crate::textmodel::{
    backward_into, bce_loss, forward_embedded, Gradients, ModelError, ModelParams, ParamArrays,
};

/// Gradient norms below this have no usable direction.
pub const MIN_GRADIENT_NORM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub wrt_embedded: Matrix,
}

impl Perturbation {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            wrt_embedded: Matrix::zeros(rows, cols),
        }
    }

    pub fn norm(&self) -> f64 {
        self.wrt_embedded.norm()
    }
}

/// `-ε g / ‖g‖₂`, where `g` is the log-likelihood gradient (the negation of
/// `Gradients::wrt_embedded`).
pub fn adversarial_perturbation(g: &Matrix, epsilon: f64) -> Result<Perturbation, TrainError> {
    let norm = g.norm();
    if norm.is_nan() || norm < MIN_GRADIENT_NORM {
        return Err(TrainError::ZeroGradient);
    }
    Ok(Perturbation {
        wrt_embedded: g.scaled(-epsilon / norm),
    })
}

/// Loss and gradients at the perturbed input `lookup(ids) + z`.
///
/// `z` is a constant: gradients flow to the parameters (including the
/// embedding rows of `ids`) but not into the perturbation.
pub fn adversarial_loss(
    params: &ModelParams,
    ids: &[usize],
    label: Label,
    z: &Perturbation,
) -> Result<(f64, Gradients), TrainError> {
    let mut weights = ParamArrays::zeros(params.hyper);
    let (loss, wrt_embedded) = adversarial_loss_into(params, ids, label, z, 1.0, &mut weights)?;
    Ok((
        loss,
        Gradients {
            weights,
            wrt_embedded,
        },
    ))
}

/// Accumulating form of [`adversarial_loss`]: adds `scale` times the
/// parameter gradients into `acc`.
pub fn adversarial_loss_into(
    params: &ModelParams,
    ids: &[usize],
    label: Label,
    z: &Perturbation,
    scale: f64,
    acc: &mut ParamArrays,
) -> Result<(f64, Matrix), TrainError> {
    let mut embedded = params.lookup(ids)?;
    if embedded.shape() != z.wrt_embedded.shape() {
        return Err(ModelError::ShapeMismatch {
            what: "perturbation",
            expected: embedded.shape(),
            found: z.wrt_embedded.shape(),
        }
        .into());
    }
    embedded.add_scaled(&z.wrt_embedded, 1.0);
    let trace = forward_embedded(params, ids, embedded)?;
    let wrt = backward_into(params, &trace, label, scale, acc);
    Ok((bce_loss(trace.prob, label), wrt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textmodel::{backward, forward, ModelHyper};

    #[test]
    fn three_four_five() {
        let g = Matrix::from_rows(&[vec![3.0, 4.0]]);
        let z = adversarial_perturbation(&g, 1.0).unwrap();
        let got = z.wrt_embedded.as_slice();
        assert!((got[0] + 0.6).abs() < 1e-15 && (got[1] + 0.8).abs() < 1e-15);
        assert!((z.norm() - 1.0).abs() < 1e-15);
        let g = Matrix::from_rows(&[vec![5.0, 0.0]]);
        let z = adversarial_perturbation(&g, 0.5).unwrap();
        assert_eq!(z.wrt_embedded.as_slice(), &[-0.5, 0.0]);
    }

    #[test]
    fn zero_gradient_is_rejected() {
        assert!(matches!(
            adversarial_perturbation(&Matrix::zeros(3, 2), 1.0),
            Err(TrainError::ZeroGradient)
        ));
        let tiny = Matrix::from_rows(&[vec![1e-13, 0.0]]);
        assert!(matches!(adversarial_perturbation(&tiny, 1.0), Err(TrainError::ZeroGradient)));
        let nan = Matrix::from_rows(&[vec![f64::NAN, 0.0]]);
        assert!(matches!(adversarial_perturbation(&nan, 1.0), Err(TrainError::ZeroGradient)));
    }

    fn small_model() -> (ModelParams, Vec<usize>) {
        let hyper = ModelHyper {
            vocab_size: 9,
            dim: 4,
            max_len: 5,
        };
        (ModelParams::init(hyper, 21), vec![2, 5, 8, 0, 0])
    }

    #[test]
    fn zero_perturbation_matches_clean_loss() {
        let (params, ids) = small_model();
        let z = Perturbation::zeros(5, 4);
        let (loss, grads) = adversarial_loss(&params, &ids, Label::Informative, &z).unwrap();
        let trace = forward(&params, &ids).unwrap();
        assert_eq!(loss, bce_loss(trace.prob, Label::Informative));
        assert_eq!(grads, backward(&params, &trace, Label::Informative));
    }

    #[test]
    fn perturbation_reaching_half_costs_ln2() {
        // With a zero classifier the perturbed logit is exactly 0.
        let (mut params, ids) = small_model();
        params.weights.classifier.fill(0.0);
        params.weights.bias = 0.0;
        let mut z = Perturbation::zeros(5, 4);
        z.wrt_embedded[(0, 1)] = 0.3;
        let (loss, _) = adversarial_loss(&params, &ids, Label::Informative, &z).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let (params, ids) = small_model();
        let z = Perturbation::zeros(4, 4);
        assert!(adversarial_loss(&params, &ids, Label::Informative, &z).is_err());
    }
}
