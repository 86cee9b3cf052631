//! Negative-sampling loss and its analytic gradients.
//!
//! With h the mean of the context input vectors, u_t the target's output
//! vector and u_n the sampled negatives' output vectors:
//!
//! ```text
//! loss = -log sigmoid(u_t . h) - sum_n log sigmoid(-u_n . h)
//! ```
//!
//! Both terms are evaluated through a stable softplus so large scores never
//! overflow.

use crate::error::EmbeddingError;

use super::EmbeddingMatrix;

/// Gradients of one negative-sampling update.
///
/// `context_grad` is shared: with the mean composition, every context row
/// receives the same gradient, once per occurrence in the context list.
#[derive(Debug, Clone)]
pub struct NsGradients {
    pub loss: f64,
    pub target_grad: Vec<f64>,
    /// Aligned with the negative indices passed in.
    pub negative_grads: Vec<Vec<f64>>,
    pub context_grad: Vec<f64>,
}

/// log(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Loss and gradients for one (context, target, negatives) instance.
pub fn ns_loss_and_grads(
    context_indices: &[usize],
    target_index: usize,
    negative_indices: &[usize],
    matrices: &EmbeddingMatrix,
) -> Result<NsGradients, EmbeddingError> {
    assert!(!context_indices.is_empty(), "context must be non-empty");
    let n = matrices.rows();
    let v = matrices.dimension();
    let check = |index: usize| {
        if index >= n {
            Err(EmbeddingError::IndexOutOfRange { index, size: n })
        } else {
            Ok(())
        }
    };
    check(target_index)?;
    for &i in context_indices.iter().chain(negative_indices) {
        check(i)?;
    }

    let mut hidden = vec![0.0; v];
    for &c in context_indices {
        for (h, x) in hidden.iter_mut().zip(matrices.input_row(c)) {
            *h += x;
        }
    }
    let inv_count = 1.0 / context_indices.len() as f64;
    for h in &mut hidden {
        *h *= inv_count;
    }

    let dot = |row: &[f64]| -> f64 { row.iter().zip(&hidden).map(|(a, b)| a * b).sum() };

    let mut hidden_grad = vec![0.0; v];
    let target_row = matrices.output_row(target_index);
    let target_score = dot(target_row);
    let mut loss = softplus(-target_score);
    // d loss / d score for the positive term.
    let target_coeff = sigmoid(target_score) - 1.0;
    let target_grad: Vec<f64> = hidden.iter().map(|h| target_coeff * h).collect();
    for (g, u) in hidden_grad.iter_mut().zip(target_row) {
        *g += target_coeff * u;
    }

    let mut negative_grads = Vec::with_capacity(negative_indices.len());
    for &neg in negative_indices {
        let row = matrices.output_row(neg);
        let score = dot(row);
        loss += softplus(score);
        let coeff = sigmoid(score);
        negative_grads.push(hidden.iter().map(|h| coeff * h).collect());
        for (g, u) in hidden_grad.iter_mut().zip(row) {
            *g += coeff * u;
        }
    }

    let context_grad = hidden_grad.iter().map(|g| g * inv_count).collect();

    Ok(NsGradients {
        loss,
        target_grad,
        negative_grads,
        context_grad,
    })
}
