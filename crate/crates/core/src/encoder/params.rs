use ndarray::{Array, Array1, Array2, Dimension};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{EncoderConfig, Scalar};

const INIT_STD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockParams<F> {
    pub query_w: Array2<F>,
    pub query_b: Array1<F>,
    pub key_w: Array2<F>,
    pub key_b: Array1<F>,
    pub value_w: Array2<F>,
    pub value_b: Array1<F>,
    pub out_w: Array2<F>,
    pub out_b: Array1<F>,
    pub ln1_gain: Array1<F>,
    pub ln1_bias: Array1<F>,
    /// `hidden_dim x ff_dim`
    pub ff_in_w: Array2<F>,
    pub ff_in_b: Array1<F>,
    /// `ff_dim x hidden_dim`
    pub ff_out_w: Array2<F>,
    pub ff_out_b: Array1<F>,
    pub ln2_gain: Array1<F>,
    pub ln2_bias: Array1<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameters<F> {
    pub token_embedding: Array2<F>,
    pub position_embedding: Array2<F>,
    pub blocks: Vec<BlockParams<F>>,
    /// `(|K| * hidden_dim) x num_classes`
    pub classifier_w: Array2<F>,
    pub classifier_b: Array1<F>,
}

/// A named, read-only view of one parameter tensor.
pub struct TensorRef<'a, F> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [F],
}

pub struct TensorMut<'a, F> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a mut [F],
}

fn view<F, D: Dimension>(name: String, a: &Array<F, D>) -> TensorRef<'_, F> {
    TensorRef { name, shape: a.shape().to_vec(), data: a.as_slice().expect("standard layout") }
}

fn view_mut<F, D: Dimension>(name: String, a: &mut Array<F, D>) -> TensorMut<'_, F> {
    TensorMut { name, shape: a.shape().to_vec(), data: a.as_slice_mut().expect("standard layout") }
}

macro_rules! block_fields {
    ($m:ident) => {
        $m!(
            query_w, query_b, key_w, key_b, value_w, value_b, out_w, out_b, ln1_gain, ln1_bias, ff_in_w,
            ff_in_b, ff_out_w, ff_out_b, ln2_gain, ln2_bias
        )
    };
}

impl<F: Scalar> BlockParams<F> {
    fn zeros(d: usize, ff: usize) -> Self {
        BlockParams {
            query_w: Array2::zeros((d, d)),
            query_b: Array1::zeros(d),
            key_w: Array2::zeros((d, d)),
            key_b: Array1::zeros(d),
            value_w: Array2::zeros((d, d)),
            value_b: Array1::zeros(d),
            out_w: Array2::zeros((d, d)),
            out_b: Array1::zeros(d),
            ln1_gain: Array1::zeros(d),
            ln1_bias: Array1::zeros(d),
            ff_in_w: Array2::zeros((d, ff)),
            ff_in_b: Array1::zeros(ff),
            ff_out_w: Array2::zeros((ff, d)),
            ff_out_b: Array1::zeros(d),
            ln2_gain: Array1::zeros(d),
            ln2_bias: Array1::zeros(d),
        }
    }
}

impl<F: Scalar> Parameters<F> {
    /// All-zero parameters shaped for `config`; used for gradient buffers.
    pub fn zeros(config: &EncoderConfig) -> Self {
        let d = config.hidden_dim;
        Parameters {
            token_embedding: Array2::zeros((config.vocab_size, d)),
            position_embedding: Array2::zeros((config.max_len, d)),
            blocks: (0..config.num_blocks)
                .map(|_| BlockParams::zeros(d, config.ff_dim()))
                .collect(),
            classifier_w: Array2::zeros((config.classifier_input_dim(), config.num_classes)),
            classifier_b: Array1::zeros(config.num_classes),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.data.fill(F::zero());
        }
        z
    }

    /// Every tensor in a fixed order, with stable names.
    pub fn tensors(&self) -> Vec<TensorRef<'_, F>> {
        let mut out = vec![
            view("embeddings.token".into(), &self.token_embedding),
            view("embeddings.position".into(), &self.position_embedding),
        ];
        for (i, b) in self.blocks.iter().enumerate() {
            macro_rules! push_all {
                ($($f:ident),*) => {
                    $(out.push(view(format!("blocks.{}.{}", i + 1, stringify!($f)), &b.$f));)*
                };
            }
            block_fields!(push_all);
        }
        out.push(view("classifier.weight".into(), &self.classifier_w));
        out.push(view("classifier.bias".into(), &self.classifier_b));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<TensorMut<'_, F>> {
        let mut out = vec![
            view_mut("embeddings.token".into(), &mut self.token_embedding),
            view_mut("embeddings.position".into(), &mut self.position_embedding),
        ];
        for (i, b) in self.blocks.iter_mut().enumerate() {
            macro_rules! push_all {
                ($($f:ident),*) => {
                    $(out.push(view_mut(format!("blocks.{}.{}", i + 1, stringify!($f)), &mut b.$f));)*
                };
            }
            block_fields!(push_all);
        }
        out.push(view_mut("classifier.weight".into(), &mut self.classifier_w));
        out.push(view_mut("classifier.bias".into(), &mut self.classifier_b));
        out
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    /// Converts to another precision.
    pub fn cast<G: Scalar>(&self, config: &EncoderConfig) -> Parameters<G> {
        let mut out = Parameters::<G>::zeros(config);
        for (dst, src) in out.tensors_mut().into_iter().zip(self.tensors()) {
            for (d, s) in dst.data.iter_mut().zip(src.data) {
                *d = G::from_f64(s.as_f64());
            }
        }
        out
    }
}

/// Weights from Normal(0, 0.02), zero biases, unit layer-norm gains.
///
/// Samples are drawn in double precision in a fixed tensor order, so the
/// same seed gives matching parameters in either precision.
pub fn init_parameters<F: Scalar>(config: &EncoderConfig, seed: u64) -> Parameters<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, INIT_STD).expect("valid std");
    let mut params = Parameters::<F>::zeros(config);
    for t in params.tensors_mut() {
        let leaf = t.name.rsplit('.').next().unwrap_or_default();
        let is_weight = t.name.starts_with("embeddings") || leaf.ends_with("_w") || t.name == "classifier.weight";
        if is_weight {
            for v in t.data.iter_mut() {
                *v = F::from_f64(normal.sample(&mut rng));
            }
        } else if leaf.ends_with("_gain") {
            t.data.fill(F::one());
        }
    }
    params
}
