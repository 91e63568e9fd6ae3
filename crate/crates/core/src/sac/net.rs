use std::hash::{DefaultHasher, Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, SimRng};

/// Multilayer perceptron with ReLU hidden layers and a linear output.
///
/// Parameters live in one flat vector, layer by layer: the weight matrix
/// (fan_in × fan_out, row-major) followed by the bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeedForwardNet {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Activations recorded by a batched forward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    batch: usize,
    /// `layers[0]` is the input; `layers[l]` the post-activation output of layer l.
    layers: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.layers.last().expect("at least the input")
    }

    pub fn batch(&self) -> usize {
        self.batch
    }
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// C ← α·A·B + β·C with explicit strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    beta: f64,
    c: &mut [f64],
    rsc: usize,
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(k == 0 || (m - 1) * rsa + (k - 1) * csa < a.len(), "A out of bounds");
    assert!(k == 0 || (k - 1) * rsb + (n - 1) * csb < b.len(), "B out of bounds");
    assert!((m - 1) * rsc + n - 1 < c.len(), "C out of bounds");
    // SAFETY: the asserts above bound every index the kernel touches.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            rsc as isize,
            1,
        );
    }
}

impl FeedForwardNet {
    /// Weights uniform in ±1/√fan_in, biases zero.
    pub fn new(sizes: &[usize], rng: &mut SimRng) -> Result<Self> {
        let mut net = Self::zeros(sizes)?;
        for l in 0..sizes.len() - 1 {
            let (w, _) = net.layer_range(l);
            let bound = 1.0 / (sizes[l] as f64).sqrt();
            for p in &mut net.params[w] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(net)
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::InvalidParameter(format!("invalid layer sizes {sizes:?}")));
        }
        Ok(FeedForwardNet { sizes: sizes.to_vec(), params: vec![0.0; param_count(sizes)] })
    }

    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Result<Self> {
        let net = Self::zeros(sizes)?;
        if params.len() != net.params.len() {
            return Err(Error::ShapeMismatch { expected: net.params.len(), got: params.len() });
        }
        Ok(FeedForwardNet { params, ..net })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("non-empty")
    }

    pub fn n_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Index ranges of layer `l`'s weights and bias.
    pub fn layer_range(&self, l: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let start: usize = self.sizes[..=l].windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        let (fi, fo) = (self.sizes[l], self.sizes[l + 1]);
        (start..start + fi * fo, start + fi * fo..start + fi * fo + fo)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_batch(input, 1)?.layers.pop().expect("output"))
    }

    /// Forward pass over `batch` row-major input rows.
    pub fn forward_batch(&self, input: &[f64], batch: usize) -> Result<ForwardCache> {
        let expected = batch * self.input_dim();
        if input.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: input.len() });
        }
        let mut layers = Vec::with_capacity(self.sizes.len());
        layers.push(input.to_vec());
        for l in 0..self.n_layers() {
            let (fi, fo) = (self.sizes[l], self.sizes[l + 1]);
            let (w, b) = self.layer_range(l);
            let bias = &self.params[b];
            let mut z = Vec::with_capacity(batch * fo);
            for _ in 0..batch {
                z.extend_from_slice(bias);
            }
            gemm(batch, fi, fo, &layers[l], (fi, 1), &self.params[w], (fo, 1), 1.0, &mut z, fo);
            if l + 1 < self.n_layers() {
                for v in &mut z {
                    *v = v.max(0.0);
                }
            }
            layers.push(z);
        }
        Ok(ForwardCache { batch, layers })
    }

    /// Reverse-mode pass for a loss with output adjoint `d_out`.
    ///
    /// Parameter gradients are added into `grad` when given; the input adjoint
    /// is returned when `want_input` is set.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        d_out: &[f64],
        mut grad: Option<&mut [f64]>,
        want_input: bool,
    ) -> Result<Option<Vec<f64>>> {
        let batch = cache.batch;
        if d_out.len() != batch * self.output_dim() {
            return Err(Error::ShapeMismatch { expected: batch * self.output_dim(), got: d_out.len() });
        }
        if let Some(g) = grad.as_deref() {
            if g.len() != self.params.len() {
                return Err(Error::ShapeMismatch { expected: self.params.len(), got: g.len() });
            }
        }
        let mut delta = d_out.to_vec();
        for l in (0..self.n_layers()).rev() {
            let (fi, fo) = (self.sizes[l], self.sizes[l + 1]);
            let (w, b) = self.layer_range(l);
            let x = &cache.layers[l];
            if let Some(g) = grad.as_deref_mut() {
                gemm(fi, batch, fo, x, (1, fi), &delta, (fo, 1), 1.0, &mut g[w.clone()], fo);
                let gb = &mut g[b];
                for row in delta.chunks_exact(fo) {
                    for (acc, d) in gb.iter_mut().zip(row) {
                        *acc += d;
                    }
                }
            }
            if l == 0 && !want_input {
                break;
            }
            let mut dx = vec![0.0; batch * fi];
            gemm(batch, fo, fi, &delta, (fo, 1), &self.params[w], (1, fo), 0.0, &mut dx, fi);
            if l > 0 {
                // ReLU derivative from the stored post-activation.
                for (d, &a) in dx.iter_mut().zip(x) {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            delta = dx;
        }
        Ok(want_input.then_some(delta))
    }

    /// θ_targ ← ρ θ_targ + (1 − ρ) θ_live.
    pub fn polyak_from(&mut self, live: &FeedForwardNet, rho: f64) {
        assert_eq!(self.sizes, live.sizes, "shape mismatch");
        for (t, &l) in self.params.iter_mut().zip(&live.params) {
            *t = rho * *t + (1.0 - rho) * l;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Bitwise fingerprint of the parameters.
    pub fn checksum(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for p in &self.params {
            p.to_bits().hash(&mut h);
        }
        h.finish()
    }
}
