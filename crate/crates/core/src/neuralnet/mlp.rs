use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::{Error, Result};

static REVISIONS: AtomicU64 = AtomicU64::new(1);

fn next_revision() -> u64 {
    REVISIONS.fetch_add(1, Ordering::Relaxed)
}

/// Weights and biases of a feed-forward network.
///
/// Layer `l` maps `dims[l]` inputs to `dims[l + 1]` outputs with a row-major
/// `dims[l + 1] x dims[l]` weight matrix. Hidden layers use ReLU, the last
/// layer is linear.
#[derive(Debug, Clone)]
pub struct Mlp {
    dims: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    // changes on every mutation so stale forward caches are detected
    revision: u64,
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.weights == other.weights && self.biases == other.biases
    }
}

/// Layer activations recorded by [`Mlp::forward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    revision: u64,
    // activations[0] is the input, activations[l] the output of layer l
    activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations
            .last()
            .expect("cache holds the input at least")
    }
}

/// Parameter gradients, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.weights.iter().chain(&self.biases).flatten()
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights.iter_mut().chain(&mut self.biases).flatten()
    }

    pub fn scale(&mut self, factor: f64) {
        self.values_mut().for_each(|v| *v *= factor);
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.values_mut().zip(other.values()) {
            *a += b;
        }
    }

    pub fn len(&self) -> usize {
        self.values().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn shape_matches(&self, net: &Mlp) -> bool {
        self.weights.len() == net.weights.len()
            && self
                .weights
                .iter()
                .zip(&net.weights)
                .all(|(a, b)| a.len() == b.len())
            && self
                .biases
                .iter()
                .zip(&net.biases)
                .all(|(a, b)| a.len() == b.len())
    }
}

impl Mlp {
    /// All-zero network.
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Shape(format!("invalid layer dims {dims:?}")));
        }
        let weights = dims.windows(2).map(|w| vec![0.0; w[0] * w[1]]).collect();
        let biases = dims[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(Self {
            dims: dims.to_vec(),
            weights,
            biases,
            revision: next_revision(),
        })
    }

    /// Uniform He-style initialization in `±sqrt(6 / fan_in)`, zero biases.
    pub fn new_he<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let mut net = Self::zeros(dims)?;
        for (l, w) in net.weights.iter_mut().enumerate() {
            let limit = (6.0 / dims[l] as f64).sqrt();
            w.iter_mut()
                .for_each(|v| *v = rng.random_range(-limit..limit));
        }
        Ok(net)
    }

    pub fn from_parts(
        dims: Vec<usize>,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let template = Self::zeros(&dims)?;
        if weights.len() != template.weights.len() || biases.len() != template.biases.len() {
            return Err(Error::Shape(format!(
                "{} layers implied by dims {dims:?}, got {} weight and {} bias blocks",
                template.weights.len(),
                weights.len(),
                biases.len()
            )));
        }
        for (l, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.len() != template.weights[l].len() || b.len() != template.biases[l].len() {
                return Err(Error::Shape(format!("layer {l} has wrong parameter count")));
            }
        }
        if weights
            .iter()
            .chain(&biases)
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(Error::Shape("parameters must be finite".into()));
        }
        Ok(Self {
            dims,
            weights,
            biases,
            revision: next_revision(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().expect("dims is never empty")
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    /// Mutable access to every parameter, weights first then biases.
    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.revision = next_revision();
        self.weights.iter_mut().chain(&mut self.biases).flatten()
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.weights.iter().chain(&self.biases).flatten()
    }

    pub(crate) fn param_mut(&mut self, flat: usize) -> &mut f64 {
        self.params_mut()
            .nth(flat)
            .expect("parameter index in range")
    }

    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        if input.len() != self.input_dim() {
            return Err(Error::Dimension {
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        let mut activations = Vec::with_capacity(self.dims.len());
        activations.push(input.to_vec());
        let last = self.n_layers();
        for l in 0..last {
            let x = &activations[l];
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let w = &self.weights[l];
            let mut out = self.biases[l].clone();
            for (o, acc) in out.iter_mut().enumerate() {
                let row = &w[o * n_in..(o + 1) * n_in];
                *acc += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            }
            debug_assert_eq!(out.len(), n_out);
            if l + 1 < last {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            activations.push(out);
        }
        let output = activations.last().expect("non-empty").clone();
        Ok((
            output,
            ForwardCache {
                revision: self.revision,
                activations,
            },
        ))
    }

    /// Convenience forward pass without keeping the cache.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.forward(input).map(|(out, _)| out)
    }

    /// Gradients of a scalar loss given `d_output = ∂L/∂output`.
    pub fn backward(&self, cache: &ForwardCache, d_output: &[f64]) -> Result<Gradients> {
        let mut grads = Gradients::zeros_like(self);
        self.backward_into(cache, d_output, &mut grads)?;
        Ok(grads)
    }

    /// Accumulates parameter gradients into `grads` and returns `∂L/∂input`.
    pub fn backward_into(
        &self,
        cache: &ForwardCache,
        d_output: &[f64],
        grads: &mut Gradients,
    ) -> Result<Vec<f64>> {
        if cache.revision != self.revision || cache.activations.len() != self.dims.len() {
            return Err(Error::StaleCache);
        }
        if d_output.len() != self.output_dim() {
            return Err(Error::Dimension {
                expected: self.output_dim(),
                got: d_output.len(),
            });
        }
        if !grads.shape_matches(self) {
            return Err(Error::Shape(
                "gradient buffer does not match network".into(),
            ));
        }
        let mut delta = d_output.to_vec();
        for l in (0..self.n_layers()).rev() {
            let n_in = self.dims[l];
            let x = &cache.activations[l];
            let gw = &mut grads.weights[l];
            for (o, d) in delta.iter().enumerate() {
                grads.biases[l][o] += d;
                if *d != 0.0 {
                    let row = &mut gw[o * n_in..(o + 1) * n_in];
                    row.iter_mut().zip(x).for_each(|(g, xi)| *g += d * xi);
                }
            }
            let w = &self.weights[l];
            let mut prev = vec![0.0; n_in];
            for (o, d) in delta.iter().enumerate() {
                if *d != 0.0 {
                    let row = &w[o * n_in..(o + 1) * n_in];
                    prev.iter_mut().zip(row).for_each(|(p, wi)| *p += d * wi);
                }
            }
            if l > 0 {
                // ReLU: the hidden output is zero exactly where it was clipped
                prev.iter_mut().zip(x).for_each(|(p, a)| {
                    if *a <= 0.0 {
                        *p = 0.0
                    }
                });
            }
            delta = prev;
        }
        Ok(delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Streams;

    #[test]
    fn zero_network_gives_zero_logits() {
        let net = Mlp::zeros(&[2, 5, 4]).unwrap();
        assert_eq!(net.predict(&[0.3, -1.0]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn identity_single_layer() {
        let net = Mlp::from_parts(
            vec![2, 2],
            vec![vec![1.0, 0.0, 0.0, 1.0]],
            vec![vec![0.0; 2]],
        )
        .unwrap();
        assert_eq!(net.predict(&[0.7, -3.0]).unwrap(), vec![0.7, -3.0]);
    }

    #[test]
    fn relu_blocks_negative_preactivations() {
        // hidden unit pre-activation is -1 - x, negative for x > -1
        let net = Mlp::from_parts(
            vec![1, 1, 1],
            vec![vec![-1.0], vec![5.0]],
            vec![vec![-1.0], vec![0.25]],
        )
        .unwrap();
        assert_eq!(net.predict(&[2.0]).unwrap(), vec![0.25]);
        let (_, cache) = net.forward(&[2.0]).unwrap();
        let g = net.backward(&cache, &[1.0]).unwrap();
        assert_eq!(g.weights[0], vec![0.0]);
        assert_eq!(g.biases[0], vec![0.0]);
    }

    #[test]
    fn dimension_and_shape_errors() {
        assert!(Mlp::zeros(&[]).is_err());
        assert!(Mlp::zeros(&[2, 0, 3]).is_err());
        let net = Mlp::zeros(&[2, 3]).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(Error::Dimension { .. })));
        assert!(Mlp::from_parts(vec![2, 3], vec![vec![0.0; 5]], vec![vec![0.0; 3]]).is_err());
    }

    #[test]
    fn stale_cache_is_rejected() {
        let mut rng = Streams::new(1).rng(&[0]);
        let mut net = Mlp::new_he(&[2, 4, 3], &mut rng).unwrap();
        let (_, cache) = net.forward(&[0.1, 0.2]).unwrap();
        let other = Mlp::new_he(&[2, 4, 3], &mut rng).unwrap();
        assert!(matches!(
            other.backward(&cache, &[1.0; 3]),
            Err(Error::StaleCache)
        ));
        *net.param_mut(0) += 1.0;
        assert!(matches!(
            net.backward(&cache, &[1.0; 3]),
            Err(Error::StaleCache)
        ));
    }

    #[test]
    fn backward_is_linear_in_output_gradient() {
        let mut rng = Streams::new(2).rng(&[0]);
        let net = Mlp::new_he(&[2, 6, 6, 3], &mut rng).unwrap();
        let (_, cache) = net.forward(&[0.5, -0.8]).unwrap();
        let zero = net.backward(&cache, &[0.0; 3]).unwrap();
        assert!(zero.values().all(|&v| v == 0.0));
        let d = [0.3, -1.2, 0.9];
        let g1 = net.backward(&cache, &d).unwrap();
        let g2 = net.backward(&cache, &d.map(|v| 2.0 * v)).unwrap();
        for (a, b) in g1.values().zip(g2.values()) {
            assert!((2.0 * a - b).abs() <= 1e-14 * b.abs().max(1.0));
        }
    }

    #[test]
    fn he_init_respects_limits() {
        let mut rng = Streams::new(3).rng(&[0]);
        let net = Mlp::new_he(&[2, 40, 4], &mut rng).unwrap();
        let lim0 = (6.0f64 / 2.0).sqrt();
        assert!(net.weights()[0].iter().all(|w| w.abs() < lim0));
        assert!(net.biases().iter().flatten().all(|&b| b == 0.0));
        assert_eq!(net.n_params(), 2 * 40 + 40 + 40 * 4 + 4);
    }
}
