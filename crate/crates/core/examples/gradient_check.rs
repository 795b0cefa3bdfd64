//! Backpropagation against central differences, then a parameter-file
//! round trip.
//!
//! ```bash
//! cargo run --example gradient_check
//! ```

use fso_dnn::modem::one_hot;
use fso_dnn::neuralnet::{gradient_check, read_params, write_params, Mlp};
use fso_dnn::rng::Streams;
use rand::Rng;

fn main() -> fso_dnn::Result<()> {
    let streams = Streams::new(3);
    for (k, dims) in [
        vec![2, 8, 4],
        vec![2, 40, 40, 40, 40, 16],
        vec![16, 40, 40, 2],
    ]
    .into_iter()
    .enumerate()
    {
        let mut rng = streams.rng(&[k as u64]);
        let mut net = Mlp::new_he(&dims, &mut rng)?;
        // random biases keep every unit away from its ReLU corner
        for b in net.params_mut() {
            if *b == 0.0 {
                *b = rng.random_range(-0.1..0.1);
            }
        }
        let input: Vec<f64> = (0..dims[0]).map(|_| rng.random_range(-1.0..1.0)).collect();
        let out = *dims.last().unwrap();
        let worst = gradient_check(&net, &input, &one_hot(rng.random_range(0..out), out)?)?;
        println!(
            "{dims:?}: {} params, worst relative error {worst:.2e}",
            net.n_params()
        );

        let text = write_params(&net);
        assert_eq!(read_params(&text)?, net);
    }
    println!("parameter files round-trip exactly");
    Ok(())
}
