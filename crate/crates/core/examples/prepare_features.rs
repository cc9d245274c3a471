//! Loads MNIST, fits the PCA reducer and shows both encodings of one image.
//!
//! cargo run --release --example prepare_features -- [data_dir] [n_qubits] [reducer_out]

use std::path::PathBuf;

use qae::data::{normalized_pixels, resize16};
use qae::encoding::{amplitude_encode, angle_encode, Reducer};
use qae::experiment::{fit_pixel_reducer, load_mnist};

fn main() -> qae::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map_or("data/mnist", String::as_str));
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(8);

    let mnist = load_mnist(&dir)?;
    println!("{} training images, {} test images", mnist.train.len(), mnist.test.len());
    let reducer = fit_pixel_reducer(&mnist.train, n)?;
    let text = reducer.to_text();
    assert_eq!(Reducer::from_text(&text)?, reducer);
    if let Some(path) = args.get(2) {
        std::fs::write(path, &text)?;
        println!("reducer written to {path}");
    }

    let img = &mnist.test[0];
    let angles = reducer.reduce_and_scale(&normalized_pixels(img))?;
    println!("digit {} -> angles {:?}", img.label, angles.iter().map(|a| format!("{a:.3}")).collect::<Vec<_>>());
    let state = angle_encode(&angles)?;
    println!("angle state: {} qubits, P(1) on qubit 0 = {:.4}", state.n_qubits(), state.prob_one(0)?);

    let small = resize16(img);
    let amp = amplitude_encode(&small)?;
    let top = amp.amplitudes().iter().map(|a| a.norm_sqr()).fold(0.0f64, f64::max);
    println!("amplitude state: {} qubits, largest basis probability {top:.4}", amp.n_qubits());
    Ok(())
}
