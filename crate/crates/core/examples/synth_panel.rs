//! Writes a seeded synthetic quarterly panel with the default column schema.
//!
//! Four stochastic trends drive six variables; `wages` and `num_firms` are
//! tied to the others by two stationary relations, so the cointegration rank
//! is 2.
//!
//! Usage: `cargo run -p vecmkit --example synth_panel -- [rows] [seed] > panel.csv`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use vecmkit::timeseries::{parse_quarter, DEFAULT_COLUMNS};
use vecmkit::{Frame, Matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rows: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(69);
    let seed: u64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(2018);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = Normal::new(0.0, 1.0)?;

    // output, price, employment, exchange_rate follow random walks with drift
    let drift = [0.004, 0.002, 0.001, 0.0];
    let vol = [0.01, 0.015, 0.008, 0.02];
    let mut trend = [10.2, 4.5, 2.5, 0.25];
    let (mut u1, mut u2) = (0.0, 0.0);
    let mut m = Matrix::zeros(rows, 6);
    for t in 0..rows {
        for i in 0..4 {
            trend[i] += drift[i] + vol[i] * n.sample(&mut rng);
        }
        u1 = 0.2 * u1 + 0.01 * n.sample(&mut rng);
        u2 = 0.2 * u2 + 0.02 * n.sample(&mut rng);
        let [output, price, employment, exchange_rate] = trend;
        let wages = 1.0 + 0.6 * employment + 0.3 * price + u1;
        let num_firms = 2.0 + 0.5 * output - 0.4 * exchange_rate + u2;
        m.row_mut(t)
            .copy_from_slice(&[output, price, employment, wages, exchange_rate, num_firms]);
    }
    let frame = Frame::from_matrix(parse_quarter("2001Q1")?, &DEFAULT_COLUMNS, &m)?;
    frame.write_csv(std::io::stdout().lock())?;
    Ok(())
}
