// scratch: inspect plug-in internals on pointwise AR(0.5)
use ftscp::fda::FunctionalTimeSeries;
use ftscp::longrun::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() {
    let rho = 0.5; let sigma = 0.7; let n = 5000; let j = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut rows = Vec::with_capacity(n);
    let mut prev = vec![0.0f64; j];
    for _ in 0..200 { for x in prev.iter_mut() { *x = rho * *x + sigma * rng.sample::<f64,_>(StandardNormal); } }
    for _ in 0..n { for x in prev.iter_mut() { *x = rho * *x + sigma * rng.sample::<f64,_>(StandardNormal); } rows.push(prev.clone()); }
    let grid: Vec<f64> = (0..j).map(|i| i as f64/(j-1) as f64).collect();
    let fts = FunctionalTimeSeries::from_rows(grid, &rows, None).unwrap();
    let h = plugin_bandwidth(&fts, KernelFamily::Bartlett, 1).unwrap();
    println!("plug-in h = {h}");
    for hh in [4.0, 8.0, 12.0, h, 20.0, 30.0] {
        let lrc = long_run_covariance(&fts, &KernelSpec::bartlett().with_bandwidth(hh)).unwrap();
        let d: Vec<f64> = (0..j).map(|i| lrc.matrix()[(i,i)]).collect();
        println!("h={hh:6.2}  diag={d:?}");
    }
    // also ratio norms of autocovs
    for l in 0..10i64 {
        let g = autocovariance_surface(&fts, l).unwrap();
        println!("lag {l}: hs_norm={:.4}", g.hs_norm_sq().sqrt());
    }
}
