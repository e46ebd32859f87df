//! Features and AF loss against straightforward loop implementations
//! (naive DFT, dense filterbank, Newton-inverted Bark edges).

mod common;

use common::oracle::*;
use mixmatch::features;

#[test]
fn features_and_af_loss_match_naive_loops() {
    let oracle = Oracle::new();
    for pair in 0..100u64 {
        // lengths differ so the frame truncation is exercised
        let pred = common::random_stereo(N + 2 * HOP + (pair as usize % 3) * HOP, 2 * pair);
        let reference = common::random_stereo(N + 2 * HOP, 2 * pair + 1);
        if let Err(e) = compare_pair(&oracle, &pred, &reference) {
            panic!("pair {pair}: {e}");
        }
        // the width helper agrees with the extracted feature
        let (sw, _) = naive_sw_si(pred.left(), pred.right());
        assert!(close(features::stereo_width(&pred).unwrap(), sw));
    }
}

#[test]
fn filterbank_matches_dense_construction() {
    let oracle = Oracle::new();
    let fb = features::default_filterbank();
    for b in 0..BANDS {
        for k in 0..1025 {
            assert!((fb.weight(b, k) - oracle.fb[b][k]).abs() <= 1e-9, "band {b} bin {k}");
        }
    }
    // every bin belongs to at least one band
    for k in 0..1025 {
        assert!((0..BANDS).any(|b| fb.weight(b, k) > 0.0));
    }
}
