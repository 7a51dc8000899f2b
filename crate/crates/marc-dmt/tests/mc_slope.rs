//! Diversity-slope recovery against the closed forms at a window where
//! the finite-SNR curve has settled enough for the stated tolerance.

use marc_dmt::dmt::d_out;
use marc_dmt::outage_mc::{estimate_pout, fit_diversity, McConfig};

#[test]
fn five_slot_sweep_recovers_closed_form_slope() {
    let rows = estimate_pout(&McConfig {
        slots: 5,
        r: 0.1,
        snr_db_list: vec![16.0, 19.0, 22.0],
        trials_per_snr: 4_000_000,
        seed: 11,
        snr_relay_offset_db: 0.0,
    })
    .unwrap();
    let fit = fit_diversity(&rows, (16.0, 22.0)).unwrap();
    let target = d_out(5, 0.1).value().unwrap();
    assert!(
        (fit.slope - target).abs() <= 0.4,
        "slope {} vs closed form {target}",
        fit.slope
    );
}

#[test]
fn relay_snr_offset_preserves_sweep_and_slope_sanity() {
    // a large source-relay advantage changes decision times, not the
    // validity of the fit machinery
    let rows = estimate_pout(&McConfig {
        slots: 2,
        r: 0.2,
        snr_db_list: vec![10.0, 13.0, 16.0, 19.0],
        trials_per_snr: 200_000,
        seed: 23,
        snr_relay_offset_db: 10.0,
    })
    .unwrap();
    let fit = fit_diversity(&rows, (10.0, 19.0)).unwrap();
    assert!(fit.slope > 0.5, "slope {}", fit.slope);
}
