mod common;

use semiwave::nonlinearity::CubicNonlinearity;

// R = 6 resolved by 48 cells, 2D grid 432², radial reference 4× finer.
#[test]
fn radial_and_cartesian_modes_agree_at_t20() {
    for nl in [CubicNonlinearity::dissipative(), CubicNonlinearity::rotational(), CubicNonlinearity::zero()] {
        let rel = common::radial_cartesian_mismatch(&nl, 6.0, 0.3, 0.125, 20.0);
        assert!(rel < 5e-3, "relative mismatch {rel}");
    }
}

#[test]
fn mismatch_is_discretization_error() {
    // Halving the 2D spacing cuts the mismatch by about four.
    let nl = CubicNonlinearity::dissipative();
    let coarse = common::radial_cartesian_mismatch(&nl, 2.0, 0.3, 0.125, 4.0);
    let fine = common::radial_cartesian_mismatch(&nl, 2.0, 0.3, 0.0625, 4.0);
    let ratio = coarse / fine;
    assert!((3.0..5.0).contains(&ratio), "{coarse} / {fine} = {ratio}");
}
