//! Numerical constants of the global transition varieties and orbit estimates.

/// `9 sqrt(2) pi / 32`, the Melnikov ratio of the Gamma homoclinic sets.
pub const GAMMA_HMC: f64 = 1.249_560_826_357_040_5;

/// `10^(2/3)`.
pub const TEN_POW_TWO_THIRDS: f64 = 4.641_588_833_612_778_9;

/// Coefficient of the `b0 mu0` term in the Lambda homoclinic sets.
pub const LAMBDA_B0: f64 = 49.192_045_41;
/// Coefficient of the `mu2 mu0^(1/3)` term (before the `10^(2/3)` factor).
pub const LAMBDA_MU2: f64 = 8.203_865_604;
/// Coefficient of the `mu3 mu0^(2/3)` term (before the `10^(2/3)` factor).
pub const LAMBDA_MU3: f64 = 4.355_675_048;

/// Half-amplitude `|p0|` of the scaled Lambda loop, `y = p0 cos(2 phi) + q0`.
pub const LAMBDA_P0: f64 = 0.715_706_399_8;
/// Offset `|q0|` of the scaled Lambda loop.
pub const LAMBDA_Q0: f64 = 0.229_942_874_1;
/// `p0^2 / sqrt(2)`, the x-amplitude factor of the scaled Lambda loop.
pub const LAMBDA_X_AMP: f64 = 0.362_205_302_2;
/// `(q0 - y3) / p0` with `y3` the outer root of the loop's energy quartic.
pub const LAMBDA_SHIFT: f64 = 2.285_124_034_715_48;

/// Scaled-system ratios used by the Lambda sets:
/// `gamma31 = LAMBDA_G31 * b0` and `gamma23 = LAMBDA_G23 * gamma33`.
pub const LAMBDA_G31: f64 = 1.129_378_222;
pub const LAMBDA_G23: f64 = 0.246_435_689_2;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_constants() {
        let k = 9.0 * 2f64.sqrt() * std::f64::consts::PI / 32.0;
        assert!((k - GAMMA_HMC).abs() < 1e-15);
        assert!((100f64.cbrt() - TEN_POW_TWO_THIRDS).abs() < 1e-14);
        assert!(((2.0 / 3.0 * 10f64.ln()).exp() - TEN_POW_TWO_THIRDS).abs() < 1e-14);
    }

    #[test]
    fn lambda_coefficients_are_mutually_consistent() {
        // to 10 digits: LAMBDA_B0 = 10 * LAMBDA_MU3 * G31 and LAMBDA_MU2 = LAMBDA_MU3 / (G23 10^(1/3))
        let g31 = LAMBDA_B0 / (10.0 * LAMBDA_MU3);
        assert!((g31 / LAMBDA_G31 - 1.0).abs() < 1e-8);
        let g23 = LAMBDA_MU3 / (LAMBDA_MU2 * 10f64.cbrt());
        assert!((g23 / LAMBDA_G23 - 1.0).abs() < 1e-8);
    }
}
