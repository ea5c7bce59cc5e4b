use num_complex::Complex64;
use serde::Serialize;

/// Outcome of a numerical pairing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    pub value_re: f64,
    pub value_im: f64,
    /// Regularization parameters, largest first. Empty for direct pairings.
    pub eps_values: Vec<f64>,
    /// Pairing at each `ε`, as `[re, im]`.
    pub values: Vec<[f64; 2]>,
    /// Richardson limit, when a sweep was made.
    pub extrapolated: Option<[f64; 2]>,
    /// Difference of the last two extrapolants; `0` for direct pairings.
    pub error_indicator: f64,
    pub quad_points: u64,
    pub seconds: f64,
    /// `"degree"` when bidegrees are not complementary, `"non-monotone"`
    /// when successive differences of the sweep fail to shrink.
    pub flags: Vec<String>,
}

impl PairingReport {
    pub(crate) fn direct(value: Complex64, quad_points: u64, seconds: f64, flags: Vec<String>) -> Self {
        PairingReport {
            value_re: value.re,
            value_im: value.im,
            eps_values: Vec::new(),
            values: Vec::new(),
            extrapolated: None,
            error_indicator: 0.0,
            quad_points,
            seconds,
            flags,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    /// Copy with the wall-clock field cleared, for reproducible output.
    pub fn without_timing(mut self) -> Self {
        self.seconds = 0.0;
        self
    }
}
