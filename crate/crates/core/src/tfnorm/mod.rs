//! Short-time Fourier transform and the modulation, Wiener amalgam,
//! Lorentz and mixed space-time norms built on it.
//!
//! Conventions: `V_g f(x, ξ) = ∫ e^{-2πiξ·y} f(y) g(y - x) dy` with a real
//! window and no conjugation. The default window is the unnormalized
//! Gaussian `e^{-π|t|²}`.

mod index;
mod lorentz;
mod norms;
mod oracles;
mod stft;

pub use index::{Exponent, IndexPair, Rational};
pub use lorentz::lorentz_norm;
pub use norms::{
    default_lattice, default_window, mixed_time_norm, modulation_norm, modulation_norm_on,
    time_norm, wiener_amalgam_norm, wiener_amalgam_norm_on, COVERAGE_LIMIT,
};
pub use oracles::{chirp_wiener_norm_oracle, dilated_gaussian_mod_norm_oracle, gaussian_stft_oracle};
pub use stft::{stft, stft_on, Spectrogram, StftLattice};
