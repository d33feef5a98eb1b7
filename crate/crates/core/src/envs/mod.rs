//! Simulation environments: the two-state toy CMDP, a generic tabular
//! simulator and the synthetic emotional-user environment.

pub mod synthetic;
pub mod tabular;
pub mod toy;

pub use synthetic::{SyntheticEnv, SyntheticEnvConfig};
pub use tabular::{StateAnnotation, TabularEnv};
pub use toy::{toy_env, toy_env_build, ToyEnvConfig};

/// +1 when the signs of `latent_e` and `valence` agree, -1 when they are
/// opposed, 0 when either is zero.
pub fn sign_agreement(latent_e: f64, valence: i8) -> f64 {
    let s = if latent_e > 0.0 {
        1
    } else if latent_e < 0.0 {
        -1
    } else {
        0
    };
    (s * valence.signum() as i32) as f64
}
