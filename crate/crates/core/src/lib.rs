//! Spectral machinery for the sample complexity of large-margin linear
//! classification under a known data distribution.
//!
//! The central quantity is the γ-adapted dimension `k_γ` of a covariance
//! spectrum ([`spectral`]). Upper bounds on learnability come from
//! fat-shattering bounds for `(b, k)`-limited sets ([`shatter`]); lower bounds
//! come from the probability that a random sample is shattered, which is
//! controlled by the smallest eigenvalue of its Gram matrix ([`randmat`]).
//! [`learner`] runs margin-error minimization on samples from the
//! distributions in [`dist`] to measure learning curves directly.

pub mod dist;
pub mod error;
pub mod learner;
pub mod linalg;
pub mod optim;
pub mod parallel;
pub mod randmat;
pub mod reproduce;
pub mod sample;
pub mod seeding;
pub mod shatter;
pub mod spectral;

pub use error::{Error, Result};
pub use sample::{LabeledSample, SampleMatrix};
