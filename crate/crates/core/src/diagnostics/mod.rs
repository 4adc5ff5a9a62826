//! Post-run analysis: continuous-time embeddings of traces and empirical
//! robustness certificates for the slack-tolerant dynamic.

mod certify;
mod interpolate;

pub use certify::{
    certify_eps_delta, grid_samples, CertifyOptions, DeltaCertificate, SampleCertificate,
    WitnessPair,
};
pub use interpolate::InterpolatedPath;
