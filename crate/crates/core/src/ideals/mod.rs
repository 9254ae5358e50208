//! Operator-ideal norms: Hilbert–Schmidt, p-summing, γ- and Rademacher-summing, and the
//! weak*-1-nuclear representation.

mod nuclear;
mod pietsch;
mod summing;

pub use nuclear::{weak_star_nuclear_rep, NuclearRep};
pub use pietsch::{
    default_dual_points, dual_sphere_net, extreme_dual_points, pi_2_upper, pi_2_upper_default, pi_2_upper_with,
    pietsch_factorize, singular_aligned_points, verify_certificate, CertificateCheck, DualPoints, PietschCertificate,
    PietschConfig, PietschFactorization, DOMINATION_SLACK, GRAM_RIDGE,
};
pub use summing::{gamma_norm_hilbert_domain, gamma_summing_lower, hs_norm, pi_p_lower, r_summing_lower};
