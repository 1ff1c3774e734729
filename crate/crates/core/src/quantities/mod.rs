//! Functionals of a potential and their suprema.

mod annulus;
mod functionals;
mod layout;
mod search;
mod sups;

pub use functionals::{
    a_point, delta_inverse, drift_time_integral, k_potential_value, kato_point, n_value, r_point,
    resolvent_point, s_value, Prepared,
};
pub use annulus::{half_annulus_integral, half_annulus_ratio, half_annulus_sup, local_mass_sup, LOCAL_RADIUS};
pub use search::{sup_search, Pass, SearchBox, SearchOptions, SupResult};
pub use sups::{a_value, delta_inverse_norm, e_star, kato_bracket, r_star, sup_k, sup_n, sup_s, SupOptions};
