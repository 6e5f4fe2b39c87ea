//! Local operations with shared randomness, steering assemblages and
//! local-hidden-state models.

mod assemblage;
mod lhs;
mod losr;

pub use assemblage::{
    assemblage_value, lossr_assemblage, steer_assemblage, Assemblage, LossrBranch, ASSEMBLAGE_TOL,
};
pub use lhs::{
    assemblage_from_lhs, lhs_embed_cq, lhs_membership, lhs_membership_with, steering_battery,
    LhsModel, Membership, MembershipOptions, DEFAULT_MEMBERSHIP_CAP,
};
pub use losr::{apply_losr, cheat_distribution, cheat_povm, random_losr, LosrBranch, LosrMap};
