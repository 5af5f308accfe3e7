//! Cauchy–Schwarz and Hölder regularizers.

pub mod gradcheck;
mod kinds;
mod landscape;
mod pair;

pub use kinds::*;
pub use landscape::{landscape_grid, write_landscape_csv, LandscapeRow};
pub use pair::{
    auto_scale_value, closed_form_beta, cs_grad, cs_value, holder_value, scale_invariant_value,
    AbsPair, BBinPair, BinExpPair, BinPair, CsPair, EigPair, EquPair, FixedScalePair, FnPair,
    NsPair, OmPair, OsbPair, TerPair,
};
