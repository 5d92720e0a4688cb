//! Growth series and tower-based skew-growth series of cancellative monoids,
//! computed exactly as truncated formal Dirichlet series.
//!
//! The usual flow: pick a [`MonoidDef`] (a parsed [`Presentation`], the
//! positive integers, or an `M_p` family member), enumerate it with
//! [`MonoidModel::enumerate_up_to`], build the [`DivPoset`], and then ask for
//! [`skew_growth`] or run the [`checks`].

// error values carry exact degrees and are only built on failure paths
#![allow(clippy::result_large_err)]

pub mod checks;
pub mod degree;
pub mod dirichlet;
pub mod model;
pub mod mp;
pub mod poset;
pub mod presentation;
pub mod towers;

pub use degree::{parse_rational, DegreeKey, KeyKind};
pub use dirichlet::{Series, SeriesError};
pub use model::{
    ElementId, EnumerationOptions, LeftQuotient, ModelError, ModelKind, MonoidDef, MonoidModel,
};
pub use mp::{MpElement, MpError, MpSpec};
pub use poset::{DivPoset, ElementSet, PosetError};
pub use presentation::{parse_presentation, preset, Builtin, Presentation, PresentationError};
pub use towers::{enumerate_towers, skew_growth, Tower, TowerError, TowerForest};
