//! Exact verification of torsion-pair properties over representation-finite path algebras.

pub mod cache;
pub mod catalog;
pub mod derived;
pub mod effaceable;
pub mod error;
pub mod fieldlin;
pub mod heart;
pub mod quiver;
pub mod reduction;
pub mod report;
pub mod rep;
pub mod torsion;

pub use error::{Error, Result};
pub use fieldlin::{Field, FieldElem, Mat};
pub use quiver::Quiver;
pub use reduction::{PerpSubcat, ReductionStep, Reducer, StepChecks};
pub use rep::{ExtCocycle, HomExt, Rep, RepMorphism, SubRep};
pub use derived::{ChainMap, Cone, Derived, HomSpace, PComplex, SplitObject};
pub use catalog::{positive_roots, CatalogBounds, IndecCatalog};
pub use heart::{Heart, SimpleTop, TriState};
pub use report::{classify, ClassifyOptions, VerdictRow, VerdictTable, Workbench, SCHEMA_VERSION};
pub use torsion::{Mask, TorsionContext, TorsionPairData};
