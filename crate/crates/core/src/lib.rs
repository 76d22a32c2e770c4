//! Exact digit-set constructions, Cantor witnesses and certificates for
//! intersections of their translates.
//!
//! All arithmetic is on big rationals. Sets are digit-constrained expansions
//! in a mixed radix system and are inspected through their finite-depth
//! projections, which are exact unions of closed cells.

pub mod certifier;
pub mod constructions;
pub mod descriptor;
pub mod digits;
pub mod error;
pub mod interval;
pub mod numeric;
pub mod witness;

pub use certifier::{check, Certificate, CheckReport, Claim, ClaimKind, Status, Verdict};
pub use descriptor::SetDescriptor;
pub use digits::{DigitSetExpr, FamilyKind, LevelConstraint, TailRule};
pub use error::{Error, Result};
pub use interval::{Interval, IntervalUnion};
pub use numeric::{format_rational, parse_rational, DigitWord, MixedRadixSystem, Rational, Schedule};
pub use witness::{BlockScheme, CantorWitness};
