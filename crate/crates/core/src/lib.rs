//! Self-similar groups acting on rooted trees and their Röver–Nekrashevych
//! groups: element arithmetic, nuclei, abelianization, presentations and
//! finite approximations of limit spaces.

pub mod abelian;
pub mod catalogue;
pub mod error;
pub mod limitspace;
pub mod nucleus;
pub mod perm;
pub mod presentation;
pub mod ssgroup;
pub mod vg;
pub mod words;

pub use abelian::AbelGroup;
pub use error::{Error, Result};
pub use nucleus::{Nucleus, NucleusBudget};
pub use perm::Perm;
pub use ssgroup::{Equality, GenWord, Group, GroupDef, Letter, MachineState, StateId, Triviality};
pub use vg::{Row, Table};
pub use words::{Alphabet, Antichain, Word};
