//! Proof kernel for the intuitionistic logic of belief IEL⁻: modal proof
//! terms, normalization, the Hilbert calculus, Kripke models and the
//! extraction procedures built on normal forms.

pub mod gen;
pub mod hilbert;
pub mod kripke;
pub mod metaprops;
pub mod parse;
mod print;
pub mod reduce;
pub mod selftest;
pub mod syntax;
pub mod stlc;
pub mod typeck;

pub use hilbert::{AxiomScheme, HilbertError, HilbertProof, Instantiation, Justification, Line, Meta};
pub use kripke::{FrameCondition, KripkeModel, Violation};
pub use metaprops::{classify, PropsError, Side, TermClass};
pub use parse::{ParseError, SourceSpan};
pub use syntax::{alpha_eq, substitute, Binding, Context, Formula, Name, Path, Term};
pub use typeck::{infer, TypeError};
pub use reduce::{normalize, step, Mode, ReductionTrace, RuleTag, Strategy};
pub use stlc::{erase_formula, erase_term, simulates, Simulation, StlcTerm, StlcType};
