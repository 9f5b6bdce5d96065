//! Exact computation of the minimal slope whose surgery on a torus knot
//! bounds a negative-definite four-manifold, together with independent
//! verification machinery: Hirzebruch-Jung continued fractions, plumbing
//! and Seifert descriptions, lattice-embedding search, linking-matrix
//! blow-down calculus, and cobordism bookkeeping.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals);
//! there is no floating point in the crate.

pub mod cf;
pub mod cobordism;
pub mod embed;
pub mod error;
pub mod forms;
pub mod kirby;
pub mod par;
pub mod rational;
pub mod surgery;
pub mod verify;

pub use cf::{cf_minus, cf_plus, eval_cf, ContinuedFraction, Convention};
pub use cobordism::{
    step_cobordism_chain, sum_cobordism_fractional, sum_cobordism_half, sum_cobordism_integer,
    CobordismStage,
};
pub use embed::{
    default_k_max, enumerate_embeddings, find_embedding, is_primitive, mu_threshold_oracle,
    two_leg_recursion, BlowupStep, Embedding, EmbeddingReport,
};
pub use error::{Error, Result};
pub use forms::{
    determinant, discriminant_group, signature, smith_invariants, tridiagonal_signature,
    GramMatrix, SignatureTriple, SmithForm,
};
pub use kirby::{
    append_vertex, blow_down, blow_up, chain_matrix, reduce_to_zero, FramedLinkMatrix,
    ReduceConfig, ReduceOutcome,
};
pub use par::RunMode;
pub use rational::{mod_inverse, ExtendedRational, Rational};
pub use surgery::{
    augmented_mu_diagram, h1_order, mu, seifert_to_matrix, surgery_plumbing,
    torus_surgery_to_seifert, PlumbingTree, SeifertData, TorusSurgery,
};
pub use verify::{
    blowdown_grid, cf_suite, cobordism_suite, determinant_law, mu_golden, obstruction_sanity,
    run_all, signature_suite, torsion_suite, SuiteResult,
};
