//! Core pipeline for building concept description sets from scientific text.

pub mod corpus;
pub mod eval;
pub mod extraction;
pub mod generation;
pub mod highlight;
mod http;
pub mod io;
pub mod pipeline;
pub mod selection;
pub mod text;
