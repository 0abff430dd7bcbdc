//! Procedural knowledge over RDF: the PKO vocabulary, an indexed triple
//! store, Turtle/N-Triples/JSON-LD I/O, typed procedure and execution views,
//! shape rules, competency queries and an execution recorder.

pub mod cq;
pub mod exec;
pub mod fixtures;
pub mod io;
pub mod mapper;
pub mod model;
pub mod store;
pub mod term;
pub mod validate;
pub mod vocab;
