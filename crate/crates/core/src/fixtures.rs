//! The shipped example graphs: a lockout/tagout procedure with one execution,
//! and a recipe built from multisteps.

use crate::io::parse_turtle;
use crate::store::Graph;
use crate::vocab::Iri;

pub const LOTO_TTL: &str = include_str!("../fixtures/loto.ttl");
pub const RECIPE_TTL: &str = include_str!("../fixtures/recipe.ttl");

pub const EX: &str = "https://example.org/";

/// `https://example.org/{local}`.
pub fn ex(local: &str) -> Iri {
    Iri::new(format!("{EX}{local}")).expect("example IRI is valid")
}

pub fn loto() -> Graph {
    parse_turtle(LOTO_TTL).expect("LOTO fixture parses").graph
}

pub fn recipe() -> Graph {
    parse_turtle(RECIPE_TTL).expect("recipe fixture parses").graph
}

/// Both fixtures in one graph.
pub fn combined() -> Graph {
    let mut g = loto();
    g.merge(&recipe());
    g
}

pub mod loto {
    pub const PROCEDURE: &str = "LOTO-condenser-MSK";
    pub const STEP_4: &str = "LOTO-condenser-MSK/Step/4";
    pub const EXECUTION: &str = "LOTO-condenser-MSK/execution/2024-10-11";
    pub const AGENT: &str = "JohnDoe";
}

pub mod recipe {
    pub const PROCEDURE: &str = "boil-carrots";
    pub const STEP_1_2: &str = "boil-carrots/Step/1.2";
}
