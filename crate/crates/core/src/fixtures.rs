//! Example schemas and instances shipped with the crate.
//!
//! The files live in the repository's `fixtures/` directory; these constants
//! embed them so tests and bindings do not depend on the working directory.

use std::sync::Arc;

use crate::instance::{Instance, InstanceError};
use crate::schema::Schema;

pub const EMPLOYEE_SCHEMA: &str = include_str!("../../../fixtures/employee.schema");
pub const EMPLOYEE: &str = include_str!("../../../fixtures/employee.inst");
pub const EMPLOYEE_MUTATED: &str = include_str!("../../../fixtures/broken/employee_mutated.inst");
pub const WORKSIN_SCHEMA: &str = include_str!("../../../fixtures/worksin.schema");
pub const WORKSIN_ATOMIC: &str = include_str!("../../../fixtures/worksin_atomic.inst");
pub const WORKSIN_POWERSET: &str = include_str!("../../../fixtures/worksin_powerset.inst");
pub const WORKSIN_UNLINKED: &str = include_str!("../../../fixtures/worksin_unlinked.inst");
pub const LOOP_SCHEMA: &str = include_str!("../../../fixtures/loop.schema");
pub const LOOP_ATOMIC: &str = include_str!("../../../fixtures/loop_atomic.inst");
pub const LOOP_COLLAPSE: &str = include_str!("../../../fixtures/loop_collapse.morph");
pub const TASKS_SCHEMA: &str = include_str!("../../../fixtures/tasks.schema");
pub const TASKS: &str = include_str!("../../../fixtures/tasks_list.inst");
pub const MARKOV: &str = include_str!("../../../fixtures/markov.inst");
pub const GRAPH: &str = include_str!("../../../fixtures/graph.inst");
pub const SUPERGRAPH: &str = include_str!("../../../fixtures/supergraph.inst");
pub const GRAPH_LAX: &str = include_str!("../../../fixtures/graph_lax.morph");
pub const FSA: &str = include_str!("../../../fixtures/fsa.inst");
pub const TURING: &str = include_str!("../../../fixtures/turing.inst");
pub const FACTORIAL: &str = include_str!("../../../fixtures/factorial.inst");
pub const SCHEMAS_LISTEXC: &str = include_str!("../../../fixtures/schemas_listexc.inst");
pub const VECT: &str = include_str!("../../../fixtures/vect.inst");
pub const MULTIGRAPH: &str = include_str!("../../../fixtures/multigraph.inst");
pub const MULTIGRAPH_SYM: &str = include_str!("../../../fixtures/multigraph_sym.inst");
pub const PERSON_SCHEMA: &str = include_str!("../../../fixtures/person.schema");
pub const ASSURANCE: &str = include_str!("../../../fixtures/assurance.inst");
pub const PROCESS_SCHEMA: &str = include_str!("../../../fixtures/process.schema");
pub const TIME_DELAY: &str = include_str!("../../../fixtures/time_delay.inst");

/// Every shipped valid instance with the schema it is written against.
pub const VALID: &[(&str, &str, &str)] = &[
    ("employee", EMPLOYEE_SCHEMA, EMPLOYEE),
    ("worksin_atomic", WORKSIN_SCHEMA, WORKSIN_ATOMIC),
    ("worksin_powerset", WORKSIN_SCHEMA, WORKSIN_POWERSET),
    ("worksin_unlinked", WORKSIN_SCHEMA, WORKSIN_UNLINKED),
    ("loop_atomic", LOOP_SCHEMA, LOOP_ATOMIC),
    ("tasks", TASKS_SCHEMA, TASKS),
    ("markov", LOOP_SCHEMA, MARKOV),
    ("graph", LOOP_SCHEMA, GRAPH),
    ("supergraph", LOOP_SCHEMA, SUPERGRAPH),
    ("fsa", LOOP_SCHEMA, FSA),
    ("turing", LOOP_SCHEMA, TURING),
    ("factorial", LOOP_SCHEMA, FACTORIAL),
    ("schemas_listexc", LOOP_SCHEMA, SCHEMAS_LISTEXC),
    ("vect", LOOP_SCHEMA, VECT),
    ("multigraph", LOOP_SCHEMA, MULTIGRAPH),
    ("multigraph_sym", LOOP_SCHEMA, MULTIGRAPH_SYM),
    ("assurance", PERSON_SCHEMA, ASSURANCE),
    ("time_delay", PROCESS_SCHEMA, TIME_DELAY),
];

pub fn schema(text: &str) -> Arc<Schema> {
    Arc::new(Schema::parse(text).expect("shipped schema parses"))
}

pub fn instance(schema_text: &str, text: &str) -> Result<Instance, InstanceError> {
    Instance::parse(schema(schema_text), text)
}

/// Looks up a shipped instance by its key in [`VALID`].
pub fn load(key: &str) -> Instance {
    let (_, s, i) = VALID.iter().find(|(k, ..)| *k == key).unwrap_or_else(|| panic!("no fixture `{key}`"));
    instance(s, i).unwrap_or_else(|e| panic!("fixture `{key}`: {e}"))
}
