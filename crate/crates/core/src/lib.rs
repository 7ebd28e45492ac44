pub mod dynamics;
pub mod fixtures;
pub mod ident;
pub mod instance;
pub mod laws;
pub mod monad;
pub mod morphism;
pub mod rational;
pub mod schema;
pub mod transform;
