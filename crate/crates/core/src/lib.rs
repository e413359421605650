pub mod laurent;
pub mod mahler;
pub mod modular;
pub mod picard_fuchs;
pub mod qexpansion;
pub mod registry;
pub mod series;
