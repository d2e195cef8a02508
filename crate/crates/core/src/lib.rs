pub mod analytics;
pub mod channel;
pub mod error;
pub mod model;
pub mod qacs;
pub mod simkit;
