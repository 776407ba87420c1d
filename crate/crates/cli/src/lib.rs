pub mod catalog;
pub mod pipeline;
pub mod report;
pub mod scene;
