pub mod config;
pub mod mesh;
pub mod report;
pub mod scene;
pub mod table;
