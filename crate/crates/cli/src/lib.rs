//! Scene-driven front end for `photopol`.

pub mod commands;
pub mod error;
pub mod run;
pub mod scene;
