//! Motion planning for unit-disk robots in polygonal workspaces.
//!
//! The crate builds the free space of a workspace, computes geodesics and
//! optimal start/target assignments, and plans collision-free motions with
//! two strategies: the ε-overlap planner ([`eps_planner`]) and the corridor
//! opening planner ([`exodus`]). Every plan can be checked independently with
//! [`validator::validate_plan`] and drawn with
//! [`render::render_svg`].

pub mod assignment;
pub mod eps_planner;
pub mod error;
pub mod exodus;
pub mod fixtures;
pub mod free_space;
pub mod geodesics;
pub mod geometry;
pub mod instance;
pub mod render;
pub mod validator;

pub use error::{Error, Result};
pub use geometry::Point;
pub use instance::Instance;
