//! Toric varieties as rational fans: orbit decomposition, open subfans,
//! star subdivisions and completions.

mod complete;
mod fan;
pub mod lattice;
mod object;
mod subdivide;

pub use complete::{complete, complete_surface};
pub(crate) use fan::{coordinates_q, to_q};
pub use fan::{build_fan, fan_properties, Cone, Fan, FanFile, FanProperties};
pub use object::{class_of, open_subfan, OpenSubfan, ToricObject, ToricVariety};
pub use subdivide::{barycentric_ray, star_subdivide, Subdivision};
