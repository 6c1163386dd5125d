//! Builtin motivic measures: ring substitutions out of K₀(Var).

mod registry;
mod value;
mod weights;

pub use registry::{Coeff, MeasureRegistry, Registration};
pub use value::{MeasureSpec, MeasureValue};
pub use weights::{h_vector, weight_report, WeightEntry, WeightReport};

use crate::error::Result;
use crate::kring::KClass;

/// Substitutes the value of `L` under `spec`. Residual generators must be
/// purely Lefschetz; use [`apply_measure_with`] to supply their values.
pub fn apply_measure(spec: MeasureSpec, cls: &KClass) -> Result<MeasureValue> {
    apply_measure_with(spec, cls, &MeasureRegistry::new())
}

pub fn apply_measure_with(spec: MeasureSpec, cls: &KClass, registry: &MeasureRegistry) -> Result<MeasureValue> {
    cls.substitute(
        spec.zero(),
        |n| spec.integer(n),
        &spec.lefschetz(),
        |g| registry.lookup(g, spec),
        |a, b| a.add(&b),
        |a, b| a.mul(b),
    )
}
