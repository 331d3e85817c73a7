//! Small-step semantics over `⟨I, O, H, c⟩`.

pub mod bits;
pub mod eval;
pub mod step;

pub use bits::{deserialize, init_value, serialize, to_bit_string, to_hex, BitStream, Bits, FieldRecord};
pub use eval::{apply_op, eval_expression, Fault, HeaderMap};
pub use step::{format_trace, run, step, Config, Rule, RunResult, Trace, TraceEntry};

#[cfg(test)]
mod tests;
