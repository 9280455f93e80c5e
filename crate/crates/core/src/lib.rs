pub mod bench;
pub mod ground;
pub mod logic;
pub mod parser;
pub mod satset;
pub mod smt;
pub mod tensor;
