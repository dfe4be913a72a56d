pub mod level;
pub mod numerics;
pub mod randomness;
pub mod samplers;
pub mod circuits;
pub mod oracle;
pub mod cli;
