mod cli;
mod common;
mod oracles;
mod properties;
