#![allow(dead_code)]

use std::path::PathBuf;

use hadamard_fvp::{load_config, RunConfig};

pub fn example_config_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/hadamard_log.json")
}

pub fn example_config() -> RunConfig {
    load_config(example_config_path()).expect("shipped config loads")
}

/// splitmix64; enough for reproducible test points.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

pub const EXPRESSION_CORPUS: [&str; 30] = [
    "(Dx - sqrt(ln(t))/gamma(1.5))^2",
    "1+2*3",
    "-2^2",
    "(1+2)*3",
    "2^3^2",
    "(2^3)^2",
    "x",
    "-x",
    "--x",
    "-(x + 1)",
    "t - (x - Dx)",
    "t - x - Dx",
    "t / (x / Dx)",
    "t / x / Dx",
    "2^-1",
    "(-2)^2",
    "exp(-t) * sin(pi * x)",
    "abs(Dx) + cos(t)^2",
    "gamma(t + 0.5) / gamma(t)",
    "1.5e-3 * x^2 + 2E4",
    "((((x))))",
    "x * (t + Dx) * (t - Dx)",
    "-(2^x)^t",
    "sqrt(x^2 + Dx^2)",
    "ln(t)^0.5 / gamma(1.5)",
    "x - -Dx",
    "(x - (t - 1))^2",
    "pi",
    "1/(1 + exp(-x))",
    "0.25 * Dx^2 - x * t + 3",
];
