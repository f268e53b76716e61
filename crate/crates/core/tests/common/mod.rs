#![allow(dead_code)]

use std::path::PathBuf;

use mdik::kinematics::parse_model;
use mdik::Model;
use rand::Rng;

pub const MODELS: [&str; 4] = ["planar2r", "arm6r", "arm7r", "lift7"];

pub fn model_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(format!("{name}.json"))
}

pub fn load(name: &str) -> Model {
    let text = std::fs::read_to_string(model_path(name)).unwrap();
    parse_model(&text).unwrap()
}

/// Uniform configuration in the central `fraction` of every joint range.
pub fn random_q<R: Rng>(model: &Model, fraction: f64, rng: &mut R) -> Vec<f64> {
    model
        .lower_limits()
        .iter()
        .zip(model.upper_limits())
        .map(|(&l, u)| {
            let mid = 0.5 * (l + u);
            let half = 0.5 * (u - l) * fraction;
            rng.gen_range(mid - half..=mid + half)
        })
        .collect()
}
