mod common;

use common::{load, random_q, MODELS};
use mdik::kinematics::{
    forward_kinematics, geometric_jacobian, model_to_json, parse_model, stack_tasks,
};
use mdik::Model;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-6;

/// Central differences of FK: position directly, orientation through the
/// rotation vector of the relative rotation.
fn fd_jacobian(model: &Model, q: &[f64], frame: &str) -> Vec<[f64; 6]> {
    (0..q.len())
        .map(|j| {
            let mut qp = q.to_vec();
            let mut qm = q.to_vec();
            qp[j] += H;
            qm[j] -= H;
            let a = forward_kinematics(model, &qp, frame).unwrap();
            let b = forward_kinematics(model, &qm, frame).unwrap();
            let dp = (a.position - b.position).scale(0.5 / H);
            let w = (a.orientation * b.orientation.inverse())
                .rotation_vector()
                .scale(0.5 / H);
            [dp.x, dp.y, dp.z, w.x, w.y, w.z]
        })
        .collect()
}

fn check_jacobian(model: &Model, q: &[f64]) {
    for frame in model.frame_names() {
        let jac = geometric_jacobian(model, q, frame).unwrap();
        for (j, col) in fd_jacobian(model, q, frame).iter().enumerate() {
            for r in 0..6 {
                let d = (jac[(r, j)] - col[r]).abs();
                assert!(d < 1e-5, "{} {frame} J[{r},{j}] off by {d}", model.name());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobian_matches_finite_differences(which in 0usize..4, seed in any::<u64>()) {
        let model = load(MODELS[which]);
        let q = random_q(&model, 1.0, &mut ChaCha8Rng::seed_from_u64(seed));
        check_jacobian(&model, &q);
    }
}

#[test]
fn serialized_model_reproduces_forward_kinematics() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in MODELS {
        let model = load(name);
        let again: Model = parse_model(&model_to_json(&model)).unwrap();
        assert_eq!(again.dof(), model.dof());
        assert_eq!(again.lower_limits(), model.lower_limits());
        for _ in 0..20 {
            let q = random_q(&model, 1.0, &mut rng);
            for frame in model.frame_names() {
                let a = forward_kinematics(&model, &q, frame).unwrap();
                let b = forward_kinematics(&again, &q, frame).unwrap();
                assert!((a.position - b.position).norm() < 1e-12, "{name}/{frame}");
                assert!((a.orientation * b.orientation.inverse()).angle() < 1e-12);
            }
        }
    }
}

#[test]
fn five_frame_stack_has_thirty_rows() {
    let model = load("arm7r");
    let frames: Vec<&str> = model.frame_names().collect();
    assert_eq!(frames.len(), 5);
    let q = random_q(&model, 1.0, &mut ChaCha8Rng::seed_from_u64(11));
    let stacked = stack_tasks(&model, &q, &frames).unwrap();
    assert_eq!(stacked.shape(), (30, 7));
    for (b, frame) in frames.iter().enumerate() {
        let block = geometric_jacobian(&model, &q, frame).unwrap();
        for r in 0..6 {
            for c in 0..7 {
                assert_eq!(stacked[(6 * b + r, c)], block[(r, c)]);
            }
        }
    }
}

#[test]
fn single_precision_tracks_double() {
    let model = load("arm7r");
    let model32 = model.cast::<f32>();
    let q = random_q(&model, 1.0, &mut ChaCha8Rng::seed_from_u64(5));
    let q32: Vec<f32> = q.iter().map(|&v| v as f32).collect();
    let a = forward_kinematics(&model, &q, "tool").unwrap();
    let b = forward_kinematics(&model32, &q32, "tool").unwrap();
    let d = a.position - b.position.cast::<f64>();
    assert!(d.norm() < 1e-5);
}

#[test]
fn prismatic_column_is_its_axis() {
    let model = load("lift7");
    let q = random_q(&model, 1.0, &mut ChaCha8Rng::seed_from_u64(9));
    let jac = geometric_jacobian(&model, &q, "gripper").unwrap();
    // the lift is mounted vertically and nothing rotates before it
    assert!((jac[(2, 0)] - 1.0).abs() < 1e-12);
    for r in [0, 1, 3, 4, 5] {
        assert!(jac[(r, 0)].abs() < 1e-12);
    }
}

#[test]
fn primary_frame_is_the_outermost() {
    let expect = [
        ("planar2r", "tip"),
        ("arm6r", "tool"),
        ("arm7r", "tool"),
        ("lift7", "gripper"),
    ];
    for (name, frame) in expect {
        let model = load(name);
        assert_eq!(model.primary_frame(), Some(frame));
        assert_eq!(model.frame_dof(frame), Some(model.dof()));
    }
    assert_eq!(load("arm7r").frame_dof("elbow"), Some(4));
}
