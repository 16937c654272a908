//! Control-path round trips: imitation and accessibility controls must
//! regenerate their targets through the controlled flow at fourth order.

use ivri_core::control::{
    accessibility_path, control_for_accessibility, control_for_imitation, integrate_controlled,
    verify_control, ConstantInput, InputCurrent, SinusoidInput,
};
use ivri_core::model::{HHParams, IvriModel};
use ivri_core::noise::{NoiseSpec, Signal};

fn ou_model() -> IvriModel {
    IvriModel::hh(HHParams::default(), NoiseSpec::ou(1.0, 0.5, Signal::Constant(0.0)).unwrap())
}

fn imitation_sup_error(model: &IvriModel, input: &dyn InputCurrent, t: f64, dt: f64) -> f64 {
    let x0 = [0.0, 0.3177, 0.0529, 0.5961, 0.0];
    // Control grid at half the integration step keeps the RK4 stages on
    // samples.
    let control = control_for_imitation(model, input, &x0, t, dt / 2.0).unwrap();
    let (_, sup) = verify_control(model, &control).unwrap();
    sup
}

#[test]
fn imitation_reproduces_constant_input_flow() {
    let model = ou_model();
    let sup = imitation_sup_error(&model, &ConstantInput(15.0), 25.0, 0.01);
    assert!(sup <= 1e-4, "sup error {sup}");
}

#[test]
fn imitation_reproduces_oscillating_input_flow() {
    let model = ou_model();
    let input = SinusoidInput { amplitude: 15.0, period: 12.56 };
    let sup = imitation_sup_error(&model, &input, 25.0, 0.01);
    assert!(sup <= 1e-4, "sup error {sup}");
}

#[test]
fn imitation_error_decays_at_fourth_order() {
    let model = ou_model();
    let input = SinusoidInput { amplitude: 15.0, period: 12.56 };
    let e1 = imitation_sup_error(&model, &input, 10.0, 0.02);
    let e2 = imitation_sup_error(&model, &input, 10.0, 0.01);
    let ratio = e1 / e2;
    assert!((9.0..=26.0).contains(&ratio), "order ratio {ratio} ({e1} -> {e2})");
}

#[test]
fn accessibility_control_regenerates_the_path() {
    let model = ou_model();
    let x = [-3.0, 0.25, 0.08, 0.5, 0.4];
    let zp = accessibility_path(&model, &x, 5.0, 8.0, 0.005).unwrap();
    let control = control_for_accessibility(&model, &zp).unwrap();
    let (_, sup) = verify_control(&model, &control).unwrap();
    assert!(sup <= 1e-4, "accessibility reproduction error {sup}");
}

#[test]
fn controlled_flow_preserves_first_coordinate_identity() {
    // d(X_1 - X_m) = F dt along the controlled ODE; check the increments
    // against trapezoid quadrature of F over the generated path. A gentle
    // input keeps the path smooth so the quadrature itself stays accurate.
    let model = ou_model();
    let input = ConstantInput(0.05);
    let x0 = [0.0, 0.3177, 0.0529, 0.5961, 0.0];
    let control = control_for_imitation(&model, &input, &x0, 10.0, 0.005).unwrap();
    let gen = integrate_controlled(&model, &x0, &control).unwrap();
    let mut quad = 0.0;
    let mut prev_f = (model.f)(&gen.state(0)[..4]);
    for i in 1..gen.len() {
        let f = (model.f)(&gen.state(i)[..4]);
        quad += 0.5 * (prev_f + f) * (gen.time(i) - gen.time(i - 1));
        prev_f = f;
        let lhs = (gen.state(i)[0] - gen.state(0)[0]) - (gen.state(i)[4] - gen.state(0)[4]);
        assert!(
            (lhs - quad).abs() <= 1e-6,
            "coupling defect {} at t = {}",
            lhs - quad,
            gen.time(i)
        );
    }
}

#[test]
fn ou_stratonovich_drift_equals_ito_drift() {
    let model = ou_model();
    let x = [1.0, 0.4, 0.2, 0.5, 0.7];
    let mut ito = [0.0; 5];
    let mut strat = [0.0; 5];
    model.drift(0.3, &x, &mut ito);
    model.strat_drift(0.3, &x, &mut strat);
    assert_eq!(ito, strat);
}
