mod common;

use qcurve::curves::curve_value;
use qcurve::empirical_qf::EmpiricalQf;
use qcurve::rng::child_rng;
use qcurve::weibull::closed_curve;
use qcurve::CurveKind;

#[test]
fn empirical_curves_approach_closed_form() {
    for kind in CurveKind::ALL {
        let grid: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
        let med: Vec<f64> = [50usize, 200, 800]
            .iter()
            .map(|&n| {
                common::median(
                    (0..100u64)
                        .map(|r| {
                            let x = common::draw(&mut child_rng(5, (n as u64) << 32 | r), 2.0, n);
                            let q = EmpiricalQf::new(&x);
                            grid.iter()
                                .map(|p| (curve_value(&q, kind, *p).unwrap() - closed_curve(kind, 2.0, *p).unwrap()).abs())
                                .fold(0.0, f64::max)
                        })
                        .collect(),
                )
            })
            .collect();
        assert!(med[0] > med[1] && med[1] > med[2], "{kind}: {med:?}");
    }
}
