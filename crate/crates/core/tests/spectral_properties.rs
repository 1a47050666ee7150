use qgeom::potentials::SchemeId;
use qgeom::spectral::{
    annulus_spectrum, area_ratio, curve_effective_spectrum, delta_sweep, sphere_spectrum,
    tube_band_spectrum, PlanarCurve, SpectralError, SweepProblem,
};

#[test]
fn sphere_shifts_differ_by_constants() {
    for n in 2..=5 {
        for r in [0.5, 1.0, 3.0] {
            let base = sphere_spectrum(n, r, SchemeId::Podolsky, 4)
                .unwrap()
                .eigenvalues;
            let thin = sphere_spectrum(n, r, SchemeId::ThinLayer, 4)
                .unwrap()
                .eigenvalues;
            let dirac = sphere_spectrum(n, r, SchemeId::DiracDistance, 4)
                .unwrap()
                .eigenvalues;
            let nf = n as f64;
            for i in 0..base.len() {
                assert!((dirac[i] - base[i] - (nf - 1.0).powi(2) / (8.0 * r * r)).abs() < 1e-14);
                assert!(
                    (thin[i] - base[i] - (nf - 1.0) * (nf - 3.0) / (8.0 * r * r)).abs() < 1e-14
                );
            }
            if n == 3 {
                assert_eq!(thin, base);
            }
        }
    }
}

#[test]
fn sphere_levels_carry_harmonic_multiplicities() {
    let r = sphere_spectrum(3, 1.0, SchemeId::Podolsky, 5).unwrap();
    assert_eq!(r.eigenvalues.len(), 36);
    let r = sphere_spectrum(2, 1.0, SchemeId::Podolsky, 3).unwrap();
    assert_eq!(r.eigenvalues, vec![0.0, 0.5, 0.5, 2.0, 2.0, 4.5, 4.5]);
}

#[test]
fn effective_operator_converges_at_second_order() {
    let c = PlanarCurve::ellipse(1.0, 0.6).unwrap();
    let e: Vec<Vec<f64>> = [128, 256, 512]
        .iter()
        .map(|&n| {
            curve_effective_spectrum(&c, SchemeId::Curve, n, 4)
                .unwrap()
                .eigenvalues
        })
        .collect();
    for i in 0..4 {
        let order = ((e[0][i] - e[1][i]) / (e[1][i] - e[2][i])).abs().log2();
        assert!(order >= 1.8, "level {i}: order {order}");
    }
}

#[test]
fn annulus_sweep_reaches_the_thin_layer_limit() {
    let problem = SweepProblem::Annulus {
        radius: 1.0,
        mode: 1,
        radial_grid: 200,
    };
    let table = delta_sweep(&problem, &[0.1, 0.05, 0.025]).unwrap();
    let limit = table.extrapolated.unwrap();
    assert!((limit - 0.375).abs() <= 1e-3, "{limit}");
    let rate = table.rate.unwrap();
    assert!((0.8..=2.2).contains(&rate), "{rate}");
    assert!((limit - 0.5).abs() > 0.1);
}

#[test]
fn annulus_examples() {
    let r = annulus_spectrum(1.0, 0.05, 2, 200).unwrap();
    let sub = r.subtracted().unwrap();
    assert!((sub[0] + 0.125).abs() < 5e-3);
    assert!((sub[2] - 1.875).abs() < 2e-2);
    assert!(matches!(
        annulus_spectrum(1.0, 1.0, 0, 100),
        Err(SpectralError::DeltaTooLarge { .. })
    ));
}

#[test]
fn wide_circle_tube_is_nearly_flat() {
    let c = PlanarCurve::circle(50.0).unwrap();
    let r = tube_band_spectrum(&c, 0.02, 64, 6, 1).unwrap();
    let sub = r.subtracted().unwrap()[0];
    assert!((sub + 5e-5).abs() < 1e-5, "{sub}");
}

#[test]
fn area_ratio_examples() {
    let a = area_ratio(&[1.0, 1.0], 0.1).unwrap();
    assert!((a.exact - 1.21).abs() < 1e-14 && a.gap() < 1e-14);
    let a = area_ratio(&[1.0, 2.0, 3.0], 0.1).unwrap();
    assert!((a.exact - 1.716).abs() < 1e-12 && (a.expansion - 1.71).abs() < 1e-12);
    assert!(matches!(
        area_ratio(&[-20.0], 0.1),
        Err(SpectralError::FoldOver { .. })
    ));
}
