//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured numbers (`--nocapture` shows them).
//!
//! Reference values come from the published concentric/corrugated results
//! this tool reproduces; tolerances are pinned here, not configurable.

use approx::assert_relative_eq;
use casimir_cli::fit::fit_amplitude;
use casimir_core::energy::{
    casimir_energy, default_torque_step, sweep, torque, CorrugatedPair, EnergyConfig, SweepAxis,
    SweepSpec,
};
use casimir_core::geometry::{BoundaryCurve, PointGrid};
use casimir_core::kernel::{CollocationSetup, Polarization};
use casimir_core::oracles;
use casimir_core::quadrature::QuadratureControls;

fn quad(tol: f64) -> QuadratureControls {
    QuadratureControls {
        rel_tolerance: tol,
        ..Default::default()
    }
}

fn energy(
    inner: BoundaryCurve,
    outer: BoundaryCurve,
    s: usize,
    pols: &[Polarization],
    tol: f64,
) -> casimir_core::energy::EnergyResult {
    let cfg = EnergyConfig {
        inner,
        outer,
        s,
        polarizations: pols.to_vec(),
        quadrature: quad(tol),
    };
    casimir_energy(&cfg).expect("energy computation")
}

/// Criterion 1: the matrix pipeline agrees with the concentric mode-sum
/// formula at matched truncation |m| <= S=10 to 1e-6 relative, for
/// alpha in {1.5, 2, 3, 4}, TM and TE.
#[test]
fn criterion_1_diagonal_oracle_equivalence() {
    let s = 10;
    for &alpha in &[1.5, 2.0, 3.0, 4.0] {
        for pol in [Polarization::Tm, Polarization::TeRadial] {
            let pipeline = energy(
                BoundaryCurve::Circle { radius: 1.0 },
                BoundaryCurve::Circle { radius: alpha },
                s,
                &[pol],
                1e-8,
            )
            .energy;
            let oracle = match pol {
                Polarization::Tm => oracles::concentric_tm(1.0, alpha, &quad(1e-8), Some(s)),
                _ => oracles::concentric_te(1.0, alpha, &quad(1e-8), Some(s)),
            }
            .expect("oracle")
            .energy;
            let rel = ((pipeline - oracle) / oracle).abs();
            println!(
                "criterion 1 [{} alpha={alpha}]: pipeline={pipeline:.10e} oracle={oracle:.10e} rel={rel:.2e} {}",
                pol.label(),
                if rel < 1e-6 { "PASS" } else { "FAIL" }
            );
            assert!(
                rel < 1e-6,
                "pipeline/oracle mismatch {rel:.3e} at alpha={alpha}"
            );
        }
    }
}

/// Criterion 2: the perturbative amplitude reproduces the reference table's
/// analytic column — the h̃=0.01 rows to the printed digits (within one unit
/// of the last printed digit), the h̃=0.05 and 0.1 rows to <= 1% or print
/// precision, whichever is looser.
#[test]
fn criterion_2_reference_table_analytic_column() {
    // (nu, alpha, h̃, printed value, one unit in the last printed digit);
    // the h̃=0.3 rows sit beyond the perturbative regime but the analytic
    // column itself stays exactly quadratic in h̃
    let rows: [(u32, f64, f64, f64, f64); 12] = [
        (3, 2.0, 0.01, 3.0414e-5, 1e-9),
        (3, 2.5, 0.01, 3.925e-6, 1e-9),
        (5, 2.0, 0.01, 2.046e-5, 1e-8),
        (3, 2.0, 0.05, 7.60e-4, 1e-6),
        (3, 2.0, 0.10, 3.0e-3, 1e-4),
        (3, 2.0, 0.30, 2.7e-2, 1e-3),
        (3, 2.5, 0.05, 9.81e-5, 1e-7),
        (3, 2.5, 0.10, 3.92e-4, 1e-6),
        (3, 2.5, 0.30, 3.53e-3, 1e-5),
        (5, 2.0, 0.05, 5.11e-4, 1e-6),
        (5, 2.0, 0.10, 2.04e-3, 1e-5),
        (5, 2.0, 0.30, 1.8e-2, 1e-3),
    ];
    for &(nu, alpha, h, printed, ulp) in &rows {
        let value = oracles::perturbative_amplitude(nu, alpha, h).expect("amplitude");
        let tolerance = if h > 0.011 {
            (0.01 * printed).max(ulp)
        } else {
            ulp
        };
        let ok = (value - printed).abs() <= tolerance;
        println!(
            "criterion 2 [nu={nu} alpha={alpha} h={h}]: amplitude={value:.8e} printed={printed:.8e} tol={tolerance:.1e} {}",
            if ok { "PASS" } else { "FAIL" }
        );
        assert!(
            ok,
            "amplitude {value:.8e} misses printed {printed:.8e} by {:.2e} (tol {tolerance:.1e})",
            (value - printed).abs()
        );
    }
}

/// Criterion 3: the full TM pipeline's phi0 sweep + cosine fit reproduces the
/// reference numerical column: 0.00003044 within 2% at h̃=0.01, and the
/// agreement pattern (numerical >= analytic, gap growing with h̃) for
/// h̃ in {0.01, 0.05, 0.1}.
#[test]
fn criterion_3_reference_table_numerical_column() {
    let s = 18;
    let nu = 3u32;
    let period = 2.0 * std::f64::consts::PI / nu as f64;
    let phis: Vec<f64> = (0..13).map(|i| period * i as f64 / 12.0).collect();

    let mut gaps = Vec::new();
    for &h in &[0.01, 0.05, 0.1] {
        let pair = CorrugatedPair {
            inner_radius: 1.0,
            outer_radius: 2.0,
            amplitude: h,
            frequency: nu,
        };
        let energies: Vec<f64> = phis
            .iter()
            .map(|&phi0| {
                let mut cfg = pair.config(phi0, s);
                cfg.polarizations = vec![Polarization::Tm];
                cfg.quadrature = quad(1e-8);
                casimir_energy(&cfg).expect("sweep point").energy
            })
            .collect();
        let fit = fit_amplitude(&phis, &energies, nu).expect("fit");
        let analytic = oracles::perturbative_amplitude(nu, 2.0, h).expect("analytic");
        let gap = fit.amplitude.abs() / analytic - 1.0;
        println!(
            "criterion 3 [h={h}]: |A_num|={:.6e} A_analytic={analytic:.6e} gap={gap:+.4e} residual={:.2e}",
            fit.amplitude.abs(),
            fit.residual
        );
        if (h - 0.01).abs() < 1e-12 {
            let rel = (fit.amplitude.abs() - 3.044e-5).abs() / 3.044e-5;
            println!(
                "criterion 3 [h=0.01 vs printed 0.00003044]: rel={rel:.2e} {}",
                if rel < 0.02 { "PASS" } else { "FAIL" }
            );
            assert!(
                rel < 0.02,
                "fit {:.6e} misses 0.00003044 by {rel:.2e}",
                fit.amplitude.abs()
            );
            assert!(
                fit.residual < 0.02,
                "cosine model should fit small corrugations to 2%, residual {:.2e}",
                fit.residual
            );
        }
        assert!(
            gap > -5e-3,
            "numerical amplitude {:.6e} fell below analytic {analytic:.6e}",
            fit.amplitude.abs()
        );
        gaps.push(gap);
    }
    let growing = gaps.windows(2).all(|w| w[1] > w[0]);
    println!(
        "criterion 3 [pattern]: gaps={gaps:?} growing={growing} {}",
        if growing { "PASS" } else { "FAIL" }
    );
    assert!(
        growing,
        "numerical-vs-analytic gap must grow with h̃: {gaps:?}"
    );
}

/// Beyond the perturbative regime the energy oscillation develops sharper
/// peaks: the cosine fit that nails h̃=0.01 must degrade visibly at h̃=0.3.
#[test]
fn fit_model_breaks_down_at_large_amplitude() {
    let nu = 3u32;
    let period = 2.0 * std::f64::consts::PI / nu as f64;
    let phis: Vec<f64> = (0..13).map(|i| period * i as f64 / 12.0).collect();
    let pair = CorrugatedPair {
        inner_radius: 1.0,
        outer_radius: 2.0,
        amplitude: 0.3,
        frequency: nu,
    };
    let energies: Vec<f64> = phis
        .iter()
        .map(|&phi0| {
            let mut cfg = pair.config(phi0, 18);
            cfg.polarizations = vec![Polarization::Tm];
            cfg.quadrature = quad(1e-7);
            casimir_energy(&cfg).expect("sweep point").energy
        })
        .collect();
    let fit = fit_amplitude(&phis, &energies, nu).expect("fit");
    println!(
        "fit breakdown: h=0.3 residual={:.3e} (h=0.01 gives ~1e-4)",
        fit.residual
    );
    assert!(
        fit.residual > 0.01,
        "the cosine model should be visibly inadequate at h̃=0.3, residual {:.3e}",
        fit.residual
    );
}

/// Criterion 4: eccentric alpha=3, delta=0.1 — the energy moves by less than
/// 1e-5 relative between the S=10 and S=11 grids.
#[test]
fn criterion_4_convergence_in_mode_cutoff() {
    let pols = [Polarization::Tm, Polarization::TeRadial];
    let outer = BoundaryCurve::EccentricCircle {
        radius: 3.0,
        center: (0.1, 0.0),
    };
    let e10 = energy(
        BoundaryCurve::Circle { radius: 1.0 },
        outer.clone(),
        10,
        &pols,
        1e-8,
    )
    .energy;
    let e11 = energy(
        BoundaryCurve::Circle { radius: 1.0 },
        outer,
        11,
        &pols,
        1e-8,
    )
    .energy;
    let rel = ((e11 - e10) / e10).abs();
    println!(
        "criterion 4: E(S=10)={e10:.10e} E(S=11)={e11:.10e} rel={rel:.2e} {}",
        if rel < 1e-5 { "PASS" } else { "FAIL" }
    );
    assert!(rel < 1e-5, "S-convergence violated: {rel:.3e}");
}

/// Criterion 5: concentric TM+TE at alpha=1.05 lands within 10% of the
/// parallel-plate proximity estimate −π³a/(360 d³).
#[test]
fn criterion_5_proximity_sanity_band() {
    let quad_ctl = quad(1e-7);
    let tm = oracles::concentric_tm(1.0, 1.05, &quad_ctl, None)
        .expect("tm")
        .energy;
    let te = oracles::concentric_te(1.0, 1.05, &quad_ctl, None)
        .expect("te")
        .energy;
    let total = tm + te;
    let pfa = oracles::pfa_concentric(1.0, 1.05);
    let ratio = total / pfa;
    let ok = (ratio - 1.0).abs() < 0.10;
    println!(
        "criterion 5: TM={tm:.6e} TE={te:.6e} total={total:.6e} PFA={pfa:.6e} ratio={ratio:.4} {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "PFA band violated: ratio {ratio:.4}");
}

/// Criterion 6: the property suite — reality and sign of ln Q at every node,
/// rotation invariance, scale covariance, torque parity/periodicity, ellipse
/// symmetry and instability, TM/TE ordering.
#[test]
fn criterion_6_property_suite() {
    // reality + sign on representative asymmetric geometries
    let geometries: Vec<(BoundaryCurve, BoundaryCurve)> = vec![
        (
            BoundaryCurve::Circle { radius: 1.0 },
            BoundaryCurve::EccentricCircle {
                radius: 2.0,
                center: (0.3, 0.0),
            },
        ),
        (
            BoundaryCurve::CorrugatedCircle {
                mean_radius: 1.0,
                amplitude: 0.1,
                frequency: 3,
                phase: 0.0,
            },
            BoundaryCurve::CorrugatedCircle {
                mean_radius: 2.0,
                amplitude: 0.1,
                frequency: 3,
                phase: std::f64::consts::PI / 7.0,
            },
        ),
        (
            BoundaryCurve::Circle { radius: 1.0 },
            BoundaryCurve::Ellipse {
                semi_minor: 4.0,
                semi_major: 4.33,
                center: (-0.4, -0.3),
            },
        ),
    ];
    for (inner, outer) in &geometries {
        let setup = CollocationSetup::new(inner, outer, 10, Polarization::Tm).unwrap();
        for i in 0..20 {
            let y = 0.02 * (1.5f64).powi(i);
            let lq = setup.log_q(y).unwrap();
            assert!(lq.value <= 1e-9, "lnQ={} > 0 at y={y}", lq.value);
            assert!(
                lq.im_residual < 1e-8 * lq.value.abs().max(1.0),
                "reality violated at y={y}: {}",
                lq.im_residual
            );
        }
    }
    println!("criterion 6 [lnQ real and <= 0 at every node]: PASS");

    // global rotation invariance to 1e-10
    let gi = PointGrid::sample(&BoundaryCurve::Circle { radius: 1.0 }, 9).unwrap();
    let go = PointGrid::sample(
        &BoundaryCurve::EccentricCircle {
            radius: 2.0,
            center: (0.35, 0.1),
        },
        9,
    )
    .unwrap();
    let base = CollocationSetup::from_grids(gi.clone(), go.clone(), Polarization::Tm).unwrap();
    let v0 = base.log_q(0.9).unwrap().value;
    for angle in [0.37f64, 1.23, 4.56] {
        let rot =
            CollocationSetup::from_grids(gi.rotate(angle), go.rotate(angle), Polarization::Tm)
                .unwrap();
        let v = rot.log_q(0.9).unwrap().value;
        assert!(
            (v - v0).abs() < 1e-10,
            "rotation by {angle} moved lnQ by {:.3e}",
            (v - v0).abs()
        );
    }
    println!("criterion 6 [rotation invariance 1e-10]: PASS");

    // scale covariance of the energy to 1e-8
    let lambda = 2.5;
    let e = energy(
        BoundaryCurve::Circle { radius: 1.0 },
        BoundaryCurve::EccentricCircle {
            radius: 2.0,
            center: (0.3, 0.0),
        },
        8,
        &[Polarization::Tm],
        1e-9,
    )
    .energy;
    let mut scaled_cfg = EnergyConfig {
        inner: BoundaryCurve::Circle { radius: lambda },
        outer: BoundaryCurve::EccentricCircle {
            radius: 2.0 * lambda,
            center: (0.3 * lambda, 0.0),
        },
        s: 8,
        polarizations: vec![Polarization::Tm],
        quadrature: quad(1e-9),
    };
    scaled_cfg.quadrature.y_min = 1e-6 / lambda;
    let e_scaled = casimir_energy(&scaled_cfg).unwrap().energy;
    let rel = (e_scaled * lambda * lambda / e - 1.0).abs();
    println!(
        "criterion 6 [scale covariance]: rel={rel:.2e} {}",
        if rel < 1e-8 { "PASS" } else { "FAIL" }
    );
    assert!(rel < 1e-8, "scale covariance violated: {rel:.3e}");

    // torque: odd in phi0 (zero at alignment), periodic with 2π/ν
    let pair = CorrugatedPair {
        inner_radius: 1.0,
        outer_radius: 2.0,
        amplitude: 0.05,
        frequency: 3,
    };
    let step = default_torque_step(3);
    let t0 = torque(&pair, 12, &[Polarization::Tm], &quad(1e-7), 0.0, step)
        .unwrap()
        .torque;
    assert!(t0.abs() < 1e-8, "torque at phi0=0 is {t0:.3e}");
    let phi = 0.31;
    let t1 = torque(&pair, 12, &[Polarization::Tm], &quad(1e-7), phi, step)
        .unwrap()
        .torque;
    let t2 = torque(
        &pair,
        12,
        &[Polarization::Tm],
        &quad(1e-7),
        phi + 2.0 * std::f64::consts::PI / 3.0,
        step,
    )
    .unwrap()
    .torque;
    let rel = ((t2 - t1) / t1).abs();
    println!(
        "criterion 6 [torque]: T(0)={t0:.2e}, T({phi})={t1:.6e}, periodic rel={rel:.2e} {}",
        if rel < 1e-4 { "PASS" } else { "FAIL" }
    );
    assert!(rel < 1e-4, "torque periodicity violated: {rel:.3e}");

    // ellipse: energy even in eps_y, center an unstable equilibrium both ways
    let ellipse = |center: (f64, f64)| BoundaryCurve::Ellipse {
        semi_minor: 4.0,
        semi_major: 4.33,
        center,
    };
    let e_at = |center: (f64, f64)| {
        energy(
            BoundaryCurve::Circle { radius: 1.0 },
            ellipse(center),
            12,
            &[Polarization::Tm],
            1e-7,
        )
        .energy
    };
    let e_center = e_at((0.0, 0.0));
    let e_up = e_at((0.0, -0.6));
    let e_down = e_at((0.0, 0.6));
    assert_relative_eq!(e_up, e_down, max_relative = 1e-9);
    assert!(
        e_center > e_up,
        "center must be a local maximum along y: E(0)={e_center:.6e}, E(±0.6)={e_up:.6e}"
    );
    let e_right = e_at((-0.6, 0.0));
    assert!(
        e_center > e_right,
        "center must be a local maximum along x: E(0)={e_center:.6e}, E(0.6)={e_right:.6e}"
    );
    println!(
        "criterion 6 [ellipse]: E(0)={e_center:.6e} > E(±0.6y)={e_up:.6e}, E(0.6x)={e_right:.6e}; even to 1e-9: PASS"
    );

    // |E_TM| > |E_TE| at alpha = 4
    let tm = energy(
        BoundaryCurve::Circle { radius: 1.0 },
        BoundaryCurve::Circle { radius: 4.0 },
        10,
        &[Polarization::Tm],
        1e-7,
    )
    .energy;
    let te = energy(
        BoundaryCurve::Circle { radius: 1.0 },
        BoundaryCurve::Circle { radius: 4.0 },
        10,
        &[Polarization::TeRadial],
        1e-7,
    )
    .energy;
    println!(
        "criterion 6 [polarization ordering]: |TM|={:.4e} > |TE|={:.4e} {}",
        tm.abs(),
        te.abs(),
        if tm.abs() > te.abs() { "PASS" } else { "FAIL" }
    );
    assert!(tm.abs() > te.abs());
}

/// Criterion 7: figure trends — ΔE decreasing with eccentricity, |E|
/// decreasing with the radius ratio, and the parabola energy monotonic
/// through the focal point.
#[test]
fn criterion_7_figure_trends() {
    // ΔE₁₂(δ) decreasing at alpha=2
    let spec = SweepSpec {
        base: EnergyConfig {
            inner: BoundaryCurve::Circle { radius: 1.0 },
            outer: BoundaryCurve::EccentricCircle {
                radius: 2.0,
                center: (0.0, 0.0),
            },
            s: 10,
            polarizations: vec![Polarization::Tm, Polarization::TeRadial],
            quadrature: quad(1e-7),
        },
        axis: SweepAxis::Delta,
        values: vec![0.0, 0.15, 0.3, 0.45],
        subtract_baseline: true,
        deterministic: true,
    };
    let points = sweep(&spec).unwrap();
    let deltas: Vec<f64> = points
        .iter()
        .map(|p| p.delta_vs_baseline.expect("baseline subtraction"))
        .collect();
    assert!(deltas[0].abs() < 1e-10, "ΔE(0) = {:.3e}", deltas[0]);
    let monotone = deltas.windows(2).all(|w| w[1] < w[0]);
    println!(
        "criterion 7 [ΔE vs δ]: {deltas:?} decreasing={monotone} {}",
        if monotone { "PASS" } else { "FAIL" }
    );
    assert!(monotone, "ΔE must decrease with eccentricity: {deltas:?}");

    // |E| decreasing with alpha for concentric cylinders
    let mut prev = f64::INFINITY;
    let mut magnitudes = Vec::new();
    for &alpha in &[1.5, 2.0, 3.0, 4.0] {
        let tm = oracles::concentric_tm(1.0, alpha, &quad(1e-7), None)
            .unwrap()
            .energy;
        let te = oracles::concentric_te(1.0, alpha, &quad(1e-7), None)
            .unwrap()
            .energy;
        let mag = (tm + te).abs();
        assert!(mag < prev, "|E({alpha})| = {mag:.4e} not below {prev:.4e}");
        prev = mag;
        magnitudes.push(mag);
    }
    println!("criterion 7 [|E| vs alpha]: {magnitudes:?} decreasing PASS");

    // parabola: monotonic through the focus, no feature at eps_x = 0
    let e_at = |eps_x: f64| {
        energy(
            BoundaryCurve::Circle { radius: 1.0 },
            BoundaryCurve::Parabola {
                focal_distance: 4.0,
                theta_cut: 2.0,
                center: (-eps_x, 0.0),
            },
            19,
            &[Polarization::Tm],
            1e-6,
        )
        .energy
    };
    let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let es: Vec<f64> = xs.iter().map(|&x| e_at(x)).collect();
    let monotone = es.windows(2).all(|w| w[1] < w[0]);
    println!(
        "criterion 7 [parabola through focus]: E={es:?} monotone={monotone} {}",
        if monotone { "PASS" } else { "FAIL" }
    );
    assert!(
        monotone,
        "parabola energy not monotonic through the focus: {es:?}"
    );
}
