//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines; thresholds are pinned in the assertions.

use num_complex::Complex64;
use twistor_lines::sample::Sampler;
use twistor_lines::{
    act_on_params, act_on_space, eval_line, fiber_zero_point, incidence_map, jacobian,
    limit_curve, real_structure, solve_fiber_zero, solve_line_through, swap_involution,
    transport_on_k, ChordalTolerance, Family, FamilyClass, FiberZeroPoint, LimitDirection,
    LineParams, SpacePoint, SpherePoint,
};

fn report(index: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {index} ({name}): {} - {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_foliation() {
    let tol = 1e-9;
    let solver_tol = ChordalTolerance::default();
    let mut sampler = Sampler::new(0xF0_01);
    let mut max_roundtrip = 0.0f64;
    let mut cover_violations = 0usize;
    let mut points = 0usize;

    for shell in [0.5, 1.0, 2.0] {
        for _ in 0..2000 {
            let (x, y) = sampler.off_diagonal_pair(1e-6);
            let t = sampler.circle_point(shell);
            let p = SpacePoint::new(x, y, t);
            let mut moduli = [0.0f64; 2];
            for (k, family) in [Family::Mplus, Family::Mminus].into_iter().enumerate() {
                let (params, _) = solve_line_through(&p, family, &solver_tol)
                    .expect("solvable off-diagonal point");
                let q = incidence_map(&params, &t).unwrap();
                let err = x.chordal_distance(&q.x).max(y.chordal_distance(&q.y));
                max_roundtrip = max_roundtrip.max(err);
                moduli[k] = params.a_modulus();
            }
            if !(moduli[0] < 1.0 && moduli[1] > 1.0) {
                cover_violations += 1;
            }
            points += 1;
        }
    }

    // Blown-up t = 0 fiber: 500 (d, v) points solved in the plus family.
    let mut max_fiber = 0.0f64;
    for i in 0..500 {
        let d = sampler.sphere_point();
        let v = if i == 0 {
            SpherePoint::zero()
        } else {
            SpherePoint::from_affine(Complex64::from_polar(
                sampler.log_range(1e-3, 1e3),
                sampler.angle(),
            ))
        };
        let params = solve_fiber_zero(&FiberZeroPoint { d, v }, Family::Mplus).unwrap();
        if params.classify() == FamilyClass::C1 {
            assert!(v.is_zero());
            continue;
        }
        let back = fiber_zero_point(&params).unwrap();
        max_fiber = max_fiber.max(back.v.chordal_distance(&v));
    }

    let ok = max_roundtrip <= tol && max_fiber <= tol && cover_violations == 0;
    report(
        1,
        "foliation",
        ok,
        &format!(
            "{points} generic + 500 fiber points, max roundtrip {max_roundtrip:.3e}, \
             fiber {max_fiber:.3e}, double-cover violations {cover_violations}"
        ),
    );
    assert!(ok);
}

/// Independent finite-difference oracle for criterion 2, written out in
/// full rather than shared with the library's harness.
mod fd_oracle {
    use super::*;

    fn det4(mut m: [[f64; 4]; 4]) -> f64 {
        let mut det = 1.0;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
                .unwrap();
            if m[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            det *= m[col][col];
            let pivot_row = m[col];
            for row in m.iter_mut().skip(col + 1) {
                let f = row[col] / pivot_row[col];
                for (x, p) in row.iter_mut().zip(pivot_row).skip(col) {
                    *x -= f * p;
                }
            }
        }
        det
    }

    pub fn real_jacobian(d: Complex64, a: Complex64, t: Complex64, h: f64) -> Option<f64> {
        let f = |v: [f64; 4]| -> Option<[f64; 4]> {
            let params =
                LineParams::from_affine(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]));
            let p = eval_line(&params, &SpherePoint::from_affine(t)).ok()?;
            let x = p.x.to_affine()?;
            let y = p.y.to_affine()?;
            Some([x.re, x.im, y.re, y.im])
        };
        let v0 = [d.re, d.im, a.re, a.im];
        let mut jac = [[0.0; 4]; 4];
        for col in 0..4 {
            let (mut vp, mut vm) = (v0, v0);
            vp[col] += h;
            vm[col] -= h;
            let (fp, fm) = (f(vp)?, f(vm)?);
            for row in 0..4 {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        Some(det4(jac))
    }
}

#[test]
fn criterion_2_jacobian() {
    let mut sampler = Sampler::new(0xF0_02);
    let mut max_rel = 0.0f64;
    let mut checked = 0usize;
    while checked < 1000 {
        let d = Complex64::from_polar(sampler.log_range(0.1, 10.0), sampler.angle());
        let m = sampler.log_range(0.1, 10.0);
        if (m - 1.0).abs() < 1e-4 {
            continue;
        }
        let a = Complex64::from_polar(m, sampler.angle());
        let t = Complex64::from_polar(sampler.log_range(0.5, 2.0), sampler.angle());
        let tp = SpherePoint::from_affine(t);
        let p = eval_line(&LineParams::from_affine(d, a), &tp).unwrap();
        let bounded = |z: &SpherePoint| z.to_affine().map(|w| w.norm() < 1e3).unwrap_or(false);
        if !bounded(&p.x) || !bounded(&p.y) {
            continue;
        }
        let fd = match fd_oracle::real_jacobian(d, a, t, 1e-5) {
            Some(v) if v != 0.0 => v,
            _ => continue,
        };
        let j = jacobian(&LineParams::from_affine(d, a), &tp).unwrap();
        assert_eq!(
            j.real_det.signum(),
            fd.signum(),
            "sign convention must be constant"
        );
        max_rel = max_rel.max((j.real_det.abs() - fd.abs()).abs() / fd.abs());
        checked += 1;
    }
    let fd_ok = max_rel <= 1e-5;

    // Zero set: on |a| = 1 the ratio |J|/scale collapses, at least 1e-6 away
    // it clears the same threshold.
    let mut max_on_k = 0.0f64;
    let mut min_off_k = f64::INFINITY;
    for _ in 0..200 {
        let params = sampler.k_params();
        let t = sampler.bounded_point(0.5, 2.0);
        let j = jacobian(&params, &t).unwrap();
        max_on_k = max_on_k.max(j.real_det.abs() / j.scale);
    }
    for _ in 0..500 {
        let d = sampler.sphere_point();
        let offset = sampler.log_range(1e-6, 1.0);
        let m = if sampler.uniform() < 0.5 {
            1.0 + offset
        } else {
            1.0 / (1.0 + offset)
        };
        let a = SpherePoint::from_affine(Complex64::from_polar(m, sampler.angle()));
        let t = sampler.bounded_point(0.5, 2.0);
        let j = jacobian(&LineParams::new(d, a), &t).unwrap();
        min_off_k = min_off_k.min(j.real_det.abs() / j.scale);
    }
    let zero_ok = max_on_k <= 1e-8 && min_off_k > 1e-8;

    let ok = fd_ok && zero_ok;
    report(
        2,
        "jacobian",
        ok,
        &format!(
            "1000 points, |closed| vs |finite-difference| rel {max_rel:.3e}; \
             |J|/scale on K {max_on_k:.3e}, off K {min_off_k:.3e}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_k_lies_in_q() {
    let mut sampler = Sampler::new(0xF0_03);
    let mut max_dist = 0.0f64;
    for _ in 0..1000 {
        let params = sampler.k_params();
        let t = sampler.sphere_point();
        let p = eval_line(&params, &t).unwrap();
        max_dist = max_dist.max(p.x.chordal_distance(&p.y));
    }
    let ok = max_dist <= 1e-12;
    report(3, "k_lies_in_q", ok, &format!("1000 samples, max chordal(x, y) {max_dist:.3e}"));
    assert!(ok);
}

#[test]
fn criterion_4_reality() {
    let mut sampler = Sampler::new(0xF0_04);
    let mut max_err = 0.0f64;
    let mut max_antipodal_dev = 0.0f64;
    for _ in 0..1000 {
        let params = sampler.interior_params(1e-9);
        let t = sampler.bounded_point(0.05, 20.0);
        let p = eval_line(&params, &t).unwrap();
        let lhs = real_structure(&p);
        let rhs = eval_line(&params, &t.antipodal()).unwrap();
        max_err = max_err
            .max(lhs.x.chordal_distance(&rhs.x))
            .max(lhs.y.chordal_distance(&rhs.y))
            .max(lhs.t.chordal_distance(&rhs.t));

        let back = real_structure(&real_structure(&p));
        assert!(back.x.exactly_projectively_equal(&p.x));
        assert!(back.y.exactly_projectively_equal(&p.y));
        assert!(back.t.exactly_projectively_equal(&p.t));
        for factor in [&p.x, &p.y, &p.t] {
            max_antipodal_dev =
                max_antipodal_dev.max((factor.chordal_distance(&factor.antipodal()) - 1.0).abs());
        }
    }
    let ok = max_err <= 1e-12 && max_antipodal_dev <= 1e-12;
    report(
        4,
        "reality",
        ok,
        &format!(
            "1000 samples, sigma identity {max_err:.3e}, antipodal distance \
             deviation {max_antipodal_dev:.3e}, sigma^2 exact"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_swap_involution() {
    let mut sampler = Sampler::new(0xF0_05);
    let mut max_err = 0.0f64;
    let mut max_k_moved = 0.0f64;
    for i in 0..1000 {
        let params = if i % 5 == 0 {
            sampler.k_params()
        } else {
            sampler.interior_params(1e-9)
        };
        let t = sampler.bounded_point(0.05, 20.0);
        let p = incidence_map(&params, &t).unwrap();
        let swapped = swap_involution(&params);
        let q = incidence_map(&swapped, &t).unwrap();
        max_err = max_err
            .max(p.x.chordal_distance(&q.y))
            .max(p.y.chordal_distance(&q.x));

        let back = swap_involution(&swapped);
        assert!(back.a().exactly_projectively_equal(&params.a()));
        if params.classify() == FamilyClass::K {
            max_k_moved = max_k_moved.max(swapped.a().chordal_distance(&params.a()));
        }
    }
    let ok = max_err <= 1e-12 && max_k_moved <= 1e-12;
    report(
        5,
        "swap_involution",
        ok,
        &format!("1000 samples, swap identity {max_err:.3e}, K fixed within {max_k_moved:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_6_symmetry_equivariance() {
    let mut sampler = Sampler::new(0xF0_06);
    let mut max_err = 0.0f64;
    let mut max_mod_rel = 0.0f64;
    for _ in 0..100 {
        let g = sampler.group_element();
        for _ in 0..10 {
            let params = sampler.interior_params(1e-6);
            for _ in 0..5 {
                let t = sampler.bounded_point(0.05, 20.0);
                let t_affine = t.to_affine().unwrap();
                let moved = act_on_params(&g, &params);
                let lhs =
                    eval_line(&moved, &SpherePoint::from_affine(g.g3() * t_affine)).unwrap();
                let rhs = act_on_space(&g, &eval_line(&params, &t).unwrap());
                max_err = max_err
                    .max(lhs.x.chordal_distance(&rhs.x))
                    .max(lhs.y.chordal_distance(&rhs.y));
                max_mod_rel = max_mod_rel
                    .max((moved.a_modulus() - params.a_modulus()).abs() / params.a_modulus());
                assert_eq!(moved.classify(), params.classify());
            }
        }
    }

    // Group law on parameters and points.
    let mut max_law = 0.0f64;
    for _ in 0..100 {
        let g = sampler.group_element();
        let h = sampler.group_element();
        let params = sampler.interior_params(1e-9);
        let composed = act_on_params(&g.compose(&h), &params);
        let stepwise = act_on_params(&g, &act_on_params(&h, &params));
        max_law = max_law
            .max(composed.d().chordal_distance(&stepwise.d()))
            .max(composed.a().chordal_distance(&stepwise.a()));
        let p = SpacePoint::new(params.d(), params.a(), sampler.bounded_point(0.05, 20.0));
        let cp = act_on_space(&g.compose(&h), &p);
        let sp = act_on_space(&g, &act_on_space(&h, &p));
        max_law = max_law
            .max(cp.x.chordal_distance(&sp.x))
            .max(cp.y.chordal_distance(&sp.y))
            .max(cp.t.chordal_distance(&sp.t));
    }

    // |a'| = |a| up to final rounding of the unit multiplier.
    let ok = max_err <= 1e-10 && max_mod_rel <= 1e-14 && max_law <= 1e-11;
    report(
        6,
        "symmetry_equivariance",
        ok,
        &format!(
            "100x10x5 actions, equivariance {max_err:.3e}, |a| drift {max_mod_rel:.3e}, \
             group law {max_law:.3e}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_degeneration() {
    let mut sampler = Sampler::new(0xF0_07);
    let mut min_slope = f64::INFINITY;
    for _ in 0..10 {
        let d = sampler.sphere_point();
        let phase = sampler.angle();
        let vertical = LineParams::new(d, SpherePoint::zero());
        let mut logs = Vec::new();
        for m in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
            let params = LineParams::new(d, SpherePoint::from_affine(Complex64::from_polar(m, phase)));
            let mut sup = 0.0f64;
            for k in 0..16 {
                let t = SpherePoint::from_affine(Complex64::from_polar(
                    1.0,
                    std::f64::consts::TAU * k as f64 / 16.0,
                ));
                let p = eval_line(&params, &t).unwrap();
                let q = eval_line(&vertical, &t).unwrap();
                sup = sup
                    .max(p.x.chordal_distance(&q.x))
                    .max(p.y.chordal_distance(&q.y));
            }
            logs.push((m.ln(), sup.ln()));
        }
        let n = logs.len() as f64;
        let sx: f64 = logs.iter().map(|(x, _)| x).sum();
        let sy: f64 = logs.iter().map(|(_, y)| y).sum();
        let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        min_slope = min_slope.min(slope);
    }

    let mut patterns_differ = true;
    for _ in 0..100 {
        let d1 = sampler.sphere_point();
        let d2 = if sampler.uniform() < 0.3 {
            d1
        } else {
            sampler.sphere_point()
        };
        let lz = limit_curve(&d1, LimitDirection::TowardZero);
        let li = limit_curve(&d2, LimitDirection::TowardInfinity);
        patterns_differ &= lz.degree_pattern() != li.degree_pattern();
    }

    let ok = min_slope >= 0.9 && patterns_differ;
    report(
        7,
        "degeneration",
        ok,
        &format!("log-log slope >= {min_slope:.3}, limit degree patterns always differ: {patterns_differ}"),
    );
    assert!(ok);
}

#[test]
fn criterion_8_transport_on_k() {
    let mut sampler = Sampler::new(0xF0_08);
    let mut max_err = 0.0f64;
    for _ in 0..200 {
        let src = sampler.k_params();
        let dst = sampler.k_params();
        let g = transport_on_k(&src, &dst).unwrap();
        let moved = act_on_params(&g, &src);
        max_err = max_err
            .max(moved.d().chordal_distance(&dst.d()))
            .max(moved.a().chordal_distance(&dst.a()));
    }

    // Isotropy at (0, 1): the identity-transport element acts trivially.
    let base = LineParams::from_affine(Complex64::ZERO, Complex64::ONE);
    let g = transport_on_k(&base, &base).unwrap();
    let mut max_isotropy = 0.0f64;
    for _ in 0..100 {
        let k = sampler.k_params();
        let moved = act_on_params(&g, &k);
        max_isotropy = max_isotropy
            .max(moved.d().chordal_distance(&k.d()))
            .max(moved.a().chordal_distance(&k.a()));
    }

    let ok = max_err <= 1e-10 && max_isotropy <= 1e-10;
    report(
        8,
        "transport_on_k",
        ok,
        &format!("200 pairs, roundtrip {max_err:.3e}; identity isotropy {max_isotropy:.3e}"),
    );
    assert!(ok);
}
