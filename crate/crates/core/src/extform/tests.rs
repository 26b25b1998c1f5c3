use proptest::prelude::*;

use super::*;

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn point(label: &str, value: i64) -> ExtendedFormulation {
    let mut ef = ExtendedFormulation::new();
    let y = ef.add_projected("y", label).unwrap();
    ef.add_equation(vec![(y, r(1))], r(value)).unwrap();
    ef
}

fn interval(label: &str) -> ExtendedFormulation {
    let mut ef = ExtendedFormulation::new();
    let x = ef.add_projected("x", label).unwrap();
    ef.add_inequality(vec![(x, r(1))], Sense::Ge, r(0)).unwrap();
    ef.add_inequality(vec![(x, r(1))], Sense::Le, r(1)).unwrap();
    ef
}

fn max1(ef: &ExtendedFormulation, label: &str) -> LpOutcome {
    ef.lp_optimize(&[(label, r(1))], Direction::Maximize).unwrap()
}

fn min1(ef: &ExtendedFormulation, label: &str) -> LpOutcome {
    ef.lp_optimize(&[(label, r(1))], Direction::Minimize).unwrap()
}

#[test]
fn empty_system_size() {
    let ef = ExtendedFormulation::new();
    assert_eq!(ef.size(), EfSize { inequalities: 0, equations: 0, variables: 0 });
}

#[test]
fn interval_optimum() {
    let ef = interval("e");
    assert_eq!(max1(&ef, "e"), LpOutcome::Optimal(r(1)));
    assert_eq!(min1(&ef, "e"), LpOutcome::Optimal(r(0)));
}

#[test]
fn monotonize_point_one_gives_segment() {
    let m = point("e", 1).monotonize();
    assert_eq!(m.size().inequalities, 2);
    assert_eq!(max1(&m, "e"), LpOutcome::Optimal(r(1)));
    assert_eq!(min1(&m, "e"), LpOutcome::Optimal(r(0)));
}

#[test]
fn monotonize_point_zero_gives_origin() {
    let m = point("e", 0).monotonize();
    assert_eq!(max1(&m, "e"), LpOutcome::Optimal(r(0)));
    assert_eq!(min1(&m, "e"), LpOutcome::Optimal(r(0)));
}

#[test]
fn affine_complement_points() {
    let c1 = point("e", 1).affine_complement();
    assert_eq!(max1(&c1, "e"), LpOutcome::Optimal(r(0)));
    let c0 = point("e", 0).affine_complement();
    assert_eq!(max1(&c0, "e"), LpOutcome::Optimal(r(1)));
    assert_eq!(min1(&c0, "e"), LpOutcome::Optimal(r(0)));
    assert_eq!(c0.size().inequalities, 2);
}

#[test]
fn monotonize_adds_two_per_label() {
    let ef = interval("a").product(&interval("b")).unwrap().product(&point("c", 1)).unwrap();
    let before = ef.size().inequalities;
    assert_eq!(ef.monotonize().size().inequalities, before + 6);
    assert_eq!(ef.affine_complement().size().inequalities, before + 6);
    assert_eq!(ef.monotonize().projected_labels(), vec!["a", "b", "c"]);
}

#[test]
fn product_sizes_add() {
    let a = interval("a");
    let b = point("b", 1).monotonize();
    let p = a.product(&b).unwrap();
    let (sa, sb, sp) = (a.size(), b.size(), p.size());
    assert_eq!(sp.inequalities, sa.inequalities + sb.inequalities);
    assert_eq!(sp.equations, sa.equations + sb.equations);
    assert_eq!(sp.variables, sa.variables + sb.variables);
    let e = ExtendedFormulation::new();
    assert_eq!(a.product(&e).unwrap().size(), sa);
    assert!(matches!(a.product(&interval("a")), Err(EfError::LabelCollision(_))));
}

#[test]
fn product_separable_objective() {
    let p = interval("a").product(&point("b", 1).monotonize()).unwrap();
    let obj = [("a", r(2)), ("b", r(-3))];
    assert_eq!(p.lp_optimize(&obj, Direction::Maximize).unwrap(), LpOutcome::Optimal(r(2)));
    assert_eq!(p.lp_optimize(&obj, Direction::Minimize).unwrap(), LpOutcome::Optimal(r(-3)));
}

#[test]
fn couple_two_segments() {
    let p = interval("a").product(&interval("b")).unwrap();
    let c = p.couple(&[("a".into(), "b".into())]).unwrap();
    assert!(c.projected_labels().is_empty());
    assert_eq!(c.size().inequalities, p.size().inequalities);
    assert!(c.prepare().is_feasible());
    assert_eq!(p.couple(&[]).unwrap().size(), p.size());
    assert!(matches!(p.couple(&[("a".into(), "a".into())]), Err(EfError::DuplicateLabel(_))));
    assert!(matches!(p.couple(&[("a".into(), "z".into())]), Err(EfError::NotProjected(_))));
}

#[test]
fn couple_forces_complement() {
    let p = interval("a").product(&point("b", 1).monotonize()).unwrap().product(&interval("c")).unwrap();
    let c = p.couple(&[("a".into(), "b".into())]).unwrap();
    assert_eq!(c.projected_labels(), vec!["c"]);
    assert_eq!(max1(&c, "c"), LpOutcome::Optimal(r(1)));
}

#[test]
fn fix_cube_and_infeasible_loop() {
    let cube = interval("a").product(&interval("b")).unwrap();
    let f = cube.fix_variable("a", true).unwrap();
    assert_eq!(f.projected_labels(), vec!["b"]);
    assert_eq!(max1(&f, "b"), LpOutcome::Optimal(r(1)));
    let lp = point("l", 0).monotonize();
    let bad = lp.fix_variable("l", true).unwrap().product(&interval("z")).unwrap();
    assert_eq!(max1(&bad, "z"), LpOutcome::Infeasible);
    assert!(!bad.prepare().is_feasible());
}

#[test]
fn contradictory_fixes_are_infeasible() {
    let ef = interval("a").product(&interval("b")).unwrap();
    assert!(!ef.lp_feasible_point(&[("a", r(1)), ("b", r(2))]).unwrap());
    assert!(ef.lp_feasible_point(&[("a", r(1)), ("b", Rational::new(1, 3))]).unwrap());
}

#[test]
fn vrep_single_point_and_cube() {
    let one = ExtendedFormulation::vrep_lift(&["a", "b"], &[vec![true, false]]).unwrap();
    assert_eq!(max1(&one, "a"), LpOutcome::Optimal(r(1)));
    assert_eq!(min1(&one, "a"), LpOutcome::Optimal(r(1)));
    assert_eq!(max1(&one, "b"), LpOutcome::Optimal(r(0)));

    let labels = ["a", "b", "c"];
    let pts: Vec<Vec<bool>> = (0..8u8).map(|m| (0..3).map(|i| m >> i & 1 == 1).collect()).collect();
    let cube = ExtendedFormulation::vrep_lift(&labels, &pts).unwrap();
    for m in 0..27u32 {
        let c: Vec<(&str, Rational)> = (0..3).map(|i| (labels[i], r((m / 3u32.pow(i as u32) % 3) as i64 - 1))).collect();
        let expect: i64 = c.iter().map(|(_, v)| if v.is_positive() { 1 } else { 0 }).sum();
        assert_eq!(cube.lp_optimize(&c, Direction::Maximize).unwrap(), LpOutcome::Optimal(r(expect)));
    }
    assert!(matches!(ExtendedFormulation::vrep_lift(&["a"], &[]), Err(EfError::EmptyPointSet)));
    assert!(matches!(
        ExtendedFormulation::vrep_lift(&["a"], &[vec![true, true]]),
        Err(EfError::PointDimension { .. })
    ));
}

#[test]
fn unbounded_is_reported() {
    let mut ef = ExtendedFormulation::new();
    let x = ef.add_projected("x", "e").unwrap();
    ef.add_inequality(vec![(x, r(1))], Sense::Ge, r(0)).unwrap();
    assert_eq!(max1(&ef, "e"), LpOutcome::Unbounded);
    assert_eq!(min1(&ef, "e"), LpOutcome::Optimal(r(0)));

    let mut free = ExtendedFormulation::new();
    free.add_projected("x", "e").unwrap();
    assert_eq!(max1(&free, "e"), LpOutcome::Unbounded);
    assert!(free.lp_feasible_point(&[("e", r(5))]).unwrap());
}

#[test]
fn fractional_optimum_is_exact() {
    // 3x + 2y <= 7, x + 4y <= 5, x,y >= 0: max x + y at (9/5, 4/5).
    let mut ef = ExtendedFormulation::new();
    let x = ef.add_projected("x", "x").unwrap();
    let y = ef.add_projected("y", "y").unwrap();
    ef.add_inequality(vec![(x, r(3)), (y, r(2))], Sense::Le, r(7)).unwrap();
    ef.add_inequality(vec![(x, r(1)), (y, r(4))], Sense::Le, r(5)).unwrap();
    ef.add_inequality(vec![(x, r(1))], Sense::Ge, r(0)).unwrap();
    ef.add_inequality(vec![(y, r(1))], Sense::Ge, r(0)).unwrap();
    let v = ef.lp_optimize(&[("x", r(1)), ("y", r(1))], Direction::Maximize).unwrap();
    assert_eq!(v, LpOutcome::Optimal(Rational::new(13, 5)));
}

#[test]
fn injected_fault_removes_origin() {
    let ef = point("e", 0).monotonize();
    let bad = ef.with_injected_fault();
    assert_eq!(min1(&bad, "e"), LpOutcome::Infeasible);
    let iv = interval("e").with_injected_fault();
    assert_eq!(min1(&iv, "e"), LpOutcome::Optimal(r(1)));
    let v = ExtendedFormulation::vrep_lift(&["a", "b"], &[vec![false, false], vec![true, false]]).unwrap();
    assert!(v.lp_feasible_point(&[("a", r(0)), ("b", r(0))]).unwrap());
    assert!(!v.with_injected_fault().lp_feasible_point(&[("a", r(0)), ("b", r(0))]).unwrap());
}

#[test]
fn lp_export_is_integral() {
    let mut ef = ExtendedFormulation::new();
    let x = ef.add_projected("x(a b)", "a").unwrap();
    let y = ef.add_auxiliary("x(a b)");
    ef.add_inequality(vec![(x, Rational::new(1, 2)), (y, Rational::new(1, 3))], Sense::Le, r(1)).unwrap();
    ef.add_equation(vec![(x, r(1)), (y, r(-1))], r(0)).unwrap();
    let text = ef.to_lp_string(&[(x, r(1))], true);
    assert!(text.starts_with("Maximize\n obj: x_a_b_\n"));
    assert!(text.contains(" c0: 3 x_a_b_ + 2 x_a_b__1 <= 6\n"));
    assert!(text.contains(" e0: x_a_b_ - x_a_b__1 = 0\n"));
    assert!(text.contains("Bounds\n x_a_b_ free\n x_a_b__1 free\nEnd\n"));
}

/// Independent oracle for tiny bounded LPs: the optimum of a polytope is
/// attained at a vertex, and vertices are the feasible solutions of square
/// subsystems of tight constraints.
fn solve_square(rows: &[(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|(a, b)| a.iter().cloned().chain([b.clone()]).collect()).collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for v in m[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot = m[c].clone();
                for (v, p) in m[i].iter_mut().zip(&pivot) {
                    *v -= &(&f * p);
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

fn brute_force_max(n: usize, rows: &[(Vec<Rational>, Rational)], c: &[Rational]) -> Option<Rational> {
    let m = rows.len();
    let mut best: Option<Rational> = None;
    for mask in 0u32..1 << m {
        if mask.count_ones() as usize != n {
            continue;
        }
        let sub: Vec<_> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| rows[i].clone()).collect();
        let Some(x) = solve_square(&sub) else { continue };
        let feasible = rows.iter().all(|(a, b)| {
            let lhs: Rational = a.iter().zip(&x).map(|(p, q)| p * q).sum();
            lhs <= *b
        });
        if feasible {
            let v: Rational = c.iter().zip(&x).map(|(p, q)| p * q).sum();
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
    }
    best
}

proptest! {
    #[test]
    fn simplex_matches_vertex_enumeration(
        n in 1usize..=3,
        extra in proptest::collection::vec((proptest::collection::vec(-3i64..=3, 3), -4i64..=6), 0..4),
        c in proptest::collection::vec(-4i64..=4, 3),
    ) {
        // Box -2 <= x_i <= 2 keeps everything bounded.
        let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for i in 0..n {
            let mut e = vec![r(0); n];
            e[i] = r(1);
            rows.push((e.clone(), r(2)));
            e[i] = r(-1);
            rows.push((e, r(2)));
        }
        for (a, b) in &extra {
            rows.push((a[..n].iter().map(|&v| r(v)).collect(), r(*b)));
        }
        let obj: Vec<Rational> = c[..n].iter().map(|&v| r(v)).collect();

        let mut ef = ExtendedFormulation::new();
        let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        for l in &labels {
            ef.add_projected(l.clone(), l.clone()).unwrap();
        }
        for (a, b) in &rows {
            ef.add_inequality(a.iter().cloned().enumerate().collect(), Sense::Le, b.clone()).unwrap();
        }
        let objective: Vec<(&str, Rational)> = labels.iter().map(|l| l.as_str()).zip(obj.iter().cloned()).collect();
        let got = ef.lp_optimize(&objective, Direction::Maximize).unwrap();
        let expect = match brute_force_max(n, &rows, &obj) {
            Some(v) => LpOutcome::Optimal(v),
            None => LpOutcome::Infeasible,
        };
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn warm_start_matches_fresh_solve(
        fix in proptest::collection::vec(-1i64..=3, 3),
        rows in proptest::collection::vec((proptest::collection::vec(-2i64..=2, 3), -2i64..=4), 1..5),
    ) {
        let mut ef = ExtendedFormulation::new();
        let xs: Vec<usize> = (0..3).map(|i| ef.add_projected(format!("x{i}"), format!("x{i}")).unwrap()).collect();
        let z = ef.add_auxiliary("z");
        for (a, b) in &rows {
            let mut coeffs: Vec<(usize, Rational)> = xs.iter().zip(a).map(|(&x, &v)| (x, r(v))).collect();
            coeffs.push((z, r(1)));
            ef.add_inequality(coeffs, Sense::Le, r(*b)).unwrap();
        }
        ef.add_inequality(vec![(z, r(1))], Sense::Ge, r(-1)).unwrap();
        let asg: Vec<(String, Rational)> = (0..3).map(|i| (format!("x{i}"), Rational::new(fix[i], 2))).collect();
        let warm = ef.lp_feasible_point(&asg).unwrap();
        let mut fixed = ef.clone();
        for (i, (_, v)) in asg.iter().enumerate() {
            fixed.add_equation(vec![(xs[i], r(1))], v.clone()).unwrap();
        }
        prop_assert_eq!(warm, fixed.prepare().is_feasible());
        // Feasible iff some z >= -1 satisfies every row: z <= b - a.x.
        let slack_ok = rows.iter().all(|(a, b)| {
            let ax: Rational = a.iter().zip(&asg).map(|(&p, (_, q))| r(p) * q).sum();
            r(*b) - ax >= r(-1)
        });
        prop_assert_eq!(warm, slack_ok);
    }
}
