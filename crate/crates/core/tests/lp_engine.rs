use phaseforest::lp::{LpModel, LpStatus, Row, Sense};
use phaseforest::rng;
use rand::Rng;

/// Solves a dense square system by Gaussian elimination; None when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum of `c x` over vertices of `{rows} ∩ [0,1]^n`; None when empty.
fn vertex_oracle(n: usize, c: &[f64], rows: &[Row]) -> Option<f64> {
    // hyperplanes: rows then x_j = 0 and x_j = 1
    let mut planes: Vec<(Vec<f64>, f64)> = rows
        .iter()
        .map(|r| {
            let mut a = vec![0.0; n];
            for &(j, v) in &r.coeffs {
                a[j] += v;
            }
            (a, r.rhs)
        })
        .collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), 0.0));
        planes.push((e, 1.0));
    }
    let k = planes.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            let feasible =
                x.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)) && rows.iter().all(|r| r.violation(&x) <= 1e-9);
            if feasible {
                let obj: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
                best = Some(best.map_or(obj, |v: f64| v.min(obj)));
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for t in i + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn random_lp(seed: u64) -> (usize, Vec<f64>, Vec<Row>) {
    let mut r = rng::seeded(seed);
    let n = 5;
    let c: Vec<f64> = (0..n).map(|_| r.gen_range(-3.0..5.0)).collect();
    let rows = (0..5)
        .map(|_| {
            let mut coeffs = Vec::new();
            for j in 0..n {
                if r.gen_bool(0.7) {
                    coeffs.push((j, r.gen_range(-2.0..3.0f64).round()));
                }
            }
            let sense = match r.gen_range(0..3) {
                0 => Sense::Le,
                1 => Sense::Ge,
                _ if r.gen_bool(0.3) => Sense::Eq,
                _ => Sense::Ge,
            };
            Row::new(coeffs, sense, r.gen_range(-1.0..2.5))
        })
        .collect();
    (n, c, rows)
}

#[test]
fn matches_vertex_enumeration() {
    let mut optimal = 0;
    for seed in 0..300 {
        let (n, c, rows) = random_lp(seed);
        let mut lp = LpModel::new(n);
        for (j, &v) in c.iter().enumerate() {
            lp.set_objective(j, v);
        }
        lp.add_rows(rows.clone());
        let sol = lp.solve().unwrap();
        match vertex_oracle(n, &c, &rows) {
            Some(opt) => {
                assert_eq!(sol.status, LpStatus::Optimal, "seed {seed}\n{}", lp.dump());
                assert!((sol.objective - opt).abs() < 1e-7, "seed {seed}: {} vs {opt}", sol.objective);
                for r in &rows {
                    assert!(r.violation(&sol.x) < 1e-7);
                }
                optimal += 1;
            }
            None => assert_eq!(sol.status, LpStatus::Infeasible, "seed {seed}"),
        }
    }
    assert!(optimal > 50);
}

#[test]
fn warm_start_equals_cold_solve() {
    for seed in 0..200 {
        let (n, c, rows) = random_lp(seed + 1000);
        let mut warm = LpModel::new(n);
        for (j, &v) in c.iter().enumerate() {
            warm.set_objective(j, v);
        }
        warm.add_rows(rows[..2].to_vec());
        let first = warm.solve().unwrap();
        if first.status != LpStatus::Optimal {
            continue;
        }
        let warm_sol = warm.add_rows_and_reoptimize(rows[2..].to_vec()).unwrap();
        let mut cold = LpModel::new(n);
        for (j, &v) in c.iter().enumerate() {
            cold.set_objective(j, v);
        }
        cold.add_rows(rows.clone());
        let cold_sol = cold.solve().unwrap();
        assert_eq!(warm_sol.status, cold_sol.status, "seed {seed}");
        if cold_sol.status == LpStatus::Optimal {
            assert!((warm_sol.objective - cold_sol.objective).abs() < 1e-7, "seed {seed}");
            assert!(warm_sol.objective >= first.objective - 1e-9 || rows[2..].iter().any(|r| r.sense != Sense::Ge));
        }
    }
}

#[test]
fn duals_satisfy_weak_duality() {
    for seed in 0..200 {
        let (n, c, rows) = random_lp(seed + 5000);
        let mut lp = LpModel::new(n);
        for (j, &v) in c.iter().enumerate() {
            lp.set_objective(j, v);
        }
        lp.add_rows(rows.clone());
        let sol = lp.solve().unwrap();
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let dual = lp.dual_objective();
        assert!(dual <= sol.objective + 1e-6, "seed {seed}");
        assert!(sol.objective <= dual + 1e-6, "seed {seed}: {} vs {dual}", sol.objective);
        for (r, &y) in rows.iter().zip(&sol.duals) {
            match r.sense {
                Sense::Ge => assert!(y >= -1e-7),
                Sense::Le => assert!(y <= 1e-7),
                Sense::Eq => {}
            }
            // complementary slackness
            let slack = r.activity(&sol.x) - r.rhs;
            assert!((slack * y).abs() < 1e-6, "seed {seed}");
        }
    }
}

#[test]
fn covering_lp_with_many_incremental_rows() {
    // random set-cover relaxations grown one row at a time
    for seed in 0..20 {
        let mut r = rng::seeded(seed);
        let n = 40;
        let mut inc = LpModel::new(n);
        for j in 0..n {
            inc.set_objective(j, r.gen_range(0.5..4.0));
        }
        let mut all = Vec::new();
        let mut last = 0.0;
        for _ in 0..60 {
            let vars: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.12)).collect();
            if vars.is_empty() {
                continue;
            }
            let row = Row::cover(vars);
            all.push(row.clone());
            let s = inc.add_rows_and_reoptimize([row]).unwrap();
            assert_eq!(s.status, LpStatus::Optimal);
            assert!(s.objective >= last - 1e-9);
            last = s.objective;
        }
        let mut cold = LpModel::new(n);
        for j in 0..n {
            cold.set_objective(j, inc.objective_coeffs()[j]);
        }
        cold.add_rows(all);
        let s = cold.solve().unwrap();
        assert!((s.objective - last).abs() < 1e-7);
    }
}
