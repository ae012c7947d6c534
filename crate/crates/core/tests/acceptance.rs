//! Acceptance checks, one line per criterion. Runs as a plain binary so the
//! report is printed even when everything passes.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use tentqmc::experiment::{fit_convergence, run_experiment, ExperimentPlan};
use tentqmc::nets::DigitalNet;
use tentqmc::search::{verify_existence, SearchConfig};
use tentqmc::sobolev::{
    a_constants, dual_net_wce, eb_weight_sum_multiples_truncated, eb_weight_sum_truncated, mean_wce_estimate,
    n_b_count,
};
use tentqmc::transforms::tent_fold;
use tentqmc::walsh::walsh_exponent;
use tentqmc::{BAdicReal, Caps, KernelParams, PolyLatticeSpec, PolyZb, RngSpec, Weights};

type Outcome = Result<String, String>;

fn grid_point(b: u32, digits: usize, idx: u64) -> BAdicReal {
    let mut d = vec![0u8; digits];
    let mut r = idx;
    for i in (0..digits).rev() {
        d[i] = (r % b as u64) as u8;
        r /= b as u64;
    }
    BAdicReal::from_digits(b, d).unwrap()
}

fn digit_sum(mut k: u64, b: u64) -> u64 {
    let mut s = 0;
    while k > 0 {
        s += k % b;
        k /= b;
    }
    s
}

fn random_spec(rng: &mut impl Rng, max_dim: impl Fn(u32) -> usize) -> PolyLatticeSpec {
    let b = [2u32, 3, 5][rng.gen_range(0..3)];
    let n = rng.gen_range(1..=6usize);
    let m = rng.gen_range(1..=n.min(4));
    let s = rng.gen_range(1..=max_dim(b));
    let mut pc: Vec<u32> = (0..n).map(|_| rng.gen_range(0..b)).collect();
    pc.push(rng.gen_range(1..b));
    let q = (0..s)
        .map(|_| PolyZb::new(b, (0..n).map(|_| rng.gen_range(0..b)).collect()).unwrap())
        .collect();
    PolyLatticeSpec::new(b, m, n, PolyZb::new(b, pc).unwrap(), q).unwrap()
}

/// Grid averages of `wal_k conj(wal_l)` over `b^4` points are `N` or 0:
/// the exponent differences are either all zero or equidistributed mod b.
fn orthonormality() -> Outcome {
    let mut pairs = 0u64;
    for b in [2u32, 3, 5] {
        let size = (b as u64).pow(4);
        let xs: Vec<BAdicReal> = (0..size).map(|i| grid_point(b, 4, i)).collect();
        let table: Vec<Vec<u8>> = (0..size)
            .map(|k| xs.iter().map(|x| walsh_exponent(k, x) as u8).collect())
            .collect();
        for k in 0..size as usize {
            for l in 0..size as usize {
                let mut counts = [0u64; 5];
                for (ek, el) in table[k].iter().zip(&table[l]) {
                    counts[((ek + b as u8 - el) % b as u8) as usize] += 1;
                }
                let counts = &counts[..b as usize];
                let ok = if k == l {
                    counts[0] == size
                } else {
                    counts.iter().all(|&c| c == size / b as u64)
                };
                if !ok {
                    return Err(format!("b={b} k={k} l={l} counts {counts:?}"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs exact"))
}

fn dual_dichotomy() -> Outcome {
    let mut rng = RngSpec::new(2, 0).rng();
    let caps = Caps::default();
    let mut checked = 0u64;
    let mut members = 0u64;
    for _ in 0..50 {
        let spec = random_spec(&mut rng, |b| if b == 5 { 2 } else { 3 });
        let gen = spec.matrices();
        let net = DigitalNet::from_matrices(gen.clone(), &caps).unwrap();
        let b = spec.base() as u64;
        let per = b.pow(3);
        let s = spec.dim();
        let n_points = net.num_points() as u64;
        for idx in 0..per.pow(s as u32) {
            let mut r = idx;
            let k: Vec<u64> = (0..s)
                .map(|_| {
                    let v = r % per;
                    r /= per;
                    v
                })
                .collect();
            let sum = net.walsh_character_sum(&k).unwrap().exact();
            let direct = net.is_dual_member_direct(&k).unwrap();
            let matrix = gen.is_dual_member(&k).unwrap();
            let poly = spec.is_dual_member(&k).unwrap();
            let want = if direct { Some(n_points) } else { Some(0) };
            if sum != want || direct != matrix || direct != poly {
                return Err(format!("spec {spec:?} k {k:?}: sum {sum:?} direct {direct} matrix {matrix} poly {poly}"));
            }
            checked += 1;
            members += direct as u64;
        }
    }
    Ok(format!("{checked} frequency vectors, {members} dual members"))
}

/// Push the uniform mass of each (T+1)-digit cell forward through the fold.
/// The cell is represented by an interior point whose image lies strictly
/// inside a T-digit cell, so the target is read off the exact value.
fn measure_preservation() -> Outcome {
    for b in [2u32, 3, 5] {
        for t in 1..=4u32 {
            let bi = BigInt::from(b);
            let scale = num_traits::pow(bi.clone(), t as usize);
            let cell_mass = BigRational::new(One::one(), scale.clone() * &bi);
            let mut mass = vec![BigRational::zero(); scale.to_usize().unwrap()];
            for c in 0..(b as u64).pow(t + 1) {
                let base_cell = grid_point(b, (t + 1) as usize, c);
                let xi1 = base_cell.digit(1);
                let mut prefix = base_cell.prefix().to_vec();
                prefix.push(((xi1 as u32 + 1) % b) as u8);
                let x = BAdicReal::new(b, prefix, xi1).unwrap();
                let y = tent_fold(&x).to_ratio() * BigRational::from_integer(scale.clone());
                let cell = y.floor();
                if cell == y || y.is_integer() || y >= BigRational::from_integer(scale.clone()) {
                    return Err(format!("b={b} T={t} cell {c}: image on a boundary"));
                }
                mass[cell.to_integer().to_usize().unwrap()] += &cell_mass;
            }
            let want = BigRational::new(One::one(), scale.clone());
            if let Some(i) = mass.iter().position(|v| *v != want) {
                return Err(format!("b={b} T={t} target {i} has mass {}", mass[i]));
            }
        }
    }
    Ok("b in {2,3,5}, T = 1..4 exact".into())
}

fn walsh_collapse() -> Outcome {
    let mut count = 0u64;
    for b in [2u32, 3] {
        let bu = b as u64;
        let grid: Vec<BAdicReal> = (0..bu.pow(5)).map(|i| grid_point(b, 5, i)).collect();
        let folded: Vec<BAdicReal> = grid.iter().map(tent_fold).collect();
        for j in 0..bu.pow(3) {
            let lhs: Vec<u32> = folded.iter().map(|y| walsh_exponent(j, y)).collect();
            let matches: Vec<u64> = (j * bu..(j + 1) * bu)
                .filter(|&k| grid.iter().zip(&lhs).all(|(x, &e)| walsh_exponent(k, x) == e))
                .collect();
            let star = j * bu + (bu - digit_sum(j, bu) % bu) % bu;
            if matches != [star] {
                return Err(format!("b={b} j={j}: matches {matches:?}, expected [{star}]"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} indices, unique collapse index each"))
}

fn dual_formula_vs_monte_carlo() -> Outcome {
    let p = PolyZb::first_irreducible(2, 4).unwrap();
    let q = vec![PolyZb::parse(2, "1").unwrap(), PolyZb::parse(2, "1,1,0,1").unwrap()];
    let spec = PolyLatticeSpec::new(2, 3, 4, p, q).unwrap();
    let weights = Weights::product(vec![1.0, 1.0]).unwrap();
    let params = KernelParams::calibrated(2, 2).unwrap();
    let caps = Caps::default();
    let exact = dual_net_wce(&spec.matrices(), &params, &weights, 8, &caps).unwrap();
    let net = DigitalNet::from_matrices(spec.matrices(), &caps).unwrap();
    let est = mean_wce_estimate(&net, &params, &weights, 512, &RngSpec::new(5, 0), None).unwrap();
    let diff = (exact - est.mean).abs();
    let tol = 3.0 * est.std_error + 1e-6;
    let msg = format!("dual {exact:.6e}, MC {:.6e} +- {:.2e}, |diff| {diff:.2e} <= {tol:.2e}", est.mean, est.std_error);
    if diff <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn a_constant_inequalities() -> Outcome {
    let mut min_margin = f64::INFINITY;
    for alpha in [2u32, 3] {
        for b in [2u32, 3, 5] {
            for lambda in [0.6, 0.8, 1.0] {
                let (a1, a2) = a_constants(alpha, b, lambda).unwrap();
                let s1 = eb_weight_sum_truncated(b, alpha, lambda, 12).unwrap();
                if !(s1 < a1) {
                    return Err(format!("alpha={alpha} b={b} lambda={lambda}: {s1} >= A1 {a1}"));
                }
                min_margin = min_margin.min((a1 - s1) / a1);
                for n in 1..=3u32 {
                    let s2 = eb_weight_sum_multiples_truncated(b, alpha, lambda, n, 12).unwrap();
                    let rhs = a2 * (b as f64).powf(-4.0 * lambda * n as f64);
                    if !(s2 < rhs) {
                        return Err(format!("alpha={alpha} b={b} lambda={lambda} n={n}: {s2} >= {rhs}"));
                    }
                    min_margin = min_margin.min((rhs - s2) / rhs);
                }
            }
        }
    }
    Ok(format!("smallest relative margin {min_margin:.3e}"))
}

fn n_b_counts() -> Outcome {
    for b in [2u32, 3, 5] {
        if n_b_count(b, 1).unwrap() != 0 {
            return Err(format!("N_{b}(1) != 0"));
        }
        for v in 1..=6u32 {
            let bm1 = b as u64 - 1;
            let brute = (0..bm1.pow(v))
                .filter(|&idx| {
                    let mut r = idx;
                    let s: u64 = (0..v)
                        .map(|_| {
                            let d = r % bm1 + 1;
                            r /= bm1;
                            d
                        })
                        .sum();
                    s % b as u64 == 0
                })
                .count() as u128;
            let got = n_b_count(b, v).unwrap();
            if got != brute {
                return Err(format!("b={b} v={v}: {got} vs {brute}"));
            }
        }
    }
    Ok("b in {2,3,5}, v = 1..6".into())
}

fn existence_tiny() -> Outcome {
    let cfg = SearchConfig {
        base: 2,
        m: 2,
        n: 2,
        modulus: PolyZb::parse(2, "1,1,1").unwrap(),
        dim: 2,
        params: KernelParams::calibrated(2, 2).unwrap(),
        weights: Weights::product(vec![1.0, 1.0]).unwrap(),
        truncation: 8,
        caps: Caps::default(),
    };
    let r = verify_existence(&cfg, 1.0).unwrap();
    let msg = format!(
        "{} candidates, min {:.6e}, mean {:.6e}, existence bound {:.6e}",
        r.candidates, r.min_bound, r.mean_root, r.existence_bound
    );
    if r.min_bound <= r.existence_bound && r.min_bound <= r.mean_root && r.min_le_mean {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn convergence_slope() -> Outcome {
    let weights = Weights::product(vec![1.0, 1.0]).unwrap();
    let caps = Caps::default();
    let run = |classic: bool| {
        let mut plan = ExperimentPlan::new(2, 2, 4, 9, weights.clone());
        plan.classic = classic;
        let rows = run_experiment(&plan, &caps, |_| {}).unwrap();
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.rmse)).collect();
        let dominated = rows.iter().all(|r| r.mean_square <= r.bound + 3.0 * r.std_error);
        (fit_convergence(&pts, 2).unwrap().slope, dominated)
    };
    let (slope, dominated) = run(false);
    let (classic, _) = run(true);
    let msg = format!("slope {slope:.3} (n = ceil(alpha m / 2)), classic n = alpha m slope {classic:.3}, bound dominates: {dominated}");
    if slope <= -1.6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn route_equivalence() -> Outcome {
    let mut rng = RngSpec::new(10, 0).rng();
    let caps = Caps::default();
    for i in 0..100 {
        let spec = random_spec(&mut rng, |_| 3);
        let direct = spec.net_direct(&caps).unwrap();
        let matrix = DigitalNet::from_matrices(spec.matrices(), &caps).unwrap();
        for l in 0..direct.num_points() {
            for j in 0..spec.dim() {
                if direct.digits(l, j) != matrix.digits(l, j) {
                    return Err(format!("spec {i} point {l} coordinate {j}"));
                }
            }
        }
    }
    Ok("100 specs digit-identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("walsh orthonormality", orthonormality),
        ("dual-net character dichotomy", dual_dichotomy),
        ("tent measure preservation", measure_preservation),
        ("walsh coefficient collapse", walsh_collapse),
        ("dual formula vs shifted Monte Carlo", dual_formula_vs_monte_carlo),
        ("A-constant inequalities", a_constant_inequalities),
        ("N_b recursion", n_b_counts),
        ("existence at tiny scale", existence_tiny),
        ("higher-order convergence slope", convergence_slope),
        ("direct and matrix routes agree", route_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
