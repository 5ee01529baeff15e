//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the test
//! harness so the lines are always printed.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use genus_equiv::cayley::{cayley, cayley_inverse, in_domain};
use genus_equiv::cli;
use genus_equiv::exact::{int, BigInt, PrimeSet, Rational, RationalMatrix};
use genus_equiv::padiclin::{choose_sign_matrix, det_stable, local_equiv, SignMatrix};
use genus_equiv::pipeline::{crt_approximate, solve, verify, EquivalenceCertificate, SolveOptions};
use genus_equiv::quadform::{signature, QuadraticForm};
use genus_equiv::Error;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Independent p-adic helpers, written without the library's exact module.

fn vp_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

fn vp(q: &Rational, p: u64) -> Option<i64> {
    (!q.is_zero()).then(|| vp_int(q.numer(), p) - vp_int(q.denom(), p))
}

fn p_power(p: u64, e: i64) -> Rational {
    let base = Rational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

fn abs_p(q: &Rational, p: u64) -> Rational {
    vp(q, p).map_or_else(Rational::zero, |v| p_power(p, -v))
}

fn norm_p(m: &RationalMatrix, p: u64) -> Rational {
    m.entries()
        .iter()
        .map(|x| abs_p(x, p))
        .max()
        .unwrap_or_else(Rational::zero)
}

fn height_p(m: &RationalMatrix, p: u64) -> Rational {
    norm_p(m, p).max(Rational::one())
}

fn signs(n: usize) -> Vec<RationalMatrix> {
    (0..1u32 << n)
        .map(|mask| {
            let d: Vec<Rational> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { int(-1) } else { int(1) })
                .collect();
            RationalMatrix::diagonal(&d)
        })
        .collect()
}

/// Recomputes `(d, C)` directly from the defining formulas.
fn oracle_d_c(
    f: &QuadraticForm,
    sigma: &RationalMatrix,
    big: &RationalMatrix,
    primes: &[u64],
) -> (BigInt, BigInt) {
    let n = f.dim();
    let big_inv = big.inverse().unwrap();
    let det_sigma = sigma.det();
    let two_n = Rational::from_integer(BigInt::from(1u64 << n));
    let mut eps: Option<Rational> = None;
    let mut d = Rational::one();
    for &p in primes {
        let kappa = signs(n)
            .iter()
            .map(|e| height_p(&(&(&(big * e) * &big_inv) * sigma), p))
            .max()
            .unwrap();
        let kn = num_traits::pow(kappa.clone(), n);
        let worst = abs_p(&two_n, p).recip().max(abs_p(&det_sigma, p).recip());
        let alpha = (norm_p(f.gram(), p) * &kn * worst).max(Rational::one());
        let beta = abs_p(&(&two_n * f.det() * &det_sigma), p) / &kn;
        let e = beta / (&kappa * num_traits::pow(alpha.clone(), n));
        eps = Some(eps.map_or(e.clone(), |x: Rational| x.min(e)));
        d *= alpha;
    }
    let bound = &d / eps.unwrap();
    let mut c = BigInt::one();
    for &p in primes {
        let mut l = 1;
        while p_power(p, l - 1) < bound {
            l += 1;
        }
        c *= num_traits::pow(BigInt::from(p), l as usize);
    }
    assert!(d.is_integer());
    (d.to_integer(), c)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn solve_instance(inst: &common::Instance) -> genus_equiv::Result<EquivalenceCertificate> {
    let options = SolveOptions {
        sigma: Some(inst.gamma.clone()),
        ..SolveOptions::default()
    };
    solve(&inst.f, &inst.g, &inst.primes, &options)
}

fn end_to_end() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let total = 120;
    let mut slowest = Duration::ZERO;
    for i in 0..total {
        let inst = common::random_instance(&mut rng);
        let start = Instant::now();
        let cert = match solve_instance(&inst) {
            Ok(c) => c,
            Err(e) => return outcome(false, format!("instance {i}: solve failed: {e}")),
        };
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        let report = verify(&inst.f, &inst.g, &inst.primes, &cert.tau_hat).unwrap();
        if !report.passed() {
            return outcome(false, format!("instance {i}: verification failed"));
        }
        if elapsed > Duration::from_secs(5) {
            return outcome(false, format!("instance {i} took {elapsed:?}"));
        }
    }
    outcome(true, format!("{total} random pairs solved and verified, slowest {slowest:?}"))
}

fn search_set_membership() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let total = 100;
    for i in 0..total {
        let inst = common::random_instance(&mut rng);
        let cert = match solve_instance(&inst) {
            Ok(c) => c,
            Err(e) => return outcome(false, format!("instance {i}: {e}")),
        };
        let d = Rational::from_integer(cert.constants.d.clone());
        let du = cert.u.scale(&d);
        if !du.is_integral() || !du.is_skew() {
            return outcome(false, format!("instance {i}: dU not integral skew"));
        }
        let bound = Rational::from_integer(cert.constants.c.clone()) / &d;
        if cert.u.entries().iter().any(|x| x.abs() > bound) {
            return outcome(false, format!("instance {i}: |U| exceeds C/d"));
        }
        let (d_oracle, c_oracle) = oracle_d_c(&inst.f, &cert.sigma, &cert.big_sigma, inst.primes.primes());
        if d_oracle != cert.constants.d || c_oracle != cert.constants.c {
            return outcome(false, format!("instance {i}: constants differ from recomputation"));
        }
    }
    outcome(true, format!("{total} certificates: dU integral skew, |U| <= C/d, d and C recomputed"))
}

fn random_invertible(rng: &mut impl Rng, n: usize) -> RationalMatrix {
    loop {
        let entries = (0..n * n)
            .map(|_| {
                let num = rng.gen_range(-30..=30);
                let den = [1, 1, 1, 2, 3, 4, 5, 9][rng.gen_range(0..8)];
                Rational::new(BigInt::from(num), BigInt::from(den))
            })
            .collect();
        let m = RationalMatrix::from_entries(n, n, entries).unwrap();
        if !m.det().is_zero() {
            return m;
        }
    }
}

fn sign_choice() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let total = 500;
    for i in 0..total {
        let n = rng.gen_range(1..=4);
        let p = [2u64, 3, 5, 7, 11][rng.gen_range(0..5)];
        let a = random_invertible(&mut rng, n);
        let e = choose_sign_matrix(&a, p).unwrap();
        let lhs = abs_p(&(&a - &e.to_matrix()).det(), p);
        let rhs = abs_p(&(Rational::from_integer(BigInt::from(1u64 << n)) * a.det()), p);
        if lhs < rhs {
            return outcome(false, format!("case {i}: bound violated for {a} at p = {p}"));
        }
    }
    outcome(true, format!("{total} random matrices meet |det(A-E)|_p >= |2^n det A|_p"))
}

fn crt() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let total = 500;
    for i in 0..total {
        let mut pool = vec![2u64, 3, 5, 7, 11];
        pool.retain(|_| rng.gen_bool(0.6));
        if pool.is_empty() {
            pool.push(3);
        }
        let primes = PrimeSet::new(pool.clone()).unwrap();
        let d: BigInt = pool
            .iter()
            .map(|&p| BigInt::from(p).pow(rng.gen_range(0..3)))
            .product();
        let eps = Rational::new(BigInt::one(), BigInt::from(rng.gen_range(1..200)));
        let mut targets = BTreeMap::new();
        for &p in &pool {
            // d * x is p-integral: x = a / (d * b) with b prime to p.
            let a = BigInt::from(rng.gen_range(-500..500));
            let mut b = rng.gen_range(1..20i64);
            while b % p as i64 == 0 {
                b += 1;
            }
            targets.insert(p, Rational::new(a, &d * BigInt::from(b)));
        }
        let z = crt_approximate(&targets, &d, &eps, &primes).unwrap();
        let dq = Rational::from_integer(d.clone());
        let mut range = BigInt::one();
        for (&p, x) in &targets {
            if abs_p(&(Rational::from_integer(z.clone()) / &dq - x), p) >= eps {
                return outcome(false, format!("case {i}: not eps-close at p = {p}"));
            }
            let mut l = 1;
            while p_power(p, l - 1) < &dq / &eps {
                l += 1;
            }
            range *= BigInt::from(p).pow(l as u32);
        }
        if z.is_negative() || z >= range {
            return outcome(false, format!("case {i}: z = {z} outside [0, {range})"));
        }
    }
    outcome(true, format!("{total} random CRT instances close and in range"))
}

fn det_stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let total = 200;
    for i in 0..total {
        let n = rng.gen_range(1..=4);
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let x = random_invertible(&mut rng, n);
        let radius = abs_p(&x.det(), p) / num_traits::pow(height_p(&x, p), n);
        let mut k = 0i64;
        while p_power(p, -k) >= radius {
            k += 1;
        }
        let noise = common::random_symmetric(&mut rng, n, 50);
        let y = &x + &noise.scale(&p_power(p, k));
        if !det_stable(&x, &y, p).unwrap() {
            return outcome(false, format!("case {i}: guard rejected a perturbation inside the radius"));
        }
        if y.det().is_zero() || vp(&x.det(), p) != vp(&y.det(), p) {
            return outcome(false, format!("case {i}: determinant valuation changed"));
        }
    }
    outcome(true, format!("{total} perturbed pairs keep their determinant valuation"))
}

fn cayley_transform() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let total = 200;
    let mut done = 0;
    while done < total {
        let n = rng.gen_range(1..=4);
        let q = common::random_form(&mut rng, n, 6);
        let mut u = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = Rational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=4)));
                u.set(j, i, -v.clone());
                u.set(i, j, v);
            }
        }
        if !in_domain(&u, &q) {
            continue;
        }
        let mu = cayley(&u, &q).unwrap();
        if q.gram().congruence(&mu) != *q.gram() {
            return outcome(false, format!("case {done}: image not orthogonal"));
        }
        if (&RationalMatrix::identity(n) - &mu).det().is_zero() {
            return outcome(false, format!("case {done}: det(I - mu) = 0"));
        }
        if cayley_inverse(&mu, &q).unwrap() != u {
            return outcome(false, format!("case {done}: round trip failed"));
        }
        done += 1;
    }
    outcome(true, format!("{total} random skew matrices: orthogonal image and exact round trip"))
}

fn worked_constants() -> Outcome {
    let f = QuadraticForm::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
    let id = RationalMatrix::identity(2);
    let options = SolveOptions {
        sigma: Some(id.clone()),
        big_sigma: Some(id.clone()),
        ..SolveOptions::default()
    };
    let two = solve(&f, &f, &PrimeSet::new(vec![2]).unwrap(), &options).unwrap();
    let three = solve(&f, &f, &PrimeSet::new(vec![3]).unwrap(), &options).unwrap();
    let checks = [
        (two.constants.d == BigInt::from(4), "d = 4 for P = {2}"),
        (two.constants.c == BigInt::from(512), "C = 512 for P = {2}"),
        (three.constants.d == BigInt::from(1), "d = 1 for P = {3}"),
        (three.constants.c == BigInt::from(3), "C = 3 for P = {3}"),
        (two.tau_hat == id, "tau_hat = I for F = G = I, P = {2}"),
        (two.tau_signs == SignMatrix::new(vec![-1, -1]).unwrap(), "E_0 = -I"),
        (two.u.is_zero(), "U = 0"),
    ];
    match checks.iter().find(|(ok, _)| !ok) {
        Some((_, what)) => outcome(false, format!("expected {what}")),
        None => outcome(true, "d = 4, C = 512 (P = {2}); d = 1, C = 3 (P = {3}); trivial run gives I"),
    }
}

fn local_obstruction() -> Outcome {
    let f = QuadraticForm::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
    let g = QuadraticForm::from_i64(&[&[1, 0], &[0, 3]]).unwrap();
    let same_signature = signature(&f) == (2, 0) && signature(&g) == (2, 0);
    let obstructed = local_equiv(&f, &g, 3, 4) == Err(Error::NotLocallyEquivalent(3));
    let solve_says =
        solve(&f, &g, &PrimeSet::new(vec![3]).unwrap(), &SolveOptions::default()).err()
            == Some(Error::NotLocallyEquivalent(3));
    outcome(
        same_signature && obstructed && solve_says,
        "diag(1,1) and diag(1,3): signature (2,0) both, not equivalent over Z_3",
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(args.iter().copied(), &mut out, &mut err);
    (code, out)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for i in 0..10 {
        let inst = common::random_instance(&mut rng);
        let first = serde_json::to_vec(&solve_instance(&inst).unwrap()).unwrap();
        let second = serde_json::to_vec(&solve_instance(&inst).unwrap()).unwrap();
        if first != second {
            return outcome(false, format!("instance {i}: library output differs between runs"));
        }
    }
    let path = dir.path().join("pair.json");
    std::fs::write(&path, r#"{"F": [["1","0"],["0","1"]], "G": [["2","1"],["1","1"]]}"#).unwrap();
    let path = path.to_str().unwrap();
    let (c1, a) = run_cli(&["genus-equiv", "solve", "--input", path, "--primes", "2,3", "--trace"]);
    let (c2, b) = run_cli(&["genus-equiv", "solve", "--input", path, "--primes", "2,3", "--trace"]);
    outcome(
        c1 == 0 && c2 == 0 && a == b,
        "repeated library and CLI runs produce byte-identical certificates",
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("end-to-end random suite", end_to_end),
        ("search-set membership", search_set_membership),
        ("sign-matrix choice", sign_choice),
        ("CRT approximation", crt),
        ("determinant stability", det_stability),
        ("Cayley transform", cayley_transform),
        ("worked constants and trivial run", worked_constants),
        ("local obstruction at p = 3", local_obstruction),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let status = if result.passed { "PASS" } else { "FAIL" };
        if !result.passed {
            failed += 1;
        }
        println!(
            "{status} [{}] {name}: {} ({:.2?})",
            i + 1,
            result.detail,
            start.elapsed()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
