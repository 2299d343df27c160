//! Acceptance gate: one pass/fail line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pellbaker::arith::{rational_to_f64, RealExpr};
use pellbaker::bounds::chain::{self, Scenario, StageRole};
use pellbaker::driver::parse_big_decimal;
use pellbaker::pelleq::{fundamental_solution, x_term_at};
use pellbaker::reduce::{self, cf_expand, legendre_bound};
use pellbaker::search::{cross_validate, direct_d_scan, find_witnesses, SearchBox};
use pellbaker::sequences::{FamilyName, SequenceFamily};
use std::time::Instant;

/// Criterion 1: published opening Pell terms and the certified growth
/// envelope alpha^{m-2} <= P_m <= alpha^{m-1} up to m = 500.
fn c1_sequences() -> Result<String, String> {
    let pell = SequenceFamily::get(FamilyName::Pell);
    let expected: [u64; 14] = [0, 1, 2, 5, 12, 29, 70, 169, 408, 985, 2378, 5741, 13860, 33461];
    for (m, &e) in expected.iter().enumerate() {
        let got = pell.term(m as u64);
        if got != BigInt::from(e) {
            return Err(format!("P_{} = {}, expected {}", m, got, e));
        }
    }
    for m in 1..=500u64 {
        if !pell.growth_check(m).map_err(|e| e.to_string())? {
            return Err(format!("growth envelope failed at m = {}", m));
        }
    }
    Ok("terms 0..=13 match reference list; growth envelope holds for m <= 500".into())
}

/// Criterion 2: folded linear-form constants reproduce the reference values
/// within 1% and the tightened alternatives certify domination.
fn c2_constants() -> Result<String, String> {
    let fc = chain::folded_constants(192);
    let records = chain::constant_records(&fc);
    let mut reproduced = 0usize;
    let mut certified = 0usize;
    for rec in &records {
        match rec.role {
            StageRole::Reproduced => {
                let p = rec
                    .published_f64
                    .ok_or_else(|| format!("{}: missing reference value", rec.name))?;
                let rel = (rec.computed_f64 - p).abs() / p.abs();
                if rel > 0.01 * (1.0 + 1e-9) {
                    return Err(format!(
                        "{}: {:e} vs {:e}, rel {:.4}",
                        rec.name, rec.computed_f64, p, rel
                    ));
                }
                reproduced += 1;
            }
            StageRole::Certified => {
                if rec.certified != Some(true) {
                    return Err(format!("{}: domination not certified", rec.name));
                }
                certified += 1;
            }
            _ => {}
        }
    }
    if reproduced < 5 || certified < 5 {
        return Err(format!(
            "expected >=5 reproduced and >=5 certified rows, got {}/{}",
            reproduced, certified
        ));
    }
    Ok(format!(
        "{} reproduced within 1%, {} tightened coefficients certified",
        reproduced, certified
    ))
}

/// Criterion 3: the three scenario ceilings land within 5% of (and not
/// above) the reference ceilings, and every certified stage holds.
fn c3_ceilings() -> Result<String, String> {
    let mut summary = Vec::new();
    for sc in Scenario::all() {
        let b = chain::lemma_chain(sc, 192).map_err(|e| e.to_string())?;
        let computed = pellbaker::arith::rational_to_f64(&BigRational::from_integer(b.ceiling.clone()));
        let published = b.published_ceiling_f64;
        if computed > 1.05 * published {
            return Err(format!(
                "{}: ceiling {:e} exceeds 1.05 * {:e}",
                sc.token(),
                computed,
                published
            ));
        }
        for st in &b.stages {
            if st.role == StageRole::Certified && st.certified != Some(true) {
                return Err(format!("{}: stage {} not certified", sc.token(), st.name));
            }
        }
        summary.push(format!("{} <= {:e}", sc.token(), published));
    }
    Ok(summary.join(", "))
}

/// Criterion 4: certified continued fraction of log4/log(1+sqrt 2), the
/// largest-partial-quotient bound below 3.8e85, and the reduced exponent
/// bound 230.
fn c4_continued_fraction() -> Result<String, String> {
    let oracle = RealExpr::log4_over_log_alpha();
    let mut cf = cf_expand(&oracle, 20).map_err(|e| e.to_string())?;
    let expected: [i64; 20] = [1, 1, 1, 2, 1, 13, 2, 1, 5, 4, 1, 3, 1, 8, 1, 10, 1, 1, 2, 3];
    for (i, &e) in expected.iter().enumerate() {
        if cf.quotients[i] != BigInt::from(e) {
            return Err(format!("quotient a_{} = {}, expected {}", i, cf.quotients[i], e));
        }
    }
    let m = parse_big_decimal("3.8e85").map_err(|e| e.to_string())?;
    let (_, am) = legendre_bound(&mut cf, &m).map_err(|e| e.to_string())?;
    if am != BigInt::from(1469) {
        return Err(format!("largest partial quotient {}, expected 1469", am));
    }
    let ell3 = reduce::legendre_apply(&am, &BigRational::from_integer(BigInt::from(240)), &m)
        .map_err(|e| e.to_string())?;
    if ell3 != BigInt::from(230) {
        return Err(format!("reduced exponent bound {}, expected 230", ell3));
    }
    Ok("a_5 = 13, a(3.8e85) = 1469, reduced exponent bound = 230".into())
}

/// Criterion 5: lattice sweep over indices 1..=230 with coefficient box
/// 1e90 certifies a uniform form lower bound near the reference threshold
/// 2e-220 and an index cutoff at most 450.
fn c5_lattice_sweep() -> Result<String, String> {
    let x_bound = BigInt::from(10u32).pow(90);
    let c = BigInt::from(10u32).pow(330);
    let sweep =
        reduce::pell_product_form_sweep(1, 230, &x_bound, &c).map_err(|e| e.to_string())?;
    let bound_f = rational_to_f64(&sweep.min_bound);
    if !(1e-225..=1e-215).contains(&bound_f) {
        return Err(format!("min bound {:e} outside [1e-225, 1e-215]", bound_f));
    }
    if sweep.degenerate != vec![1, 2] {
        return Err(format!(
            "degenerate indices {:?}, expected [1, 2]",
            sweep.degenerate
        ));
    }
    let n2max = BigRational::from_integer(parse_big_decimal("3.8e85").map_err(|e| e.to_string())?);
    let ratio = BigRational::from_integer(BigInt::from(220)) * n2max / sweep.min_bound.clone();
    if !ratio.is_positive() {
        return Err("cutoff ratio not positive".into());
    }
    let cutoff = reduce::largest_alpha_exponent(&ratio).map_err(|e| e.to_string())?;
    if cutoff > BigInt::from(450) {
        return Err(format!("cutoff {} exceeds 450", cutoff));
    }
    Ok(format!(
        "min bound {:e} at index {}, degenerate {:?}, cutoff {}",
        bound_f, sweep.argmin, sweep.degenerate, cutoff
    ))
}

/// Criterion 6: the three known Fibonacci-product exceptions are found by
/// both the inversion search and the direct scan.
fn c6_fibonacci_exceptions() -> Result<String, String> {
    let expected: [(u64, u64, u64); 3] = [(2, 1, 3), (3, 2, 26), (5, 2, 9)];
    let bx = SearchBox::new(FamilyName::Fibonacci, 20, 20, 20, 20, 10);
    let inverted = find_witnesses(&bx);
    let direct = direct_d_scan(FamilyName::Fibonacci, 10, 6, 12);
    for ws in [&inverted, &direct] {
        let mut pairs: Vec<(BigInt, BigInt)> = ws
            .iter()
            .map(|w| (w.xn1.clone(), w.xn2.clone()))
            .collect();
        pairs.sort();
        pairs.dedup();
        if pairs.len() != 3 {
            return Err(format!("expected 3 exception pairs, got {:?}", pairs));
        }
        for &(d, a, b) in &expected {
            if !pairs.contains(&(BigInt::from(a), BigInt::from(b))) {
                return Err(format!("missing exception pair ({}, {}) for d = {}", a, b, d));
            }
        }
    }
    // the d labels of the direct scan are exactly {2, 3, 5}
    let mut ds: Vec<BigInt> = direct
        .iter()
        .filter_map(|w| w.d.clone())
        .collect();
    ds.sort();
    ds.dedup();
    if ds != vec![BigInt::from(2), BigInt::from(3), BigInt::from(5)] {
        return Err(format!("direct-scan d labels {:?}, expected [2, 3, 5]", ds));
    }
    Ok("pairs (1,3) d=2, (2,26) d=3, (2,9) d=5 found by both searches".into())
}

/// Criterion 7: no Pell-product pair exists in the continuous-integration
/// sub-box, and the inversion search agrees with the direct scan.
fn c7_pell_search() -> Result<String, String> {
    let bx = SearchBox::new(FamilyName::Pell, 60, 60, 60, 60, 60);
    let ws = find_witnesses(&bx);
    if !ws.is_empty() {
        return Err(format!("unexpected witness: x1 = {}", ws[0].x1));
    }
    let rep = cross_validate(FamilyName::Pell, 2000, 10, 12).map_err(|e| e.to_string())?;
    if rep.witnesses != 0 {
        return Err(format!("cross-validation found {} witnesses", rep.witnesses));
    }
    Ok("sub-box (60,60,60,60,60) empty; cross-validation to d <= 2000 agrees".into())
}

/// Criterion 8: randomized consistency sweeps (deterministic seeds):
/// Pell-equation recurrence vs direct solving, and convergent determinants.
fn c8_properties() -> Result<String, String> {
    // x-term recurrence agrees with delta-power expansion for many d
    let mut checked = 0usize;
    for d in 2u64..=60 {
        let db = BigInt::from(d);
        let fund = match fundamental_solution(&db) {
            Ok(f) => f,
            Err(_) => continue, // perfect square
        };
        for n in 1..=8u64 {
            let xn = x_term_at(&fund.x1, fund.epsilon, n);
            // x_n^2 - d y_n^2 = epsilon^n exactly, so d | x_n^2 - eps^n
            let eps_n = if fund.epsilon == -1 && n % 2 == 1 {
                BigInt::from(-1)
            } else {
                BigInt::one()
            };
            let rem = (&xn * &xn - eps_n) % &db;
            if !rem.is_zero() {
                return Err(format!("d = {}, n = {}: x_n^2 - eps^n not divisible", d, n));
            }
            checked += 1;
        }
    }
    // convergent determinant identity at every depth of the main oracle
    let cf = cf_expand(&RealExpr::log4_over_log_alpha(), 25).map_err(|e| e.to_string())?;
    for k in 1..cf.convergents.len() {
        let (ref p, ref q) = cf.convergents[k];
        let (ref pp, ref qp) = cf.convergents[k - 1];
        let det = p * qp - pp * q;
        let want = if k % 2 == 1 { BigInt::one() } else { BigInt::from(-1) };
        if det != want {
            return Err(format!("determinant identity failed at depth {}", k));
        }
    }
    Ok(format!(
        "{} Pell-identity checks and {} determinant identities hold",
        checked,
        cf.convergents.len() - 1
    ))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<String, String>)> = vec![
        ("sequences", c1_sequences),
        ("folded-constants", c2_constants),
        ("scenario-ceilings", c3_ceilings),
        ("continued-fraction", c4_continued_fraction),
        ("lattice-sweep", c5_lattice_sweep),
        ("fibonacci-exceptions", c6_fibonacci_exceptions),
        ("pell-search", c7_pell_search),
        ("property-sweeps", c8_properties),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match f() {
            Ok(msg) => println!(
                "PASS [{}/8] {}: {} ({:.1}s)",
                i + 1,
                name,
                msg,
                t.elapsed().as_secs_f64()
            ),
            Err(msg) => {
                println!(
                    "FAIL [{}/8] {}: {} ({:.1}s)",
                    i + 1,
                    name,
                    msg,
                    t.elapsed().as_secs_f64()
                );
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}

/// Release-mode check of the full reference search box; several hours of
/// CPU time, so excluded from the default run:
/// `cargo test --release --test acceptance -- --ignored --nocapture`.
#[test]
#[ignore]
fn full_search_box() {
    let bx = SearchBox::new(FamilyName::Pell, 200, 200, 120, 120, 150);
    let ws = find_witnesses(&bx);
    assert!(
        ws.is_empty(),
        "unexpected witnesses in the full box: {:?}",
        ws.iter().map(|w| w.x1.clone()).collect::<Vec<_>>()
    );
    println!("PASS full-search-box: no witness in (200,200,120,120,150)");
}
