//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use jacpair::analyze::{check_derivation_conditions, check_nabla_identity, is_automorphic_pair, is_jacobian_pair};
use jacpair::families::{
    compose_mixed, form_condition_holds, gen_linear_pair, gen_quadratic_pair, search_non_monomial_forms,
    search_type_b, sum_difference_chain, FamilySpec,
};
use jacpair::forms::points_at_infinity;
use jacpair::morph::MorphismChain;
use jacpair::poly::jacobian_det;
use jacpair::report::{run_sweep, ChainKind, ChainSet, FamilyRange, ReportRow, SweepGrid, SweepReport};
use jacpair::sample::random_poly;
use jacpair::{ExponentVector, FieldCtx, MultiPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ctx(p: u64) -> FieldCtx {
    FieldCtx::new(p).expect("prime")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The standard sweep's rows and chains, computed once.
struct Standard {
    report: SweepReport,
    chains: Vec<(ReportRow, MorphismChain)>,
}

fn standard() -> Result<Standard, String> {
    let report = run_sweep(&SweepGrid::standard()).map_err(err)?;
    let chains = report
        .rows
        .iter()
        .map(|r| {
            let text = r.chain.as_ref().ok_or("chain row without chain text")?;
            let chain = MorphismChain::parse(ctx(r.p), text).map_err(err)?;
            Ok((r.clone(), chain))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(Standard { report, chains })
}

fn pair_of(r: &ReportRow) -> Result<(MultiPoly, MultiPoly), String> {
    let c = ctx(r.p);
    Ok((MultiPoly::parse(c, 2, &r.f1).map_err(err)?, MultiPoly::parse(c, 2, &r.f2).map_err(err)?))
}

fn nabla_identity_suite() -> Outcome {
    let mut total = 0;
    for (n, p) in [(1usize, 2u64), (1, 3), (1, 5), (2, 2), (2, 3), (2, 5), (3, 2)] {
        let count = if n == 3 { 25 } else { 100 };
        let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + p);
        let mut non_jacobian = 0;
        for k in 0..count {
            let fs: Vec<MultiPoly> = (0..n).map(|_| random_poly(&mut rng, ctx(p), n, 6, 8)).collect();
            let j = jacobian_det(&fs).map_err(err)?;
            non_jacobian += j.constant_value().is_none_or(|c| c.is_zero()) as usize;
            ensure(check_nabla_identity(&fs).map_err(err)?, || format!("n={n} p={p} tuple {k}"))?;
            total += 1;
        }
        ensure(non_jacobian > 0, || format!("n={n} p={p}: no non-Jacobian tuples drawn"))?;
    }
    Ok(format!("{total} tuples"))
}

fn derivation_suite(std: &Standard) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for (row, _) in &std.chains {
        let (f1, f2) = pair_of(row)?;
        let c = ctx(row.p);
        let probe = loop {
            let g = random_poly(&mut rng, c, 2, 3, 3);
            if !g.is_zero() {
                break g;
            }
        };
        let gs = [MultiPoly::var(c, 2, 0), MultiPoly::var(c, 2, 1), probe];
        let rep = check_derivation_conditions(&f1, &f2, &gs).map_err(err)?;
        ensure(rep.table_holds() && rep.reconstruction_holds(), || {
            format!("p={} seed={:?}: {rep:?}", row.p, row.seed)
        })?;
    }
    let mut rejected = 0;
    let mut draws = 0;
    while rejected < 50 {
        let p = [2u64, 3, 5][rejected % 3];
        let c = ctx(p);
        let f1 = random_poly(&mut rng, c, 2, 4, 4);
        let f2 = random_poly(&mut rng, c, 2, 4, 4);
        draws += 1;
        if f1.is_zero() || f2.is_zero() || is_jacobian_pair(&f1, &f2).map_err(err)?.is_some() {
            continue;
        }
        let g = random_poly(&mut rng, c, 2, 3, 3);
        let gs = [MultiPoly::var(c, 2, 0), MultiPoly::var(c, 2, 1), g];
        let rep = check_derivation_conditions(&f1, &f2, &gs).map_err(err)?;
        ensure(!rep.all_hold(), || format!("non-Jacobian pair passed: ({f1}, {f2})"))?;
        rejected += 1;
    }
    Ok(format!("{} Jacobian pairs, 50 non-Jacobian rejected ({draws} draws)", std.chains.len()))
}

fn cross_procedure(std: &Standard) -> Outcome {
    let mut automorphic = 0;
    for (row, chain) in &std.chains {
        let (f1, f2) = pair_of(row)?;
        let dec = is_automorphic_pair(&f1, &f2).map_err(err)?;
        let expect = chain.is_automorphism().map_err(err)?;
        ensure(dec.automorphic == expect, || format!("p={} seed={:?}: decision {}", row.p, row.seed, dec.automorphic))?;
        ensure(row.max_degree() as u64 <= 3 * row.p * row.p, || format!("degree cap exceeded: {row:?}"))?;
        if let Some(w) = dec.witness {
            ensure(w.apply().map_err(err)? == (f1, f2), || format!("witness mismatch at seed {:?}", row.seed))?;
            automorphic += 1;
        } else {
            ensure(!dec.automorphic, || "automorphic without witness".into())?;
        }
    }
    Ok(format!("{} chains, {automorphic} automorphic", std.chains.len()))
}

fn one_point_mod_p(std: &Standard) -> Outcome {
    let bad: Vec<_> = std.report.rows.iter().filter(|r| r.pts_inf_mod_p != [Some(1), Some(1)]).collect();
    ensure(bad.is_empty(), || format!("{} exceptions, first: {:?}", bad.len(), bad[0]))?;
    Ok(format!("{} chains, 0 exceptions", std.report.rows.len()))
}

fn low_degree(std: &Standard) -> Outcome {
    let mut low = 0;
    for r in &std.report.rows {
        if (r.deg1 as u64) < r.p && (r.deg2 as u64) < r.p {
            low += 1;
            ensure(r.automorphic && r.pts_inf == [1, 1] && r.triangle == [true, true] && r.deg_divides, || {
                format!("low-degree row fails: {r:?}")
            })?;
        }
        if !r.automorphic {
            ensure(r.max_degree() as u64 >= r.p, || format!("non-automorphic below p: {r:?}"))?;
        }
    }
    ensure(low > 0, || "no low-degree rows".into())?;
    Ok(format!("{low} low-degree rows"))
}

fn family_suite() -> Outcome {
    let mut linear = 0;
    for p in [3u64, 5, 7, 11] {
        let c = ctx(p);
        for m in 1..=2u32 {
            for a in 2..m * p as u32 {
                for alpha in [1u64, 2] {
                    let spec = FamilySpec::Linear { p, a, m, alpha: alpha % p };
                    let Ok(tb) = spec.type_b() else {
                        continue;
                    };
                    let (f1, f2) = gen_linear_pair(c, a, m, c.elem(alpha)).map_err(err)?;
                    let what = || format!("linear p={p} a={a} m={m} alpha={alpha}");
                    ensure(is_jacobian_pair(&f1, &f2).map_err(err)?.is_some(), what)?;
                    let pts = [points_at_infinity(&f1).map_err(err)?.count, points_at_infinity(&f2).map_err(err)?.count];
                    ensure(pts == [2, 2], what)?;
                    ensure(!is_automorphic_pair(&f1, &f2).map_err(err)?.automorphic, what)?;
                    ensure(tb.extension_degree() % p as u128 == 0, what)?;
                    linear += 1;
                }
            }
        }
    }
    let mut quadratic = 0;
    for p in [5u64, 7, 11] {
        let c = ctx(p);
        for s in 1..=2u32 {
            for a in 1..s * p as u32 {
                let Ok((f1, f2)) = gen_quadratic_pair(c, a, s, c.one()) else {
                    continue;
                };
                let what = || format!("quadratic p={p} a={a} s={s}");
                let (sp, a64) = (s as u64 * p, a as u64);
                ensure(f1.total_degree() == Some((2 * (sp - a64) - 1) as u32), what)?;
                ensure(f2.total_degree() == Some((sp - a64) as u32), what)?;
                ensure(is_jacobian_pair(&f1, &f2).map_err(err)?.is_some(), what)?;
                if s == 1 {
                    ensure(f2.total_degree().is_some_and(|d| (d as u64) < p) && f1.total_degree().is_some_and(|d| d as u64 >= p), what)?;
                    let pts = [points_at_infinity(&f1).map_err(err)?.count, points_at_infinity(&f2).map_err(err)?.count];
                    ensure(pts == [2, 2], what)?;
                }
                quadratic += 1;
            }
        }
    }
    ensure(linear > 0 && quadratic > 0, || "empty family suite".into())?;
    Ok(format!("{linear} linear and {quadratic} quadratic instances"))
}

fn search_recovers_closed_form() -> Outcome {
    let c = ctx(5);
    let out = search_type_b(c, 1, 2, 2, 1, usize::MAX).map_err(err)?;
    for a1 in 1..5 {
        let (f1, f2) = gen_quadratic_pair(c, 1, 1, c.elem(a1)).map_err(err)?;
        let h1: Vec<u64> = (0..3).map(|k| f1.coeff(&ExponentVector::new(&[1 + k, 2 * k])).value()).collect();
        let h2: Vec<u64> = (0..2).map(|k| f2.coeff(&ExponentVector::new(&[k, 1 + 2 * k])).value()).collect();
        let found = out.iter().any(|(g1, g2)| g1.coeffs() == h1.as_slice() && g2.coeffs() == h2.as_slice());
        ensure(found, || format!("closed form alpha1={a1} missing"))?;
    }
    let u = MultiPoly::parse(c, 2, "x1*x2^2").map_err(err)?;
    for (h1, h2) in &out {
        let (m, n) = (h1.degree().unwrap_or(0) as u32, h2.degree().unwrap_or(0) as u32);
        ensure(form_condition_holds(&u, m, n), || format!("condition fails for ({h1}, {h2})"))?;
    }
    Ok(format!("{} solutions", out.len()))
}

fn non_monomial_forms() -> Outcome {
    let mut detail = Vec::new();
    for (p, d, m, n) in [(3u64, 4u32, 2u32, 2u32), (5, 4, 1, 1)] {
        let r = search_non_monomial_forms(ctx(p), d, m, n, usize::MAX).map_err(err)?;
        ensure(r.exhaustive && r.counterexamples.is_empty(), || format!("(p,d,m,n)=({p},{d},{m},{n}): {r:?}"))?;
        detail.push(format!("({p},{d},{m},{n}): {} triples", r.triples_examined));
    }
    Ok(detail.join(", "))
}

fn mixed_composition() -> Outcome {
    let c = ctx(5);
    let img = compose_mixed(&sum_difference_chain(c, 2, 1, c.one()).map_err(err)?).map_err(err)?;
    let counts = [img.pts_inf_mod_p[0].count, img.pts_inf_mod_p[1].count];
    ensure(counts == [3, 3], || format!("counts {counts:?}"))?;
    Ok("counts [3, 3]".into())
}

fn mixed_grid() -> SweepGrid {
    SweepGrid {
        primes: vec![2, 3, 5, 7],
        families: vec![],
        chains: vec![ChainSet { kind: ChainKind::Mixed, seeds: (0..25).collect(), length: 3, budget: None }],
    }
}

fn mixed_sweep() -> Outcome {
    let rep = run_sweep(&mixed_grid()).map_err(err)?;
    let mut non_auto = 0;
    for r in &rep.rows {
        let chain = MorphismChain::parse(ctx(r.p), r.chain.as_deref().unwrap_or("")).map_err(err)?;
        ensure(chain.maps().iter().any(|m| m.is_type_b()), || format!("no type (b) map: {r:?}"))?;
        if !r.automorphic {
            non_auto += 1;
            ensure(r.max_degree() as u64 >= r.p, || format!("below p: {r:?}"))?;
        }
    }
    ensure(rep.rows.len() == 100, || format!("{} rows", rep.rows.len()))?;
    Ok(format!("100 chains, {non_auto} non-automorphic"))
}

fn determinism(std: &Standard) -> Outcome {
    let families = SweepGrid {
        primes: vec![3, 5, 7, 11],
        families: vec![
            FamilyRange::Linear { a: None, m: vec![1, 2], alpha: vec![1] },
            FamilyRange::Quadratic { a: None, s: vec![1, 2], alpha1: vec![1] },
        ],
        chains: vec![],
    };
    for grid in [families, mixed_grid()] {
        let a = run_sweep(&grid).map_err(err)?;
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(err)?;
        let b = single.install(|| run_sweep(&grid)).map_err(err)?;
        ensure(a.to_json().map_err(err)? == b.to_json().map_err(err)?, || "JSON differs".into())?;
        ensure(a.to_csv().map_err(err)? == b.to_csv().map_err(err)?, || "CSV differs".into())?;
    }
    let again = run_sweep(&SweepGrid::standard()).map_err(err)?;
    ensure(again.to_json().map_err(err)? == std.report.to_json().map_err(err)?, || "standard sweep differs".into())?;
    Ok("3 sweeps byte-identical across re-runs and thread counts".into())
}

enum Suite {
    Plain(fn() -> Outcome),
    Sweep(fn(&Standard) -> Outcome),
}

fn main() -> ExitCode {
    let start = Instant::now();
    let std = standard();
    println!("standard sweep: {:.2}s", start.elapsed().as_secs_f64());
    let criteria: [(u32, &str, Suite); 11] = [
        (1, "nabla identity", Suite::Plain(nabla_identity_suite)),
        (2, "derivation conditions", Suite::Sweep(derivation_suite)),
        (3, "automorphic decision agrees with chains", Suite::Sweep(cross_procedure)),
        (4, "one point at infinity mod p", Suite::Sweep(one_point_mod_p)),
        (5, "low-degree consistency", Suite::Sweep(low_degree)),
        (6, "family suite", Suite::Plain(family_suite)),
        (7, "coefficient search recovers closed form", Suite::Plain(search_recovers_closed_form)),
        (8, "no Jacobian pairs over non-monomial forms", Suite::Plain(non_monomial_forms)),
        (9, "mixed composition has three points mod p", Suite::Plain(mixed_composition)),
        (10, "mixed chains reach degree p", Suite::Plain(mixed_sweep)),
        (11, "sweep determinism", Suite::Sweep(determinism)),
    ];
    let mut failed = 0;
    for (n, name, suite) in &criteria {
        let t = Instant::now();
        let res = match (suite, &std) {
            (Suite::Plain(f), _) => f(),
            (Suite::Sweep(f), Ok(s)) => f(s),
            (Suite::Sweep(_), Err(e)) => Err(format!("standard sweep failed: {e}")),
        };
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why} ({secs:.2}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
