//! Acceptance suite. Each criterion runs at its stated tolerance and prints
//! one `PASS`/`FAIL` line; the test fails if any criterion fails.
//!
//! Run with `cargo test -p awspace-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use awspace_core::curvature::{normal_metric_oracle, sectional_curvature, Geometry, PlaneSample};
use awspace_core::report::scan_row;
use awspace_core::space::{verify_lemma51, verify_lemma51_scaled, AwParams, AwSpace};
use awspace_core::submersion::{analyze, BaseMetricChoice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAIRS: [(i64, i64); 4] = [(1, 1), (1, 2), (2, 3), (5, 7)];
const T_LEMMA: [f64; 3] = [-0.5, 0.1, 0.25];
const T_WIDE: [f64; 6] = [-0.5, 0.1, 0.25, -0.9, 0.5, 1.0];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn geometry(k: i64, l: i64, t: f64) -> Result<Geometry, String> {
    Geometry::new(AwParams::new(k, l, t)).map_err(|e| format!("({k},{l},{t}): {e}"))
}

fn bracket_identities() -> Outcome {
    let mut worst = 0.0f64;
    for (k, l) in PAIRS {
        for t in T_LEMMA {
            let s = AwSpace::build(AwParams::new(k, l, t)).map_err(|e| e.to_string())?;
            for row in verify_lemma51(&s).map_err(|e| e.to_string())? {
                worst = worst.max(row.abs_diff).max(row.off_target_max);
                ensure(row.pass, || {
                    format!("({k},{l},{t}) {}: diff {:.3e}", row.bracket, row.abs_diff)
                })?;
            }
        }
    }
    Ok(format!("24 cases, worst deviation {worst:.2e}"))
}

fn fiber_geodesic() -> Outcome {
    let mut worst = 0.0f64;
    for (k, l) in PAIRS {
        for t in T_WIDE {
            let g = geometry(k, l, t)?;
            let n = g
                .connection
                .nabla(0, 0)
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            worst = worst.max(n);
            ensure(n <= 1e-12, || {
                format!("({k},{l},{t}): |nabla_e0 e0| = {n:.3e}")
            })?;
        }
    }
    Ok(format!("max |nabla_e0 e0| = {worst:.2e}"))
}

fn kappa_and_tension() -> Outcome {
    let (mut worst_k, mut worst_diff) = (0.0f64, 0.0f64);
    for (k, l) in PAIRS {
        for t in T_WIDE {
            let g = geometry(k, l, t)?;
            let a = analyze(
                &g.space,
                &g.algebra,
                &g.connection,
                g.frame.clone(),
                BaseMetricChoice::InducedT,
            )
            .map_err(|e| format!("({k},{l},{t}): {e}"))?;
            let kmax = a.kappa.max_abs();
            let diff = a.tension.cross_check_diff.unwrap_or(f64::INFINITY);
            worst_k = worst_k.max(kmax);
            worst_diff = worst_diff.max(diff);
            ensure(kmax <= 1e-12, || {
                format!("({k},{l},{t}): max |kappa| = {kmax:.3e}")
            })?;
            ensure(diff <= 1e-10, || {
                format!("({k},{l},{t}): tension routes differ by {diff:.3e}")
            })?;
        }
    }
    Ok(format!(
        "max |kappa| = {worst_k:.2e}, tension route gap {worst_diff:.2e}"
    ))
}

fn induced_verdict() -> Outcome {
    for (k, l) in PAIRS {
        for t in T_WIDE {
            let g = geometry(k, l, t)?;
            let v = analyze(
                &g.space,
                &g.algebra,
                &g.connection,
                g.frame.clone(),
                BaseMetricChoice::InducedT,
            )
            .map_err(|e| e.to_string())?
            .verdict;
            ensure(v.all_true(), || format!("({k},{l},{t}): {v:?}"))?;
            let lambda = v.conformality.lambda.unwrap_or(f64::NAN);
            ensure((lambda - 1.0).abs() <= 1e-12, || {
                format!("({k},{l},{t}): lambda = {lambda}")
            })?;
        }
    }
    Ok("all flags true, lambda = 1 on 24 cases".into())
}

fn round_base_metric() -> Outcome {
    let want = [1.0 / 1.1, 1.0 / 1.1, 1.0, 1.0, 1.0, 1.0];
    for (k, l) in PAIRS {
        let g = geometry(k, l, 0.1)?;
        let v = analyze(
            &g.space,
            &g.algebra,
            &g.connection,
            g.frame.clone(),
            BaseMetricChoice::Round0,
        )
        .map_err(|e| e.to_string())?
        .verdict;
        let spectrum = v.conformality.dilation_spectrum;
        let gap = spectrum
            .iter()
            .zip(&want)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        ensure(gap <= 1e-12, || {
            format!("({k},{l},0.1): spectrum {spectrum:?}")
        })?;
        ensure(!v.conformality.is_weakly_conformal, || {
            format!("({k},{l},0.1) reported weakly conformal")
        })?;

        let g0 = geometry(k, l, 0.0)?;
        for base in [BaseMetricChoice::InducedT, BaseMetricChoice::Round0] {
            let v0 = analyze(
                &g0.space,
                &g0.algebra,
                &g0.connection,
                g0.frame.clone(),
                base,
            )
            .map_err(|e| e.to_string())?
            .verdict;
            ensure(v0.all_true(), || {
                format!("({k},{l},0) {}: {v0:?}", base.as_str())
            })?;
        }
    }
    Ok("round_0 spectrum {1/1.1 x2, 1 x4} at t=0.1; both bases agree at t=0".into())
}

fn normal_metric_oracle_agreement() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (k, l) in PAIRS {
        let g = geometry(k, l, 0.0)?;
        let mut checked = 0;
        while checked < 1000 {
            let u: [f64; 7] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let v: [f64; 7] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let Some(plane) = PlaneSample::orthonormalize(u, v) else {
                continue;
            };
            let a = sectional_curvature(&g.curvature, &plane).map_err(|e| e.to_string())?;
            let b = normal_metric_oracle(&g.space, &g.frame, &plane).map_err(|e| e.to_string())?;
            worst = worst.max((a - b).abs());
            ensure((a - b).abs() <= 1e-10, || {
                format!("({k},{l}): K = {a} vs oracle {b}")
            })?;
            checked += 1;
        }
    }
    let g = geometry(1, 1, 0.0)?;
    let k35 = sectional_curvature(&g.curvature, &PlaneSample::basis_pair(3, 5))
        .map_err(|e| e.to_string())?;
    ensure((k35 - 0.125).abs() <= 1e-10, || {
        format!("K(X3, X5) = {k35}")
    })?;
    Ok(format!(
        "4000 planes, worst gap {worst:.2e}; K(X3, X5) = {k35}"
    ))
}

fn tensor_identities() -> Outcome {
    let mut worst = 0.0f64;
    for (k, l) in PAIRS {
        for t in T_WIDE {
            let d = geometry(k, l, t)?.curvature.defects();
            worst = worst.max(d.max());
            ensure(d.max() <= 1e-10, || format!("({k},{l},{t}): {d:?}"))?;
        }
    }
    Ok(format!("max identity defect {worst:.2e}"))
}

fn positivity_scan() -> Outcome {
    let start = Instant::now();
    let mut min_seen = f64::INFINITY;
    for (k, l) in [(1, 1), (1, 2)] {
        for t in [-0.9, -0.5, -0.1, 0.05, 0.2, 0.32] {
            let row = scan_row(AwParams::new(k, l, t), 10_000, 42).map_err(|e| e.to_string())?;
            min_seen = min_seen.min(row.min_k);
            ensure(row.min_k > 0.0 && row.count_nonpositive == 0, || {
                format!(
                    "({k},{l},{t}): min_K = {}, nonpositive = {}",
                    row.min_k, row.count_nonpositive
                )
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "12 scans of 10^4 planes, smallest K {min_seen:.4e}, {elapsed:.2?}"
    ))
}

fn x0_gram_anomaly() -> Outcome {
    for (k, l) in PAIRS {
        for t in T_LEMMA {
            let s = AwSpace::build(AwParams::new(k, l, t)).map_err(|e| e.to_string())?;
            let n = s.x0_norm0_sq();
            ensure((n - 1.2).abs() <= 1e-12, || {
                format!("({k},{l},{t}): <X0,X0> = {n}")
            })?;
            // Rows must hold for the literal X0 and for the unit-normalized one.
            for scale in [1.0, 1.0 / 1.2f64.sqrt()] {
                let rows = verify_lemma51_scaled(&s, scale).map_err(|e| e.to_string())?;
                ensure(rows.iter().all(|r| r.pass), || {
                    format!("({k},{l},{t}) scale {scale}: {rows:?}")
                })?;
            }
        }
    }
    Ok("<X0,X0>_0 = 6/5; bracket rows pass with literal and unit X0".into())
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, Option<i32>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_awspace"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code()))
}

fn reproducible_output() -> Outcome {
    let verify = ["verify", "--k", "1", "--l", "2", "--t", "0.25"];
    let scan = [
        "scan",
        "--k",
        "1",
        "--l",
        "1",
        "--t-min",
        "-0.5",
        "--t-max",
        "0.3",
        "--t-steps",
        "5",
        "--planes",
        "10000",
        "--seed",
        "42",
    ];
    for args in [&verify[..], &scan[..]] {
        let first = run_cli(args)?;
        ensure(first.1 == Some(0), || {
            format!("{args:?} exited with {:?}", first.1)
        })?;
        for _ in 0..2 {
            let again = run_cli(args)?;
            ensure(again == first, || {
                format!("{args:?} output changed between runs")
            })?;
        }
    }
    Ok("verify and scan byte-identical over 3 runs".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("bracket identities on the (k,l,t) grid", bracket_identities),
        ("fibers are geodesics", fiber_geodesic),
        ("kappa vanishes and tension routes agree", kappa_and_tension),
        ("induced-metric harmonic-morphism verdict", induced_verdict),
        ("round base metric breaks conformality", round_base_metric),
        (
            "normal-metric curvature oracle at t=0",
            normal_metric_oracle_agreement,
        ),
        ("curvature tensor identities", tensor_identities),
        ("positive curvature scan", positivity_scan),
        ("X0 Gram anomaly", x0_gram_anomaly),
        ("reproducible CLI output", reproducible_output),
    ];
    let mut failed = Vec::new();
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", n + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why}", n + 1);
                failed.push(n + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
