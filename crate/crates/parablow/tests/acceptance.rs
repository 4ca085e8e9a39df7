//! Release-gate checks, one test per criterion; each prints a
//! `criterion N (...): PASS` line when it holds.

use std::process::Command;

use num_integer::gcd;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use parablow::blowup::{build_chain, cremona, weight_identities, CremonaData};
use parablow::config::parse_surface;
use parablow::fractions::{dual_expand, hj_eval, hj_expand, Weight};
use parablow::futaki::{
    destabilize, futaki, futaki_futs2, gradient_signs, integral_st, integral_t,
    orbifold_limit_coefficient, verify_certificate, FiberProfile, FutakiInput, Futs2Family, Sign,
};
use parablow::lattice::SurfaceLattice;
use parablow::rational::{pow2, rat, rint, Rat};
use parablow::surface::{
    classify_stability, normalize_to_splus, CentralFiberModel, ModelPoint, Side, StabilityVerdict,
};

const FIXTURE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn weight(p: u64, q: u64) -> Weight {
    Weight::new(p, q).unwrap()
}

fn random_weight(rng: &mut ChaCha8Rng, max_q: u64) -> Weight {
    loop {
        let q = rng.gen_range(2..=max_q);
        let p = rng.gen_range(1..q);
        if gcd(p, q) == 1 {
            return weight(p, q);
        }
    }
}

fn random_model(
    rng: &mut ChaCha8Rng,
    points: usize,
    max_q: u64,
    all_plus: bool,
) -> CentralFiberModel {
    CentralFiberModel {
        genus: rng.gen_range(0..=2),
        deg_plus: rng.gen_range(-3..=3),
        deg_minus: rng.gen_range(-3..=3),
        points: (0..points)
            .map(|i| ModelPoint {
                fiber: format!("y{i}"),
                weight: random_weight(rng, max_q),
                side: if all_plus || rng.gen_bool(0.5) {
                    Side::Plus
                } else {
                    Side::Minus
                },
            })
            .collect(),
    }
}

#[test]
fn criterion_01_hj_round_trip() {
    let mut checked = 0u64;
    for q in 2..=1000u64 {
        for p in 1..q {
            if gcd(p, q) != 1 {
                continue;
            }
            let w = weight(p, q);
            assert_eq!(hj_eval(hj_expand(w).entries()).unwrap(), w);
            assert_eq!(
                hj_eval(dual_expand(w).entries()).unwrap(),
                weight(q - p, q),
                "dual of {w} must evaluate to its complement"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 304_191);
    println!("criterion 1 (hj round trip): PASS");
}

#[test]
fn criterion_02_chain_weight_identities() {
    for q in 2..=200u64 {
        for p in 1..q {
            if gcd(p, q) != 1 {
                continue;
            }
            let mut lattice = SurfaceLattice::new(0, 0, 0);
            let (chain, _) = build_chain(weight(p, q), &mut lattice);
            let sums = weight_identities(&chain);
            assert_eq!(sums.left_sum, rat(p as i64, q as i64));
            assert_eq!(sums.right_sum, rat((q - p) as i64, q as i64));
            let center = &chain.nodes[chain.e0_index];
            assert_eq!((center.w, center.v), (q, p));
            let first = &chain.nodes[0];
            let last = chain.nodes.last().unwrap();
            assert_eq!((first.w, first.v), (1, 0));
            assert_eq!((last.w, last.v), (1, 1));
        }
    }
    println!("criterion 2 (chain weight identities): PASS");
}

#[test]
fn criterion_03_lattice_identities() {
    for q in 2..=200u64 {
        for p in 1..q {
            if gcd(p, q) != 1 {
                continue;
            }
            let mut lattice = SurfaceLattice::new(0, 0, 0);
            let (chain, _) = build_chain(weight(p, q), &mut lattice);
            let fiber = lattice.fiber();
            let ehat = lattice.exceptional(chain.first_blowup());
            assert!(lattice.pair(&fiber, &fiber).unwrap().is_zero());
            assert!(lattice.pair(&fiber, &ehat).unwrap().is_zero());
            assert_eq!(lattice.pair(&ehat, &ehat).unwrap(), rint(-1));
            assert_eq!(chain.fiber_decomposition(), fiber);
            assert_eq!(chain.ehat_decomposition(), ehat);
        }
    }
    println!("criterion 3 (lattice identities): PASS");
}

#[test]
fn criterion_04_cremona_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x043a_5747);
    for _ in 0..500 {
        let points = rng.gen_range(1..=5);
        let model = random_model(&mut rng, points, 50, false);
        let minus_count = model
            .points
            .iter()
            .filter(|p| p.side == Side::Minus)
            .count();

        let (normalized, steps) = normalize_to_splus(&model);
        assert_eq!(steps.len(), minus_count);
        assert!(normalized.points.iter().all(|p| p.side == Side::Plus));
        assert_eq!(normalized.slope_plus(), model.slope_plus());
        assert_eq!(normalized.slope_minus(), model.slope_minus());

        for point in &model.points {
            let data = CremonaData {
                side: point.side,
                weight: point.weight,
                s_minus_sq: model.s_minus_sq(),
                s_plus_sq: model.s_plus_sq(),
            };
            assert_eq!(cremona(&cremona(&data)), data);
        }
    }
    println!("criterion 4 (cremona invariance): PASS");
}

#[test]
fn criterion_05_degenerate_profile() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0de6_e2a7);
    let zero = Rat::zero();
    for _ in 0..100 {
        let points = rng.gen_range(1..=3);
        let model = random_model(&mut rng, points, 20, true);
        let family = Futs2Family::new(&model, &rint(1000)).unwrap();
        let input = family.futaki_input(&zero, &zero).unwrap();
        let slope = model.slope_plus();
        assert_eq!(integral_t(&input), -&slope / rint(12));
        assert_eq!(integral_st(&input), -slope);
    }
    println!("criterion 5 (degenerate profile): PASS");
}

#[test]
fn criterion_06_orbifold_limit_coefficient() {
    let model = CentralFiberModel {
        genus: 0,
        deg_plus: 0,
        deg_minus: 0,
        points: vec![ModelPoint {
            fiber: "y0".to_string(),
            weight: weight(1, 3),
            side: Side::Plus,
        }],
    };
    let at_large = orbifold_limit_coefficient(&model, &rint(1_000_000));
    assert!((at_large - rat(1, 3)).abs() < rat(1, 10_000));

    let ladder: Vec<Rat> = (0..=12)
        .map(|i| orbifold_limit_coefficient(&model, &(rint(1000) * pow2(i))))
        .collect();
    for pair in ladder.windows(2) {
        assert!(pair[0] < pair[1], "coefficient must grow with the scale");
    }
    assert!(ladder.iter().all(|c| c < &rat(1, 3)));
    println!("criterion 6 (orbifold limit coefficient): PASS");
}

#[test]
fn criterion_07_futs1_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f15_1234);
    let tau = pow2(-12);
    for _ in 0..200 {
        // A single point keeps the slope away from zero: it is an integer
        // minus a proper fraction.
        let model = random_model(&mut rng, 1, 20, true);
        let slope = model.slope_plus();
        assert!(!slope.is_zero());
        let value = futaki_futs2(&model, &rint(1000), &tau, &tau).unwrap();
        assert_eq!(Sign::of(&value), Sign::of(&slope));
    }
    println!("criterion 7 (futs1 sign): PASS");
}

#[test]
fn criterion_08_futs2_both_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f25_4321);
    let big = pow2(-5);
    let small = pow2(-8);
    for _ in 0..50 {
        // Complement pairs make the weights sum to an integer, so the slope
        // can be balanced to exactly zero by the splitting degrees.
        let pairs = rng.gen_range(1..=2);
        let mut points = Vec::new();
        for i in 0..pairs {
            let w = random_weight(&mut rng, 20);
            for (j, w) in [w, w.complement()].into_iter().enumerate() {
                points.push(ModelPoint {
                    fiber: format!("y{i}{j}"),
                    weight: w,
                    side: Side::Plus,
                });
            }
        }
        let deg_plus = rng.gen_range(-2..=2);
        let model = CentralFiberModel {
            genus: rng.gen_range(0..=2),
            deg_plus,
            deg_minus: deg_plus + pairs as i64,
            points,
        };
        assert!(model.slope_plus().is_zero());

        let family = Futs2Family::new(&model, &rint(1000)).unwrap();
        assert!(family.futaki_closed(&big, &small).unwrap().is_negative());
        assert!(family.futaki_closed(&small, &big).unwrap().is_positive());

        let report = gradient_signs(&model, &rint(1000)).unwrap();
        assert_eq!(
            (report.minus, report.plus),
            (Sign::Negative, Sign::Positive)
        );
    }
    println!("criterion 8 (futs2 both signs): PASS");
}

#[test]
fn criterion_09_destabilizer_end_to_end() {
    let cases = [
        ("unstable_slope_third.toml", rat(-1, 3), true),
        ("zero_slope_pair.toml", rat(0, 1), false),
    ];
    for (name, expected_slope, strictly_negative) in cases {
        let path = format!("{FIXTURE_DIR}/{name}");
        let surface = parse_surface(&std::fs::read_to_string(&path).unwrap()).unwrap();

        let verdict = classify_stability(&surface);
        let StabilityVerdict::UnstableWitness { section, slope } = &verdict else {
            panic!("{name}: expected an unstable witness, got {verdict}");
        };
        assert_eq!(slope, &expected_slope);

        let cert = destabilize(&surface, section).unwrap();
        assert!(cert.futaki.is_negative());
        if strictly_negative {
            assert!(cert.donaldson_futaki.is_negative());
        } else {
            assert!(!cert.donaldson_futaki.is_positive());
        }
        assert!(cert.positivity.pass);
        verify_certificate(&cert).unwrap();

        let output = Command::new(env!("CARGO_BIN_EXE_parablow"))
            .args(["verdict", "--config", &path])
            .output()
            .unwrap();
        assert_eq!(
            output.status.code(),
            Some(10),
            "verdict must exit 10 on {name}: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    println!("criterion 9 (destabilizer end to end): PASS");
}

fn rational_run(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rat> {
    let mut numerators: Vec<i64> = (0..len).map(|_| rng.gen_range(-64..=64)).collect();
    numerators.sort_unstable();
    numerators.into_iter().map(|n| rat(n, 64)).collect()
}

fn to_f64(value: &Rat) -> f64 {
    value.to_f64().unwrap()
}

#[test]
fn criterion_10_floating_point_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f10a);
    for _ in 0..1000 {
        let fiber_count = rng.gen_range(1..=2);
        let mut fibers = Vec::new();
        let mut f64_fibers: Vec<(Vec<u64>, Vec<f64>)> = Vec::new();
        for _ in 0..fiber_count {
            let mut lattice = SurfaceLattice::new(0, 0, 0);
            let (chain, _) = build_chain(random_weight(&mut rng, 50), &mut lattice);
            let weights = chain.flattened_weights();
            let e0 = chain.e0_index;
            let mut t_profile = rational_run(&mut rng, e0);
            t_profile.extend(rational_run(&mut rng, weights.len() - 1 - e0));
            f64_fibers.push((weights.clone(), t_profile.iter().map(to_f64).collect()));
            fibers.push(FiberProfile {
                weights,
                e0,
                t_profile,
            });
        }
        let s_hat_plus_sq = rng.gen_range(-10..=10);
        let s_hat_minus_sq = rng.gen_range(-10..=10);
        let omega_shat_diff = rat(rng.gen_range(-640..=640), 64);
        let mean_scalar = rat(rng.gen_range(1..=128), 64);
        let omega_sq = rat(rng.gen_range(1..=64_000), 32);
        let input = FutakiInput::new(
            fibers,
            s_hat_plus_sq,
            s_hat_minus_sq,
            omega_shat_diff.clone(),
            mean_scalar.clone(),
            omega_sq,
        )
        .unwrap();

        // Independent double-precision evaluation of the same data.
        let mut it = (s_hat_minus_sq - s_hat_plus_sq) as f64 + 6.0 * to_f64(&omega_shat_diff);
        for (w, t) in &f64_fibers {
            for (i, ti) in t.iter().enumerate() {
                it -= ti.powi(3) / ((w[i] * w[i + 1]) as f64);
            }
        }
        it /= 96.0;
        let mut ist = to_f64(&omega_shat_diff);
        for (w, t) in &f64_fibers {
            let mut lower = -1.0f64;
            for (c, &wc) in w.iter().enumerate() {
                let upper = if c < t.len() { t[c] } else { 1.0 };
                if wc > 1 {
                    ist += 0.25 * (1.0 / wc as f64 - 1.0) * (upper * upper - lower * lower);
                }
                lower = upper;
            }
        }
        let fut = 8.0 * to_f64(&mean_scalar) * it - ist;

        let close = |exact: &Rat, approx: f64| {
            let exact = to_f64(exact);
            (exact - approx).abs() <= 1e-10 * exact.abs().max(1.0)
        };
        assert!(close(&integral_t(&input), it));
        assert!(close(&integral_st(&input), ist));
        assert!(close(&futaki(&input), fut));
    }
    println!("criterion 10 (floating point oracle): PASS");
}

#[test]
fn criterion_11_scan_determinism() {
    let config = format!("{FIXTURE_DIR}/unstable_slope_third.toml");
    let scan = |threads: &str| {
        let output = Command::new(env!("CARGO_BIN_EXE_parablow"))
            .args([
                "scan",
                "--config",
                &config,
                "--grid",
                "8",
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "scan failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        output.stdout
    };
    let single = scan("1");
    let pooled = scan("8");
    assert!(single.starts_with(b"tau_minus,tau_plus,futaki,futaki_decimal,sign\n"));
    assert_eq!(single.len(), pooled.len());
    assert_eq!(
        single, pooled,
        "CSV must be byte-identical across thread counts"
    );
    println!("criterion 11 (scan determinism): PASS");
}
