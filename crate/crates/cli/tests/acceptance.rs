//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does. Run with `--nocapture` to see them.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use qgames::appendixlab::{generalized_bell_povm, reconstruct_assemblage, teleport_identity};
use qgames::bounds::{lhs_bound, lhv_bound, random_projective, seesaw};
use qgames::engine::{average_payoff, lift_settings, payoff_of, Strategy};
use qgames::fixtures::{semiquantum_game, steering_game};
use qgames::games::{chsh_game, Game};
use qgames::maps::{
    apply_losr, assemblage_from_lhs, cheat_distribution, cheat_povm, lhs_embed_cq, lhs_membership,
    random_losr, steer_assemblage, LhsModel, Membership,
};
use qgames::qcore::linalg::{identity, ket, projector};
use qgames::qcore::random::rng_for;
use qgames::qcore::{random_density, random_povm, CMatrix, DensityOperator, Povm};
use qgames::states::{ppt_min_eigenvalue, random_separable, singlet, werner_state};
use qgames_cli::{run_command, EXIT_OK};
use rand::Rng;

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check {
        ok,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let mut c = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        c.detail = format!("{}; {:.2?} (limit {:?})", c.detail, took, limit);
        c.ok &= took <= limit;
    } else {
        c.detail = format!("{}; {:.2?}", c.detail, took);
    }
    c
}

fn amax(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn zx() -> Vec<Povm> {
    let x = qgames::states::qubit::pauli_x();
    vec![
        Povm::new(vec![projector(&ket(2, 0)), projector(&ket(2, 1))]).unwrap(),
        Povm::new(vec![
            identity(2).scale(0.5) + x.scale(0.5),
            identity(2).scale(0.5) - x.scale(0.5),
        ])
        .unwrap(),
    ]
}

fn chsh() -> Check {
    let game = chsh_game();
    let lhv = lhv_bound(&game).unwrap().value;
    let q = seesaw(&game, &singlet(), 10, 0).unwrap().value;
    let sep = (0..20u64)
        .map(|k| {
            seesaw(
                &game,
                &random_separable(k, 1 + (k as usize % 4)).unwrap().0,
                10,
                k,
            )
            .unwrap()
            .value
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let ok = lhv == 2.0 && q >= 2.0 * 2f64.sqrt() - 1e-3 && sep <= 2.0 + 1e-6;
    check(
        ok,
        format!("lhv = {lhv}, singlet seesaw = {q:.6}, max separable = {sep:.9}"),
    )
}

fn semiquantum_spread() -> Check {
    let game = semiquantum_game();
    let vals: Vec<f64> = (0..20u64)
        .map(|k| {
            seesaw(
                &game,
                &random_separable(100 + k, 1 + (k as usize % 4)).unwrap().0,
                20,
                k,
            )
            .unwrap()
            .value
        })
        .collect();
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        hi - lo <= 1e-3,
        format!(
            "separable values in [{lo:.9}, {hi:.9}], spread {:.3e}",
            hi - lo
        ),
    )
}

/// Deterministic Alice answer `f(s)` with Bob measuring only the question
/// register, evaluated through the engine on a trivial shared state.
fn lhs_strategy(game: &Game, f: &[usize], bob: Povm) -> Strategy {
    let nx = game.n_x();
    let alice: Vec<Povm> = f
        .iter()
        .map(|&x| {
            let mut e = vec![CMatrix::zeros(1, 1); nx];
            e[x] = identity(1);
            Povm::new(e).unwrap()
        })
        .collect();
    Strategy::new(lift_settings(game.alice(), &alice, true).unwrap(), bob)
}

fn steering_gap() -> Check {
    let game = steering_game();
    let bound = lhs_bound(&game).unwrap().value;
    let q = seesaw(&game, &singlet(), 10, 0).unwrap().value;
    let trivial = DensityOperator::trivial();
    let (ns, nx, ny, d) = (game.alice().len(), game.n_x(), game.n_y(), game.bob().dim());
    let mut rng = rng_for(2024, 0);
    let mut best = f64::NEG_INFINITY;
    for k in 0..100_000u64 {
        let f: Vec<usize> = (0..ns).map(|_| rng.random_range(0..nx)).collect();
        let bob = if k % 2 == 0 {
            random_povm(k, d, ny).unwrap()
        } else {
            random_projective(&mut rng, d, ny).unwrap()
        };
        best = best.max(average_payoff(&game, &trivial, &lhs_strategy(&game, &f, bob)).unwrap());
    }
    let ok = q - bound >= 0.05 && best <= bound + 1e-9;
    check(
        ok,
        format!(
            "singlet {q:.6} vs lhs bound {bound:.6} (gap {:.4}); best of 1e5 lhs samples {best:.6}",
            q - bound
        ),
    )
}

fn cheating() -> Check {
    let mut worst_eq: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for (gi, game) in [chsh_game(), steering_game()].iter().enumerate() {
        let rho = singlet();
        let top = seesaw(game, &rho, 10, 0).unwrap();
        for k in 0..50u64 {
            let map = random_losr(
                1000 * gi as u64 + k,
                1 + (k as usize % 3),
                2,
                2,
                1 + (k as usize % 2),
            )
            .unwrap();
            let processed = apply_losr(&map, &rho).unwrap();
            let other = Strategy::new(
                random_povm(k, 2 * game.alice().dim(), game.n_x()).unwrap(),
                random_povm(k + 77, 2 * game.bob().dim(), game.n_y()).unwrap(),
            );
            for strat in [&top.strategy, &other] {
                let after = average_payoff(game, &processed, strat).unwrap();
                let joint = cheat_povm(&map, strat, game.alice().dim(), game.bob().dim()).unwrap();
                let via_j = payoff_of(game, &cheat_distribution(game, &rho, &joint).unwrap());
                worst_eq = worst_eq.max((after - via_j).abs());
                worst_excess = worst_excess.max(after - top.value);
            }
        }
    }
    check(
        worst_eq <= 1e-12 && worst_excess <= 1e-6,
        format!(
            "max |processed - joint| = {worst_eq:.2e}, max excess over seesaw = {worst_excess:.3e}"
        ),
    )
}

fn teleport() -> Check {
    let mut dev: f64 = 0.0;
    for seed in 0..100u64 {
        let w = random_density(seed, 2, 1 + (seed as usize % 2)).unwrap();
        dev = dev.max(amax(
            &(teleport_identity(&w).unwrap().matrix() - w.matrix()),
        ));
    }
    let mut povm_err: f64 = 0.0;
    for d in [2usize, 3] {
        let bell = generalized_bell_povm(d).unwrap();
        let sum = bell
            .effects()
            .iter()
            .fold(CMatrix::zeros(d * d, d * d), |acc, e| acc + e);
        povm_err = povm_err.max(amax(&(sum - identity(d * d))));
        for (i, e) in bell.effects().iter().enumerate() {
            for (j, f) in bell.effects().iter().enumerate() {
                let want = if i == j {
                    e.clone()
                } else {
                    CMatrix::zeros(d * d, d * d)
                };
                povm_err = povm_err.max(amax(&(e * f - want)));
            }
        }
    }
    check(
        dev <= 1e-10 && povm_err <= 1e-12,
        format!("max deviation {dev:.2e}; bell completeness/orthogonality {povm_err:.2e}"),
    )
}

fn reconstruction() -> Check {
    let product = DensityOperator::new(projector(&ket(4, 0)), vec![2, 2]).unwrap();
    let mut cases = vec![
        (product, zx()),
        (singlet(), zx()),
        (werner_state(0.8).unwrap(), zx()),
    ];
    for seed in 0..20u64 {
        let settings = (0..2)
            .map(|s| random_povm(seed * 10 + s, 2, 2).unwrap())
            .collect();
        cases.push((
            random_density(seed, 4, 1 + (seed as usize % 4))
                .unwrap()
                .with_dims(vec![2, 2])
                .unwrap(),
            settings,
        ));
    }
    let worst = cases
        .iter()
        .map(|(sigma, settings)| {
            let (a, b) = reconstruct_assemblage(sigma, settings).unwrap();
            a.max_diff(&b)
        })
        .fold(0.0, f64::max);
    check(
        worst <= 1e-9,
        format!(
            "{} states, max two-path difference {worst:.2e}",
            cases.len()
        ),
    )
}

fn lhs_machinery() -> Check {
    let mut embed: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let mut all_in = true;
    for seed in 0..20u64 {
        let model =
            LhsModel::random(seed, 2 + (seed as usize % 4), 2, 2 + (seed as usize % 2), 2).unwrap();
        let (sigma, settings) = lhs_embed_cq(&model).unwrap();
        let direct = assemblage_from_lhs(&model).unwrap();
        embed = embed.max(
            steer_assemblage(&sigma, &settings)
                .unwrap()
                .max_diff(&direct),
        );
        match lhs_membership(&direct, 1e-8).unwrap() {
            Membership::InLhs { residual: r, .. } => residual = residual.max(r),
            _ => all_in = false,
        }
    }
    let singlet_out = matches!(
        lhs_membership(&steer_assemblage(&singlet(), &zx()).unwrap(), 1e-8).unwrap(),
        Membership::NotInLhs { .. }
    );
    check(
        embed <= 1e-12 && all_in && residual <= 1e-8 && singlet_out,
        format!("embedding {embed:.2e}; all InLhs: {all_in}, max residual {residual:.2e}; singlet NotInLhs: {singlet_out}"),
    )
}

fn werner_threshold() -> Check {
    let f = |w: f64| ppt_min_eigenvalue(&werner_state(w).unwrap()).unwrap();
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let w = 0.5 * (lo + hi);
    check((w - 1.0 / 3.0).abs() <= 0.01, format!("threshold {w:.9}"))
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let steered = dir.path().join("a.json");
    let steered = steered.to_str().unwrap();
    let (chsh, steering, semi) = (
        data("chsh.json"),
        data("steering.json"),
        data("semiquantum.json"),
    );
    let (singlet, werner, zx, strat) = (
        data("singlet.json"),
        data("werner08.json"),
        data("zx_povms.json"),
        data("chsh_strategy.json"),
    );
    let first = run(&[
        "assemblage",
        "steer",
        "--state",
        &werner,
        "--povms",
        &zx,
        "-o",
        steered,
    ]);
    assert_eq!(first.code, EXIT_OK, "{}", first.stderr);
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "validate",
            "--game",
            &chsh,
            "--state",
            &singlet,
            "--strategy",
            &strat,
            "--povms",
            &zx,
        ],
        vec![
            "game",
            "eval",
            "--game",
            &chsh,
            "--state",
            &singlet,
            "--strategy",
            &strat,
        ],
        vec![
            "optimize", "--game", &steering, "--state", &werner, "--seed", "7",
        ],
        vec!["bound", "lhv", "--game", &chsh],
        vec!["bound", "lhs", "--game", &steering],
        vec!["bound", "separable", "--game", &semi, "--restarts", "4"],
        vec![
            "witness", "--game", &chsh, "--state", &werner, "--bound", "lhv",
        ],
        vec![
            "witness",
            "--game",
            &semi,
            "--state",
            &singlet,
            "--bound",
            "separable",
            "--restarts",
            "3",
        ],
        vec![
            "sweep",
            "--game",
            &chsh,
            "--bound",
            "lhv",
            "--steps",
            "6",
            "--restarts",
            "3",
        ],
        vec![
            "sweep",
            "--game",
            &chsh,
            "--bound",
            "lhv",
            "--steps",
            "3",
            "--restarts",
            "2",
            "--format",
            "json",
        ],
        vec!["assemblage", "steer", "--state", &singlet, "--povms", &zx],
        vec!["assemblage", "lhs-check", "--assemblage", steered],
        vec![
            "appendix",
            "teleport-check",
            "--trials",
            "20",
            "--seed",
            "3",
        ],
        vec![
            "appendix",
            "reconstruct",
            "--state",
            &werner,
            "--povms",
            &zx,
        ],
    ];
    let mut differing = Vec::new();
    for argv in &commands {
        let a = run(argv);
        let b = run(argv);
        if a.code != EXIT_OK || a != b {
            differing.push(argv[..2].join(" "));
        }
    }
    check(
        differing.is_empty(),
        format!(
            "{} commands rerun; differing or failing: {differing:?}",
            commands.len()
        ),
    )
}

fn run(args: &[&str]) -> qgames_cli::Outcome {
    run_command(std::iter::once("qgames").chain(args.iter().copied()))
}

type Criterion = (&'static str, Option<Duration>, fn() -> Check);

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        ("chsh bounds", Some(Duration::from_secs(5)), chsh),
        (
            "semiquantum separable spread",
            Some(Duration::from_secs(60)),
            semiquantum_spread,
        ),
        ("steering gap", Some(Duration::from_secs(30)), steering_gap),
        ("losr cheating", None, cheating),
        ("teleportation", Some(Duration::from_secs(5)), teleport),
        (
            "assemblage reconstruction",
            Some(Duration::from_secs(30)),
            reconstruction,
        ),
        ("lhs machinery", None, lhs_machinery),
        (
            "werner ppt threshold",
            Some(Duration::from_secs(1)),
            werner_threshold,
        ),
        ("determinism", None, determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let c = timed(limit, f);
        println!(
            "criterion {} ({name}): {}: {}",
            i + 1,
            if c.ok { "PASS" } else { "FAIL" },
            c.detail
        );
        if !c.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
