//! Writes the sample input files under `data/`.
//!
//! cargo run -p qgames --example gen_data -- data

use std::f64::consts::PI;
use std::path::PathBuf;

use qgames::engine::{lift_settings, Strategy};
use qgames::fixtures::{chsh, semiquantum_game, steering_game};
use qgames::io::{game_to_json, povms_to_json, strategy_to_json, to_json, FamilyJson, StateJson};
use qgames::qcore::{CMatrix, Povm};
use qgames::states::qubit;

fn basis(theta: f64) -> Povm {
    let b = CMatrix::from_columns(&[qubit::real_angle(theta), qubit::real_angle(theta + PI)]);
    Povm::from_basis(&b, &[0, 1], 2).expect("orthonormal basis")
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir).expect("create output directory");
    let write =
        |name: &str, body: String| std::fs::write(dir.join(name), body).expect("write file");

    write("chsh.json", game_to_json(&chsh()));
    write("steering.json", game_to_json(&steering_game()));
    write("semiquantum.json", game_to_json(&semiquantum_game()));
    write(
        "singlet.json",
        to_json(&StateJson::Family(FamilyJson::Singlet)),
    );
    write(
        "werner08.json",
        to_json(&StateJson::Family(FamilyJson::Werner { w: 0.8 })),
    );
    write(
        "mixed.json",
        to_json(&StateJson::Family(FamilyJson::MaximallyMixed {
            dims: vec![2, 2],
        })),
    );
    write(
        "zx_povms.json",
        povms_to_json(&[basis(0.0), basis(PI / 2.0)]),
    );

    // Z and X for Alice, the two diagonal directions for Bob.
    let g = chsh();
    let alice = lift_settings(g.alice(), &[basis(0.0), basis(PI / 2.0)], true).expect("lift");
    let bob = lift_settings(
        g.bob(),
        &[basis(-3.0 * PI / 4.0), basis(3.0 * PI / 4.0)],
        false,
    )
    .expect("lift");
    write(
        "chsh_strategy.json",
        strategy_to_json(&Strategy::new(alice, bob)),
    );
}
