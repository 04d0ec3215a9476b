use std::path::Path;
use std::process::Command;

use serde_json::Value;
use symfield::rep::GridRep;
use symfield::spectra::dispersion_values;

fn run(args: &[&str], config: Option<&str>, dir: &Path, env_out: Option<&Path>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symfield"));
    cmd.args(args).env_remove("SYMFIELD_OUT");
    if let Some(text) = config {
        let path = dir.join("config.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    match env_out {
        Some(o) => {
            cmd.env("SYMFIELD_OUT", o);
        }
        None => {
            cmd.arg("--out").arg(dir.join("out"));
        }
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap()).unwrap()
}

#[test]
fn ccr_check_finite_passes_and_embeds_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[ccr]\nbackends = [{ finweyl = { N = 4, d = 1 } }]\nrefinement = [64, 256]\n";
    let (code, err) = run(&["ccr-check"], Some(cfg), dir.path(), None);
    assert_eq!(code, 0, "{err}");
    let r = report(dir.path());
    assert_eq!(r["command"], "ccr-check");
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    assert!(r["tolerances"]["module"]["rank"].is_number());
    assert!(r["results"]["backends"][0]["residual"].as_f64().unwrap() < 1e-13);
    assert_eq!(r["results"]["monotone"], true);
    assert!(dir.path().join("out/plotdata/ccr_refinement.dat").exists());
    assert!(dir.path().join("out/ccr_refinement.csv").exists());
}

#[test]
fn huge_incommensurate_shift_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[ccr]\nbackends = []\nrefinement = [64, 128]\nxi = [1000.3, 0.2]\n";
    let (code, _) = run(&["ccr-check"], Some(cfg), dir.path(), None);
    assert_eq!(code, 1);
    assert_eq!(report(dir.path())["pass"], false);
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(&["ccr-check"], Some("[ccr]\nbogus = 1\n"), dir.path(), None);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"), "{err}");
    let (code, _) = run(&["hvz"], Some("colour = \"red\"\n"), dir.path(), None);
    assert_eq!(code, 2);
}

#[test]
fn invalid_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in ["[hvz]\nd = 3\n", "[membership]\nm = [100]\n", "[aniso]\nschedule = { lo = 0.9, hi = 0.5, count = 6 }\n"] {
        let (code, _) = run(&["hvz"], Some(cfg), dir.path(), None);
        assert_eq!(code, 2, "{cfg}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = "seed = 11\n[aniso]\nm = 128\npotential = \"bump\"\n";
    run(&["aniso"], Some(cfg), a.path(), None);
    run(&["aniso"], Some(cfg), b.path(), None);
    let ra = std::fs::read(a.path().join("out/report.json")).unwrap();
    let rb = std::fs::read(b.path().join("out/report.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn hvz_without_potentials_reproduces_the_dispersion_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(&["hvz"], Some("[hvz]\nm = 64\npotentials = []\n"), dir.path(), None);
    assert_eq!(code, 0, "{err}");
    let g = GridRep::balanced(1, 64).unwrap();
    let mut d = dispersion_values(&g, |k| k[0] * k[0]);
    d.sort_by(|a, b| a.total_cmp(b));
    let expected: Vec<String> = d.iter().map(|x| format!("eigenvalue,{x:.16e}")).collect();
    let csv = std::fs::read_to_string(dir.path().join("out/spectrum.csv")).unwrap();
    let got: Vec<String> = csv.lines().filter(|l| l.starts_with("eigenvalue,")).map(String::from).collect();
    assert_eq!(got, expected);
}

#[test]
fn hvz_two_dimensional_toy_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[hvz]
d = 2
m = 16
[[hvz.potentials]]
along = [0]
strength = -3.0
[[hvz.potentials]]
along = [1]
strength = -2.0
[[hvz.potentials]]
strength = -1.0
direction = [1.0, -1.0]
width = 1.4142135623730951
"#;
    let (code, err) = run(&["hvz"], Some(cfg), dir.path(), None);
    assert_eq!(code, 0, "{err}");
    let r = report(dir.path());
    let s = &r["results"]["spectrum"];
    assert_eq!(s["max_is_xi"], true);
    assert_eq!(s["per_coatom"].as_array().unwrap().len(), 2);
    // one part per lattice element {X, Y1, Y2, 0}
    assert_eq!(r["results"]["parts"].as_array().unwrap().len(), 4);
}

#[test]
fn demo2d_identities_hold() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(&["demo2d"], Some("[demo2d]\nm = 128\n"), dir.path(), None);
    assert_eq!(code, 0, "{err}");
    let r = report(dir.path());
    let rot = r["results"]["rotation"][0]["residual"].as_f64().unwrap();
    assert!(rot < 1e-8, "{rot}");
    assert!(dir.path().join("out/plotdata/dilation.dat").exists());
}

#[test]
fn aniso_step_differs_and_wrong_expectation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["aniso"], Some("[aniso]\nexpect = \"differ\"\n"), dir.path(), None);
    assert_eq!(code, 0);
    assert_eq!(report(dir.path())["results"]["verdict"], "limits differ");
    let (code, _) = run(&["aniso"], Some("[aniso]\npotential = \"bump\"\nexpect = \"differ\"\n"), dir.path(), None);
    assert_eq!(code, 1);
    assert_eq!(report(dir.path())["results"]["verdict"], "limits agree");
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("envout");
    let (code, _) = run(&["membership"], Some("[membership]\nm = [128, 256]\n"), dir.path(), Some(&target));
    assert_eq!(code, 0);
    assert!(target.join("report.json").exists());
    assert!(target.join("plotdata/membership_iii.dat").exists());
}
