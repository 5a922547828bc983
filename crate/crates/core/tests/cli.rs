use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn doctrine(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_doctrine")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = doctrine(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn spec_examples_through_the_binary() {
    assert_eq!(json(&["binom", "remark1", "--n", "3600", "--format", "json"])["result"]["fraction"], "1/120");
    let v = json(&["duration", "closed", "--b", "2", "--p", "0.5", "--n", "4"]);
    assert_eq!(v["result"]["probability"].to_string(), "2.5000000000000000e-1");
    let v = json(&["annuity", "error-table", "--maty", "--ages", "50", "--rates", "0.05"]);
    let e: f64 = v["result"]["entries"][0][0].to_string().parse().unwrap();
    assert!((2.5..=5.5).contains(&e), "{e}");
}

#[test]
fn exit_codes() {
    let usage = doctrine(&["binom", "exact", "--n", "ten", "--c", "1"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(usage.stdout.is_empty());
    let missing_seed = doctrine(&["binom", "simulate", "--n", "10", "--c", "1", "--reps", "10"]);
    assert_eq!(missing_seed.status.code(), Some(2));
    let domain = doctrine(&["duration", "closed", "--b", "3", "--p", "0.5", "--n", "4"]);
    assert_eq!(domain.status.code(), Some(3));
    assert!(domain.stdout.is_empty());
    assert!(!domain.stderr.is_empty());
    let not_invertible = doctrine(&["series", "revert", "--coeffs", "0,1", "--order", "3"]);
    assert_eq!(not_invertible.status.code(), Some(3));
    let degenerate = doctrine(&["recur", "solve", "--coeffs", "2,-1", "--init", "1,2"]);
    assert_eq!(degenerate.status.code(), Some(3));
}

#[test]
fn life_table_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("law.csv");
    let mut f = std::fs::File::create(&good).unwrap();
    writeln!(f, "age,lx").unwrap();
    for x in 20..86 {
        writeln!(f, "{x},{}", 86 - x).unwrap();
    }
    drop(f);
    let from_file = json(&["annuity", "value", "--table", good.to_str().unwrap(), "--age", "40", "--rate", "0.05"]);
    let from_law = json(&["annuity", "value", "--law", "86", "--age", "40", "--rate", "0.05"]);
    assert_eq!(from_file["result"]["value"], from_law["result"]["value"]);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "age,lx\n20,10\n21,eleven\n").unwrap();
    let out = doctrine(&["annuity", "value", "--table", bad.to_str().unwrap(), "--age", "20", "--rate", "0.05"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&out.stderr));

    let absent = dir.path().join("absent.csv");
    let out = doctrine(&["annuity", "table", "--table", absent.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn shipped_table_matches_reconstruction() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/maty_breslau.csv");
    let shipped = doctrine::lifeannuity::LifeTable::load(path).unwrap();
    let built = doctrine::lifeannuity::reconstruct_maty_table();
    assert_eq!(shipped.start_age(), built.start_age());
    assert_eq!(shipped.survivors(), built.survivors());
    let file = json(&["annuity", "value", "--table", path, "--age", "50", "--rate", "0.05"]);
    let builtin = json(&["annuity", "value", "--maty", "--age", "50", "--rate", "0.05"]);
    assert_eq!(file["result"]["value"], builtin["result"]["value"]);
}

#[test]
fn tour_file_validation() {
    let tour = json(&["games", "tour", "--start", "b1"]);
    let text = tour["result"]["tour"].as_str().unwrap().to_string();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tour.txt");
    std::fs::write(&path, &text).unwrap();
    let v = json(&["games", "validate", "--file", path.to_str().unwrap()]);
    assert_eq!(v["result"]["valid"], true);
    let broken = text.replacen("b1,", "b2,", 1);
    let v = json(&["games", "validate", "--tour", &broken]);
    assert_eq!(v["result"]["valid"], false);
    assert_eq!(v["result"]["index"], 1);
    assert_eq!(v["result"]["reason"], "illegal move");
}

#[test]
fn text_format_is_line_oriented() {
    let out = doctrine(&["binom", "factorial", "--n", "32", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("scientific: 26313083 × 10^28"), "{text}");
    assert!(text.lines().next() == Some("binom factorial"));
}

/// Library operations and the one subcommand that reaches each.
const COVERAGE: &[(&str, &str)] = &[
    ("exactnum::factorial", "binom factorial"),
    ("exactnum::binomial_coefficient", "binom coefficient"),
    ("exactnum::odds_from_probability", "binom odds"),
    ("exactnum::probability_from_odds", "binom probability"),
    ("binomlimit::exact_central_probability", "binom exact"),
    ("binomlimit::limit_central_probability", "binom limit"),
    ("binomlimit::demoivre_term", "binom term"),
    ("binomlimit::remark1_fraction", "binom remark1"),
    ("binomlimit::sample_size", "binom sample-size"),
    ("binomlimit::simulate_band", "binom simulate"),
    ("recurrence::duration_exceeds_exact", "duration exact"),
    ("recurrence::duration_exceeds_closed", "duration closed"),
    ("recurrence::solve_recurrence", "recur solve"),
    ("recurrence::eval_closed_form", "recur eval"),
    ("recurrence::partial_sum", "recur sum"),
    ("recurrence::factor_unity", "factor unity"),
    ("recurrence::demoivre_power", "factor demoivre-power"),
    ("series::raise_series", "series raise"),
    ("series::revert_series", "series revert"),
    ("series::compose_series", "series compose"),
    ("series::multinomial_coefficient_terms", "series multinomial"),
    ("lifeannuity::annuity_value", "annuity value"),
    ("lifeannuity::survival_probability", "annuity survival"),
    ("lifeannuity::joint_annuity_value", "annuity joint"),
    ("lifeannuity::approximation_error_table", "annuity error-table"),
    ("lifeannuity::reconstruct_maty_table", "annuity table"),
    ("conics::focal_product", "conic focal-product"),
    ("conics::radius_of_curvature", "conic curvature"),
    ("conics::centripetal_force", "conic force"),
    ("conics::inverse_square_constant", "conic inverse-square"),
    ("games::deck_match_odds", "games deck-odds"),
    ("games::find_tour", "games tour"),
    ("games::validate_tour", "games validate"),
];

#[test]
fn every_operation_has_exactly_one_subcommand() {
    let paths: BTreeSet<String> = doctrine::cli::subcommand_paths().into_iter().collect();
    let mut per_op: BTreeMap<&str, usize> = BTreeMap::new();
    for (op, path) in COVERAGE {
        assert!(paths.contains(*path), "{op} maps to unknown subcommand {path}");
        *per_op.entry(op).or_default() += 1;
    }
    assert!(per_op.values().all(|&n| n == 1));
    let reached: BTreeSet<&str> = COVERAGE.iter().map(|(_, p)| *p).collect();
    for path in &paths {
        assert!(reached.contains(path.as_str()), "subcommand {path} reaches no listed operation");
    }
}

#[test]
fn help_lists_every_group() {
    let out = doctrine(&["--help"]);
    assert!(out.status.success());
    let help = String::from_utf8(out.stdout).unwrap();
    for group in ["binom", "duration", "recur", "factor", "series", "annuity", "conic", "games"] {
        assert!(help.contains(group), "{group}");
    }
}
