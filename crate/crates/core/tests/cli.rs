mod common;

use std::path::{Path, PathBuf};

use coset_ra::cli::{run, CliOutput, EXIT_FAIL, EXIT_INPUT, EXIT_OK};
use coset_ra::document::{CosetSpec, FrameSpecDocument, RefutationDocument};

fn cli(args: &[&str]) -> CliOutput {
    run(std::iter::once("coset-ra").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// The bundled pentagon spec with one extra coset entry.
fn mutated(x: &str, y: &str, z: &str, representative: usize) -> String {
    let mut doc = FrameSpecDocument::from_json(common::PENTAGON_SPEC).unwrap();
    doc.cosets.retain(|c| (c.x.as_str(), c.y.as_str(), c.z.as_str()) != (x, y, z));
    doc.cosets.push(CosetSpec { x: x.into(), y: y.into(), z: z.into(), representative });
    doc.to_json()
}

#[test]
fn validate_bundled_pentagon() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", common::PENTAGON_SPEC);
    let out = cli(&["validate", s(&p)]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    for family in ["semi-frame condition (iv)", "coset condition (i)", "coset condition (iv)"] {
        assert!(out.stdout.contains(family));
    }
}

#[test]
fn coset_mutation_is_reported_at_its_pair() {
    let dir = tempfile::tempdir().unwrap();
    // H_pq = {0, 4}, so 1 names the other coset of it.
    let p = write(dir.path(), "m.json", &mutated("p", "q", "q", 1));
    let out = cli(&["--format", "machine", "validate", s(&p)]);
    assert_eq!(out.code, EXIT_FAIL);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let hit = v["failures"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f["name"] == "coset condition (i)" && f["instance"] == serde_json::json!(["p", "q"]));
    assert!(hit, "{}", out.stdout);
    let text = cli(&["validate", s(&p)]);
    assert!(text.stdout.contains("failure: coset condition (i) at (p, q)"));
}

#[test]
fn input_errors_are_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"groups\": 3}");
    for cmd in ["validate", "build", "atoms", "axioms", "measure", "decompose", "refute"] {
        assert_eq!(cli(&[cmd, s(&bad)]).code, EXIT_INPUT, "{cmd}");
    }
    assert_eq!(cli(&["recheck", s(&bad)]).code, EXIT_INPUT);
    let unknown = write(dir.path(), "u.json", &common::PENTAGON_SPEC.replace("\"x\": \"p\"", "\"x\": \"nope\""));
    assert_eq!(cli(&["validate", s(&unknown)]).code, EXIT_INPUT);
    assert_eq!(cli(&["pentagon", "--base", "S3"]).code, EXIT_INPUT);
    assert_eq!(cli(&["pentagon", "--base", "Q"]).code, EXIT_INPUT);
    assert_eq!(cli(&["table", "x.json", "--op", "meet"]).code, EXIT_INPUT);
}

#[test]
fn pentagon_tables() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", common::PENTAGON_SPEC);
    let atoms = cli(&["atoms", s(&p)]);
    assert_eq!(atoms.code, EXIT_OK);
    let rows: Vec<Vec<&str>> = atoms.stdout.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 120);
    let block: Vec<&str> = rows.iter().map(|r| r[1]).collect();

    let conv = cli(&["table", s(&p), "--op", "converse"]).stdout;
    let mut images: Vec<usize> = conv.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap().parse().unwrap()).collect();
    let involution = images.iter().enumerate().all(|(i, &j)| images[j] == i);
    images.sort_unstable();
    assert!(involution);
    assert_eq!(images, (0..120).collect::<Vec<_>>());

    let otimes = cli(&["table", s(&p), "--op", "otimes"]).stdout;
    let mut lines = otimes.lines();
    assert_eq!(lines.next(), Some("left\tright\totimes"));
    let mut n = 0;
    for l in lines {
        let f: Vec<&str> = l.split('\t').collect();
        let (a, b): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        // Middle of `a` is its y, start of `b` is its x.
        if rows[a][2] != block[b] {
            assert_eq!(f[2], "");
        }
        n += 1;
    }
    assert_eq!(n, 120 * 120);
}

#[test]
fn pentagon_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", common::PENTAGON_SPEC);
    let ax = cli(&["axioms", s(&p)]);
    assert_eq!(ax.code, EXIT_OK);
    assert!(!ax.stdout.contains("FAIL"));
    let m = cli(&["--format", "machine", "measure", s(&p)]);
    assert_eq!(m.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&m.stdout).unwrap();
    let measures: Vec<_> = v["counts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("measure "))
        .map(|c| c["value"].as_u64().unwrap())
        .collect();
    assert_eq!(measures, vec![8; 5]);
    let d = cli(&["decompose", s(&p)]);
    assert_eq!(d.code, EXIT_OK);
    assert!(d.stdout.contains("components: 1\n") && d.stdout.contains("simple: 1\n"));
}

#[test]
fn cycle_law_mutation_fails_r11_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "m.json", &mutated("p", "r", "p", 6));
    let out = cli(&["--format", "machine", "axioms", s(&p)]);
    assert_eq!(out.code, EXIT_FAIL);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let r11 = v["outcomes"].as_array().unwrap().iter().find(|o| o["name"] == "R11").unwrap();
    assert!(r11["failed"].as_u64().unwrap() > 0);
    let w = v["failures"].as_array().unwrap().iter().find(|f| f["name"] == "R11").unwrap();
    assert!(!w["instance"].as_array().unwrap().is_empty());
    let validate = cli(&["validate", s(&p)]);
    assert!(validate.stdout.contains("FAIL coset condition (iii)"));
}

#[test]
fn two_components() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "two.json", common::TWO_COMPONENT_SPEC);
    let d = cli(&["decompose", s(&p)]);
    assert_eq!(d.code, EXIT_OK);
    assert!(d.stdout.contains("components: 2\n") && d.stdout.contains("simple: 0\n"));
}

#[test]
fn pentagon_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gen = cli(&["pentagon"]);
    assert_eq!(gen.code, EXIT_OK);
    assert_eq!(gen.stdout, common::PENTAGON_SPEC);
    let p = dir.path().join("gen.json");
    let out = cli(&["pentagon", "--out", s(&p)]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&p).unwrap(), common::PENTAGON_SPEC);
    assert_eq!(cli(&["validate", s(&p)]).code, EXIT_OK);
    let first = (cli(&["atoms", s(&p)]).stdout, cli(&["table", s(&p), "--op", "otimes"]).stdout);
    let second = (cli(&["atoms", s(&p)]).stdout, cli(&["table", s(&p), "--op", "otimes"]).stdout);
    assert_eq!(first, second);
    let z3 = dir.path().join("z3.json");
    assert_eq!(cli(&["pentagon", "--base", "Z3", "--out", s(&z3)]).code, EXIT_OK);
    assert_eq!(cli(&["validate", s(&z3)]).code, EXIT_OK);
}

#[test]
fn refute_and_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", common::PENTAGON_SPEC);
    let cert = dir.path().join("cert.json");
    let out = cli(&["--jobs", "2", "refute", s(&p), "--out", s(&cert)]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.contains("all refuted: 1\n"));
    let text = std::fs::read_to_string(&cert).unwrap();
    let doc = RefutationDocument::from_json(&text).unwrap();
    assert!(doc.summary.all_refuted);
    assert_eq!(doc.to_json(), text);
    assert_eq!(cli(&["recheck", s(&cert)]).code, EXIT_OK);

    let mut bad = doc.clone();
    bad.summary.certificates[0].u_q.element ^= 1;
    let tampered = write(dir.path(), "bad.json", &bad.to_json());
    assert_eq!(cli(&["recheck", s(&tampered)]).code, EXIT_FAIL);

    let control = cli(&["refute", s(&p), "--identity-cosets"]);
    assert_eq!(control.code, EXIT_FAIL);
    assert!(control.stdout.contains("all refuted: 0\n"));
}
