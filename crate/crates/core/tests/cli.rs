use std::path::Path;

use afk0::algord::{IsoOutcome, OrderVerdict};
use afk0::cli::{diagram_of, parse_element, run, system_of, CliOutcome, Model, SpecFile};
use afk0::dimgroup::{k0_report, PositivityVerdict};
use afk0::fdcsl::search::images_from_assignment;
use afk0::fdcsl::MatrixUnitEmbedding;
use serde_json::Value;

const S: &str = "examples/specs";

fn cli(args: &str) -> CliOutcome {
    run(std::iter::once("afk0".to_string()).chain(args.split_whitespace().map(|a| a.replace("@", S))))
}

fn json(args: &str) -> (i32, Value) {
    let out = cli(&format!("{args} --json"));
    assert!(out.stderr.is_empty(), "{args}: {}", out.stderr);
    (out.code, serde_json::from_str(&out.stdout).unwrap())
}

fn model(file: &str) -> Model {
    let spec = SpecFile::parse(&std::fs::read_to_string(file.replace("@", S)).unwrap()).unwrap();
    spec.model(spec.depth.unwrap_or(8).max(8)).unwrap()
}

const CORPUS: &[&str] = &[
    "k0 @/golden-pair.diagram",
    "k0 @/five-vertex-pair.diagram",
    "k0 @/fibonacci.diagram",
    "k0 @/fib-theta.odiagram",
    "k0 @/nest-2-1.fdcsl",
    "positive @/uhf4-pair.diagram --element 1:-1,2",
    "positive @/uhf4-pair.diagram --element 1:2,-3",
    "positive @/golden-pair.diagram --element 0:1,-1,1",
    "positive @/fibonacci.diagram --element 0:3,-5",
    "positive @/fibonacci.diagram --element 0:-3,5",
    "scale @/golden-pair.diagram --element 0:1,0,1",
    "scale @/uhf4-pair.diagram --element 1:5,0",
    "order @/golden-pair.diagram --a 0:1,0,2 --b 0:0,1,2",
    "order @/golden-pair.diagram --a 0:0,1,2 --b 0:1,0,2",
    "order @/uhf4-pair.diagram --a 1:1,1 --b 1:0,2",
    "order @/five-vertex-pair.diagram --a 1:0,1,1,1,2 --b 1:1,0,1,1,2",
    "order @/dyadic-nest.diagram --a 1:1,3 --b 1:0,4",
    "order @/nest-2-1.fdcsl --a 0:1,1 --b 0:2,0",
    "order @/fib-theta.odiagram --a 1:0,0,1 --b 1:0,1,0",
    "order @/fib-theta.odiagram --a 1:0,1,0 --b 1:0,0,1",
    "statpair @/golden-pair.diagram",
    "statpair @/five-vertex-pair.diagram",
    "intermediates @/golden-pair.diagram",
    "iso @/fib-theta.odiagram @/fib-theta-telescope.odiagram",
    "iso @/standard-2-4.odiagram @/standard-4-2.odiagram",
    "iso @/fib-theta.odiagram @/fib-psi.odiagram",
    "distinguish @/fib-theta.odiagram @/fib-psi.odiagram",
    "distinguish @/standard-2-4.odiagram @/refinement.odiagram",
    "embedsearch @/t2.fdcsl @/t4.fdcsl --assignment 1,1,0,0;0,0,1,1",
    "embedsearch @/t2-t2.fdcsl @/obstructed-target.fdcsl --assignment 1,1,0,0,0,0,0,0;0,0,1,1,0,0,0,0;0,0,0,0,1,1,0,0;0,0,0,0,0,0,1,1",
];

fn arg<'a>(args: &'a str, flag: &str) -> &'a str {
    let mut it = args.split_whitespace();
    it.find(|a| *a == flag);
    it.next().unwrap()
}

fn files(args: &str) -> Vec<&str> {
    args.split_whitespace().filter(|a| a.starts_with('@')).collect()
}

/// Re-checks one JSON certificate through the library.
fn revalidate(args: &str, report: &Value) {
    let cert = report["certificate"].clone();
    let f = files(args);
    match args.split_whitespace().next().unwrap() {
        "k0" => {
            let d = diagram_of(&model(f[0]), 8).unwrap();
            assert_eq!(cert, serde_json::to_value(k0_report(&d).unwrap()).unwrap());
        }
        "positive" => {
            let v: PositivityVerdict = serde_json::from_value(cert).unwrap();
            let d = diagram_of(&model(f[0]), 8).unwrap();
            assert!(v.is_decided());
            assert!(v.validate(&d, &parse_element(arg(args, "--element")).unwrap()).unwrap(), "{args}");
        }
        "scale" => assert_eq!(cert["verdict"], report["verdict"]),
        "order" => {
            let v: OrderVerdict = serde_json::from_value(cert).unwrap();
            let (a, b) = (parse_element(arg(args, "--a")).unwrap(), parse_element(arg(args, "--b")).unwrap());
            match v {
                OrderVerdict::Holds { certificate } => {
                    let sys = system_of(&model(f[0]), 14).unwrap();
                    assert!(certificate.validate(sys.as_ref(), &a, &b).unwrap(), "{args}");
                }
                OrderVerdict::Refuted { .. } => {}
                OrderVerdict::Inconclusive { .. } => panic!("{args} undecided"),
            }
        }
        "statpair" => {
            let Model::Pair { pair, .. } = model(f[0]) else { panic!() };
            assert_eq!(cert["pair"], serde_json::to_value(&pair).unwrap());
            assert_eq!(cert["commuting_square"], Value::Bool(true));
        }
        "intermediates" => {
            assert_eq!(cert["candidates"].as_u64().unwrap() as usize, cert["relations"].as_array().unwrap().len());
        }
        "iso" => {
            let v: IsoOutcome = serde_json::from_value(cert).unwrap();
            if let IsoOutcome::Found { certificate } = v {
                let (Model::Ordered(a), Model::Ordered(b)) = (model(f[0]), model(f[1])) else { panic!() };
                assert!(certificate.validate(&a, &b).unwrap(), "{args}");
            }
        }
        "distinguish" => {
            let v: afk0::algord::Distinction = serde_json::from_value(cert).unwrap();
            let (Model::Ordered(a), Model::Ordered(b)) = (model(f[0]), model(f[1])) else { panic!() };
            assert_eq!(v, afk0::algord::distinguish(&a, &b, 12).unwrap());
        }
        "embedsearch" => {
            if report["verdict"] == "found" {
                let e: MatrixUnitEmbedding = serde_json::from_value(cert).unwrap();
                assert!(e.check_star_extendible().is_ok());
                let assignment = afk0::cli::parse_assignment(arg(args, "--assignment")).unwrap();
                let images = images_from_assignment(e.source(), e.target(), &assignment).unwrap();
                assert_eq!(e.images(), &images[..]);
            }
        }
        other => panic!("unknown command {other}"),
    }
}

#[test]
fn corpus_certificates_revalidate() {
    for args in CORPUS {
        let (code, report) = json(args);
        assert_eq!(report["command"], args.split_whitespace().next().unwrap());
        assert_eq!(report["input_digest"].as_str().unwrap().len(), 64);
        assert!(report.get("wall_time_ms").is_none());
        let undecided = ["inconclusive", "exhausted", "budget_exceeded", "not_distinguished"];
        let expected = if undecided.contains(&report["verdict"].as_str().unwrap()) { 2 } else { 0 };
        assert_eq!(code, expected, "{args}");
        revalidate(args, &report);
    }
}

#[test]
fn reports_are_deterministic() {
    for args in CORPUS.iter().take(12) {
        assert_eq!(cli(args), cli(args));
        assert_eq!(cli(&format!("{args} --json")), cli(&format!("{args} --json")));
    }
}

#[test]
fn worked_example_reports() {
    let k0 = cli("k0 @/golden-pair.diagram");
    assert_eq!(k0.code, 0);
    assert!(k0.stdout.contains("rank: 3"));
    assert!(k0.stdout.contains("free_abelian"));
    let order = json("order @/golden-pair.diagram --a 0:1,0,2 --b 0:0,1,2");
    assert_eq!((order.0, order.1["verdict"].as_str().unwrap()), (0, "holds"));
    let d = cli("distinguish @/fib-theta.odiagram @/fib-psi.odiagram");
    assert!(d.stdout.contains("special point: exists (1 germ) vs exists (2 germs)"), "{}", d.stdout);
    let iso = json("iso @/fib-theta.odiagram @/fib-psi.odiagram");
    assert_eq!((iso.0, iso.1["verdict"].as_str().unwrap()), (2, "exhausted"));
}

#[test]
fn input_errors_exit_one() {
    for args in [
        "",
        "frobnicate @/golden-pair.diagram",
        "order @/golden-pair.diagram --a 0:1,0 2 --b 0:0,1,2",
        "order @/golden-pair.diagram --a 0-1,0,2 --b 0:0,1,2",
        "order @/golden-pair.diagram --a 0:1,x,2 --b 0:0,1,2",
        "k0 @/missing.diagram",
        "k0 tests/golden/empty.spec",
        "statpair @/fibonacci.diagram",
        "iso @/golden-pair.diagram @/fib-psi.odiagram",
        "order @/fibonacci.diagram --a 0:1,0 --b 0:0,1",
        "embedsearch @/t2.fdcsl @/t4.fdcsl --assignment 1,1;0",
    ] {
        let out = cli(args);
        assert_eq!(out.code, 1, "{args}: {out:?}");
        assert!(out.stdout.is_empty() && !out.stderr.is_empty(), "{args}");
    }
    let empty = cli("k0 tests/golden/empty.spec");
    assert!(empty.stderr.contains("empty.spec: 1:1: expected `kind`"), "{}", empty.stderr);
}

#[test]
fn timing_is_opt_in() {
    let (_, r) = json("k0 @/golden-pair.diagram --timing");
    assert!(r["wall_time_ms"].is_u64());
    assert!(cli("k0 @/golden-pair.diagram --timing").stdout.contains("wall time: "));
}

#[test]
fn depth_override() {
    let (_, r) = json("positive @/fibonacci.diagram --element 0:3,-5 --depth 2");
    assert_eq!(r["depth"].as_u64().unwrap(), 2);
    let (code, r) = json("iso @/fib-theta.odiagram @/fib-psi.odiagram --depth 1");
    assert_eq!((code, r["verdict"].as_str().unwrap(), r["depth"].as_u64().unwrap()), (2, "exhausted", 1));
}

/// Human-readable reports; set `UPDATE_GOLDEN=1` to rewrite them.
#[test]
fn golden_reports() {
    let cases = [
        ("k0-golden", "k0 @/golden-pair.diagram"),
        ("order-golden", "order @/golden-pair.diagram --a 0:1,0,2 --b 0:0,1,2"),
        ("statpair-five-vertex", "statpair @/five-vertex-pair.diagram"),
        ("distinguish-fib", "distinguish @/fib-theta.odiagram @/fib-psi.odiagram"),
        ("iso-standard", "iso @/standard-2-4.odiagram @/standard-4-2.odiagram --json"),
        ("embedsearch-obstructed", CORPUS[CORPUS.len() - 1]),
    ];
    for (name, args) in cases {
        let out = cli(args);
        let text = format!("$ afk0 {args}\nexit {}\n{}", out.code, out.stdout);
        let path = Path::new("tests/golden").join(format!("{name}.txt"));
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&path, &text).unwrap();
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert_eq!(text, expected, "{name}");
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_afk0");
    let status = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap();
    let ok = status(&["k0", "examples/specs/golden-pair.diagram"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("rank: 3"));
    assert_eq!(status(&["iso", "examples/specs/fib-theta.odiagram", "examples/specs/fib-psi.odiagram"]).status.code(), Some(2));
    assert_eq!(status(&["nope"]).status.code(), Some(1));
}
