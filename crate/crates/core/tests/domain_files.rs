use std::path::Path;

use christoffel::geometry::gallery;
use christoffel::{build_evaluator, Domain, EvaluatorOptions, Point2};

fn shipped(name: &str) -> Domain {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../domains").join(format!("{name}.toml"));
    Domain::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn shipped_files_match_the_gallery() {
    let opts = EvaluatorOptions::default();
    let mut cases: Vec<(String, Domain)> =
        gallery::NAMES.iter().map(|n| (n.to_string(), gallery::by_name(n).unwrap())).collect();
    cases.push(("lens-0.5".into(), gallery::lens(0.5).unwrap()));
    for (name, reference) in cases {
        let file = shipped(&name);
        assert_eq!(file.corners().len(), reference.corners().len(), "{name}");
        let c = reference.polygon_centroid();
        let a = build_evaluator(&file, 3, &opts).unwrap();
        let b = build_evaluator(&reference, 3, &opts).unwrap();
        for x in [c, c + Point2::new(0.05, -0.02)] {
            assert!((a.lambda(x) / b.lambda(x) - 1.0).abs() < 1e-12, "{name}");
        }
    }
}
