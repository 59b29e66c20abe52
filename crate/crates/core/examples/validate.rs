//! Validate a few bundle specs and print the violations.

use quasi_einstein::{validate_spec, BundleSpec, EndpointType, FactorSpec};

fn main() {
    let specs = [
        ("CP^2 collapse", BundleSpec::collapse(vec![FactorSpec::new(2, 3, 1)], 2.0)),
        ("q = p", BundleSpec::collapse(vec![FactorSpec::new(2, 3, 3)], 2.0)),
        (
            "blowdown factor with p != n + 1",
            BundleSpec::new(vec![FactorSpec::new(1, 3, 1)], 2.0, EndpointType::Blowdown, EndpointType::SmoothCollapse),
        ),
        ("m below 1", BundleSpec::collapse(vec![FactorSpec::new(1, 2, 1)], 0.5)),
    ];
    for (name, spec) in &specs {
        let report = validate_spec(spec);
        if report.is_valid() {
            println!("{name}: valid");
        } else {
            println!("{name}:\n{report}");
        }
    }
}
