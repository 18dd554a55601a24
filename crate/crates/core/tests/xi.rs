use proptest::prelude::*;
use repzeta::cone::{compare_window, inversion_check, xi_coefficient, xi_rational, xi_truncate, XiError, XiSpec};

fn spec_strategy() -> impl Strategy<Value = XiSpec> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(u, d)| {
        let dim = u + 1;
        let lambda0 = prop::collection::vec(-3i64..=-1, dim);
        let lambda_rest = prop::collection::vec(prop::collection::vec(-2i64..=2, dim), d);
        let beta_rest = prop::collection::vec(prop::collection::vec(-1i64..=2, dim), d - 1);
        let anchor = 1i64..=2;
        let eps = prop::collection::vec(-1i64..=1, d);
        let delta = prop::collection::vec(0i64..=2, d);
        (lambda0, lambda_rest, beta_rest, anchor, eps, delta, 0i64..=1).prop_map(
            move |(l0, lr, br, a, eps, delta, n)| {
                let mut lambda = vec![l0];
                lambda.extend(lr);
                let mut anchor_form = vec![0; dim];
                anchor_form[0] = a;
                let mut beta = vec![vec![0; dim], anchor_form];
                beta.extend(br);
                XiSpec {
                    u,
                    d,
                    lambda,
                    beta,
                    eps: std::iter::once(0).chain(eps).collect(),
                    delta: std::iter::once(0).chain(delta).collect(),
                    n,
                }
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_form_matches_truncation(spec in spec_strategy()) {
        match compare_window(&spec, -4, 8) {
            Ok(bad) => prop_assert!(bad.is_empty(), "{:?}: {:?}", spec, bad),
            // a direction along which the series does not converge formally
            Err(XiError::AssumptionViolation(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn inversion_holds(spec in spec_strategy()) {
        match inversion_check(&spec) {
            Ok(ok) => prop_assert!(ok, "{:?}", spec),
            Err(XiError::AssumptionViolation(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn single_coefficients_agree_with_table() {
    let spec = XiSpec::from_json(
        r#"{"u":1,"d":2,"lambda":[[-2,-1],[-1,-3],[1,-2]],"beta":[[0,0],[2,0],[1,-1]],"eps":[0,1,-1],"delta":[0,2,1],"N":1}"#,
    )
    .unwrap();
    let table = xi_truncate(&spec, 4, 4).unwrap();
    for k in -4..=4 {
        for e in 0..=4 {
            let c = table.get(&(k, e)).copied().unwrap_or(0);
            assert_eq!(xi_coefficient(&spec, k, e).unwrap(), c);
        }
    }
}

#[test]
fn malformed_specs() {
    assert!(matches!(XiSpec::from_json("{\"u\":1}"), Err(XiError::Format(_))));
    let spec = XiSpec {
        u: 1,
        d: 1,
        lambda: vec![vec![-1, -1], vec![-1]],
        beta: vec![vec![0, 0], vec![1, 0]],
        eps: vec![0, 0],
        delta: vec![0, 0],
        n: 0,
    };
    assert!(matches!(xi_rational(&spec), Err(XiError::Format(_))));
    let mut no_anchor = spec.clone();
    no_anchor.lambda[1] = vec![-1, -1];
    no_anchor.beta[1] = vec![1, 1];
    assert!(matches!(xi_rational(&no_anchor), Err(XiError::AssumptionViolation(_))));
}

