use lanecode::sim::{expected, run_scenario};
use lanecode::{DelayVector, Method, Scenario};

#[test]
fn random_choice_tracks_closed_forms() {
    let mut s = Scenario::new(DelayVector::abstract_network(12).unwrap(), 3, 1, Method::LncRnd);
    s.replications = 4000;
    s.frames_per_replication = 1;
    s.seed = 77;
    let want = expected(&s).unwrap();
    let got = run_scenario(&s).unwrap();
    for (est, value) in [
        (got.mean_diff_delay, want.diff_delay),
        (got.p_up_empirical, want.p_up),
        (got.mean_decoding, want.decoding),
    ] {
        let (est, value) = (est.unwrap(), value.unwrap());
        assert!(est.z(value) < 3.29, "{est:?} vs {value}");
    }
    assert_eq!(got.intact_rate, 1.0);
}

#[test]
fn optimal_choices_are_deterministic() {
    let d: DelayVector = "2,3,4,4,5,6,6,7,8,8,9".parse().unwrap();
    for method in [Method::LncOpt, Method::MlOpt] {
        let mut s = Scenario::new(d.clone(), 4, 0, method);
        s.replications = 20;
        s.frames_per_replication = 2;
        let got = run_scenario(&s).unwrap();
        let want = expected(&s).unwrap();
        assert_eq!(got.mean_diff_delay.unwrap().mean, want.diff_delay.unwrap());
        assert_eq!(got.mean_deskew.unwrap().mean, want.deskew.unwrap());
        assert_eq!(got.mean_decoding.map(|e| e.mean), want.decoding);
    }
}

#[test]
fn blocking_rate_matches_model() {
    let mut s = Scenario::new(DelayVector::abstract_network(10).unwrap(), 4, 2, Method::LncRnd);
    s.blocking = 0.4;
    s.replications = 4000;
    s.frames_per_replication = 1;
    let got = run_scenario(&s).unwrap();
    let want = expected(&s).unwrap();
    assert!(got.blocking_rate.z(want.blocking.unwrap()) < 3.29);
    assert!(got.mean_available.unwrap().z(want.mean_available.unwrap()) < 3.29);
}
