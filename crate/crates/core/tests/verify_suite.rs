use affine_vlab::verify::{all_pass, check_names, run_suite, text_report, SuiteLevel};

#[test]
fn fast_suite_passes() {
    let reports = run_suite(SuiteLevel::Fast, 0);
    assert_eq!(reports.len(), check_names(SuiteLevel::Fast).len());
    assert!(all_pass(&reports), "{}", text_report(&reports));
}
