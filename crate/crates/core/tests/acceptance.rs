use pseudoboson::acceptance::run_criterion;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in 1..=11u8 {
        let report = run_criterion(id);
        println!("{}", report.line());
        if !report.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 11 criteria fail: {failed:?}", failed.len());
        ExitCode::FAILURE
    }
}
