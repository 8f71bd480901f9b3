use std::process::ExitCode;

use tpagg_acceptance::CRITERIA;

fn main() -> ExitCode {
    let mut failed = 0;
    for (name, check) in CRITERIA {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
