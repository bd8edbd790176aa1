//! Runs every registered sweep at its full default size and prints one line per
//! criterion. Set ACCEPTANCE_REPORTS=<dir> to keep the JSON reports.

use std::process::ExitCode;

use antitree_embed::sweep::{run_sweep, Suite, SweepConfig};

fn main() -> ExitCode {
    let dir = std::env::var_os("ACCEPTANCE_REPORTS").map(std::path::PathBuf::from);
    let mut failed = 0;
    for suite in Suite::ALL {
        let cfg = SweepConfig::new(suite);
        let report = match run_sweep(&cfg) {
            Ok(r) => r,
            Err(e) => {
                println!("[FAIL] criterion {} {suite}: {e}", suite.criterion());
                failed += 1;
                continue;
            }
        };
        println!("{}", report.line());
        if !report.passed {
            failed += 1;
            if let Some(r) = report.rows.first() {
                println!("       first failure #{}: {} ({})", r.index, r.check, r.detail);
            }
        }
        if let Some(dir) = &dir {
            let body = serde_json::to_string_pretty(&report.to_json()).unwrap();
            std::fs::write(dir.join(format!("{suite}.json")), body).unwrap();
        }
    }
    println!("{} of {} criteria passed", Suite::ALL.len() - failed, Suite::ALL.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
