use clap::Parser;

use hc::cli::{run, JobSpec};

fn main() {
    let job = JobSpec::parse();
    let out = run(&job);
    match &job.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("error = cannot write {path}: {e}");
                std::process::exit(1);
            }
        }
        None => print!("{}", out.text),
    }
    std::process::exit(out.code);
}
