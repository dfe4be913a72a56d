//! Drives the command-line front end in-process: a verify suite and a
//! sample run over a small stream file.

use levy_samplers::cli;

fn main() {
    let dir = std::env::temp_dir().join("levy-walkthrough");
    std::fs::create_dir_all(&dir).unwrap();
    let stream = dir.join("stream.txt");
    std::fs::write(&stream, "# key delta\nalice 1\nbob 4\nalice 0.5\n").unwrap();
    let out = dir.join("report.json");

    let code = cli::run([
        "levy", "--seed", "0x2a", "sample", stream.to_str().unwrap(), "--g", "fhalf", "--reps", "2000",
        "--out", out.to_str().unwrap(),
    ]);
    println!("sample exit {code}");
    println!("{}", std::fs::read_to_string(&out).unwrap());
    let code = cli::run(["levy", "verify", "frontier", "--out", out.to_str().unwrap()]);
    println!("verify frontier exit {code}");
}
