//! Text presentations: parse one, build its model, and run the command
//! line in-process on a file from the corpus.

use afk0::cli::{self, SpecFile};

const TEXT: &str = "\
kind stationary
matrix 2 2
1 1
1 0
unit 1 1
";

fn main() -> afk0::Result<()> {
    let spec = SpecFile::parse(TEXT)?;
    let model = spec.model(8)?;
    println!("parsed a {} model", model.kind_name());
    print!("{}", spec.to_text());

    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/specs/golden-pair.diagram");
    let out = cli::run(["afk0", "order", file, "--a", "1:1,0,0", "--b", "1:0,0,1"]);
    println!("exit {}", out.code);
    print!("{}", out.stdout);
    Ok(())
}
