use anyhow::Context;

fn main() -> anyhow::Result<()> {
    let code = pcsf::cli::main_with_args(std::env::args_os()).context("writing the report")?;
    std::process::exit(code)
}
