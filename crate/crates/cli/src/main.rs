mod args;
mod config;
mod output;
mod run;

fn main() {
    std::process::exit(run::main_entry());
}
