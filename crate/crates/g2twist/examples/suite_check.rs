use g2twist::verify::*;
fn main() {
    for suite in [Suite::S6, Suite::Twistor, Suite::Loops] {
        let r = run_suite(suite, &VerifyConfig::default());
        print!("{}", r.render_text());
        if !r.all_pass() { std::process::exit(1); }
    }
}
