//! The `sweep` subcommand driven in-process: the branch of υ₂(Γ_t) at d = 2
//! switches where t² crosses 1/3.

fn main() {
    let args = ["upsilon", "sweep", "--channel", "gamma", "--d", "2", "--points", "15"];
    let mut out = Vec::new();
    let code = upsilon::cli::run(args, &mut out, &mut std::io::stderr());
    print!("{}", String::from_utf8_lossy(&out));
    println!("exit code {code}; crossing expected at t = {:.6}", -(1.0f64 / 3.0).sqrt());
}
