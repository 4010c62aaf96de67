use delivery_core::generators::gen_boc;
use delivery_core::single_message::solve_single_message;
use std::time::Instant;

fn main() {
    let b = gen_boc(1, 4096).unwrap();
    let t = Instant::now();
    let (_, cost) = solve_single_message(&b.instance).unwrap();
    println!("cost {cost:.6} in {:?}", t.elapsed());
}
