use std::time::Instant;

use mindeg_core::extract::{extract, verify_certificate, Strategy};
use mindeg_core::gen::gen_extremal_plus_one;
use mindeg_core::goodset::maximal_good_sets;
use mindeg_core::graph::k_core;

fn main() {
    let n: u64 = 1 << 20;
    let k = 3u32;
    let t = Instant::now();
    let g = gen_extremal_plus_one(k, n, 7).unwrap();
    println!("gen: {:?}", t.elapsed());
    let t = Instant::now();
    let core = k_core(&g, k);
    println!("kcore: {:?} size {}", t.elapsed(), core.len());
    let t = Instant::now();
    let sets = maximal_good_sets(&g, k);
    println!(
        "goodsets: {:?} count {} sizes {:?}",
        t.elapsed(),
        sets.len(),
        sets.iter().map(|s| s.len()).collect::<Vec<_>>()
    );
    let t = Instant::now();
    let r = extract(&g, k, Strategy::Theorem3).unwrap();
    println!("extract: {:?} branch={} out={}", t.elapsed(), r.branch.name(), r.subgraph.len());
    let t = Instant::now();
    let rep = verify_certificate(&g, k, &r);
    println!("verify: {:?} all_pass={}", t.elapsed(), rep.all_pass());
}
