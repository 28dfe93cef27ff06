use hardy_lab_core::kernel::*;
fn main() {
    let t = kernel_table(3, 1.0);
    for d in [1e-6f64, 1e-4, 0.01, 0.3, 2.0, 10.0, 45.0] {
        let r = (-d).exp();
        let w = -(-d).exp_m1();
        let direct = phi_with_w(3, 1.0, r, w);
        let tab = t.phi_at(d);
        println!("d={:8.1e}  direct={:.12e} table={:.12e} rel={:.2e}", d, direct, tab, (tab-direct).abs()/direct);
    }
}
