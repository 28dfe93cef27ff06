use hardy_lab_core::norms::*;
use hardy_lab_core::params::Params;
use hardy_lab_core::profiles::*;

fn main() {
    let pr = Params::new(3, 0.5, 2.0).unwrap();
    let g = make_gaussian(1.0, GridSpec::default()).unwrap();
    let (p, q) = (pr.p_star(), pr.p);
    let weak = lorentz_norm(&g, 3, p, f64::INFINITY).unwrap();
    let strong = lorentz_norm(&g, 3, p, q).unwrap();
    println!("weak = {weak}   (analytic ~ 0.97765)");
    println!("strong = {strong} (analytic ~ 1.97434)");
    println!("bound = {}", (q / p).powf(1.0 / q) * strong);
    // dilation
    let lam: f64 = 2.5;
    for qq in [pr.p, f64::INFINITY] {
        let base = lorentz_norm(&g, 3, pr.p_star(), qq).unwrap();
        let dil = lorentz_norm(&g.dilate(lam).unwrap(), 3, pr.p_star(), qq).unwrap();
        println!("q={qq}: base {base} dil {dil} expect {}", lam.powf(3.0 / pr.p_star()) * base);
    }
}
