//! Evaluate raw Fox H-functions against closed forms.
//!
//! H^{1,0}_{0,1}[x | -; (0,1)] = e^{-x} and
//! H^{1,1}_{1,1}[x | (0,1); (0,1)] = 1/(1+x).

use wiretap::foxh::{fox_h, ContourPlan, HKernel};

fn main() {
    let exp = HKernel::from_rows(1, 0, &[], &[], &[0.0], &[1.0]).unwrap();
    let rational = HKernel::from_rows(1, 1, &[0.0], &[1.0], &[0.0], &[1.0]).unwrap();
    println!("{:>8} {:>22} {:>10} {:>22} {:>10}", "x", "H (exp)", "rel err", "H (1/(1+x))", "rel err");
    for x in [0.01, 0.1, 1.0, 5.0, 20.0, 100.0] {
        let e = fox_h(&exp, x, &ContourPlan::for_kernel(&exp, x).unwrap()).unwrap();
        let r = fox_h(&rational, x, &ContourPlan::for_kernel(&rational, x).unwrap()).unwrap();
        let (te, tr) = ((-x).exp(), 1.0 / (1.0 + x));
        println!(
            "{x:>8} {:>22.15e} {:>10.1e} {:>22.15e} {:>10.1e}",
            e.value,
            ((e.value - te) / te).abs(),
            r.value,
            ((r.value - tr) / tr).abs()
        );
    }
}
