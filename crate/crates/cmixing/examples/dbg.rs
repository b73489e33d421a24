use cmixing::bounds::ClassBounds;
use cmixing::empirical::*;

fn main() {
    // Desk-scale kde configuration: N = 1e4, h = 0.19, D = 1, t at the
    // geometric-rate level sqrt((ln N)^2 / (N h)).
    let n: f64 = 1e4;
    let h = 0.19;
    let a = 0.75 / h;               // sup of K_h
    let sigma_f2 = 0.6 / h;         // R(K)/h envelope for Var(K_h)
    let b = 1.5 / (h * h);          // Lip(K)/h^2 translation semi-norm
    let t = ((n.ln().powi(2)) / (n * h)).sqrt();
    let class = ClassBounds::new(a, b, 1.0).unwrap().with_class_variance(sigma_f2).unwrap();
    let p = ChainParams::new(n, t, 1.0, class, 2.0, 1.0, 1.0).unwrap();
    let spec = EntropySpec::new(1.0, h, 1).unwrap();
    let c = check_conditions_prop6(&p, &spec).unwrap();
    let d = check_conditions_cor7(&p, &spec).unwrap();
    println!("a={a} b={b} sigma_f2={sigma_f2} t={t}");
    println!("C flags={:?} margins={:?}", c.flags, c.margins);
    println!("D flags={:?} margins={:?}", d.flags, d.margins);
}
