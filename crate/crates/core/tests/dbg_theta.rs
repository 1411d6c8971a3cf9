#[test]
fn dbg_theta_eps() {
    use padic_periods::ainf::*;
    use padic_periods::tilt::*;
    for p in [2u64, 3] {
        let w = WittCtx::new(p, 3, 2, 3).unwrap();
        let e = AInfElement::teichmuller(TiltMonoid::eps(&w.tower, 2).unwrap(), &w);
        let x = e.sub(&AInfElement::one(&w), &w);
        let prec = w.theta_precision();
        println!("p={p} prec={prec}");
        for (i, s) in x.slots.iter().enumerate() {
            let sh = AInfElement::sharp(s, prec, &w);
            println!("  slot {i}: sharp = {sh}");
        }
        let th = x.theta(prec, &w);
        println!("  theta = {th}");
    }
}
