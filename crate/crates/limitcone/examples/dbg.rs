use limitcone::scalar::Scalar;
use limitcone::polygons::*;
use limitcone::hyp2::translation_length;
fn main() {
    for prec in [320usize, 800, 1600] {
        let x = Scalar::from_decimal("1e-4", prec).unwrap();
        let sqrt2 = Scalar::from_u64(2, prec).sqrt();
        let eight = Scalar::from_u64(8, prec);
        let alphas: Vec<Scalar> = (0..5).map(|k| &(&eight + &(&Scalar::from_u64(k as u64, prec) * &sqrt2)) / &eight).collect();
        let p3: Vec<Scalar> = alphas.iter().map(|a| x.pow(a)).collect();
        let poly = build_chain_polygon(3, &p3).unwrap().with_shift(2);
        let gens = poly.reflection_generators();
        let mut m = limitcone::hyp2::Isometry::identity(prec);
        for l in [3usize, 6, 5, 6] { m = m.compose(&gens[l]); }
        println!("prec {prec}: P3-shift2 len = {}", translation_length(&m).map(|v| v.to_decimal_sig(12)).unwrap_or("ERR".into()));
    }
}
