//! Closed-form correlation for sharp momenta, against the nonrelativistic
//! `−a·b`, as the momenta grow.

use localized_epr::{correlation_sharp, on_shell, Direction, Vec3};

fn main() -> localized_epr::Result<()> {
    let mass = 1.0;
    let a = Direction::new(Vec3::new(1.0, 0.0, 1.0))?;
    let b = Direction::new(Vec3::new(0.0, 1.0, 1.0))?;
    println!("{:>8} {:>12} {:>12}", "|q|", "C(a,b)", "-a.b");
    for &k in &[0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 1e3] {
        let qa = on_shell(mass, Vec3::new(k, 0.0, 0.0))?;
        let qb = on_shell(mass, Vec3::new(0.0, k, 0.0))?;
        let c = correlation_sharp(&qa, &qb, &a, &b, mass)?;
        println!("{k:>8} {:>12.8} {:>12.8}", c.value, -a.dot(&b));
    }

    // Back-to-back momenta leave the singlet correlation untouched.
    let q = Vec3::new(0.3, -1.2, 2.0);
    let c = correlation_sharp(&on_shell(mass, q)?, &on_shell(mass, -q)?, &a, &b, mass)?;
    println!("back-to-back: C = {:.15} (-a.b = {:.15})", c.value, -a.dot(&b));
    Ok(())
}
