//! The singlet amplitude matrix and its spin traces: closed forms against
//! explicit 2×2 matrix products.

use localized_epr::amplitude::{trace_ab_direct, trace_plain_direct};
use localized_epr::{amplitude_matrix, on_shell, trace_ab, trace_plain, Direction, Vec3};

fn main() -> localized_epr::Result<()> {
    let m = 1.0;
    let k = on_shell(m, Vec3::new(1.0, 0.0, 0.0))?;
    let p = on_shell(m, Vec3::new(0.0, 1.0, 0.0))?;
    let k2 = on_shell(m, Vec3::new(0.4, 0.2, -0.7))?;
    let p2 = on_shell(m, Vec3::new(-1.1, 0.3, 0.5))?;
    let amp = amplitude_matrix(&k, &p, m)?;
    let amp2 = amplitude_matrix(&k2, &p2, m)?;
    println!("M(k, p) =\n{}", amp.mat);

    let a = Direction::spherical(0.3, 1.1);
    let b = Direction::spherical(2.0, -0.4);
    let closed = trace_ab(&a, &b, &amp, &amp2)?;
    let direct = trace_ab_direct(&a, &b, &amp.mat, &amp2.mat);
    println!("Tr{{(a.s) M (b.sT) M'^+}}: closed {closed:.15}  direct {direct:.15}");
    let closed = trace_plain(&amp, &amp2);
    let direct = trace_plain_direct(&amp.mat, &amp2.mat);
    println!("Tr{{M M'^+}}:             closed {closed:.15}  direct {direct:.15}");
    Ok(())
}
