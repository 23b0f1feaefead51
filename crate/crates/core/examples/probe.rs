use wedgefall_core::dynamics::*;
use wedgefall_core::tangent::TangentVector;
use nalgebra::Vector4;

fn main() {
    let sys = System::new(MassModel::new(4.0, 2.0, 1.2).unwrap());
    let masses = *sys.masses();
    let mut rng = sample_rng(71, 0);
    'outer: for _ in 0..400 {
        let x = sys.sample_phase_point(10.0, Section::M1Plus, &mut rng).unwrap();
        let log = match sys.run_orbit(&x, 12, SingularPolicy::Error) { Ok(l) => l, Err(_) => continue };
        let blocks = wedgefall_core::cones::detect_blocks(&masses, &log, 1e-6);
        for b in blocks {
            if b.start != 2 { continue; }
            let start_state = log.entries[b.start - 1].state;
            use rand::Rng;
            let z = Vector4::new(0.0, 0.0, rng.gen_range(-1.0..1.0_f64), rng.gen_range(-1.0..1.0));
            let v = TangentVector::from_reduced(&masses, &z);
            let m1m = sys.monodromy_step(&start_state).unwrap();
            let v1 = m1m.apply(&v);
            let rec1 = match sys.poincare_map(&start_state).unwrap() { StepOutcome::Regular(r) => r, _ => continue };
            let m2m = sys.monodromy_step(&rec1.state).unwrap();
            let v2 = m2m.apply(&v1);
            let (g1, g2) = masses.gamma();
            let a2 = m1m.coeff.unwrap();
            let a1 = m2m.coeff.unwrap();
            println!("z3 {} z4 {}", z[2], z[3]);
            println!("alpha2(step1) {a2} alpha1(step2) {a1}  diffs from log {:?}", b.diffs);
            println!("gain1 got {} want {}", v1.q_form() - v.q_form(), a2 * z[3] * z[3]);
            let e2p = z[2] + (1.0 - g2) * z[3];
            println!("eta2 after jump: got {} want {}", v1.reduced()[2], e2p);
            println!("gain2 got {} want {}", v2.q_form() - v1.q_form(), a1 * e2p * e2p);
            let _ = g1;
            break 'outer;
        }
    }
}
