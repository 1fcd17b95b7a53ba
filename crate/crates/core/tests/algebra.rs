use nalgebra::{DMatrix, DVector, Matrix3};
use proptest::prelude::*;
use rydgate::lindblad::{HamiltonianParts, PulseSchedule};
use rydgate::qcore::{basis_ket, embed, expectation, product_ket, swap_ions, tensor, DensityState, Level, Operator, OperatorKind};
use rydgate::spectra::{dark_bright_coupling, dressed_states, interaction_strength, stirap_eigensystem, RydbergPair, StirapFields};
use rydgate::{MicrowaveField, C};

fn op(entries: &[f64], dim: usize) -> Operator<f64> {
    let m = DMatrix::from_fn(dim, dim, |i, j| C::new(entries[2 * (i * dim + j)], entries[2 * (i * dim + j) + 1]));
    Operator::general(m).unwrap()
}

fn hermitian(entries: &[f64], dim: usize) -> Operator<f64> {
    let a = op(entries, dim);
    let m = (a.matrix() + a.matrix().adjoint()) * C::new(0.5, 0.0);
    Operator::new(m, OperatorKind::Observable).unwrap()
}

fn entries(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim * dim)
}

fn rel(a: &DMatrix<C<f64>>, b: &DMatrix<C<f64>>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #[test]
    fn kronecker_mixed_product(a in entries(3), b in entries(2), c in entries(3), d in entries(2)) {
        let (a, b, c, d) = (op(&a, 3), op(&b, 2), op(&c, 3), op(&d, 2));
        let lhs = tensor(&a, &b).unwrap().mul(&tensor(&c, &d).unwrap()).unwrap();
        let rhs = tensor(&a.mul(&c).unwrap(), &b.mul(&d).unwrap()).unwrap();
        prop_assert!(rel(lhs.matrix(), rhs.matrix()) < 1e-12);
    }

    #[test]
    fn kronecker_trace_and_adjoint_factorize(a in entries(4), b in entries(3)) {
        let (a, b) = (op(&a, 4), op(&b, 3));
        let ab = tensor(&a, &b).unwrap();
        let t = a.trace() * b.trace();
        prop_assert!((ab.trace() - t).norm() <= 1e-10 * t.norm().max(1.0));
        let dag = tensor(&a.dagger(), &b.dagger()).unwrap();
        prop_assert!(rel(ab.dagger().matrix(), dag.matrix()) < 1e-12);
    }

    #[test]
    fn commutator_is_antisymmetric_and_traceless(a in entries(6), b in entries(6)) {
        let (a, b) = (op(&a, 6), op(&b, 6));
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert!(ab.add(&ba).unwrap().frobenius_norm() <= 1e-12 * ab.frobenius_norm().max(1.0));
        prop_assert!(ab.trace().norm() < 1e-10);
    }

    #[test]
    fn hermitian_expectations_are_real(h in entries(6), psi in prop::collection::vec(-1.0f64..1.0, 12)) {
        let v = DVector::from_fn(6, |i, _| C::new(psi[2 * i], psi[2 * i + 1]));
        prop_assume!(v.norm() > 0.1);
        let rho = DensityState::from_ket(&v).unwrap();
        let e = expectation(&rho, &hermitian(&h, 6)).unwrap();
        prop_assert!(e.im.abs() < 1e-10);
    }

    #[test]
    fn swapping_ions_twice_is_identity(a in entries(6), b in entries(6)) {
        let (a, b) = (op(&a, 6), op(&b, 6));
        let ab = tensor(&a, &b).unwrap();
        let swapped = swap_ions(&ab).unwrap();
        prop_assert!(rel(swapped.matrix(), tensor(&b, &a).unwrap().matrix()) < 1e-14);
        prop_assert!(rel(swap_ions(&swapped).unwrap().matrix(), ab.matrix()) < 1e-14);
        let e0 = embed(&a, 0, 2).unwrap();
        let e1 = embed(&b, 1, 2).unwrap();
        prop_assert!(rel(e0.mul(&e1).unwrap().matrix(), ab.matrix()) < 1e-12);
        prop_assert!(rel(e0.mul(&e1).unwrap().matrix(), e1.mul(&e0).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn dressed_states_are_orthonormal_eigenvectors(om in 0.0f64..2000.0, de in -2000.0f64..2000.0) {
        prop_assume!(om > 1e-3 || de.abs() > 1e-3);
        let mw = MicrowaveField::new(om, de).unwrap();
        let d = dressed_states(&mw).unwrap();
        let (p, m) = (d.plus, d.minus);
        prop_assert!((p.c_s * p.c_s + p.c_p * p.c_p - 1.0).abs() < 1e-12);
        prop_assert!((m.c_s * m.c_s + m.c_p * m.c_p - 1.0).abs() < 1e-12);
        prop_assert!((p.c_s * m.c_s + p.c_p * m.c_p).abs() < 1e-12);
        let scale = om.max(de.abs());
        for s in [p, m] {
            let hs = de * s.c_s + 0.5 * om * s.c_p;
            let hp = 0.5 * om * s.c_s;
            prop_assert!((hs - s.energy * s.c_s).abs() < 1e-12 * scale);
            prop_assert!((hp - s.energy * s.c_p).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn interaction_is_bounded_and_even_in_detuning(om in 0.0f64..2000.0, de in 0.0f64..2000.0) {
        let pair = RydbergPair::reference();
        let vmax: f64 = pair.v_max();
        let v = interaction_strength(&MicrowaveField::new(om, de).unwrap(), &pair);
        let w = interaction_strength(&MicrowaveField::new(om, -de).unwrap(), &pair);
        prop_assert!(v >= 0.0 && v <= vmax * (1.0 + 1e-15));
        prop_assert_eq!(v, w);
    }

    #[test]
    fn stirap_vieta_and_dark_state(o1 in 0.0f64..200.0, o2 in 0.0f64..200.0, delta in -300.0f64..300.0) {
        prop_assume!(o1 + o2 > 1e-3);
        let f = StirapFields::new(o1, o2, delta).unwrap();
        let sys = stirap_eigensystem(&f).unwrap();
        let s2 = o1 * o1 + o2 * o2;
        let scale = s2 + delta * delta;
        prop_assert!((sys.plus.energy + sys.minus.energy - delta).abs() < 1e-10 * scale.sqrt().max(1.0));
        prop_assert!((sys.plus.energy * sys.minus.energy + s2).abs() < 1e-10 * scale.max(1.0));
        prop_assert_eq!(sys.dark.energy, 0.0);
        prop_assert_eq!(sys.dark.vector[1], 0.0);
        let h = Matrix3::new(0.0, o1, 0.0, o1, delta, o2, 0.0, o2, 0.0);
        for st in [sys.dark, sys.plus, sys.minus] {
            prop_assert!((st.vector.norm() - 1.0).abs() < 1e-12);
            prop_assert!((h * st.vector - st.vector * st.energy).norm() < 1e-10 * scale.sqrt().max(1.0));
        }
        // Independent dense eigensolver agrees on the spectrum.
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let mut ours = [sys.minus.energy, sys.dark.energy, sys.plus.energy];
        ours.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(ours) {
            prop_assert!((a - b).abs() < 1e-10 * scale.sqrt().max(1.0));
        }
    }

    #[test]
    fn dark_bright_coupling_never_exceeds_an_eighth(o1 in 0.0f64..100.0, o2 in 0.0f64..100.0, v in 0.0f64..50.0) {
        let c = dark_bright_coupling(&StirapFields::new(o1, o2, 0.0).unwrap(), v);
        prop_assert!(c >= 0.0 && c <= v / 8.0 * (1.0 + 1e-15));
    }
}

/// `<dd|H|+−>` in the full 36-dimensional two-ion space, with the STIRAP
/// ladder `(q0, e, r)` embedded using the laser-coupled dressed state as `r`.
fn explicit_dark_bright_element(o1: f64, o2: f64, delta: f64, mw: MicrowaveField<f64>, v_max: f64) -> f64 {
    let d = dressed_states(&mw).unwrap().plus;
    let r = basis_ket::<f64>(Level::S) * C::new(d.c_s, 0.0) + basis_ket::<f64>(Level::P) * C::new(d.c_p, 0.0);
    let sys = stirap_eigensystem(&StirapFields::new(o1, o2, delta).unwrap()).unwrap();
    let embed3 = |v: nalgebra::Vector3<f64>| {
        basis_ket::<f64>(Level::Q0) * C::new(v[0], 0.0) + basis_ket::<f64>(Level::E) * C::new(v[1], 0.0) + &r * C::new(v[2], 0.0)
    };
    let dark = embed3(sys.dark.vector);
    let plus = embed3(sys.plus.vector);
    let minus = embed3(sys.minus.vector);
    let pulse = PulseSchedule::constant(0.0, 0.0, delta, 1.0).unwrap();
    let h = HamiltonianParts::new(&pulse, &mw, &mw, v_max, 2).unwrap().at(&pulse, 0.0).into_matrix();
    let bra = product_ket(&dark, &dark);
    let ket = product_ket(&plus, &minus);
    (bra.adjoint() * h * ket)[(0, 0)].norm()
}

#[test]
fn dark_bright_coupling_against_two_ion_matrix_element() {
    let v_max = 2.0 * std::f64::consts::PI * 1.9;
    let mw = MicrowaveField::new(2.0 * std::f64::consts::PI * 150.0, 0.0).unwrap();
    let cases = [(10.0, 10.0), (30.0, 12.0), (5.0, 40.0), (80.0, 60.0)];
    for (o1, o2) in cases {
        for delta in [0.0, 10.0, 40.0, 120.0] {
            let approx = dark_bright_coupling(&StirapFields::new(o1, o2, delta).unwrap(), v_max);
            let exact = explicit_dark_bright_element(o1, o2, delta, mw, v_max);
            // Measured: exact/approx = 1/√(1 + Δ²/(4(Ω1² + Ω2²))); the
            // approximation is exact on resonance and overestimates otherwise.
            let predicted = 1.0 / (1.0 + delta * delta / (4.0 * (o1 * o1 + o2 * o2))).sqrt();
            assert!((exact / approx - predicted).abs() < 1e-12, "Ω1={o1} Ω2={o2} Δ={delta}: {} vs {predicted}", exact / approx);
        }
    }
}

#[test]
fn generic_core_runs_in_single_precision() {
    let a: Operator<f32> = Operator::identity(6);
    let b = embed(&a, 1, 2).unwrap();
    assert_eq!(b.dim(), 36);
    let psi = product_ket(&basis_ket::<f32>(Level::Q0), &basis_ket::<f32>(Level::S));
    let rho = DensityState::from_ket(&psi).unwrap();
    assert!((rho.purity() - 1.0).abs() < 1e-6);
    let d = dressed_states(&MicrowaveField::new(3.0f32, 0.0).unwrap()).unwrap();
    assert!((d.plus.c_s - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
}
