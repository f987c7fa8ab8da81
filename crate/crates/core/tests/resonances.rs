use wcl_core::resonance::{
    build_hamiltonian_cap, build_hamiltonian_scaled, narrowest, nearest, plateau_filter, relative_distance,
    resonances_from_spectrum, transfer_matrix_roots, CapSpec, Grid1D, Potential1D, SearchBox, DEFAULT_MAX_WIDTH,
};

const HBAR: f64 = 0.05;

#[test]
fn cap_resonances_survive_doubling_eta() {
    let v = Potential1D::gaussian_double_barrier(1.0, 0.65, 0.15);
    let g = Grid1D::new(8.0, 1000, HBAR).unwrap();
    let base = build_hamiltonian_cap(&g, &v, &CapSpec::quadratic(0.05, 1.5)).unwrap().spectrum().unwrap();
    let doubled = build_hamiltonian_cap(&g, &v, &CapSpec::quadratic(0.1, 1.5)).unwrap().spectrum().unwrap();
    let res = narrowest(&resonances_from_spectrum(&base, (0.0, 1.0), DEFAULT_MAX_WIDTH, HBAR), 3);
    assert_eq!(res.len(), 3);
    assert_eq!(plateau_filter(&res, &[&doubled], 1e-4).len(), 3);
}

#[test]
fn scaled_resonances_do_not_move_with_theta() {
    let v = Potential1D::gaussian_double_barrier(1.0, 0.65, 0.15);
    let g = Grid1D::new(8.0, 1000, HBAR).unwrap();
    let a = build_hamiltonian_scaled(&g, &v, 0.2).unwrap().spectrum().unwrap();
    let b = build_hamiltonian_scaled(&g, &v, 0.3).unwrap().spectrum().unwrap();
    let res = narrowest(&resonances_from_spectrum(&a, (0.0, 1.0), DEFAULT_MAX_WIDTH, HBAR), 3);
    for r in &res {
        let w = nearest(&b.eigenvalues, r.value()).unwrap();
        // The O(h^2) discretization error itself depends on theta (~1e-4 here).
        let d = relative_distance(w, r.value());
        assert!(d < 1e-3, "{d:e}");
    }
}

#[test]
fn oracle_roots_lie_below_the_barrier_and_decay() {
    let v = Potential1D::square_double_barrier(1.0, 0.3, 0.5);
    let roots = transfer_matrix_roots(&v, HBAR, &SearchBox::new(0.005, 0.3, -0.01, 0.01)).unwrap();
    assert!(!roots.is_empty());
    for z in &roots {
        assert!(z.re > 0.0 && z.re < 1.0);
        assert!(z.im < 0.0);
    }
    // Widths grow with energy through the barrier.
    assert!(roots.windows(2).all(|w| w[1].im < w[0].im));
}

#[test]
fn bad_inputs_are_rejected() {
    let v = Potential1D::square_double_barrier(1.0, 0.3, 0.5);
    let g = Grid1D::new(5.0, 400, HBAR).unwrap();
    assert!(build_hamiltonian_scaled(&g, &v, 0.2).is_err());
    assert!(Grid1D::new(5.0, 10, HBAR).is_err());
    let crossing = SearchBox::new(-0.1, 0.3, -0.01, 0.01);
    assert!(transfer_matrix_roots(&v, HBAR, &crossing).is_err());
}
