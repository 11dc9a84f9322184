
use ibfem::config::StudyConfig;
use ibfem::solver::{solve_symmetric_indefinite, SolveMethod, SolverOptions};
use ibfem::study::{assemble_level, immersed_boundary};
use nalgebra::{DMatrix, DVector};

#[test]
fn direct_minres_and_dense_agree_on_ib_system() {
    let cfg = StudyConfig::default();
    let ib = immersed_boundary(&cfg).unwrap();
    let (sys, markers) = assemble_level(&cfg, ib.as_ref(), 10).unwrap();
    assert_eq!(markers, 11);
    let rhs = sys.rhs();
    let direct = solve_symmetric_indefinite(&sys.op, &rhs, &SolverOptions::default()).unwrap();
    assert_eq!(direct.method, SolveMethod::Direct);
    assert!(direct.residual <= 1e-10);
    let iterative = solve_symmetric_indefinite(
        &sys.op,
        &rhs,
        &SolverOptions {
            direct_threshold: 0,
            ..SolverOptions::default()
        },
    )
    .unwrap();
    assert_eq!(iterative.method, SolveMethod::Minres);
    assert!(iterative.residual <= 1e-10);

    let k = sys.op.assemble();
    let mut d = DMatrix::zeros(k.nrows(), k.ncols());
    for r in 0..k.nrows() {
        for (c, v) in k.row(r) {
            d[(r, c)] = v;
        }
    }
    let x = d.lu().solve(&DVector::from_vec(rhs)).unwrap();
    let scale = x.amax();
    for i in 0..x.len() {
        assert!((direct.x[i] - x[i]).abs() <= 1e-8 * scale, "dof {i}");
        assert!((iterative.x[i] - x[i]).abs() <= 1e-6 * scale, "dof {i}");
    }
}
