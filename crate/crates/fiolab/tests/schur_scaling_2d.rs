//! Two-dimensional Schur scaling: the row integrals of the kernel pieces
//! decay like 2^(-j r/2) for fibration ranks 1 and 2 at the critical order
//! m = -r/2. Sampling is lighter than the d = 1 acceptance run; the slope
//! window is the same.

use fiolab::decomp::{
    build_second_decomposition, schur_bounds, LittlewoodPaley, ParamBox, SchurParams,
};
use fiolab::experiment::fit_slope;
use fiolab::fio::FioOperator;
use fiolab::phase::{DiffeoSpec, PhaseSpec, PlateauWindow, SymbolSpec};
use fiolab::spectral::Grid;

fn light_params() -> SchurParams {
    SchurParams {
        x_window_scale: 32.0,
        x_env_samples: 10,
        radial_samples: 4,
        angular_samples: 4,
        ..SchurParams::default()
    }
}

fn run_rank(rank: usize) -> (f64, Vec<f64>) {
    let grid = Grid::new(2, 256, 2.0).unwrap();
    let phase = PhaseSpec::phi_product(2, rank, DiffeoSpec::new(0.1).unwrap()).unwrap();
    let window = PlateauWindow::new(1.0, 1.5).unwrap();
    let symbol = SymbolSpec::new(-(rank as f64) / 2.0, Some(window), true).unwrap();
    let op = FioOperator::new(phase, symbol, grid).unwrap();
    let lp = LittlewoodPaley::free(5);
    let domain = if rank == 1 {
        ParamBox::new(&[-1.5], &[1.5]).unwrap()
    } else {
        ParamBox::new(&[-1.5, -1.5], &[1.5, 1.5]).unwrap()
    };
    let params = light_params();
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    for j in 3..=5u32 {
        let sd = build_second_decomposition(j, rank, domain).unwrap();
        let nu = sd.nearest_center(&[0.5, 0.4][..rank]);
        let bounds = schur_bounds(&op, &lp, &sd, nu, &params).unwrap();
        pairs.push((j as f64, bounds.row_integral));
        rows.push(bounds.row_integral);
    }
    let (slope, _, _) = fit_slope(&pairs).unwrap();
    (slope, rows)
}

#[test]
fn schur_scaling_d2_rank1() {
    let (slope, rows) = run_rank(1);
    println!("d=2 r=1 row integrals {:?}, slope {:.4}", rows, slope);
    assert!(
        (-0.7..=-0.3).contains(&slope),
        "slope {} outside [-0.7, -0.3]",
        slope
    );
}

#[test]
fn schur_scaling_d2_rank2() {
    let (slope, rows) = run_rank(2);
    println!("d=2 r=2 row integrals {:?}, slope {:.4}", rows, slope);
    assert!(
        (-1.2..=-0.8).contains(&slope),
        "slope {} outside [-1.2, -0.8]",
        slope
    );
}
