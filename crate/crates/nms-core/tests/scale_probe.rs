use nms_core::grid::{build_grid, mask_from_shape, rasterize, RasterOptions, Shape};
use nms_core::set::{mincut_minimize, SetProblem};
use nms_core::tail::TailModel;
use std::f64::consts::PI;

fn halfring_problem(delta: f64, s: f64) -> SetProblem {
    let g = build_grid(&[(-2.0, 2.0), (-2.0, 2.0)], &[96, 96]).unwrap();
    let ring = Shape::HalfRing { delta };
    let domain = Shape::Ball { center: [0.0, 0.0], radius: 1.0 };
    let omega = mask_from_shape(&domain, &g);
    let omega2 = omega.clone();
    let mut field = rasterize(&ring, &g, move |_| false, RasterOptions::default()).unwrap();
    for i in 0..g.cell_count() {
        field.frozen[i] = !omega[i];
        if omega[i] {
            field.values[i] = 0.0;
        }
    }
    SetProblem::new(field, omega2, TailModel::Empty, s).unwrap()
}

fn cone_problem(theta: f64, vertex: f64, s: f64, complemented: bool) -> SetProblem {
    let g = build_grid(&[(-2.0, 2.0), (-2.0, 2.0)], &[96, 96]).unwrap();
    let cone = Shape::Cone { vertex, angle: theta };
    let data: Shape = if complemented {
        Shape::Intersection(
            Box::new(Shape::Complement(Box::new(cone))),
            Box::new(Shape::Complement(Box::new(Shape::Ball { center: [0.0, 0.0], radius: 1.0 }))),
        )
    } else {
        Shape::Intersection(
            Box::new(cone),
            Box::new(Shape::Complement(Box::new(Shape::Ball { center: [0.0, 0.0], radius: 1.0 }))),
        )
    };
    let domain = Shape::Ball { center: [0.0, 0.0], radius: 1.0 };
    let omega = mask_from_shape(&domain, &g);
    let omega2 = omega.clone();
    let mut field = rasterize(&data, &g, move |_| false, RasterOptions::default()).unwrap();
    for i in 0..g.cell_count() {
        field.frozen[i] = !omega[i];
        if omega[i] {
            field.values[i] = 0.0;
        }
    }
    let wedge = TailModel::Cone {
        vertex: [vertex, 0.0],
        direction: (theta + PI) / 2.0,
        opening: PI - theta,
    };
    let tail = if complemented { wedge.complement() } else { wedge };
    SetProblem::new(field, omega2, tail, s).unwrap()
}

#[test]
fn halfring_sweep_probe() {
    for delta in [0.05, 0.2, 0.4, 0.6, 0.8] {
        let p = halfring_problem(delta, 0.3);
        let sol = mincut_minimize(&p).unwrap();
        println!("halfring delta={delta}: occupancy {:.4}", sol.occupancy);
    }
}

#[test]
fn cone_sweep_probe() {
    for s in [0.5, 0.3, 0.2, 0.1, 0.05] {
        let p = cone_problem(PI / 8.0, 1.0, s, false);
        let sol = mincut_minimize(&p).unwrap();
        let pc = cone_problem(PI / 8.0, 1.0, s, true);
        let solc = mincut_minimize(&pc).unwrap();
        println!(
            "cone s={s}: occupancy {:.4}, complement occupancy {:.4}",
            sol.occupancy, solc.occupancy
        );
    }
}
