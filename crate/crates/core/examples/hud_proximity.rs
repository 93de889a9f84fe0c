//! Moves the viewer around inside the Georgia menu's proximity box and
//! shows the menu staying put in the viewer's frame.

use scenery::math::{Rotation, Vec3};
use scenery::runtime::{SimConfig, SimEvent, Simulation};
use scenery::scenegen::{generate_georgia, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate_georgia(&GenParams::default())?;
    let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
    sim.step_to(0.0, &[])?;

    let moves = [
        (Vec3::new(0.0, 20.0, 0.0), Rotation::IDENTITY),
        (Vec3::new(-120.0, 5.0, 80.0), Rotation::about_y(1.2)),
        (Vec3::new(60.0, 150.0, -30.0), Rotation::new(Vec3::new(1.0, 1.0, 0.0), -0.6)?),
        (Vec3::new(900.0, 0.0, 0.0), Rotation::IDENTITY),
    ];
    for (i, (p, o)) in moves.into_iter().enumerate() {
        let at = 1.0 + i as f64;
        let recs = sim.step_to(at, &[SimEvent::pose(at, p, o)])?;
        let menu = sim.world_transform_of("GeorgiaMenu").unwrap();
        let local = sim.viewer_pose().view_matrix().transform_point(menu.translation_part());
        let updates = recs.iter().filter(|r| r.node == "GeorgiaMenu").count();
        println!(
            "viewer {:?}: menu at ({:.3}, {:.3}, {:.3}) in view space, {updates} menu update(s)",
            p.to_array(),
            local.x,
            local.y,
            local.z
        );
    }
    Ok(())
}
