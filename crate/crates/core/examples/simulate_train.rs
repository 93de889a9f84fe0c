//! Starts the train by touching it and follows the engine and each hinge
//! around the rail.

use scenery::runtime::{SimConfig, SimEvent, Simulation};
use scenery::scene::FieldValue;
use scenery::scenegen::{generate_georgia, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate_georgia(&GenParams { car_count: 3, ..Default::default() })?;
    let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
    sim.step_to(1.0, &[SimEvent::touch(1.0, "TrainTouch")])?;

    for t in (2..=42).step_by(5) {
        sim.step_to(t as f64, &[])?;
        let engine = sim.world_transform_of("EngineYaw").unwrap().translation_part();
        print!("t={t:>2}s engine ({:7.2}, {:7.2})", engine.x, engine.z);
        for c in &g.manifest.couplings {
            let yaw = match sim.field(&c.section, "rotation") {
                Some(FieldValue::Rotation(r)) => r.angle() * r.axis().y,
                _ => 0.0,
            };
            let front = sim.world_transform_of(&c.section).unwrap().transform_point(c.front);
            let rear = sim.world_transform_of(&c.leader).unwrap().transform_point(c.rear);
            print!("  {} {:+6.2}° gap {:.0e}", c.section, yaw.to_degrees(), front.distance(rear));
        }
        println!();
    }
    Ok(())
}
