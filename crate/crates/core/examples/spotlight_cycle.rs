//! Samples the Georgia spotlight's colour cycle and the HSV interpolation
//! behind it.

use scenery::math::ColorRGB;
use scenery::runtime::{interpolate_color, KeyframeTrack, SimConfig, Simulation};
use scenery::scene::FieldValue;
use scenery::scenegen::{generate_georgia, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let yellow = ColorRGB::rgb(1.0, 1.0, 0.0);
    let track = KeyframeTrack::new(vec![0.0, 0.5, 1.0], vec![yellow, ColorRGB::WHITE, yellow])?;
    for i in 0..=8 {
        let f = i as f64 / 8.0;
        let c = interpolate_color(&track, f);
        println!("f={f:.3}  ({:.3}, {:.3}, {:.3})", c.r, c.g, c.b);
    }

    let g = generate_georgia(&GenParams::default())?;
    let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
    for t in [0.0, 1.5, 3.0, 4.5, 6.0, 9.0, 12.0] {
        sim.step_to(t, &[])?;
        if let Some(FieldValue::Color(c)) = sim.field("RouteSpotlight", "color") {
            println!("t={t:>4}s spotlight ({:.3}, {:.3}, {:.3})", c.r, c.g, c.b);
        }
    }
    Ok(())
}
