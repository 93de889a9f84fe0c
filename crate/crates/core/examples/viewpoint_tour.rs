//! Binds every viewpoint of the composite in turn and reports which
//! scene's LOD is showing.

use scenery::runtime::{SimConfig, Simulation};
use scenery::scenegen::{generate_composite, GenParams, SAVANNAH_INLINE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate_composite(&GenParams::default())?;
    let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
    sim.step_to(0.0, &[])?;
    let savannah_lod = format!("{SAVANNAH_INLINE}.SavannahLOD");

    let mut t = 0.0;
    for vp in g.manifest.viewpoints.iter().filter_map(|v| v.name.as_deref()) {
        t += 1.0;
        sim.bind_viewpoint(vp, t)?;
        // past the transition
        t += 4.0;
        sim.step_to(t, &[])?;
        let pos = sim.viewer_pose().position;
        let show = |lvl: Option<usize>| if lvl == Some(0) { "shown" } else { "hidden" };
        println!(
            "{vp:<40} viewer ({:7.1}, {:7.1}, {:7.1})  Georgia {:<6} Savannah {}",
            pos.x,
            pos.y,
            pos.z,
            show(sim.lod_level("GeorgiaLOD")),
            show(sim.lod_level(&savannah_lod)),
        );
    }
    Ok(())
}
