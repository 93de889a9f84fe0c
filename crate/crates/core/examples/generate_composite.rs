//! Generates the Georgia/Savannah composite and writes it to a directory.
//!
//! ```text
//! cargo run --example generate_composite -- out/
//! ```

use scenery::scenegen::{generate_composite, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "composite".into());
    let params = GenParams { car_count: 3, ..Default::default() };
    let g = generate_composite(&params)?;

    for path in g.write_to(dir.as_ref())? {
        println!("wrote {}", path.display());
    }
    let m = &g.manifest;
    println!(
        "{} viewpoints ({} static, {} animated), {} shapes, {} routes",
        m.viewpoints.len(),
        m.static_viewpoints(),
        m.animated_viewpoints(),
        m.stats.shape_count,
        m.route_count
    );
    for vp in &m.viewpoints {
        let kind = if vp.animated { "animated" } else { "static" };
        println!("  {:<40} {kind}", vp.name.as_deref().unwrap_or("-"));
    }
    Ok(())
}
