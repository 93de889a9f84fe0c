//! Promotes Groups without dynamic content to StaticGroup.

use scenery::scene::{promote_static_groups, scene_stats, NoInlines, NodeKind};
use scenery::xml::{parse_xml, serialize_xml};

const SCENE: &str = r#"<X3D><Scene>
  <Group DEF="Terrain">
    <Shape><Box size="100 1 100"/></Shape>
    <Group><Shape><Box size="3 3 3"/></Shape></Group>
  </Group>
  <Group DEF="Button">
    <TouchSensor DEF="Press"/>
    <Shape><Box/></Shape>
  </Group>
  <Group DEF="Lamp">
    <SpotLight DEF="Bulb"/>
  </Group>
  <TimeSensor DEF="Clock"/>
  <ROUTE fromNode="Press" fromField="touchTime" toNode="Clock" toField="set_startTime"/>
  <ROUTE fromNode="Clock" fromField="isActive" toNode="Bulb" toField="set_on"/>
</Scene></X3D>"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scene = parse_xml(SCENE.as_bytes()).map_err(|d| format!("{d:?}"))?;
    let promoted = promote_static_groups(&scene)?;
    println!("{}", String::from_utf8_lossy(&serialize_xml(&promoted)));

    let before = scene_stats(&scene, &NoInlines);
    let after = scene_stats(&promoted, &NoInlines);
    println!(
        "Group {} -> {}, StaticGroup {} -> {}",
        before.count(NodeKind::Group),
        after.count(NodeKind::Group),
        before.count(NodeKind::StaticGroup),
        after.count(NodeKind::StaticGroup)
    );
    assert_eq!(before.grouping_folded(), after.grouping_folded());
    Ok(())
}
