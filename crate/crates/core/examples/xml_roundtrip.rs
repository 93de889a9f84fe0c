//! Parses a hand-written scene, prints its canonical form, and shows the
//! diagnostics for a broken one.

use scenery::xml::{parse_xml, semantic_equal, serialize_xml};

const SCENE: &str = r#"<X3D profile="Interchange" version="3.2">
  <Scene>
    <Transform DEF="Box" translation="0 1.5 -4" rotation="0 1 0 0.7854">
      <Shape>
        <Appearance><Material diffuseColor="0.8 0.2 0.1"/></Appearance>
        <Box size="2 2 2"/>
      </Shape>
    </Transform>
    <TimeSensor DEF="Clock" cycleInterval="4" loop="true"/>
    <OrientationInterpolator DEF="Spin" key="0 0.5 1" keyValue="0 1 0 0, 0 1 0 3.14159, 0 1 0 6.28318"/>
    <ROUTE fromNode="Clock" fromField="fraction_changed" toNode="Spin" toField="set_fraction"/>
    <ROUTE fromNode="Spin" fromField="value_changed" toNode="Box" toField="set_rotation"/>
  </Scene>
</X3D>"#;

fn main() {
    let scene = parse_xml(SCENE.as_bytes()).expect("valid scene");
    let canonical = serialize_xml(&scene);
    println!("{}", String::from_utf8_lossy(&canonical));

    let again = parse_xml(&canonical).unwrap();
    assert!(semantic_equal(&scene, &again));
    assert_eq!(serialize_xml(&again), canonical);

    let broken = SCENE.replace("<Box size=\"2 2 2\"/>", "<Box size=\"2 two 2\"/>");
    match parse_xml(broken.as_bytes()) {
        Ok(_) => println!("unexpectedly parsed"),
        Err(diags) => {
            for d in diags {
                println!("{d}");
            }
        }
    }
}
