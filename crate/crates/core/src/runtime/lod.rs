use crate::math::{Mat4, Vec3};

/// Child index for a viewer at distance `d`: child 0 below `range[0]`,
/// child i for `range[i-1] <= d < range[i]`, the last child beyond. A
/// distance equal to a range belongs to the farther child.
pub fn lod_index(ranges: &[f64], d: f64) -> usize {
    ranges.partition_point(|r| *r <= d)
}

/// Selects the LOD child for a viewer position. `world` maps the LOD's
/// local frame to world coordinates; the distance is measured in world
/// space from the transformed center.
pub fn select_lod_child(ranges: &[f64], center: Vec3, viewer: Vec3, world: &Mat4) -> usize {
    lod_index(ranges, world.transform_point(center).distance(viewer))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries() {
        assert_eq!(lod_index(&[100.0], 50.0), 0);
        assert_eq!(lod_index(&[100.0], 100.0), 1);
        assert_eq!(lod_index(&[100.0], 1e9), 1);
        assert_eq!(lod_index(&[10.0, 20.0], 10.0), 1);
        assert_eq!(lod_index(&[10.0, 20.0], 19.999), 1);
        assert_eq!(lod_index(&[10.0, 20.0], 20.0), 2);
        assert_eq!(lod_index(&[], 5.0), 0);
    }

    #[test]
    fn world_space_distance() {
        let below = Mat4::translation(Vec3::new(0.0, -500.0, 0.0));
        assert_eq!(select_lod_child(&[250.0], Vec3::ZERO, Vec3::new(0.0, 200.0, 0.0), &below), 1);
        assert_eq!(select_lod_child(&[250.0], Vec3::ZERO, Vec3::new(0.0, -400.0, 0.0), &below), 0);
    }
}
