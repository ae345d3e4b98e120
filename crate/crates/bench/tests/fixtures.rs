use crlab_bench::{mesh, patch, MESHES};

#[test]
fn every_fixture_has_a_patch() {
    for spec in MESHES {
        assert!(mesh(spec).interior_vertices().count() >= 1, "{spec}");
        assert!(patch(spec).m() >= 3, "{spec}");
    }
}
