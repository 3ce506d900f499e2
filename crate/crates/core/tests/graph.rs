mod common;

use common::{campus, oracle_dijkstra, small_campus};
use osmag_nav::graph::{
    build_base_graph, build_caches, inject_virtual_passage, raster_connect, BaseGraphParams,
    EdgeKind,
};
use osmag_nav::model::{AreaGraph, AreaId};
use osmag_nav::Pose2D;

fn subtree_leaves(g: &AreaGraph, root: AreaId) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(a) = stack.pop() {
        if g.is_leaf(a) {
            out.push(g.area(a).name.clone());
        }
        stack.extend_from_slice(g.children(a));
    }
    out
}

#[test]
fn edge_weights_are_symmetric() {
    let b = small_campus(6);
    let params = &b.cache.params;
    for e in b.pg.edges.iter().filter(|e| e.kind == EdgeKind::Raster) {
        let leaf = b.graph.area_id(&e.through_area).unwrap();
        let raster = b.cache.leaf_raster(&b.graph, leaf).unwrap();
        let (pa, pb) = (b.pg.position(e.a), b.pg.position(e.b));
        let (fwd, _) = raster_connect(&raster, pa, pb, params.snap_radius_cells).unwrap();
        let (rev, _) = raster_connect(&raster, pb, pa, params.snap_radius_cells).unwrap();
        assert!(
            (fwd - rev).abs() < 1e-9,
            "{} {fwd} vs {rev}",
            e.through_area
        );
        assert!((fwd - e.weight).abs() < 1e-9);
    }
}

#[test]
fn raster_edges_bound_euclidean_distance() {
    let b = campus();
    let mut n = 0;
    for e in &b.pg.edges {
        let d = b.pg.position(e.a).distance(b.pg.position(e.b));
        match e.kind {
            EdgeKind::Raster => {
                assert!(
                    e.weight >= d - 1e-9,
                    "edge in {} is {} < {}",
                    e.through_area,
                    e.weight,
                    d
                );
                n += 1;
            }
            EdgeKind::Vertical => assert_eq!(e.weight, b.cache.params.c_vert),
            EdgeKind::EuclideanFallback => assert!((e.weight - d).abs() < 1e-12),
        }
    }
    assert!(n > 1000);
}

#[test]
fn vertical_edges_only_cross_levels_in_elevators() {
    let b = campus();
    let vertical: Vec<_> =
        b.pg.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Vertical)
            .collect();
    assert!(!vertical.is_empty());
    for e in vertical {
        let area = b.graph.area_by_name(&e.through_area).unwrap();
        assert!(area.area_type.is_vertical());
        assert_ne!(
            b.pg.vertices[e.a as usize].level,
            b.pg.vertices[e.b as usize].level
        );
    }
}

#[test]
fn summaries_equal_constrained_shortest_paths() {
    let b = campus();
    let g = &b.graph;
    let mut checked = 0;
    for s in b.cache.structures.iter().flatten() {
        let leaves = subtree_leaves(g, AreaId(s.area));
        for variant in &s.variants {
            let floor = variant.floor.as_deref();
            let on_floor = |v: u32| b.pg.on_floor(v, floor);
            for &src in &variant.boundary {
                let dist = oracle_dijkstra(&b.pg, src, |e| {
                    leaves.contains(&e.through_area) && on_floor(e.a) && on_floor(e.b)
                });
                for &dst in &variant.boundary {
                    if dst == src {
                        continue;
                    }
                    let summary = variant
                        .edges
                        .iter()
                        .find(|e| (e.a, e.b) == (src, dst) || (e.a, e.b) == (dst, src));
                    match summary {
                        Some(e) => {
                            assert!(
                                (e.weight - dist[dst as usize]).abs() < 1e-9,
                                "{} {:?}: {} vs oracle {}",
                                s.name,
                                floor,
                                e.weight,
                                dist[dst as usize]
                            );
                            checked += 1;
                        }
                        None => assert!(
                            dist[dst as usize].is_infinite(),
                            "{}: missing summary edge",
                            s.name
                        ),
                    }
                }
            }
        }
    }
    assert!(checked > 50, "{checked}");
}

#[test]
fn summary_routes_expand_to_their_weight() {
    let b = campus();
    for s in b.cache.structures.iter().flatten() {
        for (v, variant) in s.variants.iter().enumerate() {
            for (i, e) in variant.edges.iter().enumerate() {
                let mut tr = Vec::new();
                b.cache.expand_hop(
                    osmag_nav::graph::Hop::Summary {
                        area: s.area,
                        variant: v as u16,
                        edge: i as u32,
                        forward: true,
                    },
                    &mut tr,
                );
                let w: f64 = tr.iter().map(|t| b.pg.edges[t.edge as usize].weight).sum();
                assert!((w - e.weight).abs() < 1e-9);
                let first = &b.pg.edges[tr[0].edge as usize];
                assert_eq!(if tr[0].forward { first.a } else { first.b }, e.a);
            }
        }
    }
}

#[test]
fn rebuilding_is_idempotent() {
    let b = small_campus(8);
    let params = BaseGraphParams::default();
    let (pg2, _) = build_base_graph(&b.graph, &params);
    assert_eq!(b.pg, pg2);
    let mut c1 = b.cache.clone();
    let mut c2 = build_caches(&b.graph, &pg2, &params);
    c1.build_ms = 0.0;
    c2.build_ms = 0.0;
    assert_eq!(c1, c2);
}

#[test]
fn injection_leaves_the_graph_untouched() {
    let b = campus();
    let pg_before = serde_json::to_string(&b.pg).unwrap();
    let cache_before = serde_json::to_string(&b.cache).unwrap();
    let room = b.graph.area_by_name("F2-S3-RN04").unwrap();
    let c = room.polygon.centroid();
    let att = inject_virtual_passage(
        &b.graph,
        &b.pg,
        &b.cache,
        &Pose2D::new(c.x, c.y, 0.0, "2"),
        "2",
    )
    .unwrap();
    assert_eq!(att.leaf_name, "F2-S3-RN04");
    assert_eq!(att.edges.len(), 1);
    drop(att);
    assert_eq!(serde_json::to_string(&b.pg).unwrap(), pg_before);
    assert_eq!(serde_json::to_string(&b.cache).unwrap(), cache_before);
}

#[test]
fn cache_file_round_trip_and_hash_check() {
    use osmag_nav::bench::{generate_synthetic_campus, CampusSpec};
    use osmag_nav::graph::{load_cache_file, save_cache_file, GraphError};
    let c = generate_synthetic_campus(1, &CampusSpec::small(4)).unwrap();
    let b = common::build(c.graph.clone());
    let (_, report) = osmag_nav::graph::build_base_graph(&b.graph, &b.cache.params);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("campus.cache.json");
    save_cache_file(&path, c.xml.as_bytes(), &report, &b.pg, &b.cache).unwrap();
    let loaded = load_cache_file(&path, c.xml.as_bytes(), &b.graph).unwrap();
    assert_eq!(loaded.graph, b.pg);
    let other = format!("{}\n<!-- edited -->\n", c.xml);
    assert!(matches!(
        load_cache_file(&path, other.as_bytes(), &b.graph),
        Err(GraphError::HashMismatch { .. })
    ));
}
