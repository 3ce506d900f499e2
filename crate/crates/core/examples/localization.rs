//! Structure-based localization on synthetic scans: corridor tracking with
//! and without the direction factor, clutter rejection, and global
//! relocalization in two identical rooms.
//!
//! cargo run --release --example localization

use osmag_nav::loc::{
    clutter_filter, fixtures, fuse_with_odometry, global_relocalize, icp_track, simulate_scan,
    simulate_scan_on, BeamLabel, ClutterDisc, FusionInput, MapSegments, RelocConfig, ScanSpec,
    TrackerConfig, WeightMode,
};
use osmag_nav::{Point2D, Pose2D};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corridor_run(walls: &MapSegments, weighting: WeightMode) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = ScanSpec {
        sigma: 0.02,
        ..ScanSpec::default()
    };
    let cfg = TrackerConfig {
        weighting,
        ..TrackerConfig::default()
    };
    let mut err = 0.0;
    for k in 0..100 {
        let truth = Pose2D::new(5.0 + 0.3 * k as f64, 1.5, 0.0, "1");
        let scan = simulate_scan_on(walls, &truth, &spec, &[], 0.1 * k as f64, &mut rng);
        // odometry prior half a meter ahead along the corridor
        let prior = Pose2D::new(truth.x + 0.5, truth.y, truth.theta, "1");
        let fused = match icp_track(&scan, walls, &prior, &cfg) {
            Ok(r) => fuse_with_odometry(&FusionInput {
                icp: r.pose,
                score: r.score,
                odometry: prior,
            }),
            Err(_) => prior,
        };
        err += (fused.x - truth.x).abs();
    }
    err / 100.0
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corridor = fixtures::niche_corridor(40.0, 3.0)?;
    let walls = MapSegments::from_graph(&corridor, Some("1"));
    println!("corridor: {} wall segments", walls.len());
    for mode in [
        WeightMode::Off,
        WeightMode::RobustOnly,
        WeightMode::RobustTimesCorridor,
    ] {
        println!(
            "  {mode:?}: mean longitudinal error {:.4} m",
            corridor_run(&walls, mode)
        );
    }

    let pose = Pose2D::new(20.0, 1.5, 0.0, "1");
    let people = [
        ClutterDisc {
            center: Point2D::new(23.0, 1.0),
            radius: 0.25,
        },
        ClutterDisc {
            center: Point2D::new(16.0, 2.1),
            radius: 0.25,
        },
    ];
    let spec = ScanSpec {
        sigma: 0.02,
        ..ScanSpec::default()
    };
    let scan = simulate_scan(
        &corridor,
        &pose,
        &spec,
        &people,
        0.0,
        &mut ChaCha8Rng::seed_from_u64(1),
    )?;
    let corrs = clutter_filter(&scan, &walls.all(), &pose, &TrackerConfig::default());
    let count = |label, kept| {
        corrs
            .iter()
            .filter(|c| scan.beams[c.beam].label == label && c.retained == kept)
            .count()
    };
    println!(
        "clutter gate: structure kept {} / dropped {}, clutter kept {} / dropped {}",
        count(BeamLabel::Structure, true),
        count(BeamLabel::Structure, false),
        count(BeamLabel::Clutter, true),
        count(BeamLabel::Clutter, false)
    );

    let twins = fixtures::twin_l_rooms()?;
    let c = twins.area_by_name("west").expect("room").polygon.centroid();
    let truth = Pose2D::new(c.x, c.y, 0.6, "1");
    let scan = simulate_scan(
        &twins,
        &truth,
        &ScanSpec::default(),
        &[],
        0.0,
        &mut ChaCha8Rng::seed_from_u64(2),
    )?;
    println!(
        "relocalization in two identical rooms (truth {:.2}, {:.2}, {:.2}):",
        truth.x, truth.y, truth.theta
    );
    for h in global_relocalize(&twins, "1", &scan, &RelocConfig::default())? {
        println!(
            "  {:<5} ({:6.2}, {:5.2}, {:5.2})  score {:.3e}  icp {:.3}",
            h.area, h.pose.x, h.pose.y, h.pose.theta, h.score, h.icp_score
        );
    }
    Ok(())
}
