use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use viscount_core::arrangement::Arrangement;
use viscount_core::cover::build_cover;
use viscount_core::cutting::{build_cutting, CuttingParams};
use viscount_core::index::{Index, IndexOptions};
use viscount_core::scene::{generate_random, sample_point, GenParams};
use viscount_core::visibility::{sees_point, visible_count_oracle};
use viscount_core::{Rect, Scalar, Scene};

fn index_for(scene: &Scene, alpha: Scalar, seed: u64) -> Index {
    let arr = Arrangement::build(scene, seed).unwrap();
    let cover = build_cover(&arr.map, &arr.labels, scene.len());
    let cutting = build_cutting(cover.edges(), scene.bbox(), &CuttingParams::new(alpha), seed).unwrap();
    Index::build(scene.clone(), cutting, &IndexOptions::new(seed)).unwrap()
}

fn strictly_inside(bbox: &Rect, scene: &Scene) -> bool {
    scene.segments().iter().all(|s| bbox.strictly_contains(&s.a) && bbox.strictly_contains(&s.b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_scenes_are_valid(n in 1usize..=40, seed in any::<u64>()) {
        let params = GenParams::new(n);
        let scene = generate_random(&params, seed).unwrap();
        prop_assert_eq!(scene.len(), n);
        prop_assert!(strictly_inside(&params.bbox, &scene));
        let rebuilt = Scene::new(scene.bbox().clone(), scene.segments().to_vec()).unwrap();
        prop_assert_eq!(&rebuilt, &scene);
        prop_assert!(scene.validate().unwrap().is_clean());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn removing_an_obstacle_never_hides_anything(n in 2usize..12, seed in any::<u64>(), drop in any::<prop::sample::Index>()) {
        let scene = generate_random(&GenParams::new(n), seed).unwrap();
        let mut fewer = scene.segments().to_vec();
        fewer.remove(drop.index(n));
        let thinner = Scene::new(scene.bbox().clone(), fewer).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let (p, q) = (sample_point(&mut rng, scene.bbox()), sample_point(&mut rng, scene.bbox()));
            if scene.on_any_segment(&p) || scene.on_any_segment(&q) {
                continue;
            }
            if sees_point(&scene, &p, &q, None).unwrap() {
                prop_assert!(sees_point(&thinner, &p, &q, None).unwrap());
            }
        }
    }

    #[test]
    fn trapezoids_partition_the_box(n in 1usize..8, seed in any::<u64>()) {
        let scene = generate_random(&GenParams::new(n), seed).unwrap();
        let arr = Arrangement::build(&scene, seed).unwrap();
        let mut twice = Scalar::zero();
        for t in 0..arr.map.len() {
            for tri in arr.map.triangles(t) {
                twice = &twice + &tri.double_area().abs();
            }
        }
        prop_assert_eq!(twice, &scene.bbox().area() * &Scalar::from_int(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn index_matches_oracle(n in 1usize..9, seed in any::<u64>(), alpha in prop::sample::select(vec![(1, 4), (1, 2), (3, 4), (1, 10), (9, 10)])) {
        let scene = generate_random(&GenParams::new(n), seed).unwrap();
        let index = index_for(&scene, Scalar::from_ratio(alpha.0, alpha.1), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..50 {
            let p = sample_point(&mut rng, scene.bbox());
            if scene.on_any_segment(&p) {
                continue;
            }
            prop_assert_eq!(index.query(&p).unwrap().count, visible_count_oracle(&scene, &p).unwrap().count);
        }
    }
}

#[test]
fn fixed_seed_builds_identical_indexes() {
    let scene = generate_random(&GenParams::new(10), 77).unwrap();
    let (a, b) = (index_for(&scene, Scalar::from_ratio(1, 2), 5), index_for(&scene, Scalar::from_ratio(1, 2), 5));
    assert_eq!(a.cutting().sample, b.cutting().sample);
    assert_eq!(a.cutting().cells(), b.cutting().cells());
    assert_eq!(a.cells(), b.cells());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let p = sample_point(&mut rng, scene.bbox());
        assert_eq!(a.query(&p).unwrap(), b.query(&p).unwrap());
    }
}
