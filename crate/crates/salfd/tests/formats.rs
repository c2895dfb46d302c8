use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use salfd::planfile::{self, PlanFile};
use salfd::tracefile::{parse_trace, trace_to_string};
use salfd_core::fixtures::random_events;
use salfd_core::{reverse_plan, Bounds, Catalog, ConstructionPlan, DemonstrationTrace, NoiseConfig};

proptest! {
    #[test]
    fn plan_files_round_trip_byte_exact(seed in any::<u64>(), n in 0usize..40, reversed in any::<bool>()) {
        let catalog = Catalog::default();
        let events = random_events(&mut ChaCha8Rng::seed_from_u64(seed), n, &catalog, Bounds::default());
        let mut plan = ConstructionPlan::assembly(&events);
        if reversed {
            plan = reverse_plan(&plan).unwrap();
        }
        let file = PlanFile { bounds: Bounds::default(), plan };
        let text = planfile::serialize(&file, &catalog).unwrap();
        let back = planfile::parse(&text, &catalog).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(planfile::serialize(&back, &catalog).unwrap(), text);
    }

    #[test]
    fn trace_files_round_trip(seed in any::<u64>(), n in 0usize..20, sigma in 0.0f64..0.5, p in 0.0f64..1.0) {
        let catalog = Catalog::default();
        let events = random_events(&mut ChaCha8Rng::seed_from_u64(seed), n, &catalog, Bounds::default());
        let sensor = NoiseConfig { depth_sigma: sigma, bias_sigma: sigma / 2.0, p_dark: p, p_flip: p / 3.0, seed };
        let trace = DemonstrationTrace::new(events, sensor);
        let text = trace_to_string(&trace, &catalog).unwrap();
        prop_assert_eq!(parse_trace(&text, &catalog).unwrap(), trace);
    }
}
