use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trickle::routing::{RoutingChainSpec, RoutingState};

fn main() {
    let spec = RoutingChainSpec::CatalanUrn;
    let horizon = 1000u64;
    let paths = 20_000u64;
    let windows = [500u64, 250, 100, 50, 20, 10, 5, 2];
    let mut frozen = vec![0u64; windows.len()];
    for idx in 0..paths {
        let mut rng = ChaCha8Rng::seed_from_u64(idx * 77 + 13);
        let mut xi = RoutingState::zero();
        let mut last_move = [0u64; 2]; // last step index each slot moved
        for step in 1..=horizon {
            let slot = spec.sample_slot(&xi, rng.gen());
            xi = xi.bump(slot);
            last_move[slot.min(1)] = step;
        }
        for (w, win) in windows.iter().enumerate() {
            let cutoff = horizon - win;
            // at most one coordinate moved after the cutoff
            if !(last_move[0] > cutoff && last_move[1] > cutoff) {
                frozen[w] += 1;
            }
        }
    }
    for (w, win) in windows.iter().enumerate() {
        println!("window {win}: frozen rate {:.4}", frozen[w] as f64 / paths as f64);
    }
}
