use trickle::checks::*;
use trickle::routing::RoutingChainSpec;
use trickle::numeric::rat;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("freeze");
    let t0 = std::time::Instant::now();
    match which {
        "freeze" => {
            for (name, spec) in [
                ("mallows", RoutingChainSpec::MallowsUrn { p: rat(1, 3) }),
                ("qbinomial", RoutingChainSpec::QBinomialUrn { q: rat(1, 2), r: rat(1, 2) }),
                ("catalan", RoutingChainSpec::CatalanUrn),
            ] {
                let rep = freeze_statistics(&spec, 10_000, 1000, 202);
                println!(
                    "{name}: frozen {}/{} = {:.4}, structural violations {}",
                    rep.frozen, rep.paths,
                    rep.frozen as f64 / rep.paths as f64,
                    rep.structural_violations
                );
            }
        }
        "kernels" => {
            for (name, model, size) in kernel_families() {
                let t = std::time::Instant::now();
                let r = check_product_kernel_family(&model, size);
                println!("{name}: {:?} in {:?}", r.err().map(|e| e.chars().take(120).collect::<String>()), t.elapsed());
            }
        }
        "ks" => {
            let r = check_bst_boundary_convergence(200, 100_000, 4242);
            println!("ks: {r:?}");
        }
        "mallows7" => {
            let r = check_mallows_closed_forms(7);
            println!("mallows: {r:?}");
        }
        "crp7" => {
            let r = check_crp_formulas(7);
            println!("crp: {r:?}");
        }
        _ => eprintln!("unknown probe"),
    }
    println!("total {:?}", t0.elapsed());
}
