use criterion::{criterion_group, criterion_main, Criterion};
use tiltcheck_core::{classify, CatalogBounds, ClassifyOptions, Field, IndecCatalog, Quiver, TorsionContext};

fn catalog(name: &str) -> IndecCatalog {
    IndecCatalog::build(&Quiver::preset(name).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
}

fn bench_catalog(c: &mut Criterion) {
    for name in ["A4", "D4"] {
        let q = Quiver::preset(name).unwrap();
        c.bench_function(&format!("catalog/{name}"), |b| b.iter(|| IndecCatalog::build(&q, Field::F2, CatalogBounds::default()).unwrap()));
    }
}

fn bench_enumerate(c: &mut Criterion) {
    let cat = catalog("D4");
    let ctx = TorsionContext::new(&cat).unwrap();
    c.bench_function("enumerate/D4", |b| b.iter(|| ctx.enumerate(16).unwrap()));
}

fn bench_classify(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    for name in ["A3", "A4", "D4"] {
        let cat = catalog(name);
        g.bench_function(name, |b| b.iter(|| classify(&cat, name, &ClassifyOptions::default()).unwrap()));
        let fast = ClassifyOptions { heart_bound: None, reduce: false, ..ClassifyOptions::default() };
        g.bench_function(format!("{name}/checkers-only"), |b| b.iter(|| classify(&cat, name, &fast).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, bench_catalog, bench_enumerate, bench_classify);
criterion_main!(benches);
