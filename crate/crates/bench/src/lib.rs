//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use hjkit::model::ModelFile;
use hjkit::LagrangianSystem;

pub fn model(name: &str) -> ModelFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(format!("{}.hjm", name));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
    ModelFile::parse(&src).unwrap()
}

pub fn system(m: &ModelFile) -> LagrangianSystem {
    LagrangianSystem::new(m.k, m.n, m.lagrangian.clone()).unwrap().with_nonzero(m.nonzero.clone())
}
