use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use tileupb::states::{self, DensityRecord};
use tileupb::{tiles, Variant};

use crate::error::{CliError, CliResult};

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub(crate) fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes every artifact for `(d, variant)` into `out` and returns the paths.
pub fn construct(d: usize, variant: Variant, out: &Path) -> CliResult<Vec<PathBuf>> {
    tiles::check_dimension(d)?;
    ensure_dir(out)?;
    let mut written = Vec::new();
    let mut emit = |name: String, value: serde_json::Value| -> CliResult<()> {
        let path = out.join(name);
        write_json(&path, &value)?;
        written.push(path);
        Ok(())
    };

    let upb = tiles::upb(d, variant)?;
    emit("upb.json".into(), json!(upb))?;
    let copb = tiles::copb(d, variant)?;
    emit("copb.json".into(), json!({ "d": d, "variant": variant, "states": copb }))?;
    let rho = states::rho_d(d, variant)?;
    emit("rho_d.json".into(), json!(DensityRecord::new(d, "rho", json!({ "variant": variant }), &rho)))?;
    for m in 1..=(d - 1) / 2 {
        let sf = states::sigma(d, m)?;
        let record = DensityRecord::new(d, "sigma", json!({ "m": m }), &sf.state);
        emit(
            format!("sigma_m{m}.json"),
            json!({
                "record": record,
                "local_basis_a": sf.local_basis_a,
                "local_basis_b": sf.local_basis_b,
            }),
        )?;
    }
    let basis = states::entangled_basis(d)?;
    emit("entangled_basis.json".into(), json!({ "d": d, "vectors": basis }))?;
    Ok(written)
}
