//! CSV tables. Every table starts with a `# seed=…` comment line.

use crate::error::{Error, Result};
use crate::profile::ProfileCurve;
use crate::surface::SurfaceSample;
use crate::variation::FlowSample;

fn finish(seed: u64, header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(&r).map_err(csv_error)?;
    }
    let body = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut out = format!("# seed={seed}\n");
    out.push_str(&String::from_utf8(body).expect("utf-8 csv"));
    Ok(out)
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

/// Columns `v, I, psi, method, descriptor`.
pub fn profile_csv(profile: &ProfileCurve) -> Result<String> {
    let rows = profile
        .samples
        .iter()
        .map(|s| {
            vec![
                format!("{:e}", s.v),
                format!("{:e}", s.value),
                format!("{:e}", profile.psi(s.value)),
                s.method.as_str().to_string(),
                s.descriptor.short(),
            ]
        })
        .collect();
    finish(profile.seed, &["v", "I", "psi", "method", "descriptor"], rows)
}

/// Columns `t, A_K, V`.
pub fn flow_csv(samples: &[FlowSample], seed: u64) -> Result<String> {
    let rows = samples
        .iter()
        .map(|s| vec![format!("{:e}", s.t), format!("{:e}", s.area), format!("{:e}", s.volume)])
        .collect();
    finish(seed, &["t", "A_K", "V"], rows)
}

/// Per-node frames: `u, v, x, y, z, Nx, Ny, Nz, phiK, HK, trace_gap`.
pub fn surface_csv(samples: &[SurfaceSample], seed: u64) -> Result<String> {
    let rows = samples
        .iter()
        .map(|s| {
            let mut r = vec![format!("{:e}", s.u), format!("{:e}", s.v)];
            r.extend(s.point.iter().chain(&s.normal).map(|x| format!("{x:e}")));
            r.extend([s.phi, s.mean_curvature, s.trace_gap].iter().map(|x| format!("{x:e}")));
            r
        })
        .collect();
    finish(
        seed,
        &["u", "v", "x", "y", "z", "Nx", "Ny", "Nz", "phiK", "HK", "trace_gap"],
        rows,
    )
}
