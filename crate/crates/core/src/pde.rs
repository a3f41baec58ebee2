//! Periodic 1D viscous conservation-law data on the unit interval.
//!
//! Initial conditions are band-limited Gaussian random fields; trajectories
//! are integrated with a pseudo-spectral integrating-factor RK4 on a fine
//! grid and decimated to the requested resolution. Datasets round-trip
//! through a binary container (one JSON header line, then little-endian f64
//! payload) and a plain CSV form.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

/// Gaussian random field spectrum: mode k gets standard deviation
/// amplitude·(4π²k² + lambda²)^(−decay).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GrfSpec {
    pub amplitude: f64,
    pub lambda: f64,
    pub decay: f64,
}

impl Default for GrfSpec {
    fn default() -> Self {
        // Mode k gets sd 25/(4π²k² + 25), the classic Burgers benchmark
        // spectrum; fields come out order-one with a handful of active modes.
        GrfSpec { amplitude: 25.0, lambda: 5.0, decay: 1.0 }
    }
}

/// One zero-mean random field on n grid points x_j = j/n, built from modes
/// k = 1..n/2−1 with Box-Muller normal coefficients.
pub fn grf_sample(n: usize, spec: &GrfSpec, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::BadResolution(format!("field needs an even length ≥ 4, got {n}")));
    }
    let mut u = vec![0.0; n];
    for k in 1..n / 2 {
        let sigma = spec.amplitude * (4.0 * PI * PI * (k * k) as f64 + spec.lambda * spec.lambda).powf(-spec.decay);
        // Box-Muller; 1−uniform keeps the log argument in (0, 1].
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        let rad = (-2.0 * u1.ln()).sqrt();
        let g1 = rad * (2.0 * PI * u2).cos();
        let g2 = rad * (2.0 * PI * u2).sin();
        let amp = sigma * 2f64.sqrt();
        for (j, uj) in u.iter_mut().enumerate() {
            let x = j as f64 / n as f64;
            *uj += amp * (g1 * (2.0 * PI * k as f64 * x).cos() + g2 * (2.0 * PI * k as f64 * x).sin());
        }
    }
    let mean = u.iter().sum::<f64>() / n as f64;
    for uj in &mut u {
        *uj -= mean;
    }
    Ok(u)
}

fn plan_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft(n, FftDirection::Forward), planner.plan_fft(n, FftDirection::Inverse))
}

/// Signed wavenumber for FFT bin j of n.
fn wavenumber(j: usize, n: usize) -> f64 {
    if j <= n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

/// Zero-pads the spectrum to evaluate the same trigonometric polynomial on a
/// finer grid. Requires even lengths and target ≥ source.
pub fn spectral_upsample(u: &[f64], target: usize) -> Result<Vec<f64>> {
    let n = u.len();
    if n < 2 || n % 2 != 0 || target % 2 != 0 {
        return Err(Error::BadResolution(format!("even lengths required, got {n} -> {target}")));
    }
    if target < n {
        return Err(Error::BadResolution(format!("cannot upsample {n} to coarser {target}")));
    }
    if target == n {
        return Ok(u.to_vec());
    }
    let (fft_n, _) = plan_pair(n);
    let (_, ifft_t) = plan_pair(target);
    let mut hat: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_n.process(&mut hat);
    let mut big = vec![Complex64::ZERO; target];
    for j in 0..n {
        let m = wavenumber(j, n);
        // Split the Nyquist bin evenly between ±n/2 to keep the signal real.
        if j == n / 2 {
            big[n / 2] = hat[j] * 0.5;
            big[target - n / 2] = hat[j] * 0.5;
        } else if m >= 0.0 {
            big[j] = hat[j];
        } else {
            big[target + j - n] = hat[j];
        }
    }
    ifft_t.process(&mut big);
    let scale = 1.0 / n as f64;
    Ok(big.into_iter().map(|z| z.re * scale).collect())
}

/// Integrating-factor RK4 for u_t + (u²/2)_x = ν u_xx with periodic
/// boundaries on [0,1), at the resolution of `u0`. `dt` is an upper bound;
/// the actual step is t_final divided into equal pieces.
pub fn burgers_solve(u0: &[f64], nu: f64, t_final: f64, dt: f64) -> Result<Vec<f64>> {
    let n = u0.len();
    if n < 4 || n % 2 != 0 {
        return Err(Error::BadResolution(format!("solver needs an even length ≥ 4, got {n}")));
    }
    if !(dt > 0.0) || t_final < 0.0 || !t_final.is_finite() {
        return Err(Error::BadResolution(format!(
            "need dt > 0 and t_final ≥ 0, got dt={dt}, t_final={t_final}"
        )));
    }
    if t_final == 0.0 {
        return Ok(u0.to_vec());
    }
    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let (fft, ifft) = plan_pair(n);

    let mut uhat: Vec<Complex64> = u0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.process(&mut uhat);

    let cutoff = n as f64 / 3.0;
    let lin: Vec<f64> = (0..n)
        .map(|j| {
            let f = 2.0 * PI * wavenumber(j, n);
            -nu * f * f
        })
        .collect();
    let e_half: Vec<f64> = lin.iter().map(|l| (l * h / 2.0).exp()).collect();
    let e_full: Vec<f64> = lin.iter().map(|l| (l * h).exp()).collect();

    let initial = uhat.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let limit = 1e6 * initial.max(1e-12);

    let nonlinear = |what: &[Complex64], scratch: &mut Vec<Complex64>| -> Vec<Complex64> {
        scratch.clear();
        scratch.extend_from_slice(what);
        ifft.process(scratch);
        let inv_n = 1.0 / n as f64;
        for z in scratch.iter_mut() {
            let u = z.re * inv_n;
            *z = Complex64::new(0.5 * u * u, 0.0);
        }
        fft.process(scratch);
        (0..n)
            .map(|j| {
                let m = wavenumber(j, n);
                if m.abs() > cutoff {
                    Complex64::ZERO
                } else {
                    Complex64::new(0.0, -2.0 * PI * m) * scratch[j]
                }
            })
            .collect()
    };

    let mut scratch = Vec::with_capacity(n);
    for step in 0..steps {
        let k1 = nonlinear(&uhat, &mut scratch);
        let stage2: Vec<Complex64> = (0..n)
            .map(|j| e_half[j] * (uhat[j] + 0.5 * h * k1[j]))
            .collect();
        let k2 = nonlinear(&stage2, &mut scratch);
        let stage3: Vec<Complex64> = (0..n)
            .map(|j| e_half[j] * uhat[j] + 0.5 * h * k2[j])
            .collect();
        let k3 = nonlinear(&stage3, &mut scratch);
        let stage4: Vec<Complex64> = (0..n)
            .map(|j| e_full[j] * uhat[j] + h * e_half[j] * k3[j])
            .collect();
        let k4 = nonlinear(&stage4, &mut scratch);
        for j in 0..n {
            uhat[j] = e_full[j] * uhat[j]
                + h / 6.0 * (e_full[j] * k1[j] + 2.0 * e_half[j] * (k2[j] + k3[j]) + k4[j]);
        }
        if step % 50 == 49 || step + 1 == steps {
            // A plain max would skip NaNs and report a finite 0.0.
            let mut reached = 0.0f64;
            for z in &uhat {
                let v = z.norm();
                if !v.is_finite() {
                    reached = v;
                    break;
                }
                reached = reached.max(v);
            }
            if !reached.is_finite() || reached > limit {
                return Err(Error::UnstableStep { initial, reached });
            }
        }
    }

    ifft.process(&mut uhat);
    let inv_n = 1.0 / n as f64;
    Ok(uhat.into_iter().map(|z| z.re * inv_n).collect())
}

/// Integrates on max(4096, 16·n) points and decimates back to n. Requires a
/// power-of-two n so the strides line up.
pub fn solve_on_fine_grid(u0: &[f64], nu: f64, t_final: f64, dt: f64) -> Result<Vec<f64>> {
    let n = u0.len();
    if !n.is_power_of_two() || n < 4 {
        return Err(Error::BadResolution(format!("need a power-of-two length ≥ 4, got {n}")));
    }
    let fine = (16 * n).max(4096);
    let u0_fine = spectral_upsample(u0, fine)?;
    let u_fine = burgers_solve(&u0_fine, nu, t_final, dt)?;
    let stride = fine / n;
    Ok((0..n).map(|j| u_fine[j * stride]).collect())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DatasetMeta {
    pub n_samples: usize,
    pub resolution: usize,
    pub nu: f64,
    pub t_final: f64,
    pub seed: u64,
    pub grf: GrfSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub meta: DatasetMeta,
    /// Grid points x_j = j/resolution.
    pub grid: Vec<f64>,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub n_samples: usize,
    pub resolution: usize,
    pub nu: f64,
    pub t_final: f64,
    pub dt: f64,
    pub seed: u64,
    pub grf: GrfSpec,
}

impl DatasetSpec {
    pub fn new(n_samples: usize, resolution: usize, seed: u64) -> Self {
        DatasetSpec {
            n_samples,
            resolution,
            nu: 0.1,
            t_final: 1.0,
            dt: 1e-3,
            seed,
            grf: GrfSpec::default(),
        }
    }
}

pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / n as f64).collect()
}

/// Draws initial fields and integrates each one. Sample i uses stream i of
/// the seeded generator, so subsets are reproducible independently of order.
pub fn make_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    let mut inputs = Vec::with_capacity(spec.n_samples);
    let mut targets = Vec::with_capacity(spec.n_samples);
    for i in 0..spec.n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(i as u64);
        let u0 = grf_sample(spec.resolution, &spec.grf, &mut rng)?;
        let u1 = solve_on_fine_grid(&u0, spec.nu, spec.t_final, spec.dt)?;
        inputs.push(u0);
        targets.push(u1);
    }
    Ok(Dataset {
        meta: DatasetMeta {
            n_samples: spec.n_samples,
            resolution: spec.resolution,
            nu: spec.nu,
            t_final: spec.t_final,
            seed: spec.seed,
            grf: spec.grf.clone(),
        },
        grid: unit_grid(spec.resolution),
        inputs,
        targets,
    })
}

#[derive(serde::Serialize, serde::Deserialize)]
struct DatasetHeader {
    schema_version: u64,
    #[serde(flatten)]
    meta: DatasetMeta,
}

const DATASET_SCHEMA_VERSION: u64 = 1;

/// One JSON header line, then inputs, targets, and the grid as raw
/// little-endian f64, each row-major.
pub fn write_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    let header = DatasetHeader { schema_version: DATASET_SCHEMA_VERSION, meta: ds.meta.clone() };
    let mut line = serde_json::to_string(&header)
        .map_err(|e| Error::MalformedHeader(e.to_string()))?;
    line.push('\n');
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(line.as_bytes())?;
    let mut write_rows = |rows: &[Vec<f64>]| -> Result<()> {
        for row in rows {
            for v in row {
                file.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    };
    write_rows(&ds.inputs)?;
    write_rows(&ds.targets)?;
    for v in &ds.grid {
        file.write_all(&v.to_le_bytes())?;
    }
    file.flush()?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let mut reader = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    if line.is_empty() {
        return Err(Error::MalformedHeader("empty file".into()));
    }
    let header: DatasetHeader = serde_json::from_str(line.trim_end())
        .map_err(|e| Error::MalformedHeader(e.to_string()))?;
    if header.schema_version != DATASET_SCHEMA_VERSION {
        return Err(Error::MalformedHeader(format!(
            "unsupported dataset version {} (supported: {DATASET_SCHEMA_VERSION})",
            header.schema_version
        )));
    }
    let meta = header.meta;
    let expected = 2 * meta.n_samples * meta.resolution + meta.resolution;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != expected * 8 {
        return Err(Error::LengthMismatch { expected: expected * 8, got: bytes.len() });
    }
    let mut values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mut take_rows = |count: usize, width: usize| -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| (0..width).map(|_| values.next().unwrap()).collect())
            .collect()
    };
    let inputs = take_rows(meta.n_samples, meta.resolution);
    let targets = take_rows(meta.n_samples, meta.resolution);
    let grid: Vec<f64> = (0..meta.resolution).map(|_| values.next().unwrap()).collect();
    Ok(Dataset { meta, grid, inputs, targets })
}

/// Header u0_0..u0_{n−1},u_0..u_{n−1}; one row per sample; shortest
/// round-trip decimal formatting.
pub fn export_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let n = ds.meta.resolution;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    let mut header = String::new();
    for j in 0..n {
        header.push_str(&format!("u0_{j},"));
    }
    for j in 0..n {
        header.push_str(&format!("u_{j}"));
        if j + 1 < n {
            header.push(',');
        }
    }
    header.push('\n');
    file.write_all(header.as_bytes())?;
    for (u0, u1) in ds.inputs.iter().zip(&ds.targets) {
        let row: Vec<String> = u0.iter().chain(u1).map(|v| format!("{v}")).collect();
        file.write_all(row.join(",").as_bytes())?;
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

/// Rebuilds a dataset from [`export_csv`] output. Solver metadata is not
/// stored in CSV, so the meta fields other than counts are zeroed.
pub fn import_csv(path: &Path) -> Result<Dataset> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedHeader("empty file".into()))??;
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < 2 || cols.len() % 2 != 0 {
        return Err(Error::MalformedHeader(format!("expected 2n columns, got {}", cols.len())));
    }
    let n = cols.len() / 2;
    for j in 0..n {
        if cols[j] != format!("u0_{j}") || cols[n + j] != format!("u_{j}") {
            return Err(Error::MalformedHeader(format!(
                "unexpected column names near index {j}"
            )));
        }
    }
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    for (row_idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 2 * n {
            return Err(Error::MalformedDocument(format!(
                "row {row_idx}: expected {} fields, got {}",
                2 * n,
                fields.len()
            )));
        }
        let mut parsed = Vec::with_capacity(2 * n);
        for f in fields {
            parsed.push(f.parse::<f64>().map_err(|e| {
                Error::MalformedDocument(format!("row {row_idx}: bad number {f:?}: {e}"))
            })?);
        }
        inputs.push(parsed[..n].to_vec());
        targets.push(parsed[n..].to_vec());
    }
    Ok(Dataset {
        meta: DatasetMeta {
            n_samples: inputs.len(),
            resolution: n,
            nu: 0.0,
            t_final: 0.0,
            seed: 0,
            grf: GrfSpec { amplitude: 0.0, lambda: 0.0, decay: 0.0 },
        },
        grid: unit_grid(n),
        inputs,
        targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grf_is_deterministic_and_zero_mean() {
        let spec = GrfSpec::default();
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        let a = grf_sample(64, &spec, &mut r1).unwrap();
        let b = grf_sample(64, &spec, &mut r2).unwrap();
        assert_eq!(a, b);
        let mean = a.iter().sum::<f64>() / 64.0;
        assert!(mean.abs() < 1e-15);
        let mut r3 = ChaCha8Rng::seed_from_u64(4);
        let c = grf_sample(64, &spec, &mut r3).unwrap();
        assert!(a.iter().zip(&c).any(|(x, y)| (x - y).abs() > 1e-12));
    }

    #[test]
    fn grf_rejects_odd_or_tiny_lengths() {
        let spec = GrfSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(grf_sample(5, &spec, &mut rng).is_err());
        assert!(grf_sample(2, &spec, &mut rng).is_err());
    }

    #[test]
    fn upsample_reproduces_trig_polynomials() {
        let n = 16;
        let u: Vec<f64> = (0..n)
            .map(|j| {
                let x = j as f64 / n as f64;
                (2.0 * PI * x).sin() + 0.3 * (2.0 * PI * 3.0 * x).cos()
            })
            .collect();
        let fine = spectral_upsample(&u, 64).unwrap();
        for (j, v) in fine.iter().enumerate() {
            let x = j as f64 / 64.0;
            let want = (2.0 * PI * x).sin() + 0.3 * (2.0 * PI * 3.0 * x).cos();
            assert!((v - want).abs() < 1e-12, "point {j}");
        }
    }

    #[test]
    fn zero_initial_condition_stays_zero() {
        let u = burgers_solve(&vec![0.0; 64], 0.1, 0.5, 1e-3).unwrap();
        assert!(u.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn small_amplitude_matches_heat_decay() {
        // With a tiny amplitude the quadratic term is negligible and each
        // mode decays like exp(−ν(2πk)²t).
        let n = 64;
        let amp = 1e-6;
        let nu = 0.05;
        let t = 0.1;
        let u0: Vec<f64> = (0..n).map(|j| amp * (2.0 * PI * j as f64 / n as f64).sin()).collect();
        let u = burgers_solve(&u0, nu, t, 1e-3).unwrap();
        let decay = (-nu * 4.0 * PI * PI * t).exp();
        for (j, v) in u.iter().enumerate() {
            let want = amp * decay * (2.0 * PI * j as f64 / n as f64).sin();
            assert!((v - want).abs() < amp * 1e-6, "point {j}: {v} vs {want}");
        }
    }

    #[test]
    fn mean_is_conserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut u0 = grf_sample(128, &GrfSpec::default(), &mut rng).unwrap();
        for v in &mut u0 {
            *v += 0.25; // nonzero mean transports but must not change
        }
        let u = burgers_solve(&u0, 0.02, 0.3, 1e-3).unwrap();
        let m0 = u0.iter().sum::<f64>() / 128.0;
        let m1 = u.iter().sum::<f64>() / 128.0;
        assert!((m0 - m1).abs() < 1e-10);
    }

    #[test]
    fn oversized_time_step_is_flagged() {
        // dt far above the advective stability limit makes RK4 blow up.
        let n = 256;
        let u0: Vec<f64> = (0..n).map(|j| 5.0 * (2.0 * PI * j as f64 / n as f64).sin()).collect();
        let res = burgers_solve(&u0, 1e-4, 5.0, 5e-2);
        assert!(matches!(res, Err(Error::UnstableStep { .. })));
    }

    #[test]
    fn fine_grid_solution_is_decimated_consistently() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u0 = grf_sample(32, &GrfSpec::default(), &mut rng).unwrap();
        let coarse = solve_on_fine_grid(&u0, 0.1, 0.05, 1e-3).unwrap();
        assert_eq!(coarse.len(), 32);
        assert!(coarse.iter().all(|v| v.is_finite()));
        // Deterministic end to end.
        let again = solve_on_fine_grid(&u0, 0.1, 0.05, 1e-3).unwrap();
        assert_eq!(coarse, again);
    }

    #[test]
    fn dataset_binary_roundtrip_is_bit_identical() {
        let spec = DatasetSpec {
            t_final: 0.05,
            ..DatasetSpec::new(2, 32, 7)
        };
        let ds = make_dataset(&spec).unwrap();
        let path = std::env::temp_dir().join("qfno-test-dataset.bin");
        write_dataset(&ds, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(ds, back);
        // Writing again produces identical bytes.
        let bytes1 = std::fs::read(&path).unwrap();
        write_dataset(&back, &path).unwrap();
        let bytes2 = std::fs::read(&path).unwrap();
        assert_eq!(bytes1, bytes2);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn dataset_reader_rejects_bad_headers_and_sizes() {
        let path = std::env::temp_dir().join("qfno-test-badheader.bin");
        std::fs::write(&path, b"not json\n").unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::MalformedHeader(_))));
        std::fs::write(&path, b"").unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::MalformedHeader(_))));
        let spec = DatasetSpec { t_final: 0.01, ..DatasetSpec::new(1, 16, 1) };
        let ds = make_dataset(&spec).unwrap();
        write_dataset(&ds, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 8);
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::LengthMismatch { .. })));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_roundtrip_preserves_values() {
        let spec = DatasetSpec { t_final: 0.02, ..DatasetSpec::new(2, 16, 3) };
        let ds = make_dataset(&spec).unwrap();
        let path = std::env::temp_dir().join("qfno-test-dataset.csv");
        export_csv(&ds, &path).unwrap();
        let back = import_csv(&path).unwrap();
        assert_eq!(back.inputs, ds.inputs);
        assert_eq!(back.targets, ds.targets);
        assert_eq!(back.grid, ds.grid);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn csv_import_rejects_malformed_rows() {
        let path = std::env::temp_dir().join("qfno-test-badcsv.csv");
        std::fs::write(&path, "u0_0,u0_1,u_0,u_1\n1.0,2.0,3.0\n").unwrap();
        assert!(matches!(import_csv(&path), Err(Error::MalformedDocument(_))));
        std::fs::write(&path, "a,b,c,d\n1,2,3,4\n").unwrap();
        assert!(matches!(import_csv(&path), Err(Error::MalformedHeader(_))));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn make_dataset_streams_are_independent_of_count() {
        let spec2 = DatasetSpec { t_final: 0.01, ..DatasetSpec::new(2, 16, 5) };
        let spec3 = DatasetSpec { t_final: 0.01, ..DatasetSpec::new(3, 16, 5) };
        let d2 = make_dataset(&spec2).unwrap();
        let d3 = make_dataset(&spec3).unwrap();
        assert_eq!(d2.inputs[0], d3.inputs[0]);
        assert_eq!(d2.inputs[1], d3.inputs[1]);
    }
}
