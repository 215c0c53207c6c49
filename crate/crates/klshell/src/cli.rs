//! Command-line front end: case/order/mesh selection, error-measure choice,
//! CSV convergence tables, a JSON summary with fitted slopes and probe
//! values, and optional VTK exports.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;

use crate::basis::GeometryMode;
use crate::benchmarks::{convergence_study, make_case, solve_case, ErrorMeasure, StudyReport};
use crate::{Error, Result};

/// Benchmark driver for the mixed-hybrid shell elements.
#[derive(Debug, Parser)]
#[command(name = "klshell", version, about)]
pub struct Cli {
    /// Benchmark case name(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub case: Vec<String>,
    /// Element orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<usize>,
    /// Mesh resolutions (elements per direction), comma separated, ascending.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Error measures: any of l2, res1, res2, bound, energy.
    #[arg(long, value_delimiter = ',')]
    pub errors: Vec<String>,
    /// Record the reference-point displacement.
    #[arg(long, default_value_t = false)]
    pub probe: bool,
    /// Geometry evaluation: iso (isoparametric) or exact (chart).
    #[arg(long)]
    pub geometry: Option<String>,
    /// Gauss points per direction (default p + 2).
    #[arg(long)]
    pub quad: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a VTK file per run.
    #[arg(long, default_value_t = false)]
    pub export_vtk: bool,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Flat key=value config file; flags override file entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub cases: Vec<String>,
    pub orders: Vec<usize>,
    pub meshes: Vec<usize>,
    pub errors: Vec<String>,
    pub probe: bool,
    pub geometry: String,
    pub quad: Option<usize>,
    pub out_dir: PathBuf,
    pub export_vtk: bool,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cases: vec!["extruded_arc".into()],
            orders: vec![2, 3],
            meshes: vec![2, 4, 8, 16],
            errors: vec!["l2".into()],
            probe: false,
            geometry: "iso".into(),
            quad: None,
            out_dir: PathBuf::from("out"),
            export_vtk: false,
            threads: 0,
        }
    }
}

impl RunConfig {
    pub fn geometry_mode(&self) -> Result<GeometryMode> {
        match self.geometry.as_str() {
            "iso" => Ok(GeometryMode::Isoparametric),
            "exact" => Ok(GeometryMode::ExactChart),
            other => Err(Error::Config(format!(
                "geometry must be 'iso' or 'exact', got '{other}'"
            ))),
        }
    }

    pub fn measures(&self) -> Result<Vec<ErrorMeasure>> {
        self.errors
            .iter()
            .map(|s| ErrorMeasure::parse(s))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        for c in &self.cases {
            make_case(c)?;
        }
        for &p in &self.orders {
            if p < 1 || p > crate::basis::MAX_ORDER {
                return Err(Error::Config(format!("order {p} out of range")));
            }
        }
        if self.meshes.is_empty() {
            return Err(Error::Config("mesh list is empty".into()));
        }
        if !self.meshes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("mesh list must be ascending".into()));
        }
        self.geometry_mode()?;
        self.measures()?;
        Ok(())
    }
}

/// Parses a flat `key = value` config file (comments with '#').
fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("{}:{}: expected key = value", path.display(), lineno + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| Error::Config(format!("bad list entry '{v}'")))
        })
        .collect()
}

/// Merges defaults, config file, and flags (flags win) into a validated
/// configuration.
pub fn parse_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let map = parse_config_file(path)?;
        for (k, v) in &map {
            match k.as_str() {
                "case" => cfg.cases = v.split(',').map(|s| s.trim().to_string()).collect(),
                "p" => cfg.orders = parse_list(v)?,
                "n" => cfg.meshes = parse_list(v)?,
                "errors" => cfg.errors = v.split(',').map(|s| s.trim().to_string()).collect(),
                "probe" => cfg.probe = v == "true" || v == "1",
                "geometry" => cfg.geometry = v.clone(),
                "quad" => cfg.quad = Some(v.parse().map_err(|_| Error::Config("bad quad".into()))?),
                "out" => cfg.out_dir = PathBuf::from(v),
                "export_vtk" => cfg.export_vtk = v == "true" || v == "1",
                "threads" => {
                    cfg.threads = v.parse().map_err(|_| Error::Config("bad threads".into()))?
                }
                other => {
                    return Err(Error::Config(format!("unknown config key '{other}'")));
                }
            }
        }
    }
    if !cli.case.is_empty() {
        cfg.cases = cli.case.clone();
    }
    if !cli.p.is_empty() {
        cfg.orders = cli.p.clone();
    }
    if !cli.n.is_empty() {
        cfg.meshes = cli.n.clone();
    }
    if !cli.errors.is_empty() {
        cfg.errors = cli.errors.clone();
    }
    if cli.probe {
        cfg.probe = true;
    }
    if let Some(g) = &cli.geometry {
        cfg.geometry = g.clone();
    }
    if cli.quad.is_some() {
        cfg.quad = cli.quad;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if cli.export_vtk {
        cfg.export_vtk = true;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct SummaryRun {
    case: String,
    p: usize,
    n: usize,
    h: f64,
    dofs_condensed: usize,
    dofs_uncondensed: usize,
    errors: BTreeMap<String, f64>,
    probe: Option<f64>,
    energy: f64,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct Summary {
    config: RunConfig,
    runs: Vec<SummaryRun>,
    slopes: BTreeMap<String, f64>,
    failures: Vec<String>,
}

/// Executes the configured study matrix, writing CSV tables, the JSON
/// summary, and optional VTK exports. Returns the number of failed runs.
pub fn run(cfg: &RunConfig) -> Result<usize> {
    fs::create_dir_all(&cfg.out_dir)?;
    let mode = cfg.geometry_mode()?;
    let measures = cfg.measures()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut summary = Summary {
        config: cfg.clone(),
        runs: Vec::new(),
        slopes: BTreeMap::new(),
        failures: Vec::new(),
    };

    for case_name in &cfg.cases {
        let case = make_case(case_name)?;
        let report: StudyReport = pool.install(|| {
            convergence_study(&case, &cfg.orders, &cfg.meshes, &measures, mode, cfg.quad)
        });
        for &p in &cfg.orders {
            let path = cfg.out_dir.join(format!("convergence_{case_name}_p{p}.csv"));
            write_csv(&path, &report, p)?;
        }
        for ((p, key), slope) in &report.slopes {
            summary
                .slopes
                .insert(format!("{case_name}/p{p}/{key}"), *slope);
        }
        for run in &report.runs {
            match run {
                Ok(r) => summary.runs.push(SummaryRun {
                    case: case_name.clone(),
                    p: r.order,
                    n: r.n,
                    h: r.h,
                    dofs_condensed: r.dofs_condensed,
                    dofs_uncondensed: r.dofs_uncondensed,
                    errors: r.errors.clone(),
                    probe: r.probe_value,
                    energy: r.energy,
                    wall_time_s: r.wall_time_s,
                }),
                Err(e) => summary.failures.push(format!("{case_name}: {e}")),
            }
        }
        if cfg.export_vtk {
            let p = *cfg.orders.last().unwrap();
            let n = *cfg.meshes.last().unwrap();
            if let Ok(solved) = pool.install(|| solve_case(&case, p, n, mode)) {
                let path = cfg.out_dir.join(format!("{case_name}_p{p}_n{n}.vtk"));
                crate::vtk::export_vtk(
                    &solved.mesh,
                    Some((&solved.solution, &solved.layout, case.material, mode)),
                    &path,
                )?;
            }
        }
    }

    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Config(format!("summary serialization: {e}")))?;
    fs::write(cfg.out_dir.join("summary.json"), json)?;
    Ok(summary.failures.len())
}

fn write_csv(path: &Path, report: &StudyReport, order: usize) -> Result<()> {
    let runs: Vec<_> = report
        .runs
        .iter()
        .flatten()
        .filter(|r| r.order == order)
        .collect();
    let mut keys: Vec<String> = Vec::new();
    for r in &runs {
        for k in r.errors.keys() {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    keys.sort();
    let mut out = String::new();
    out.push_str("n_elem,h,dofs_condensed,dofs_uncondensed");
    for k in &keys {
        out.push_str(&format!(",{k}"));
    }
    out.push_str(",probe,energy,wall_time_s\n");
    for r in &runs {
        out.push_str(&format!(
            "{},{:.12e},{},{}",
            r.n, r.h, r.dofs_condensed, r.dofs_uncondensed
        ));
        for k in &keys {
            match r.errors.get(k) {
                Some(v) => out.push_str(&format!(",{v:.12e}")),
                None => out.push(','),
            }
        }
        match r.probe_value {
            Some(v) => out.push_str(&format!(",{v:.12e}")),
            None => out.push(','),
        }
        out.push_str(&format!(",{:.12e},{:.6}\n", r.energy, r.wall_time_s));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_cli() -> Cli {
        Cli {
            case: vec![],
            p: vec![],
            n: vec![],
            errors: vec![],
            probe: false,
            geometry: None,
            quad: None,
            out: None,
            export_vtk: false,
            threads: None,
            config: None,
        }
    }

    #[test]
    fn defaults_applied_for_empty_config() {
        let cfg = parse_config(&empty_cli()).unwrap();
        assert_eq!(cfg.cases, vec!["extruded_arc".to_string()]);
        assert_eq!(cfg.orders, vec![2, 3]);
        assert_eq!(cfg.meshes, vec![2, 4, 8, 16]);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = std::env::temp_dir();
        let path = dir.join("klshell_test_config.txt");
        std::fs::write(&path, "p = 2\nn = 2, 4\ncase = flower\n# comment\n").unwrap();
        let mut cli = empty_cli();
        cli.config = Some(path.clone());
        cli.p = vec![4];
        let cfg = parse_config(&cli).unwrap();
        assert_eq!(cfg.orders, vec![4]); // flag wins
        assert_eq!(cfg.meshes, vec![2, 4]); // file value kept
        assert_eq!(cfg.cases, vec!["flower".to_string()]);
    }

    #[test]
    fn non_ascending_mesh_list_rejected() {
        let mut cli = empty_cli();
        cli.n = vec![8, 4];
        assert!(parse_config(&cli).is_err());
    }

    #[test]
    fn unknown_case_rejected() {
        let mut cli = empty_cli();
        cli.case = vec!["not_a_case".into()];
        assert!(parse_config(&cli).is_err());
    }

    #[test]
    fn unknown_error_measure_rejected() {
        let mut cli = empty_cli();
        cli.errors = vec!["l3".into()];
        assert!(parse_config(&cli).is_err());
    }
}
