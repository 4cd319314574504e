//! Range sweeps over (claim, prime, parameters) tasks with deterministic
//! output: tasks run in parallel, results are merged in ascending
//! (claim, p, params) order, so the emitted stream is byte-identical
//! across parallelism levels.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting;
use crate::modint::{primes_in, two_squares, ResidueTable};
use crate::quadfield::{class_number_imag, class_number_real, fundamental_unit};
use crate::verify::{self, Claim, VerifyReport};
use crate::Result;

/// Parameter enumeration policy for the `a` and `b` flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPolicy {
    /// Every value in `1..p`.
    All,
    /// `{1, 2, smallest non-residue, p-1}` extended to `n` values with a
    /// fixed-seed generator (deterministic per prime).
    Sample(usize),
}

impl std::str::FromStr for ParamPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "all" {
            return Ok(ParamPolicy::All);
        }
        if let Some(n) = s.strip_prefix("sample:") {
            let n: usize = n
                .parse()
                .map_err(|_| format!("bad sample size in {s:?}"))?;
            return Ok(ParamPolicy::Sample(n));
        }
        Err(format!("expected 'all' or 'sample:N', got {s:?}"))
    }
}

/// Which delta values to run for thm_1_3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaPolicy {
    One,
    Two,
    Both,
}

impl std::str::FromStr for DeltaPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "1" => Ok(DeltaPolicy::One),
            "2" => Ok(DeltaPolicy::Two),
            "both" => Ok(DeltaPolicy::Both),
            _ => Err(format!("expected '1', '2' or 'both', got {s:?}")),
        }
    }
}

impl DeltaPolicy {
    fn values(self) -> &'static [u64] {
        match self {
            DeltaPolicy::One => &[1],
            DeltaPolicy::Two => &[2],
            DeltaPolicy::Both => &[1, 2],
        }
    }
}

/// Deterministic parameter sample for a prime: the fixed base set
/// `{1, 2, smallest non-residue, p-1}`, extended with seeded pseudorandom
/// values when a larger sample is requested.
pub fn sample_params(p: u64, policy: ParamPolicy) -> Vec<u64> {
    match policy {
        ParamPolicy::All => (1..p).collect(),
        ParamPolicy::Sample(n) => {
            let table = ResidueTable::new(p).expect("sampling needs an odd prime");
            let non_residue = (2..p).find(|&q| table.chi(q as i64) == -1).unwrap_or(1);
            let mut picked = Vec::new();
            let mut seen = BTreeSet::new();
            for v in [1, 2 % p, non_residue, p - 1] {
                if picked.len() >= n {
                    break;
                }
                if v >= 1 && seen.insert(v) {
                    picked.push(v);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            while picked.len() < n && (seen.len() as u64) < p - 1 {
                let v = rng.gen_range(1..p);
                if seen.insert(v) {
                    picked.push(v);
                }
            }
            picked
        }
    }
}

/// One unit of verification work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub claim: Claim,
    pub p: u64,
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub delta: Option<u64>,
}

impl Task {
    fn run(&self) -> Result<VerifyReport> {
        let a = self.a.unwrap_or(1) as i64;
        match self.claim {
            Claim::Thm11I => verify::check_thm_1_1_i(self.p, a),
            Claim::Thm11II => verify::check_thm_1_1_ii(self.p, a),
            Claim::Plus3Mod4 => verify::check_plus_3mod4(self.p, a),
            Claim::Thm12 => verify::check_thm_1_2(self.p, a),
            Claim::Thm13 => verify::check_thm_1_3(self.p, self.delta.unwrap_or(1)),
            Claim::Thm31 => verify::check_thm_3_1(self.p, self.a.unwrap_or(1), self.b.unwrap_or(1)),
            Claim::Lem41 => verify::check_lem_4_1(self.p, a),
            Claim::Remark11 => verify::check_remark_1_1(self.p),
            Claim::Lem51 => verify::check_lem_5_1(self.p),
        }
    }
}

/// Sweep configuration shared by the CLI and the acceptance suite.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub claims: Vec<Claim>,
    pub pmin: u64,
    pub pmax: u64,
    pub a_policy: ParamPolicy,
    pub b_policy: ParamPolicy,
    pub delta: DeltaPolicy,
    pub jobs: Option<usize>,
    pub fail_fast: bool,
}

impl SweepConfig {
    pub fn new(claims: Vec<Claim>, pmin: u64, pmax: u64) -> Self {
        Self {
            claims,
            pmin,
            pmax,
            a_policy: ParamPolicy::Sample(4),
            b_policy: ParamPolicy::Sample(4),
            delta: DeltaPolicy::Both,
            jobs: None,
            fail_fast: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("claim {0} has no valid (p, params) task in the requested range")]
    EmptyClaim(Claim),
    #[error("check failed to run: {0}")]
    Check(#[from] crate::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Expands a configuration into its deterministic task list, ascending by
/// (claim, p, params). Errors if a requested claim matches nothing.
pub fn build_tasks(cfg: &SweepConfig) -> std::result::Result<Vec<Task>, SweepError> {
    let mut tasks = Vec::new();
    for &claim in &cfg.claims {
        let mut count = 0usize;
        for p in primes_in(cfg.pmin, cfg.pmax, None) {
            if !claim.admits(p) {
                continue;
            }
            let with = |a, b, delta| Task {
                claim,
                p,
                a,
                b,
                delta,
            };
            match claim {
                Claim::Thm11I | Claim::Thm11II | Claim::Plus3Mod4 | Claim::Thm12 | Claim::Lem41 => {
                    for a in sample_params(p, cfg.a_policy) {
                        tasks.push(with(Some(a), None, None));
                        count += 1;
                    }
                }
                Claim::Thm13 => {
                    for &delta in cfg.delta.values() {
                        if delta == 1 && p <= 3 {
                            continue;
                        }
                        tasks.push(with(None, None, Some(delta)));
                        count += 1;
                    }
                }
                Claim::Thm31 => {
                    for a in sample_params(p, cfg.a_policy) {
                        for b in sample_params(p, cfg.b_policy) {
                            tasks.push(with(Some(a), Some(b), None));
                            count += 1;
                        }
                    }
                }
                Claim::Remark11 | Claim::Lem51 => {
                    tasks.push(with(None, None, None));
                    count += 1;
                }
            }
        }
        if count == 0 {
            return Err(SweepError::EmptyClaim(claim));
        }
    }
    Ok(tasks)
}

/// Runs a sweep. Returns the reports sorted by (claim, p, params); with
/// `fail_fast` set, tasks not yet started when a failure lands are
/// skipped (output determinism is only guaranteed without it).
pub fn run_sweep(cfg: &SweepConfig) -> std::result::Result<Vec<VerifyReport>, SweepError> {
    let tasks = build_tasks(cfg)?;
    let failed = AtomicBool::new(false);
    let run_all = |tasks: &[Task]| -> Vec<Result<VerifyReport>> {
        tasks
            .par_iter()
            .filter_map(|t| {
                if cfg.fail_fast && failed.load(Ordering::Relaxed) {
                    return None;
                }
                let r = t.run();
                if matches!(&r, Ok(rep) if !rep.pass) {
                    failed.store(true, Ordering::Relaxed);
                }
                Some(r)
            })
            .collect()
    };
    let results = match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| run_all(&tasks)),
        None => run_all(&tasks),
    };
    let mut reports = results.into_iter().collect::<Result<Vec<_>>>()?;
    reports.sort_by(|x, y| (&x.claim, x.p, &x.params).cmp(&(&y.claim, y.p, &y.params)));
    Ok(reports)
}

/// Serializes reports as RFC 4180 CSV with a header row. The params map is
/// flattened to `k=v` pairs joined by `;`.
pub fn write_reports_csv<W: Write>(reports: &[VerifyReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["claim", "p", "params", "lhs", "rhs", "pass"])?;
    for r in reports {
        let params = r
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.claim.as_str(),
            &r.p.to_string(),
            &params,
            &r.lhs,
            &r.rhs,
            &r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Serializes reports as one JSON object per line.
pub fn write_reports_json<W: Write>(reports: &[VerifyReport], mut out: W) -> std::io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// One row of the `table` subcommand: per-prime summary quantities,
/// inapplicable cells empty.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TableRow {
    pub p: u64,
    pub p_mod_8: u64,
    pub s: u64,
    pub t: u64,
    pub h_imag: Option<u64>,
    pub h_real: Option<u64>,
    pub eps_a: Option<String>,
    pub eps_b: Option<String>,
    pub count_below_quarter: u64,
    pub x: Option<i64>,
    pub y: Option<i64>,
}

pub fn table_row(p: u64) -> Result<TableRow> {
    let mut row = TableRow {
        p,
        p_mod_8: p % 8,
        s: counting::s_count(p, 1)?,
        t: counting::t_count(p, 1)?,
        h_imag: None,
        h_real: None,
        eps_a: None,
        eps_b: None,
        count_below_quarter: counting::count_below_quarter(p, 1, -1)?,
        x: None,
        y: None,
    };
    if p % 4 == 1 {
        row.h_real = Some(class_number_real(p)?);
        let eps = fundamental_unit(p)?;
        let (a, b) = eps.parts();
        row.eps_a = Some(a.to_string());
        row.eps_b = Some(b.to_string());
        let (x, y) = two_squares(p)?;
        row.x = Some(x);
        row.y = Some(y);
    } else if p > 3 {
        row.h_imag = Some(class_number_imag(p)?);
    }
    Ok(row)
}

/// All table rows for odd primes in `[pmin, pmax]`, ascending, computed in
/// parallel.
pub fn table_rows(pmin: u64, pmax: u64, jobs: Option<usize>) -> std::result::Result<Vec<TableRow>, SweepError> {
    let primes = primes_in(pmin.max(3), pmax, None);
    let compute = || -> Result<Vec<TableRow>> {
        primes.par_iter().map(|&p| table_row(p)).collect()
    };
    let rows = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(compute),
        None => compute(),
    }?;
    Ok(rows)
}

pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "p",
        "p_mod_8",
        "s",
        "t",
        "h_imag",
        "h_real",
        "eps_a",
        "eps_b",
        "count_below_quarter",
        "x",
        "y",
    ])?;
    let opt = |v: &Option<String>| v.clone().unwrap_or_default();
    for r in rows {
        w.write_record([
            r.p.to_string(),
            r.p_mod_8.to_string(),
            r.s.to_string(),
            r.t.to_string(),
            r.h_imag.map(|v| v.to_string()).unwrap_or_default(),
            r.h_real.map(|v| v.to_string()).unwrap_or_default(),
            opt(&r.eps_a),
            opt(&r.eps_b),
            r.count_below_quarter.to_string(),
            r.x.map(|v| v.to_string()).unwrap_or_default(),
            r.y.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_json<W: Write>(rows: &[TableRow], mut out: W) -> std::io::Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_params_deterministic_and_seeded() {
        let s1 = sample_params(101, ParamPolicy::Sample(8));
        let s2 = sample_params(101, ParamPolicy::Sample(8));
        assert_eq!(s1, s2);
        assert_eq!(s1.len(), 8);
        // base set first: 1, 2, smallest non-residue, p-1
        assert_eq!(&s1[..2], &[1, 2]);
        assert!(s1.contains(&100));
        let all: Vec<u64> = sample_params(13, ParamPolicy::All);
        assert_eq!(all, (1..13).collect::<Vec<_>>());
    }

    #[test]
    fn sample_params_small_prime_saturates() {
        // p=5 has only 4 nonzero residues
        let s = sample_params(5, ParamPolicy::Sample(10));
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted, vec![1, 2, 3, 4]);
    }

    #[test]
    fn empty_claim_is_an_error() {
        // thm_1_3 with delta=1 needs p > 3
        let mut cfg = SweepConfig::new(vec![Claim::Thm13], 3, 3);
        cfg.delta = DeltaPolicy::One;
        assert!(matches!(
            build_tasks(&cfg),
            Err(SweepError::EmptyClaim(Claim::Thm13))
        ));
    }

    #[test]
    fn sweep_reports_sorted_and_passing() {
        let mut cfg = SweepConfig::new(vec![Claim::Thm12, Claim::Lem51], 5, 60);
        cfg.a_policy = ParamPolicy::Sample(3);
        let reports = run_sweep(&cfg).unwrap();
        assert!(reports.iter().all(|r| r.pass));
        let keys: Vec<_> = reports
            .iter()
            .map(|r| (r.claim.clone(), r.p, r.params.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn csv_json_schema_parity() {
        let cfg = SweepConfig::new(vec![Claim::Remark11], 5, 40);
        let reports = run_sweep(&cfg).unwrap();
        let mut csv_buf = Vec::new();
        write_reports_csv(&reports, &mut csv_buf).unwrap();
        let mut rdr = csv::Reader::from_reader(csv_buf.as_slice());
        let csv_rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();

        let mut json_buf = Vec::new();
        write_reports_json(&reports, &mut json_buf).unwrap();
        let json_rows: Vec<serde_json::Value> = String::from_utf8(json_buf)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();

        assert_eq!(csv_rows.len(), json_rows.len());
        for (c, j) in csv_rows.iter().zip(&json_rows) {
            assert_eq!(c[0], *j["claim"].as_str().unwrap());
            assert_eq!(c[1].parse::<u64>().unwrap(), j["p"].as_u64().unwrap());
            let flat = j["params"]
                .as_object()
                .unwrap()
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            assert_eq!(c[2], flat);
            assert_eq!(c[3], *j["lhs"].as_str().unwrap());
            assert_eq!(c[4], *j["rhs"].as_str().unwrap());
            assert_eq!(c[5].parse::<bool>().unwrap(), j["pass"].as_bool().unwrap());
        }
    }

    #[test]
    fn table_rows_fill_applicable_cells() {
        let rows = table_rows(5, 23, Some(2)).unwrap();
        let p13 = rows.iter().find(|r| r.p == 13).unwrap();
        assert_eq!(p13.eps_a.as_deref(), Some("3"));
        assert_eq!(p13.eps_b.as_deref(), Some("1"));
        assert_eq!(p13.h_real, Some(1));
        assert!(p13.h_imag.is_none());
        let p23 = rows.iter().find(|r| r.p == 23).unwrap();
        assert_eq!(p23.h_imag, Some(3));
        assert!(p23.eps_a.is_none());
        // p=3: neither class number applies
        let rows = table_rows(3, 3, None).unwrap();
        assert!(rows[0].h_imag.is_none() && rows[0].h_real.is_none());
    }
}
