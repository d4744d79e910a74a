//! Ingestion of external newform metadata: bundled Atkin-Lehner sign
//! vectors for the admissible quotient levels, plus an optional remote
//! catalog client with a disk cache.
//!
//! The acceptance path is offline-first: everything needed by the
//! integrality computation ships in `data/al_signs.tsv` with rows
//! `N M label q sign`, one row per prime `q | M`.  The remote client is
//! plumbing only; every failure mode there is non-fatal and falls back
//! to the bundled records.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::arith::{factorize, gcd};
use crate::cyclo_integrality::SignVector;
use crate::default_data_dir;

/// Where a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    /// Shipped in `data/al_signs.tsv`.
    Bundled,
    /// Fetched from the configured catalog endpoint.
    Remote,
}

/// One newform's Atkin-Lehner sign vector at level `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ALSignRecord {
    /// The quotient level carrying the newform.
    pub m_level: i64,
    /// Opaque newform label.
    pub label: String,
    /// Sign at each prime of `M`.
    pub signs: BTreeMap<i64, i32>,
    /// Provenance tag.
    pub source: Source,
}

impl ALSignRecord {
    /// View the record as a [`SignVector`] for the integrality machinery.
    pub fn sign_vector(&self) -> SignVector {
        SignVector {
            m_level: self.m_level,
            signs: self.signs.clone(),
        }
    }
}

/// Catalog errors.
#[derive(Debug, Error)]
pub enum CatalogError {
    /// No bundled data for this `(N, M)` pair.
    #[error("no bundled sign records for N = {0}, M = {1}")]
    MissingPair(i64, i64),
    /// Malformed TSV content.
    #[error("bad sign record at {0}:{1}: {2}")]
    Parse(String, usize, String),
    /// A record's sign map misses a prime of `M`.
    #[error("record {0} at level {1} misses the sign at prime {2}")]
    IncompleteSigns(String, i64, i64),
    /// A record violates the admissibility sign constraints for `(N, M)`.
    #[error("record {0} inadmissible for N = {1}, M = {2}: {3}")]
    Inadmissible(String, i64, i64, String),
    /// Underlying I/O failure.
    #[error("catalog I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// Parsed row of the bundled TSV, before grouping.
struct Row {
    n: i64,
    m: i64,
    label: String,
    q: i64,
    sign: i32,
}

fn parse_tsv(path: &Path) -> Result<Vec<Row>, CatalogError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let s = line.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let fields: Vec<&str> = s.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(CatalogError::Parse(name, i + 1, "expected 5 fields".into()));
        }
        let bad = |what: &str| CatalogError::Parse(name.clone(), i + 1, what.to_string());
        let n = fields[0].parse().map_err(|_| bad("level N"))?;
        let m = fields[1].parse().map_err(|_| bad("level M"))?;
        let q = fields[3].parse().map_err(|_| bad("prime q"))?;
        let sign: i32 = fields[4].parse().map_err(|_| bad("sign"))?;
        if !matches!(sign, 1 | -1) {
            return Err(bad("sign must be +1 or -1"));
        }
        rows.push(Row {
            n,
            m,
            label: fields[2].to_string(),
            q,
            sign,
        });
    }
    Ok(rows)
}

/// Check the admissibility sign constraints of the pair `(N, M)`:
/// the quotient must see eigenvalue `-1` at some prime of
/// `gcd(M, N/M)`, and when both `M` and `N/M` are even the sign at 2
/// is forced to `-1`.
fn check_admissible(n: i64, m: i64, rec: &ALSignRecord) -> Result<(), CatalogError> {
    let inner = gcd(m, n / m);
    let mut some_minus = false;
    for &(q, _) in &factorize(m).factors {
        let s = *rec.signs.get(&q).ok_or_else(|| {
            CatalogError::IncompleteSigns(rec.label.clone(), m, q)
        })?;
        if inner % q == 0 && s == -1 {
            some_minus = true;
        }
    }
    if inner > 1 && !some_minus {
        return Err(CatalogError::Inadmissible(
            rec.label.clone(),
            n,
            m,
            format!("no sign -1 at a prime of gcd(M, N/M) = {inner}"),
        ));
    }
    if (n / m) % 2 == 0 && m % 2 == 0 && rec.signs.get(&2) != Some(&-1) {
        return Err(CatalogError::Inadmissible(
            rec.label.clone(),
            n,
            m,
            "even degeneracy over even M forces sign -1 at 2".into(),
        ));
    }
    Ok(())
}

fn group_rows(rows: &[Row], n: i64, m: i64, source: Source) -> Vec<ALSignRecord> {
    let mut by_label: BTreeMap<String, BTreeMap<i64, i32>> = BTreeMap::new();
    for r in rows {
        if r.n == n && r.m == m {
            by_label.entry(r.label.clone()).or_default().insert(r.q, r.sign);
        }
    }
    by_label
        .into_iter()
        .map(|(label, signs)| ALSignRecord {
            m_level: m,
            label,
            signs,
            source,
        })
        .collect()
}

/// Load the bundled sign records for the pair `(N, M)` from the given
/// TSV file, verifying completeness and admissibility.
pub fn load_signs_from(path: &Path, n: i64, m: i64) -> Result<Vec<ALSignRecord>, CatalogError> {
    let rows = parse_tsv(path)?;
    let recs = group_rows(&rows, n, m, Source::Bundled);
    if recs.is_empty() {
        return Err(CatalogError::MissingPair(n, m));
    }
    for rec in &recs {
        check_admissible(n, m, rec)?;
    }
    Ok(recs)
}

/// Load the bundled sign records for `(N, M)` from the default data
/// directory.
pub fn load_signs(n: i64, m: i64) -> Result<Vec<ALSignRecord>, CatalogError> {
    load_signs_from(&default_data_dir().join("al_signs.tsv"), n, m)
}

/// Outcome of a (best-effort) remote fetch.
#[derive(Debug, Clone)]
pub struct FetchResult {
    /// Records for the requested level.
    pub records: Vec<ALSignRecord>,
    /// Non-fatal problems encountered along the way.
    pub warnings: Vec<String>,
}

/// Cache directory: `$STARCURVE_CACHE_DIR`, else `~/.cache/starcurve/`.
pub fn cache_dir() -> PathBuf {
    if let Ok(d) = std::env::var("STARCURVE_CACHE_DIR") {
        return PathBuf::from(d);
    }
    let home = std::env::var("HOME").unwrap_or_else(|_| ".".into());
    PathBuf::from(home).join(".cache").join("starcurve")
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Store fetched content under a content-addressed name, writing to a
/// temporary file and renaming so concurrent writers never expose a
/// partial file.
fn cache_store(dir: &Path, url: &str, content: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let key = fnv1a(format!("{url}\n{content}").as_bytes());
    let path = dir.join(format!("{key:016x}.tsv"));
    let tmp = dir.join(format!("{key:016x}.tsv.tmp.{}", std::process::id()));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Fetch sign records for level `M` from the catalog endpoint named by
/// `STARCURVE_CATALOG_URL`.  Never required by the acceptance path:
/// an unset endpoint, an unreachable one, or a malformed response all
/// degrade to the bundled data with a warning.
pub fn fetch_signs(m: i64) -> FetchResult {
    fetch_signs_from(std::env::var("STARCURVE_CATALOG_URL").ok().as_deref(), m, &cache_dir())
}

/// As [`fetch_signs`] with the endpoint and cache passed explicitly.
/// `file://` URLs and plain paths are read directly; network schemes
/// are reported as unreachable in this offline-first build.
pub fn fetch_signs_from(url: Option<&str>, m: i64, cache: &Path) -> FetchResult {
    let mut warnings = Vec::new();
    let bundled_fallback = |warnings: Vec<String>| {
        let path = default_data_dir().join("al_signs.tsv");
        let records = match parse_tsv(&path) {
            Ok(rows) => {
                let mut by_label: BTreeMap<String, BTreeMap<i64, i32>> = BTreeMap::new();
                for r in &rows {
                    if r.m == m {
                        by_label
                            .entry(r.label.clone())
                            .or_default()
                            .insert(r.q, r.sign);
                    }
                }
                by_label
                    .into_iter()
                    .map(|(label, signs)| ALSignRecord {
                        m_level: m,
                        label,
                        signs,
                        source: Source::Bundled,
                    })
                    .collect()
            }
            Err(_) => Vec::new(),
        };
        FetchResult { records, warnings }
    };
    let url = match url {
        Some(u) => u,
        None => {
            warnings.push("catalog endpoint unset; using bundled data".into());
            return bundled_fallback(warnings);
        }
    };
    let local = url.strip_prefix("file://").unwrap_or(url);
    if local.starts_with("http://") || local.starts_with("https://") {
        warnings.push(format!("endpoint {url} unreachable offline; using bundled data"));
        return bundled_fallback(warnings);
    }
    let content = match std::fs::read_to_string(local) {
        Ok(c) => c,
        Err(e) => {
            warnings.push(format!("fetch from {url} failed ({e}); using bundled data"));
            return bundled_fallback(warnings);
        }
    };
    if let Err(e) = cache_store(cache, url, &content) {
        warnings.push(format!("cache write failed ({e})"));
    }
    let rows = {
        // reuse the TSV parser via a temp path-independent route
        let mut parsed = Vec::new();
        let mut bad = None;
        for (i, line) in content.lines().enumerate() {
            let s = line.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            let fields: Vec<&str> = s.split_whitespace().collect();
            let ok = fields.len() == 5
                && fields[0].parse::<i64>().is_ok()
                && fields[1].parse::<i64>().is_ok()
                && fields[3].parse::<i64>().is_ok()
                && matches!(fields[4].parse::<i32>(), Ok(1) | Ok(-1));
            if !ok {
                bad = Some(i + 1);
                break;
            }
            parsed.push(Row {
                n: fields[0].parse().unwrap(),
                m: fields[1].parse().unwrap(),
                label: fields[2].to_string(),
                q: fields[3].parse().unwrap(),
                sign: fields[4].parse().unwrap(),
            });
        }
        match bad {
            Some(line) => {
                warnings.push(format!(
                    "malformed response from {url} at line {line}; using bundled data"
                ));
                return bundled_fallback(warnings);
            }
            None => parsed,
        }
    };
    let mut by_label: BTreeMap<String, BTreeMap<i64, i32>> = BTreeMap::new();
    for r in &rows {
        if r.m == m {
            by_label.entry(r.label.clone()).or_default().insert(r.q, r.sign);
        }
    }
    let mut records = Vec::new();
    for (label, signs) in by_label {
        // schema validation: complete sign maps only
        let complete = factorize(m)
            .factors
            .iter()
            .all(|&(q, _)| signs.contains_key(&q));
        if complete {
            records.push(ALSignRecord {
                m_level: m,
                label,
                signs,
                source: Source::Remote,
            });
        } else {
            warnings.push(format!("remote record {label} has an incomplete sign map"));
        }
    }
    if records.is_empty() {
        warnings.push(format!("no usable remote records for level {m}; using bundled data"));
        return bundled_fallback(warnings);
    }
    FetchResult { records, warnings }
}
