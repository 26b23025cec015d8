//! Text formats: permutation files, connection-set files, certificates,
//! census and campaign reports, and the canonical-form cache.
//!
//! Everything is line-oriented plain text so certificates and reports stay
//! diffable and archivable. Report files carry no wall-clock data; reruns
//! with the same flags and seed are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ciforge_core::cayley::canonical_hex;
use ciforge_core::conjugator::{Certificate, CertificateStep, StepKind};
use ciforge_core::dci::{CampaignReport, CanonCache, CensusMode, CensusReport};
use ciforge_core::ea::FpVector;
use ciforge_core::group::PermutationGroup;
use ciforge_core::perm::{parse_perm_lines, Perm};

/// Read a file of `perm N: ...` lines as a generator list.
pub fn read_group_file(path: &Path) -> Result<PermutationGroup> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let gens = parse_perm_lines(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    if gens.is_empty() {
        bail!("{}: no permutations found", path.display());
    }
    let degree = gens[0].degree();
    PermutationGroup::from_generators(degree, gens).map_err(|e| anyhow!("{e}"))
}

/// Read a single permutation from a file (first non-comment line).
pub fn read_perm_file(path: &Path) -> Result<Perm> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let perms = parse_perm_lines(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    perms
        .into_iter()
        .next()
        .ok_or_else(|| anyhow!("{}: no permutation found", path.display()))
}

/// Parse a connection-set record: `set p n: m1 m2 ...` with ascending point
/// codes; members may also be written as `vec p n: c0,c1,...` records on
/// following lines.
pub fn parse_connection_set(text: &str) -> Result<(usize, usize, Vec<usize>)> {
    let mut header: Option<(usize, usize, Vec<usize>)> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("set ") {
            let (head, tail) = rest.split_once(':').ok_or_else(|| anyhow!("missing `:` in set record"))?;
            let mut it = head.split_whitespace();
            let p: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| anyhow!("bad p"))?;
            let n: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| anyhow!("bad n"))?;
            let members: Vec<usize> = tail
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| anyhow!("bad member `{t}`")))
                .collect::<Result<_>>()?;
            header = Some((p, n, members));
        } else if let Some((_, _, members)) = header.as_mut() {
            let v: FpVector = line.parse().map_err(|e| anyhow!("{e}"))?;
            members.push(v.to_point());
        } else {
            bail!("expected a `set p n: ...` record first");
        }
    }
    header.ok_or_else(|| anyhow!("no connection-set record found"))
}

pub fn read_connection_set_file(path: &Path) -> Result<(usize, usize, Vec<usize>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_connection_set(&text)
}

// ---------------------------------------------------------------------------
// certificates
// ---------------------------------------------------------------------------

pub fn certificate_to_text(cert: &Certificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "certificate {} {} {}", cert.p, cert.n, cert.seed);
    for (k, step) in cert.steps.iter().enumerate() {
        let _ = writeln!(out, "step {k} {} {}", step.kind.tag(), step.perm);
    }
    let _ = writeln!(out, "composite {}", cert.composite);
    let _ = writeln!(out, "verified: yes");
    out
}

pub fn certificate_from_text(text: &str) -> Result<Certificate> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| anyhow!("empty certificate"))?;
    let mut it = header.split_whitespace();
    if it.next() != Some("certificate") {
        bail!("expected `certificate p n seed` header");
    }
    let p: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| anyhow!("bad p"))?;
    let n: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| anyhow!("bad n"))?;
    let seed: u64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| anyhow!("bad seed"))?;

    let mut steps: Vec<CertificateStep> = Vec::new();
    let mut composite: Option<Perm> = None;
    let mut verified_line = false;
    for line in lines {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("step ") {
            let mut parts = rest.splitn(3, ' ');
            let _index: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| anyhow!("bad step index"))?;
            let tag = parts.next().ok_or_else(|| anyhow!("missing step tag"))?;
            let kind = StepKind::from_tag(tag).ok_or_else(|| anyhow!("unknown step tag `{tag}`"))?;
            let perm: Perm = parts
                .next()
                .ok_or_else(|| anyhow!("missing step permutation"))?
                .parse()
                .map_err(|e| anyhow!("{e}"))?;
            steps.push(CertificateStep {
                kind,
                perm,
                group_order_before: 0u32.into(),
                orbital_count_before: 0,
                verified_in_2closure: kind != StepKind::Sylow,
            });
        } else if let Some(rest) = line.strip_prefix("composite ") {
            composite = Some(rest.parse().map_err(|e| anyhow!("{e}"))?);
        } else if line.starts_with("verified:") {
            verified_line = true;
        } else {
            bail!("unexpected certificate line: `{line}`");
        }
    }
    let composite = composite.ok_or_else(|| anyhow!("missing composite line"))?;
    if !verified_line {
        bail!("missing `verified:` line");
    }
    Ok(Certificate { p, n, seed, steps, composite })
}

// ---------------------------------------------------------------------------
// census reports
// ---------------------------------------------------------------------------

pub fn census_report_to_text(report: &CensusReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ciforge census report");
    let mode = match report.mode {
        CensusMode::Exhaustive => "exhaustive".to_string(),
        CensusMode::Sampled { trials } => format!("sample trials={trials}"),
    };
    let _ = writeln!(
        out,
        "p {} n {} mode {} seed {} verify {}",
        report.p,
        report.n,
        mode,
        report.seed,
        if report.verified { "on" } else { "off" }
    );
    for line in &report.lines {
        let _ = writeln!(out, "size {}: orbits={} iso={}", line.size, line.orbits, line.iso_classes);
    }
    let _ = writeln!(out, "totals: orbits={} iso={}", report.orbit_total, report.iso_total);
    if let Some(b) = report.burnside {
        let _ = writeln!(out, "burnside: {b}");
    }
    if let Some((pass, fail, inconclusive)) = report.babai {
        let _ = writeln!(out, "babai: pass={pass} fail={fail} inconclusive={inconclusive}");
    }
    for failure in &report.failures {
        let _ = writeln!(out, "failure: {failure}");
    }
    let _ = writeln!(out, "dci: {}", if report.dci_holds { "ok" } else { "violated" });
    out
}

// ---------------------------------------------------------------------------
// campaign reports
// ---------------------------------------------------------------------------

pub struct TrialClassification {
    pub ok: usize,
    pub failed: usize,
    pub timed_out: usize,
}

pub fn campaign_report_to_text(
    report: &CampaignReport,
    kind: &str,
    timeout_secs: u64,
    per_trial_elapsed_ms: &[u128],
) -> (String, TrialClassification) {
    let mut out = String::new();
    let _ = writeln!(out, "ciforge campaign report");
    let _ = writeln!(
        out,
        "p {} n {} mode {} trials {} seed {} timeout-secs {}",
        report.p, report.n, kind, report.requested, report.seed, timeout_secs
    );
    let mut cls = TrialClassification { ok: 0, failed: 0, timed_out: 0 };
    for rec in &report.records {
        let elapsed = per_trial_elapsed_ms.get(rec.index).copied().unwrap_or(0);
        let timed_out = timeout_secs > 0 && elapsed > u128::from(timeout_secs) * 1000;
        let status = if !rec.ok {
            cls.failed += 1;
            "failed"
        } else if timed_out {
            cls.timed_out += 1;
            "timeout"
        } else {
            cls.ok += 1;
            "ok"
        };
        let steps: Vec<String> = rec
            .steps
            .iter()
            .map(|&(tag, nontrivial)| if nontrivial { format!("{tag}*") } else { tag.to_string() })
            .collect();
        let _ = write!(out, "trial {}: {status} steps {}", rec.index, steps.join(","));
        if let Some(err) = &rec.error {
            let _ = write!(out, " error {err}");
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "totals: ok={} failed={} timeout={}", cls.ok, cls.failed, cls.timed_out);
    (out, cls)
}

// ---------------------------------------------------------------------------
// canonical-form cache
// ---------------------------------------------------------------------------

/// Append-only cache file: one `mask-hex canon-hex` line per record. Reloads
/// tolerate a truncated final line, so interrupted runs resume cleanly.
pub struct FileCache {
    entries: std::collections::BTreeMap<u128, Vec<u8>>,
    appender: Option<std::io::BufWriter<fs::File>>,
}

impl FileCache {
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = std::collections::BTreeMap::new();
        if path.exists() {
            let text = fs::read_to_string(path)?;
            for line in text.lines() {
                let mut it = line.split_whitespace();
                let (Some(mask_hex), Some(canon)) = (it.next(), it.next()) else { continue };
                let Ok(mask) = u128::from_str_radix(mask_hex, 16) else { continue };
                if let Ok(bytes) = hex_to_bytes(canon) {
                    entries.insert(mask, bytes);
                }
            }
        }
        let file = fs::OpenOptions::new().create(true).append(true).open(path)?;
        Ok(FileCache { entries, appender: Some(std::io::BufWriter::new(file)) })
    }

    #[allow(dead_code)]
    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }
}

impl CanonCache for FileCache {
    fn get(&mut self, mask: u128) -> Option<Vec<u8>> {
        self.entries.get(&mask).cloned()
    }

    fn put(&mut self, mask: u128, form: &[u8]) {
        use std::io::Write;
        self.entries.insert(mask, form.to_vec());
        if let Some(w) = self.appender.as_mut() {
            let _ = writeln!(w, "{mask:x} {}", canonical_hex(form));
            let _ = w.flush();
        }
    }
}

fn hex_to_bytes(s: &str) -> Result<Vec<u8>> {
    if s.len() % 2 != 0 {
        bail!("odd hex length");
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).map_err(|e| anyhow!("{e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connection_set_parsing() {
        let (p, n, members) = parse_connection_set("set 2 2: 1 2\n").unwrap();
        assert_eq!((p, n), (2, 2));
        assert_eq!(members, vec![1, 2]);
        let (_, _, members) = parse_connection_set("set 3 2: 1\nvec 3 2: 2,1\n").unwrap();
        assert_eq!(members, vec![1, 5]);
        assert!(parse_connection_set("vec 2 2: 1,0\n").is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let text = "certificate 2 4 7\nstep 0 SYLOW perm 4: 0 1 2 3\nstep 1 C3_2 perm 4: 1 0 3 2\ncomposite perm 4: 1 0 3 2\nverified: yes\n";
        let cert = certificate_from_text(text).unwrap();
        assert_eq!(cert.steps.len(), 2);
        assert_eq!(cert.steps[1].kind, StepKind::Centralize);
        let out = certificate_to_text(&cert);
        assert_eq!(out, text);
    }

    #[test]
    fn bad_certificate_rejected() {
        assert!(certificate_from_text("certificate 2 4 7\nstep 0 NOPE perm 4: 0 1 2 3\n").is_err());
        assert!(certificate_from_text("certificate 2 4 7\nstep 0 SYLOW perm 4: 0 0 2 3\ncomposite perm 4: 0 1 2 3\nverified: yes").is_err());
    }
}
